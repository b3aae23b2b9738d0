// Copyright 2026 The ccgrav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace ccgrav {

/// SI constants (CODATA 2018).
struct PhysicalConstants {
  static constexpr double G = 6.67430e-11;           ///< m^3 kg^-1 s^-2
  static constexpr double hbar = 1.054571817e-34;    ///< J s
  static constexpr double amu = 1.66053906660e-27;   ///< kg
  static constexpr double earth_mass = 5.9722e24;    ///< kg
};

}  // namespace ccgrav
