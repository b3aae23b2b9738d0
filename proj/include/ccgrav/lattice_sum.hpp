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

#include <functional>

#include "ccgrav/lattice.hpp"

namespace ccgrav {

struct LatticeSumConfig {
  double radius = 60.0;      ///< truncation radius in units of a
  double tolerance = 1e-3;   ///< relative bound on the error estimate
};

struct LatticeSumResult {
  double value = 0.0;            ///< truncated sum plus continuum tail
  double truncated_sum = 0.0;
  double tail = 0.0;             ///< continuum integral outside the ball
  double tail_bound = 0.0;       ///< error estimate of `value`
  double radius = 0.0;
};

/// Sums `summand` over the infinite cubic lattice Z^3 (a = 1).
///
/// Points with |l - center| <= radius are summed shell by shell; the rest of
/// space is replaced by the continuum integral of the same summand. The error
/// estimate combines the spread between the result at `radius` and at a
/// smaller comparison radius with the spread between two tail quadrature
/// resolutions. The summand must decay at least as |l|^-4.
///
/// Throws ConvergenceError when tail_bound exceeds tolerance * |value|; the
/// caller is expected to retry with a larger radius.
LatticeSumResult lattice_sum(const std::function<double(const Vec3&)>& summand,
                             const Vec3& center, const LatticeSumConfig& config = {});

}  // namespace ccgrav
