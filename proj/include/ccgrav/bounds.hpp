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

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ccgrav/constants.hpp"

namespace ccgrav {

/// Matter-wave interference: mass m (kg), superposition distance delta (m),
/// observed coherence time t (s).
struct Interferometry {
  double mass = 0.0;
  double delta = 0.0;
  double time = 0.0;
};

/// Observed heating budget P (J/s) of a body of mass M (kg).
struct HeatingLimit {
  double mass = 0.0;
  double power = 0.0;
};

using ExperimentScenario = std::variant<Interferometry, HeatingLimit>;

struct BoundReport {
  double a_min = 0.0;  ///< lower bound on the cutoff length, m
  std::string formula;
  std::vector<std::pair<std::string, double>> inputs;
  std::vector<std::pair<std::string, double>> trace;
};

/// Solves (G m^2 / (2 a hbar)) sqrt(delta / a) t = 1 for a:
///   a = (G m^2 sqrt(delta) t / (2 hbar))^(2/3).
BoundReport interferometry_bound(double mass, double delta, double time);

/// Solves G hbar M / a^3 = P for a: a = (G M hbar / P)^(1/3).
BoundReport heating_bound(double mass, double power);

/// 5000 amu, 0.5 um, 1 ms.
ExperimentScenario molecule_scenario();
/// Rb-87 BEC atom: 1.44e-25 kg, 1e-30 J/s per atom.
ExperimentScenario rubidium_bec_scenario();
/// Earth mass against 1e17 J/s absorbed solar power.
ExperimentScenario earth_scenario();

BoundReport evaluate(const ExperimentScenario& scenario);

nlohmann::json to_json(const BoundReport& report);

}  // namespace ccgrav
