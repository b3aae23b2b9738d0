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

#include "ccgrav/bounds.hpp"

#include <cmath>

#include "ccgrav/errors.hpp"

namespace ccgrav {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidArgument(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

BoundReport interferometry_bound(double mass, double delta, double time) {
  require_positive(mass, "mass");
  require_positive(delta, "delta");
  require_positive(time, "time");
  constexpr double G = PhysicalConstants::G;
  constexpr double hbar = PhysicalConstants::hbar;
  const double base = G * mass * mass * std::sqrt(delta) * time / (2.0 * hbar);
  BoundReport report;
  report.a_min = std::pow(base, 2.0 / 3.0);
  report.formula = "interferometry: a = (G m^2 sqrt(delta) t / (2 hbar))^(2/3)";
  report.inputs = {{"mass_kg", mass}, {"delta_m", delta}, {"time_s", time}};
  report.trace = {{"G", G},
                  {"hbar", hbar},
                  {"base", base},
                  {"rate_at_a_min", G * mass * mass / (2.0 * report.a_min * hbar) *
                                        std::sqrt(delta / report.a_min)}};
  return report;
}

BoundReport heating_bound(double mass, double power) {
  require_positive(mass, "mass");
  require_positive(power, "power");
  constexpr double G = PhysicalConstants::G;
  constexpr double hbar = PhysicalConstants::hbar;
  const double base = G * mass * hbar / power;
  BoundReport report;
  report.a_min = std::cbrt(base);
  report.formula = "heating: a = (G M hbar / P)^(1/3)";
  report.inputs = {{"mass_kg", mass}, {"power_W", power}};
  report.trace = {{"G", G}, {"hbar", hbar}, {"base", base}};
  return report;
}

ExperimentScenario molecule_scenario() {
  return Interferometry{5000.0 * PhysicalConstants::amu, 0.5e-6, 1e-3};
}

ExperimentScenario rubidium_bec_scenario() { return HeatingLimit{1.44e-25, 1e-30}; }

ExperimentScenario earth_scenario() { return HeatingLimit{PhysicalConstants::earth_mass, 1e17}; }

BoundReport evaluate(const ExperimentScenario& scenario) {
  if (const auto* s = std::get_if<Interferometry>(&scenario)) {
    return interferometry_bound(s->mass, s->delta, s->time);
  }
  const auto& h = std::get<HeatingLimit>(scenario);
  return heating_bound(h.mass, h.power);
}

nlohmann::json to_json(const BoundReport& report) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [key, value] : report.inputs) inputs[key] = value;
  nlohmann::json trace = nlohmann::json::object();
  for (const auto& [key, value] : report.trace) trace[key] = value;
  return {{"a_min_m", report.a_min}, {"formula", report.formula}, {"inputs", inputs}, {"trace", trace}};
}

}  // namespace ccgrav
