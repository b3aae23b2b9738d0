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

#include <cstddef>

#include "json.hpp"

#include "ccgrav/constants.hpp"
#include "ccgrav/dynamics.hpp"
#include "ccgrav/lattice.hpp"
#include "ccgrav/lattice_sum.hpp"

namespace ccgrav {

struct KappaResult {
  double kappa_sq = 0.0;
  double radius = 0.0;
  double tail_bound = 0.0;
  double separation = 0.0;  ///< |i - j| in units of a
};

/// kappa^2 between lattice points i and j of the infinite cubic lattice:
///   s^2 sum_l (d_il - d_jl)^2 / ((d_jl + 1)^2 (d_il + 1)^2),  d in units of a,
/// with s = G m^2 / (2 a hbar) supplied as `scale`. Every l is summed,
/// including l = i and l = j. Returns 0 for i == j.
KappaResult kappa_sq(const IntVec3& i, const IntVec3& j, const LatticeSumConfig& config = {},
                     double scale = 1.0);

/// The same sum restricted to a finite lattice, using the feedback
/// coefficients of the given convention: sum_l (chi'_li - chi'_lj)^2.
double kappa_sq_on_lattice(const CouplingKernel& kernel, std::size_t i, std::size_t j,
                           FeedbackConvention convention = FeedbackConvention::kExcludeSelf);

struct IntegralConfig {
  double tolerance = 1e-7;        ///< target relative accuracy of the fine pass
  double refinement_check = 1e-3; ///< max relative change between coarse and fine passes
};

struct IntegralResult {
  double value = 0.0;
  double coarse_value = 0.0;
  double error_estimate = 0.0;
};

/// Continuum counterpart of the kappa^2 sum at separation D (units of a):
///   I(D) = integral d^3u (|u - r_j| - |u - r_i|)^2 / ((1 + |u - r_j|)^2 (1 + |u - r_i|)^2).
/// Evaluated in cylindrical coordinates. Throws ConvergenceError when two
/// passes at different tolerances disagree by more than refinement_check.
IntegralResult integral_I(double D, const IntegralConfig& config = {});

/// pi^2 D / 2, the large-D lower bound of integral_I.
double asymptotic_lower_bound(double D);

/// xi + kappa^2 / (2 xi).
double dephasing_rate(double kappa_sq, double xi);

struct DephasingEstimate {
  double kappa_sq = 0.0;
  double xi_opt = 0.0;    ///< kappa / sqrt(2)
  double min_rate = 0.0;  ///< sqrt(2) kappa

  double rate_at(double xi) const { return dephasing_rate(kappa_sq, xi); }
};

DephasingEstimate optimal_xi(double kappa_sq);

/// Order-of-magnitude spatial dephasing rate (G m^2 / (2 a hbar)) sqrt(d / a),
/// SI units by default.
double min_dephasing_estimate(double m, double a, double d, double G = PhysicalConstants::G,
                              double hbar = PhysicalConstants::hbar);

/// Damping rate of a_j^dagger a_i on a finite lattice: xi + kappa_ij^2 / (2 xi).
double hopping_damping_rate(std::size_t i, std::size_t j, double xi, const CouplingKernel& kernel,
                            FeedbackConvention convention = FeedbackConvention::kExcludeSelf);

struct MomentumVariance {
  double quoted_prefactor = 0.0;    ///< (2 pi hbar / a)^2 n
  double zone_average = 0.0;       ///< hbar^2 (a / 2pi)^3 integral over the zone of |k|^2, times n
  double ratio = 0.0;              ///< quoted_prefactor / zone_average (NaN when n = 0)
  double quoted_energy = 0.0;       ///< quoted_prefactor / (2 m)
  double zone_energy = 0.0;        ///< zone_average / (2 m)
};

/// Asymptotic value of p_S^2 for n particles in the region after the
/// off-diagonal terms have decayed. Both the quoted (2 pi hbar / a)^2 prefactor
/// and the cubic-zone average are returned.
MomentumVariance momentum_variance_asymptote(double n, double a, double m, double hbar = 1.0);

/// Order-of-magnitude heating power G hbar M / a^3 (prefactor 1).
double heating_rate(double M, double a, double G = PhysicalConstants::G,
                    double hbar = PhysicalConstants::hbar);

nlohmann::json to_json(const KappaResult& result);
nlohmann::json to_json(const IntegralResult& result);
nlohmann::json to_json(const MomentumVariance& result);

}  // namespace ccgrav
