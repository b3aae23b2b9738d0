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

#include "ccgrav/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ccgrav/errors.hpp"
#include "ccgrav/fock.hpp"

namespace ccgrav {

using std::numbers::pi;

KappaResult kappa_sq(const IntVec3& i, const IntVec3& j, const LatticeSumConfig& config, double scale) {
  KappaResult result;
  result.separation = distance(i, j);
  result.radius = config.radius;
  if (i == j) return result;

  const Vec3 ri = to_real(i);
  const Vec3 rj = to_real(j);
  auto summand = [&](const Vec3& u) {
    double di = 0.0;
    double dj = 0.0;
    for (int k = 0; k < 3; ++k) {
      di += (u[k] - ri[k]) * (u[k] - ri[k]);
      dj += (u[k] - rj[k]) * (u[k] - rj[k]);
    }
    di = std::sqrt(di);
    dj = std::sqrt(dj);
    const double q = (di - dj) / ((dj + 1.0) * (di + 1.0));
    return q * q;
  };
  Vec3 center;
  for (int k = 0; k < 3; ++k) center[k] = std::round(0.5 * (ri[k] + rj[k]));
  const LatticeSumResult sum = lattice_sum(summand, center, config);
  result.kappa_sq = scale * scale * sum.value;
  result.tail_bound = scale * scale * sum.tail_bound;
  return result;
}

double kappa_sq_on_lattice(const CouplingKernel& kernel, std::size_t i, std::size_t j,
                           FeedbackConvention convention) {
  const std::size_t L = kernel.lattice().num_sites();
  if (i >= L || j >= L) throw InvalidArgument("site index out of range");
  auto chi = [&](std::size_t l, std::size_t k) {
    if (l == k && convention == FeedbackConvention::kExcludeSelf) return 0.0;
    return kernel.chi(l, k);
  };
  double total = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    const double d = chi(l, i) - chi(l, j);
    total += d * d;
  }
  return total;
}

namespace {

// 4 pi times the quarter-plane integral; the integrand is even in z.
double cylindrical_integral(double D, double tolerance, double* error) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  constexpr unsigned kDepth = 15;
  const double h = 0.5 * D;
  const double L = std::max(1.0, h);

  auto integrand = [&](double r, double z) {
    const double r1 = std::hypot(r, z - h);
    const double r2 = std::hypot(r, z + h);
    // r1 - r2 written without cancellation.
    const double diff = -2.0 * z * D / (r1 + r2);
    const double q = diff / ((1.0 + r1) * (1.0 + r2));
    return r * q * q;
  };

  double inner_error_sum = 0.0;
  auto over_z = [&](double r) {
    double e1 = 0.0;
    double e2 = 0.0;
    const double near = Rule::integrate([&](double z) { return integrand(r, z); }, 0.0, h, kDepth,
                                        tolerance, &e1);
    const double far = Rule::integrate(
        [&](double t) {
          if (t >= 1.0) return 0.0;
          const double s = 1.0 - t;
          return integrand(r, h + L * t / s) * L / (s * s);
        },
        0.0, 1.0, kDepth, tolerance, &e2);
    inner_error_sum = std::max(inner_error_sum, std::abs(e1 * near) + std::abs(e2 * far));
    return near + far;
  };
  double outer_error = 0.0;
  const double value = Rule::integrate(
      [&](double u) {
        if (u >= 1.0) return 0.0;
        const double s = 1.0 - u;
        return over_z(L * u / s) * L / (s * s);
      },
      0.0, 1.0, kDepth, tolerance, &outer_error);
  if (error != nullptr) *error = outer_error;
  return 4.0 * pi * value;
}

}  // namespace

IntegralResult integral_I(double D, const IntegralConfig& config) {
  if (!(D > 0.0) || !std::isfinite(D)) throw InvalidArgument("separation D must be positive");
  if (!(config.tolerance > 0.0) || !(config.refinement_check > 0.0)) {
    throw InvalidArgument("quadrature tolerances must be positive");
  }
  IntegralResult result;
  double error = 0.0;
  result.coarse_value = cylindrical_integral(D, std::sqrt(config.tolerance) * 0.1, nullptr);
  result.value = cylindrical_integral(D, config.tolerance, &error);
  result.error_estimate = std::abs(result.value - result.coarse_value);
  if (!std::isfinite(result.value) ||
      result.error_estimate > config.refinement_check * std::abs(result.value)) {
    throw ConvergenceError("integral_I(" + std::to_string(D) + ") did not converge: refinement changed " +
                           "the result by " + std::to_string(result.error_estimate));
  }
  return result;
}

double asymptotic_lower_bound(double D) {
  if (!(D > 0.0)) throw InvalidArgument("separation D must be positive");
  return 0.5 * pi * pi * D;
}

double dephasing_rate(double kappa_sq, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidArgument("xi must be positive and finite");
  if (!(kappa_sq >= 0.0)) throw InvalidArgument("kappa^2 must be nonnegative");
  return xi + kappa_sq / (2.0 * xi);
}

DephasingEstimate optimal_xi(double kappa_sq) {
  if (!(kappa_sq >= 0.0)) throw InvalidArgument("kappa^2 must be nonnegative");
  DephasingEstimate estimate;
  estimate.kappa_sq = kappa_sq;
  const double kappa = std::sqrt(kappa_sq);
  estimate.xi_opt = kappa / std::numbers::sqrt2;
  estimate.min_rate = std::numbers::sqrt2 * kappa;
  return estimate;
}

double min_dephasing_estimate(double m, double a, double d, double G, double hbar) {
  if (!(m > 0.0 && a > 0.0 && d > 0.0 && G > 0.0 && hbar > 0.0)) {
    throw InvalidArgument("mass, lengths and constants must be positive");
  }
  return G * m * m / (2.0 * a * hbar) * std::sqrt(d / a);
}

double hopping_damping_rate(std::size_t i, std::size_t j, double xi, const CouplingKernel& kernel,
                            FeedbackConvention convention) {
  if (i == j) throw InvalidArgument("hopping damping needs i != j");
  return dephasing_rate(kappa_sq_on_lattice(kernel, i, j, convention), xi);
}

MomentumVariance momentum_variance_asymptote(double n, double a, double m, double hbar) {
  if (!(n >= 0.0)) throw InvalidArgument("particle count must be nonnegative");
  if (!(a > 0.0 && m > 0.0 && hbar > 0.0)) throw InvalidArgument("a, m and hbar must be positive");
  MomentumVariance result;
  const double p = 2.0 * pi * hbar / a;
  result.quoted_prefactor = p * p * n;
  // Separable zone: three identical per-axis averages of k^2.
  result.zone_average = hbar * hbar * 3.0 * momentum_sq_coefficient_1d(0, a) * n;
  result.ratio = n > 0.0 ? result.quoted_prefactor / result.zone_average
                         : std::numeric_limits<double>::quiet_NaN();
  result.quoted_energy = result.quoted_prefactor / (2.0 * m);
  result.zone_energy = result.zone_average / (2.0 * m);
  return result;
}

double heating_rate(double M, double a, double G, double hbar) {
  if (!(M > 0.0 && a > 0.0 && G > 0.0 && hbar > 0.0)) {
    throw InvalidArgument("mass, length and constants must be positive");
  }
  return G * hbar * M / (a * a * a);
}

nlohmann::json to_json(const KappaResult& result) {
  return {{"kappa_sq", result.kappa_sq},
          {"radius", result.radius},
          {"tail_bound", result.tail_bound},
          {"separation", result.separation}};
}

nlohmann::json to_json(const IntegralResult& result) {
  return {{"value", result.value},
          {"coarse_value", result.coarse_value},
          {"error_estimate", result.error_estimate}};
}

nlohmann::json to_json(const MomentumVariance& result) {
  nlohmann::json j = {{"quoted_prefactor", result.quoted_prefactor},
                      {"zone_average", result.zone_average},
                      {"quoted_energy", result.quoted_energy},
                      {"zone_energy", result.zone_energy}};
  j["ratio"] = std::isfinite(result.ratio) ? nlohmann::json(result.ratio) : nlohmann::json(nullptr);
  return j;
}

}  // namespace ccgrav
