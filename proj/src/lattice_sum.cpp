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

#include "ccgrav/lattice_sum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "ccgrav/errors.hpp"

namespace ccgrav {

namespace {

constexpr double kComparisonFraction = 0.85;

// Integral of f over |u - c| > R in spherical coordinates around c, with the
// radial variable mapped by rho = R / t onto t in (0, 1].
template <int N>
double exterior_integral(const std::function<double(const Vec3&)>& f, const Vec3& c,
                         double R, int azimuth_points) {
  using boost::math::quadrature::gauss;
  const double dphi = 2.0 * std::numbers::pi / azimuth_points;
  auto over_t = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double rho = R / t;
    const double jacobian = R * R * R / (t * t * t * t);
    auto over_mu = [&](double mu) {
      const double sin_theta = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      double ring = 0.0;
      for (int k = 0; k < azimuth_points; ++k) {
        const double phi = (k + 0.5) * dphi;
        const Vec3 u{c[0] + rho * sin_theta * std::cos(phi), c[1] + rho * sin_theta * std::sin(phi),
                     c[2] + rho * mu};
        ring += f(u);
      }
      return ring * dphi;
    };
    return jacobian * gauss<double, N>::integrate(over_mu, -1.0, 1.0);
  };
  return gauss<double, N>::integrate(over_t, 0.0, 1.0);
}

}  // namespace

LatticeSumResult lattice_sum(const std::function<double(const Vec3&)>& summand,
                             const Vec3& center, const LatticeSumConfig& config) {
  const double R = config.radius;
  if (!(R >= 2.0) || !std::isfinite(R)) throw InvalidArgument("lattice sum radius must be >= 2");
  if (!(config.tolerance > 0.0)) throw InvalidArgument("lattice sum tolerance must be positive");

  const double R_inner = kComparisonFraction * R;
  const double R2 = R * R;
  const double R_inner2 = R_inner * R_inner;

  // Shell k collects points with k <= |l - c| < k + 1; summed outermost first.
  std::vector<double> shells(static_cast<std::size_t>(R) + 1, 0.0);
  std::vector<double> inner_shells(shells.size(), 0.0);

  const int lo[3] = {static_cast<int>(std::floor(center[0] - R)),
                     static_cast<int>(std::floor(center[1] - R)),
                     static_cast<int>(std::floor(center[2] - R))};
  const int hi[3] = {static_cast<int>(std::ceil(center[0] + R)),
                     static_cast<int>(std::ceil(center[1] + R)),
                     static_cast<int>(std::ceil(center[2] + R))};
  for (int x = lo[0]; x <= hi[0]; ++x) {
    const double dx = x - center[0];
    for (int y = lo[1]; y <= hi[1]; ++y) {
      const double dy = y - center[1];
      const double dxy2 = dx * dx + dy * dy;
      if (dxy2 > R2) continue;
      for (int z = lo[2]; z <= hi[2]; ++z) {
        const double dz = z - center[2];
        const double r2 = dxy2 + dz * dz;
        if (r2 > R2) continue;
        const double value = summand(Vec3{double(x), double(y), double(z)});
        const auto shell = static_cast<std::size_t>(std::sqrt(r2));
        shells[shell] += value;
        if (r2 <= R_inner2) inner_shells[shell] += value;
      }
    }
  }
  double sum = 0.0;
  double inner_sum = 0.0;
  for (std::size_t k = shells.size(); k-- > 0;) {
    sum += shells[k];
    inner_sum += inner_shells[k];
  }

  const double tail = exterior_integral<40>(summand, center, R, 48);
  const double tail_coarse = exterior_integral<20>(summand, center, R, 24);
  const double inner_tail = exterior_integral<40>(summand, center, R_inner, 48);

  LatticeSumResult result;
  result.truncated_sum = sum;
  result.tail = tail;
  result.value = sum + tail;
  result.radius = R;
  result.tail_bound = std::abs(result.value - (inner_sum + inner_tail)) + std::abs(tail - tail_coarse);

  if (result.tail_bound > config.tolerance * std::abs(result.value)) {
    throw ConvergenceError("lattice sum not converged at radius " + std::to_string(R) +
                           ": error estimate " + std::to_string(result.tail_bound) +
                           " exceeds tolerance for value " + std::to_string(result.value));
  }
  return result;
}

}  // namespace ccgrav
