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

#include "ccgrav/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ccgrav/errors.hpp"

namespace ccgrav {

using std::numbers::pi;

double distance(const IntVec3& x, const IntVec3& y) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = static_cast<double>(x[k]) - static_cast<double>(y[k]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

Vec3 to_real(const IntVec3& x) {
  return {static_cast<double>(x[0]), static_cast<double>(x[1]), static_cast<double>(x[2])};
}

LatticeSpec::LatticeSpec(int dimension, const std::array<int, 3>& extents, double spacing)
    : dimension_(dimension), spacing_(spacing), extents_(extents) {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("lattice spacing must be positive and finite");
  }
  for (int e : extents) {
    if (e < 1) throw InvalidArgument("lattice extents must be >= 1");
  }
  for (int k = 0; k < 3; ++k) origin_[k] = -(extents[k] - 1) / 2;
  coords_.reserve(static_cast<std::size_t>(extents[0]) * extents[1] * extents[2]);
  for (int ix = 0; ix < extents[0]; ++ix) {
    for (int iy = 0; iy < extents[1]; ++iy) {
      for (int iz = 0; iz < extents[2]; ++iz) {
        coords_.push_back({origin_[0] + ix, origin_[1] + iy, origin_[2] + iz});
      }
    }
  }
}

LatticeSpec LatticeSpec::chain(int sites, double spacing) {
  return LatticeSpec(1, {sites, 1, 1}, spacing);
}

LatticeSpec LatticeSpec::block(const std::array<int, 3>& extents, double spacing) {
  return LatticeSpec(3, extents, spacing);
}

double LatticeSpec::momentum_cutoff() const { return pi / spacing_; }

const IntVec3& LatticeSpec::coord(std::size_t site) const {
  if (site >= coords_.size()) throw InvalidArgument("site index out of range");
  return coords_[site];
}

std::optional<std::size_t> LatticeSpec::index_of(const IntVec3& c) const {
  std::array<int, 3> offset{};
  for (int k = 0; k < 3; ++k) {
    offset[k] = c[k] - origin_[k];
    if (offset[k] < 0 || offset[k] >= extents_[k]) return std::nullopt;
  }
  return static_cast<std::size_t>((offset[0] * extents_[1] + offset[1]) * extents_[2] + offset[2]);
}

double LatticeSpec::separation(std::size_t i, std::size_t j) const {
  return distance(coord(i), coord(j));
}

namespace {

// 1-D sinc mode centred at xj; hbar = 1 so p_c = pi / a.
double sinc_mode(double x, double xj, double a) {
  const double pc = pi / a;
  const double dx = x - xj;
  const double arg = pc * dx;
  if (std::abs(arg) < 1e-6) {
    // sin(t)/t = 1 - t^2/6 + ...
    return std::sqrt(pc / pi) * (1.0 - arg * arg / 6.0);
  }
  return std::sqrt(1.0 / (pi * pc)) * std::sin(arg) / dx;
}

// Integral of g(y) = 1/((y-j)(y-l)) and its oscillatory companion from Y to
// infinity, for the product sin(pi(y-j)) sin(pi(y-l)) / (pi^2 (y-j)(y-l)).
// Y lies beyond both j and l.
double sinc_product_tail(double Y, int j, int l) {
  const double sign = ((j + l) % 2 == 0) ? 1.0 : -1.0;
  const double yj = Y - j;
  const double yl = Y - l;
  const double smooth = (j == l) ? 1.0 / yj : std::log(yl / yj) / static_cast<double>(j - l);
  const double g = 1.0 / (yj * yl);
  const double dg = -(yj + yl) / (yj * yj * yl * yl);
  const double oscillatory =
      -std::sin(2.0 * pi * Y) * g / (2.0 * pi) - std::cos(2.0 * pi * Y) * dg / (4.0 * pi * pi);
  return sign * (smooth - oscillatory) / (2.0 * pi * pi);
}

double overlap_1d(int xj, int xl, double a, const OverlapConfig& config) {
  const double width = std::round(config.window);
  if (width < 1.0) throw InvalidArgument("overlap window must be at least one spacing");
  const int lo = std::min(xj, xl) - static_cast<int>(width);
  const int hi = std::max(xj, xl) + static_cast<int>(width);

  auto integrand = [&](double x) { return sinc_mode(x, a * xj, a) * sinc_mode(x, a * xl, a); };

  // One panel per lattice cell keeps each adaptive integration smooth.
  double body = 0.0;
  double error_sum = 0.0;
  for (int cell = lo; cell < hi; ++cell) {
    double err = 0.0;
    body += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, a * cell, a * (cell + 1), 12, config.tolerance * 1e-3, &err);
    error_sum += err;
  }
  if (error_sum > config.tolerance) {
    throw ConvergenceError("overlap quadrature did not converge: error estimate " +
                           std::to_string(error_sum));
  }
  // The integral is scale free in y = x / a.
  const double right = sinc_product_tail(static_cast<double>(hi), xj, xl);
  const double left = sinc_product_tail(static_cast<double>(-lo), -xj, -xl);
  return body + right + left;
}

}  // namespace

double mode_function(const LatticeSpec& lattice, std::size_t j, double x) {
  const double a = lattice.spacing();
  return sinc_mode(x, a * lattice.coord(j)[0], a);
}

double mode_function(const LatticeSpec& lattice, std::size_t j, const Vec3& x) {
  const double a = lattice.spacing();
  const IntVec3& c = lattice.coord(j);
  double value = 1.0;
  for (int k = 0; k < 3; ++k) value *= sinc_mode(x[k], a * c[k], a);
  return value;
}

double overlap(const LatticeSpec& lattice, std::size_t j, std::size_t l,
               const OverlapConfig& config) {
  const IntVec3& cj = lattice.coord(j);
  const IntVec3& cl = lattice.coord(l);
  double value = overlap_1d(cj[0], cl[0], lattice.spacing(), config);
  // Separable across axes; untouched axes of a chain contribute exactly 1.
  for (int k = 1; k < lattice.dimension(); ++k) {
    value *= overlap_1d(cj[k], cl[k], lattice.spacing(), config);
  }
  return value;
}

CouplingKernel::CouplingKernel(LatticeSpec lattice, double scale)
    : lattice_(std::move(lattice)), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("coupling scale must be positive and finite");
  }
}

double CouplingKernel::chi(std::size_t i, std::size_t j) const {
  const double a = lattice_.spacing();
  return -scale_ / (a * lattice_.separation(i, j) + a);
}

double CouplingKernel::softened_potential(std::size_t i, std::size_t j) const {
  if (i == j) throw InvalidArgument("softened potential excludes self-interaction (i == j)");
  return chi(i, j);  // hbar = 1
}

double chi_between(const IntVec3& x, const IntVec3& y, double scale) {
  return -scale / (distance(x, y) + 1.0);
}

}  // namespace ccgrav
