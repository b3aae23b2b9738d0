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

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace ccgrav {

/// Integer lattice coordinates in units of the spacing a.
using IntVec3 = std::array<int, 3>;
using Vec3 = std::array<double, 3>;

double distance(const IntVec3& x, const IntVec3& y);
Vec3 to_real(const IntVec3& x);

/// Rectangular block of lattice sites centred at the origin.
///
/// Internal units are hbar = 1 and a = spacing (1 by default); the SI value of
/// a only travels along as metadata for reporting. Sites are indexed
/// row-major over (x, y, z) with x slowest.
class LatticeSpec {
 public:
  /// 1-D chain of `sites` sites along x.
  static LatticeSpec chain(int sites, double spacing = 1.0);
  /// 3-D block; extents must all be >= 1.
  static LatticeSpec block(const std::array<int, 3>& extents, double spacing = 1.0);

  int dimension() const { return dimension_; }
  double spacing() const { return spacing_; }
  const std::array<int, 3>& extents() const { return extents_; }
  std::size_t num_sites() const { return coords_.size(); }

  /// Momentum cutoff p_c = pi hbar / a (hbar = 1).
  double momentum_cutoff() const;

  const IntVec3& coord(std::size_t site) const;
  std::optional<std::size_t> index_of(const IntVec3& c) const;
  /// Euclidean distance between two sites, in units of a (not multiplied by a).
  double separation(std::size_t i, std::size_t j) const;

  std::optional<double> spacing_si_m;

  bool operator==(const LatticeSpec& other) const {
    return dimension_ == other.dimension_ && spacing_ == other.spacing_ &&
           extents_ == other.extents_;
  }

 private:
  LatticeSpec(int dimension, const std::array<int, 3>& extents, double spacing);

  int dimension_;
  double spacing_;
  std::array<int, 3> extents_;
  std::array<int, 3> origin_;
  std::vector<IntVec3> coords_;
};

/// Sinc mode function f_j(x) of the 1-D discrete variable representation,
/// sqrt(hbar/(pi p_c)) sin(p_c (x - x_j)/hbar)/(x - x_j). Uses the x
/// coordinate of site j; the removable singularity at x = x_j is handled.
double mode_function(const LatticeSpec& lattice, std::size_t j, double x);

/// 3-D mode function as a product of per-axis 1-D sincs.
double mode_function(const LatticeSpec& lattice, std::size_t j, const Vec3& x);

struct OverlapConfig {
  double window = 50.0;        ///< extra range on each side, in units of a
  double tolerance = 1e-8;     ///< refinement tolerance of the quadrature
};

/// Numerical overlap integral of f_j f_l along x. Returns a value to compare
/// with the Kronecker delta. Throws ConvergenceError if the adaptive
/// quadrature cannot meet the tolerance.
double overlap(const LatticeSpec& lattice, std::size_t j, std::size_t l,
               const OverlapConfig& config = {});

/// Softened Newtonian coupling chi_ij = -s / (d_ij + a), with s = G m^2 / (2 hbar).
class CouplingKernel {
 public:
  explicit CouplingKernel(LatticeSpec lattice, double scale = 1.0);

  const LatticeSpec& lattice() const { return lattice_; }
  double scale() const { return scale_; }

  /// Defined for i == j as well (-s/a); callers decide whether to use it.
  double chi(std::size_t i, std::size_t j) const;

  /// Pair potential hbar chi_ij = -G m^2 / (2 (d_ij + a)); rejects i == j.
  double softened_potential(std::size_t i, std::size_t j) const;

 private:
  LatticeSpec lattice_;
  double scale_;
};

/// chi for arbitrary lattice coordinates in units where a = 1.
double chi_between(const IntVec3& x, const IntVec3& y, double scale = 1.0);

}  // namespace ccgrav
