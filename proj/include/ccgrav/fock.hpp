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

#include <complex>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "ccgrav/lattice.hpp"

namespace ccgrav {

using Occupation = std::vector<int>;

/// Bosonic occupation basis of the sector with fixed total particle number.
///
/// States are ordered lexicographically descending, e.g. for two sites and
/// two particles: (2,0), (1,1), (0,2).
class FockBasis {
 public:
  FockBasis(std::size_t num_sites, int total_particles);

  std::size_t size() const { return states_.size(); }
  std::size_t num_sites() const { return num_sites_; }
  int total_particles() const { return total_particles_; }

  const Occupation& state(std::size_t index) const { return states_.at(index); }
  std::optional<std::size_t> index_of(const Occupation& occupation) const;

 private:
  std::size_t num_sites_;
  int total_particles_;
  std::vector<Occupation> states_;
  std::map<Occupation, std::size_t> index_;
};

/// Binomial coefficient C(n, k) as a double (exact for the sizes used here).
double binomial(int n, int k);

struct OperatorMatrix {
  Eigen::MatrixXcd matrix;
  std::string label;
};

/// Nonempty subset of lattice sites.
class Region {
 public:
  Region(const LatticeSpec& lattice, std::vector<std::size_t> sites);
  static Region all(const LatticeSpec& lattice);
  const std::vector<std::size_t>& sites() const { return sites_; }

 private:
  std::vector<std::size_t> sites_;
};

OperatorMatrix number_op(const FockBasis& basis, std::size_t j);

/// a_j^dagger a_i.
OperatorMatrix hop_op(const FockBasis& basis, std::size_t j, std::size_t i);

/// Second-quantised lift sum_{ab} h_ab a_a^dagger a_b of a one-body matrix.
OperatorMatrix one_body_op(const FockBasis& basis, const Eigen::MatrixXcd& h, std::string label);

/// hbar sum_{j != k} chi_jk n_j n_k; every unordered pair is counted twice.
OperatorMatrix interaction_hamiltonian(const FockBasis& basis, const CouplingKernel& kernel);

/// hbar^2 |k|^2 / 2m on the periodic reciprocal lattice k = 2 pi n / (L a).
OperatorMatrix kinetic_hamiltonian(const FockBasis& basis, const LatticeSpec& lattice, double mass);

/// Per-axis coefficient hbar (a / 2pi) * integral over [-pi/a, pi/a] of
/// k exp(-i k delta a) dk, for an integer offset delta.
std::complex<double> momentum_coefficient_1d(int delta, double a);

/// Same with k^2 weight; delta = 0 gives the zone average (pi/a)^2 / 3.
double momentum_sq_coefficient_1d(int delta, double a);

/// Net momentum component p_S along `axis` restricted to the region.
///
/// Normalisation: coefficient hbar (a/2pi)^d times the zone integral, which
/// makes [x_S, p_S] act as i hbar on band-limited states inside S.
OperatorMatrix momentum_op(const FockBasis& basis, const LatticeSpec& lattice, const Region& region,
                           int axis);

/// p_S^2 built from the |k|^2 zone integral (not the square of momentum_op).
OperatorMatrix momentum_sq_op(const FockBasis& basis, const LatticeSpec& lattice,
                              const Region& region);

/// x_S = sum_{j in S} x_j n_j along `axis`, in physical length units.
OperatorMatrix position_op(const FockBasis& basis, const LatticeSpec& lattice, const Region& region,
                           int axis);

/// Debug dump: array of rows, each entry a [re, im] pair.
nlohmann::json to_json(const OperatorMatrix& op);

}  // namespace ccgrav
