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

#include "ccgrav/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ccgrav/errors.hpp"

namespace ccgrav {

using std::numbers::pi;
using cd = std::complex<double>;

namespace {

void enumerate(std::size_t site, int remaining, Occupation& current, std::vector<Occupation>& out) {
  if (site + 1 == current.size()) {
    current[site] = remaining;
    out.push_back(current);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[site] = n;
    enumerate(site + 1, remaining - n, current, out);
  }
}

void check_site(const FockBasis& basis, std::size_t j) {
  if (j >= basis.num_sites()) throw InvalidArgument("site index out of range");
}

void check_lattice(const FockBasis& basis, const LatticeSpec& lattice) {
  if (basis.num_sites() != lattice.num_sites()) {
    throw InvalidArgument("Fock basis and lattice have different site counts");
  }
}

void check_axis(const LatticeSpec& lattice, int axis) {
  if (axis < 0 || axis >= lattice.dimension()) throw InvalidArgument("invalid momentum axis");
}

}  // namespace

FockBasis::FockBasis(std::size_t num_sites, int total_particles)
    : num_sites_(num_sites), total_particles_(total_particles) {
  if (num_sites == 0) throw InvalidArgument("Fock basis needs at least one site");
  if (total_particles < 0) throw InvalidArgument("particle number must be nonnegative");
  Occupation current(num_sites, 0);
  enumerate(0, total_particles, current, states_);
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occupation) const {
  auto it = index_.find(occupation);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

Region::Region(const LatticeSpec& lattice, std::vector<std::size_t> sites) : sites_(std::move(sites)) {
  if (sites_.empty()) throw InvalidArgument("region must be nonempty");
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
  if (sites_.back() >= lattice.num_sites()) throw InvalidArgument("region site outside lattice");
}

Region Region::all(const LatticeSpec& lattice) {
  std::vector<std::size_t> sites(lattice.num_sites());
  for (std::size_t i = 0; i < sites.size(); ++i) sites[i] = i;
  return Region(lattice, std::move(sites));
}

OperatorMatrix number_op(const FockBasis& basis, std::size_t j) {
  check_site(basis, j);
  const auto dim = static_cast<Eigen::Index>(basis.size());
  OperatorMatrix op{Eigen::MatrixXcd::Zero(dim, dim), "n_" + std::to_string(j)};
  for (Eigen::Index s = 0; s < dim; ++s) op.matrix(s, s) = basis.state(s)[j];
  return op;
}

OperatorMatrix hop_op(const FockBasis& basis, std::size_t j, std::size_t i) {
  check_site(basis, j);
  check_site(basis, i);
  if (i == j) {
    OperatorMatrix op = number_op(basis, j);
    op.label = "hop_" + std::to_string(j) + "_" + std::to_string(i);
    return op;
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  OperatorMatrix op{Eigen::MatrixXcd::Zero(dim, dim),
                    "hop_" + std::to_string(j) + "_" + std::to_string(i)};
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Occupation& from = basis.state(s);
    if (from[i] == 0) continue;
    Occupation to = from;
    to[i] -= 1;
    to[j] += 1;
    const auto t = static_cast<Eigen::Index>(*basis.index_of(to));
    op.matrix(t, s) = std::sqrt(static_cast<double>(from[i])) * std::sqrt(static_cast<double>(to[j]));
  }
  return op;
}

OperatorMatrix one_body_op(const FockBasis& basis, const Eigen::MatrixXcd& h, std::string label) {
  const auto L = static_cast<Eigen::Index>(basis.num_sites());
  if (h.rows() != L || h.cols() != L) throw InvalidArgument("one-body matrix has wrong size");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  OperatorMatrix op{Eigen::MatrixXcd::Zero(dim, dim), std::move(label)};
  for (Eigen::Index a = 0; a < L; ++a) {
    for (Eigen::Index b = 0; b < L; ++b) {
      if (h(a, b) == cd(0.0)) continue;
      op.matrix += h(a, b) * hop_op(basis, static_cast<std::size_t>(a), static_cast<std::size_t>(b)).matrix;
    }
  }
  return op;
}

OperatorMatrix interaction_hamiltonian(const FockBasis& basis, const CouplingKernel& kernel) {
  check_lattice(basis, kernel.lattice());
  const std::size_t L = basis.num_sites();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  OperatorMatrix op{Eigen::MatrixXcd::Zero(dim, dim), "V_a"};
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Occupation& n = basis.state(s);
    double energy = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      if (n[j] == 0) continue;
      for (std::size_t k = 0; k < L; ++k) {
        if (k != j) energy += kernel.chi(j, k) * n[j] * n[k];
      }
    }
    op.matrix(s, s) = energy;
  }
  return op;
}

OperatorMatrix kinetic_hamiltonian(const FockBasis& basis, const LatticeSpec& lattice, double mass) {
  check_lattice(basis, lattice);
  if (!(mass > 0.0)) throw InvalidArgument("mass must be positive");
  const auto L = static_cast<Eigen::Index>(lattice.num_sites());
  const double a = lattice.spacing();
  const auto& ext = lattice.extents();

  // Allowed integers n per axis: -(ceil(L/2) - 1) .. floor(L/2).
  std::array<std::vector<double>, 3> wavenumbers;
  for (int k = 0; k < 3; ++k) {
    for (int n = -((ext[k] + 1) / 2 - 1); n <= ext[k] / 2; ++n) {
      wavenumbers[k].push_back(2.0 * pi * n / (ext[k] * a));
    }
  }

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);
  for (double kx : wavenumbers[0]) {
    for (double ky : wavenumbers[1]) {
      for (double kz : wavenumbers[2]) {
        const double energy = (kx * kx + ky * ky + kz * kz) / (2.0 * mass);
        if (energy == 0.0) continue;
        for (Eigen::Index j = 0; j < L; ++j) {
          const auto& xj = lattice.coord(static_cast<std::size_t>(j));
          for (Eigen::Index l = 0; l < L; ++l) {
            const auto& xl = lattice.coord(static_cast<std::size_t>(l));
            const double phase =
                a * (kx * (xj[0] - xl[0]) + ky * (xj[1] - xl[1]) + kz * (xj[2] - xl[2]));
            h(j, l) += energy * std::polar(1.0, phase);
          }
        }
      }
    }
  }
  h /= static_cast<double>(L);
  return one_body_op(basis, h, "H_0");
}

std::complex<double> momentum_coefficient_1d(int delta, double a) {
  if (delta == 0) return 0.0;
  const double sign = (delta % 2 == 0) ? 1.0 : -1.0;
  return {0.0, sign / (delta * a)};
}

double momentum_sq_coefficient_1d(int delta, double a) {
  if (delta == 0) return pi * pi / (3.0 * a * a);
  const double sign = (delta % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * sign / (static_cast<double>(delta) * delta * a * a);
}

OperatorMatrix momentum_op(const FockBasis& basis, const LatticeSpec& lattice, const Region& region,
                           int axis) {
  check_lattice(basis, lattice);
  check_axis(lattice, axis);
  const auto L = static_cast<Eigen::Index>(lattice.num_sites());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);
  // h(j', j) multiplies a_{j'}^dagger a_j with offset x_j - x_{j'}.
  for (std::size_t jp : region.sites()) {
    for (std::size_t j : region.sites()) {
      const auto& cj = lattice.coord(j);
      const auto& cjp = lattice.coord(jp);
      bool aligned = true;
      for (int k = 0; k < 3; ++k) {
        if (k != axis && cj[k] != cjp[k]) aligned = false;
      }
      if (!aligned) continue;
      h(static_cast<Eigen::Index>(jp), static_cast<Eigen::Index>(j)) =
          momentum_coefficient_1d(cj[axis] - cjp[axis], lattice.spacing());
    }
  }
  return one_body_op(basis, h, "p_S_" + std::to_string(axis));
}

OperatorMatrix momentum_sq_op(const FockBasis& basis, const LatticeSpec& lattice,
                              const Region& region) {
  check_lattice(basis, lattice);
  const auto L = static_cast<Eigen::Index>(lattice.num_sites());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);
  for (std::size_t jp : region.sites()) {
    for (std::size_t j : region.sites()) {
      const auto& cj = lattice.coord(j);
      const auto& cjp = lattice.coord(jp);
      double value = 0.0;
      for (int axis = 0; axis < lattice.dimension(); ++axis) {
        bool aligned = true;
        for (int k = 0; k < 3; ++k) {
          if (k != axis && cj[k] != cjp[k]) aligned = false;
        }
        if (aligned) value += momentum_sq_coefficient_1d(cj[axis] - cjp[axis], lattice.spacing());
      }
      h(static_cast<Eigen::Index>(jp), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return one_body_op(basis, h, "p_S^2");
}

OperatorMatrix position_op(const FockBasis& basis, const LatticeSpec& lattice, const Region& region,
                           int axis) {
  check_lattice(basis, lattice);
  check_axis(lattice, axis);
  const auto L = static_cast<Eigen::Index>(lattice.num_sites());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(L, L);
  for (std::size_t j : region.sites()) {
    const auto idx = static_cast<Eigen::Index>(j);
    h(idx, idx) = lattice.spacing() * lattice.coord(j)[axis];
  }
  return one_body_op(basis, h, "x_S_" + std::to_string(axis));
}

nlohmann::json to_json(const OperatorMatrix& op) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < op.matrix.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < op.matrix.cols(); ++c) {
      row.push_back({op.matrix(r, c).real(), op.matrix(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return {{"label", op.label}, {"matrix", rows}};
}

}  // namespace ccgrav
