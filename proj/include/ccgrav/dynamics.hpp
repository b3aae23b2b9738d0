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
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccgrav/fock.hpp"
#include "ccgrav/lattice.hpp"
#include "ccgrav/lattice_sum.hpp"

namespace ccgrav {

/// Which couplings enter the feedback operator O_j = sum_k chi'_jk n_k.
enum class FeedbackConvention {
  kExcludeSelf,  ///< chi'_jj = 0: force is fed back only to other sites
  kIncludeSelf,  ///< chi'_jj = -s/a: reproduces the all-l lattice sums term by term
};

/// Truncated harmonic oscillator used as the measurement ancilla.
/// X = (b + b^dagger)/sqrt(2), P = i (b^dagger - b)/sqrt(2).
class AncillaOscillator {
 public:
  explicit AncillaOscillator(int levels = 24);

  int levels() const { return levels_; }
  const Eigen::MatrixXcd& X() const { return x_; }
  const Eigen::MatrixXcd& P() const { return p_; }
  Eigen::VectorXcd vacuum() const;

 private:
  int levels_;
  Eigen::MatrixXcd x_;
  Eigen::MatrixXcd p_;
};

/// Measure-and-feedback noise generator on one fixed-N Fock sector.
///
/// For each site j the noise term is
///   -(xi/2) [n_j, [n_j, rho]] - (1/(2 xi)) [O_j, [O_j, rho]].
/// Both n_j and O_j are diagonal in the occupation basis, so the generator
/// multiplies rho_{ss'} by a precomputed rate.
class NoiseGenerator {
 public:
  NoiseGenerator(CouplingKernel kernel, const FockBasis& basis, double xi,
                 FeedbackConvention convention = FeedbackConvention::kExcludeSelf);

  double xi() const { return xi_; }
  const CouplingKernel& kernel() const { return kernel_; }
  FeedbackConvention convention() const { return convention_; }
  std::size_t num_sites() const { return static_cast<std::size_t>(numbers_.rows()); }
  Eigen::Index dim() const { return numbers_.cols(); }

  /// Coefficient of n_k in O_l.
  double feedback_chi(std::size_t l, std::size_t k) const;

  /// Eigenvalues of n_j and O_j on the basis states.
  Eigen::VectorXd number_diagonal(std::size_t j) const { return numbers_.row(j).transpose(); }
  Eigen::VectorXd feedback_diagonal(std::size_t j) const { return feedback_.row(j).transpose(); }

  OperatorMatrix feedback_op(std::size_t j) const;

  /// sum_j n_j O_j (hbar = 1); equals interaction_hamiltonian for kExcludeSelf.
  OperatorMatrix coherent_interaction() const;

  /// L_noise(rho)_{ss'} = -rates(s, s') rho_{ss'}.
  const Eigen::MatrixXd& dephasing_rates() const { return rates_; }

 private:
  CouplingKernel kernel_;
  double xi_;
  FeedbackConvention convention_;
  Eigen::MatrixXd numbers_;   // sites x states
  Eigen::MatrixXd feedback_;  // sites x states
  Eigen::MatrixXd rates_;
};

/// d rho / dt = L_noise(rho) - i [H, rho]. The Hamiltonian is optional;
/// rho need not be Hermitian (the map is linear).
Eigen::MatrixXcd generator_apply(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen,
                                 const Eigen::MatrixXcd* hamiltonian = nullptr);

/// First-order generator of a single site's measure-and-feedback step:
///   -i {n_j, [O_j, rho]} + noise_j(rho)
/// = -i [n_j O_j, rho] + i (n_j rho O_j - O_j rho n_j) + noise_j(rho).
/// The middle term cancels in the sum over sites because chi is symmetric.
Eigen::MatrixXcd site_generator_apply(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen,
                                      std::size_t j);

/// Closed-form eigenrate of the (self-adjoint) noise generator on the
/// normal-ordered monomial a^dag_{j1}..a^dag_{jN} a_{i1}..a_{iN}, summing over
/// the generator's finite lattice.
double adjoint_coefficient(const NoiseGenerator& gen, std::span<const std::size_t> creation,
                           std::span<const std::size_t> annihilation);

struct AdjointRate {
  double value = 0.0;        ///< total rate (negative)
  double back_action = 0.0;  ///< sum_l (#{j_n = l} - #{i_n = l})^2
  double feedback = 0.0;     ///< lattice sum of chi-difference products
  double tail = 0.0;         ///< continuum tail included in `feedback`
  double tail_bound = 0.0;   ///< error estimate of `value`
  double radius = 0.0;
};

/// Same rate with the site sum over the infinite cubic lattice (a = 1,
/// coupling scale s), truncated at config.radius with a continuum tail.
AdjointRate adjoint_coefficient_infinite(std::span<const IntVec3> creation,
                                         std::span<const IntVec3> annihilation, double xi,
                                         const LatticeSumConfig& config = {},
                                         FeedbackConvention convention = FeedbackConvention::kIncludeSelf,
                                         double scale = 1.0);

/// Tr_anc[U2 U1 (rho (x) |vac><vac|) U1^dag U2^dag] for site j with
/// U1 = exp(-i sqrt(2 xi tau) n_j P), U2 = exp(-i sqrt(2 tau / xi) O_j X).
///
/// Throws PositivityViolation for invalid rho and TruncationOverflow when the
/// ancilla reaches the top two levels with population above 1e-8.
Eigen::MatrixXcd circuit_step(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, std::size_t j,
                              double tau, const AncillaOscillator& anc);

/// The same linear map without input validation (for Choi matrices etc.).
Eigen::MatrixXcd apply_circuit_map(const Eigen::MatrixXcd& input, const NoiseGenerator& gen,
                                   std::size_t j, double tau, const AncillaOscillator& anc);

/// One time step: every site in ascending order with a fresh ancilla, then
/// exp(-i H0 tau) once if a free Hamiltonian is given.
Eigen::MatrixXcd circuit_sweep(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, double tau,
                               const AncillaOscillator& anc,
                               const Eigen::MatrixXcd* free_hamiltonian = nullptr);

/// || circuit_step(rho) - (rho + tau L_j(rho)) ||_1 with L_j from site_generator_apply.
double generator_residual(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, std::size_t j,
                          double tau, const AncillaOscillator& anc);

/// || circuit_sweep(rho) - (rho + tau L(rho)) ||_1 with L = generator_apply
/// including H = sum_j n_j O_j (+ H0).
double sweep_residual(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, double tau,
                      const AncillaOscillator& anc,
                      const Eigen::MatrixXcd* free_hamiltonian = nullptr);

struct EvolutionConfig {
  double total_time = 1.0;
  int steps = 1000;
  int order = 4;              ///< 2 (Heun) or 4 (classical Runge-Kutta)
  int record_every = 1;
  bool check_halving = true;  ///< rerun with 2x steps and compare final states
  double halving_tolerance = 1e-8;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> states;
};

/// Fixed-step integration of d rho/dt = generator_apply(rho, *gen, hamiltonian).
/// Either term may be null. Throws ConvergenceError when the halving check
/// fails or a snapshot loses trace (> 1e-8) or positivity (< -1e-7).
Trajectory evolve(const Eigen::MatrixXcd& rho0, const NoiseGenerator* gen,
                  const Eigen::MatrixXcd* hamiltonian, const EvolutionConfig& config);

/// CSV: time,re,im,trace,purity,min_eigenvalue for element (row, col).
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, Eigen::Index row,
                          Eigen::Index col);

}  // namespace ccgrav
