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

#include "ccgrav/dynamics.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "ccgrav/errors.hpp"
#include "ccgrav/format.hpp"
#include "ccgrav/matrix_util.hpp"

namespace ccgrav {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

namespace {

constexpr double kStateTolerance = 1e-10;
constexpr double kOverflowPopulation = 1e-8;

void check_site(const NoiseGenerator& gen, std::size_t j) {
  if (j >= gen.num_sites()) throw InvalidArgument("site index out of range");
}

void check_shape(const Eigen::MatrixXcd& m, const NoiseGenerator& gen) {
  if (m.rows() != gen.dim() || m.cols() != gen.dim()) {
    throw InvalidArgument("matrix dimension does not match the Fock sector");
  }
}

void check_density_matrix(const Eigen::MatrixXcd& rho) {
  if (hermiticity_defect(rho) > kStateTolerance) throw PositivityViolation("rho is not Hermitian");
  if (std::abs(rho.trace() - cd(1.0)) > kStateTolerance) throw PositivityViolation("rho does not have unit trace");
  if (min_eigenvalue(rho) < -kStateTolerance) throw PositivityViolation("rho has a negative eigenvalue");
}

}  // namespace

AncillaOscillator::AncillaOscillator(int levels) : levels_(levels) {
  if (levels < 4) throw InvalidArgument("ancilla needs at least 4 levels");
  Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd bd = b.adjoint();
  x_ = (b + bd) / std::sqrt(2.0);
  p_ = kI * (bd - b) / std::sqrt(2.0);
}

Eigen::VectorXcd AncillaOscillator::vacuum() const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(levels_);
  v(0) = 1.0;
  return v;
}

NoiseGenerator::NoiseGenerator(CouplingKernel kernel, const FockBasis& basis, double xi,
                               FeedbackConvention convention)
    : kernel_(std::move(kernel)), xi_(xi), convention_(convention) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidArgument("measurement strength xi must be positive and finite");
  const std::size_t L = kernel_.lattice().num_sites();
  if (basis.num_sites() != L) throw InvalidArgument("Fock basis and coupling kernel disagree on site count");

  const auto dim = static_cast<Eigen::Index>(basis.size());
  numbers_.resize(static_cast<Eigen::Index>(L), dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const Occupation& n = basis.state(static_cast<std::size_t>(s));
    for (std::size_t j = 0; j < L; ++j) numbers_(static_cast<Eigen::Index>(j), s) = n[j];
  }

  Eigen::MatrixXd chi(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(L));
  for (std::size_t l = 0; l < L; ++l) {
    for (std::size_t k = 0; k < L; ++k) chi(l, k) = feedback_chi(l, k);
  }
  feedback_ = chi * numbers_;

  rates_.resize(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    for (Eigen::Index t = 0; t < dim; ++t) {
      double back = 0.0;
      double feed = 0.0;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(L); ++j) {
        const double dn = numbers_(j, s) - numbers_(j, t);
        const double dO = feedback_(j, s) - feedback_(j, t);
        back += dn * dn;
        feed += dO * dO;
      }
      rates_(s, t) = 0.5 * xi_ * back + feed / (2.0 * xi_);
    }
  }
}

double NoiseGenerator::feedback_chi(std::size_t l, std::size_t k) const {
  if (l == k && convention_ == FeedbackConvention::kExcludeSelf) return 0.0;
  return kernel_.chi(l, k);
}

OperatorMatrix NoiseGenerator::feedback_op(std::size_t j) const {
  check_site(*this, j);
  return {feedback_diagonal(j).cast<cd>().asDiagonal(), "O_" + std::to_string(j)};
}

OperatorMatrix NoiseGenerator::coherent_interaction() const {
  const Eigen::VectorXd energy = numbers_.cwiseProduct(feedback_).colwise().sum().transpose();
  return {energy.cast<cd>().asDiagonal(), "sum_j n_j O_j"};
}

Eigen::MatrixXcd generator_apply(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen,
                                 const Eigen::MatrixXcd* hamiltonian) {
  check_shape(rho, gen);
  Eigen::MatrixXcd out = -(gen.dephasing_rates().cast<cd>().cwiseProduct(rho));
  if (hamiltonian != nullptr) {
    check_shape(*hamiltonian, gen);
    out -= kI * (*hamiltonian * rho - rho * *hamiltonian);
  }
  return out;
}

Eigen::MatrixXcd site_generator_apply(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen,
                                      std::size_t j) {
  check_site(gen, j);
  check_shape(rho, gen);
  const Eigen::VectorXd n = gen.number_diagonal(j);
  const Eigen::VectorXd o = gen.feedback_diagonal(j);
  const double xi = gen.xi();
  Eigen::MatrixXcd out(rho.rows(), rho.cols());
  for (Eigen::Index s = 0; s < rho.rows(); ++s) {
    for (Eigen::Index t = 0; t < rho.cols(); ++t) {
      const double dn = n(s) - n(t);
      const double dO = o(s) - o(t);
      const cd factor = -kI * (n(s) + n(t)) * dO - 0.5 * xi * dn * dn - dO * dO / (2.0 * xi);
      out(s, t) = factor * rho(s, t);
    }
  }
  return out;
}

double adjoint_coefficient(const NoiseGenerator& gen, std::span<const std::size_t> creation,
                           std::span<const std::size_t> annihilation) {
  if (creation.size() != annihilation.size()) {
    throw InvalidArgument("creation and annihilation index lists must have equal length");
  }
  const std::size_t L = gen.num_sites();
  for (std::size_t idx : creation) check_site(gen, idx);
  for (std::size_t idx : annihilation) check_site(gen, idx);

  double back = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    long count = 0;
    for (std::size_t idx : creation) count += (idx == l);
    for (std::size_t idx : annihilation) count -= (idx == l);
    back += static_cast<double>(count * count);
  }

  double feed = 0.0;
  for (std::size_t n = 0; n < creation.size(); ++n) {
    for (std::size_t m = 0; m < creation.size(); ++m) {
      for (std::size_t l = 0; l < L; ++l) {
        feed += (gen.feedback_chi(l, creation[n]) - gen.feedback_chi(l, annihilation[n])) *
                (gen.feedback_chi(l, creation[m]) - gen.feedback_chi(l, annihilation[m]));
      }
    }
  }
  return -0.5 * gen.xi() * back - feed / (2.0 * gen.xi());
}

AdjointRate adjoint_coefficient_infinite(std::span<const IntVec3> creation,
                                         std::span<const IntVec3> annihilation, double xi,
                                         const LatticeSumConfig& config, FeedbackConvention convention,
                                         double scale) {
  if (creation.size() != annihilation.size()) {
    throw InvalidArgument("creation and annihilation index lists must have equal length");
  }
  if (!(xi > 0.0) || !std::isfinite(xi)) throw InvalidArgument("xi must be positive and finite");

  AdjointRate rate;
  rate.radius = config.radius;

  // Combinatorial part: only sites named in the index lists contribute.
  std::vector<IntVec3> sites(creation.begin(), creation.end());
  sites.insert(sites.end(), annihilation.begin(), annihilation.end());
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  for (const IntVec3& l : sites) {
    long count = 0;
    for (const IntVec3& c : creation) count += (c == l);
    for (const IntVec3& c : annihilation) count -= (c == l);
    rate.back_action += static_cast<double>(count * count);
  }

  if (creation.empty()) return rate;

  Vec3 center{0.0, 0.0, 0.0};
  for (const IntVec3& c : sites) {
    for (int k = 0; k < 3; ++k) center[k] += c[k];
  }
  for (int k = 0; k < 3; ++k) center[k] = std::round(center[k] / sites.size());

  auto coupling = [&](const Vec3& u, const IntVec3& x) {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = u[k] - x[k];
      d2 += d * d;
    }
    if (d2 == 0.0 && convention == FeedbackConvention::kExcludeSelf) return 0.0;
    return -scale / (std::sqrt(d2) + 1.0);
  };
  // sum_{n,m} (chi_{l j_n} - chi_{l i_n})(chi_{l j_m} - chi_{l i_m}) is a perfect square.
  auto summand = [&](const Vec3& u) {
    double total = 0.0;
    for (std::size_t n = 0; n < creation.size(); ++n) {
      total += coupling(u, creation[n]) - coupling(u, annihilation[n]);
    }
    return total * total;
  };
  const LatticeSumResult sum = lattice_sum(summand, center, config);
  rate.feedback = sum.value;
  rate.tail = sum.tail;
  rate.tail_bound = sum.tail_bound / (2.0 * xi);
  rate.value = -0.5 * xi * rate.back_action - rate.feedback / (2.0 * xi);
  return rate;
}

namespace {

// Ancilla state U2 U1 |vac> for a basis state with occupation n and feedback value o.
Eigen::VectorXcd ancilla_state(double n, double o, double alpha, double beta, const AncillaOscillator& anc) {
  const Eigen::MatrixXcd u1 = (-kI * (alpha * n) * anc.P()).exp();
  const Eigen::MatrixXcd u2 = (-kI * (beta * o) * anc.X()).exp();
  return u2 * (u1 * anc.vacuum());
}

}  // namespace

Eigen::MatrixXcd apply_circuit_map(const Eigen::MatrixXcd& input, const NoiseGenerator& gen,
                                   std::size_t j, double tau, const AncillaOscillator& anc) {
  check_site(gen, j);
  check_shape(input, gen);
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be nonnegative");
  if (tau == 0.0) return input;

  const double alpha = std::sqrt(2.0 * gen.xi() * tau);
  const double beta = std::sqrt(2.0 * tau / gen.xi());
  const Eigen::VectorXd n = gen.number_diagonal(j);
  const Eigen::VectorXd o = gen.feedback_diagonal(j);

  // n_j and O_j are diagonal in the occupation basis, so the joint unitary is
  // block diagonal: one ancilla unitary per basis state.
  const Eigen::Index dim = gen.dim();
  const int top = anc.levels() - 1;
  Eigen::MatrixXcd psi(anc.levels(), dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    psi.col(s) = ancilla_state(n(s), o(s), alpha, beta, anc);
    const double leak = std::norm(psi(top, s)) + std::norm(psi(top - 1, s));
    if (leak > kOverflowPopulation) {
      throw TruncationOverflow("ancilla population " + std::to_string(leak) +
                               " in the top two levels; increase the truncation");
    }
  }
  const Eigen::MatrixXcd overlaps = psi.adjoint() * psi;  // (t, s) = <psi_t|psi_s>
  return input.cwiseProduct(overlaps.transpose());
}

Eigen::MatrixXcd circuit_step(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, std::size_t j,
                              double tau, const AncillaOscillator& anc) {
  check_shape(rho, gen);
  check_density_matrix(rho);
  return apply_circuit_map(rho, gen, j, tau, anc);
}

Eigen::MatrixXcd circuit_sweep(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, double tau,
                               const AncillaOscillator& anc, const Eigen::MatrixXcd* free_hamiltonian) {
  check_shape(rho, gen);
  check_density_matrix(rho);
  Eigen::MatrixXcd state = rho;
  for (std::size_t j = 0; j < gen.num_sites(); ++j) state = apply_circuit_map(state, gen, j, tau, anc);
  if (free_hamiltonian != nullptr) {
    check_shape(*free_hamiltonian, gen);
    const Eigen::MatrixXcd u = (-kI * tau * *free_hamiltonian).exp();
    state = u * state * u.adjoint();
  }
  return state;
}

double generator_residual(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, std::size_t j,
                          double tau, const AncillaOscillator& anc) {
  const Eigen::MatrixXcd circuit = circuit_step(rho, gen, j, tau, anc);
  const Eigen::MatrixXcd linear = rho + tau * site_generator_apply(rho, gen, j);
  return trace_norm(circuit - linear);
}

double sweep_residual(const Eigen::MatrixXcd& rho, const NoiseGenerator& gen, double tau,
                      const AncillaOscillator& anc, const Eigen::MatrixXcd* free_hamiltonian) {
  const Eigen::MatrixXcd circuit = circuit_sweep(rho, gen, tau, anc, free_hamiltonian);
  Eigen::MatrixXcd hamiltonian = gen.coherent_interaction().matrix;
  if (free_hamiltonian != nullptr) hamiltonian += *free_hamiltonian;
  const Eigen::MatrixXcd linear = rho + tau * generator_apply(rho, gen, &hamiltonian);
  return trace_norm(circuit - linear);
}

namespace {

Eigen::MatrixXcd integrate(const Eigen::MatrixXcd& rho0, const NoiseGenerator* gen,
                           const Eigen::MatrixXcd* hamiltonian, const EvolutionConfig& config,
                           int steps, Trajectory* record) {
  auto rhs = [&](const Eigen::MatrixXcd& rho) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
    if (gen != nullptr) d = generator_apply(rho, *gen, nullptr);
    if (hamiltonian != nullptr) d -= kI * (*hamiltonian * rho - rho * *hamiltonian);
    return d;
  };
  const double h = config.total_time / steps;
  Eigen::MatrixXcd rho = rho0;
  if (record != nullptr) {
    record->times.push_back(0.0);
    record->states.push_back(rho);
  }
  for (int step = 1; step <= steps; ++step) {
    if (config.order == 4) {
      const Eigen::MatrixXcd k1 = rhs(rho);
      const Eigen::MatrixXcd k2 = rhs(rho + 0.5 * h * k1);
      const Eigen::MatrixXcd k3 = rhs(rho + 0.5 * h * k2);
      const Eigen::MatrixXcd k4 = rhs(rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      const Eigen::MatrixXcd k1 = rhs(rho);
      const Eigen::MatrixXcd k2 = rhs(rho + h * k1);
      rho += (0.5 * h) * (k1 + k2);
    }
    if (record != nullptr && (step % config.record_every == 0 || step == steps)) {
      record->times.push_back(h * step);
      record->states.push_back(rho);
    }
  }
  return rho;
}

}  // namespace

Trajectory evolve(const Eigen::MatrixXcd& rho0, const NoiseGenerator* gen,
                  const Eigen::MatrixXcd* hamiltonian, const EvolutionConfig& config) {
  if (!(config.total_time >= 0.0)) throw InvalidArgument("total time must be nonnegative");
  if (config.steps < 1) throw InvalidArgument("step count must be >= 1");
  if (config.order != 2 && config.order != 4) throw InvalidArgument("integrator order must be 2 or 4");
  if (config.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  if (gen != nullptr) check_shape(rho0, *gen);
  if (hamiltonian != nullptr && (hamiltonian->rows() != rho0.rows() || hamiltonian->cols() != rho0.cols())) {
    throw InvalidArgument("Hamiltonian dimension does not match rho");
  }
  check_density_matrix(rho0);

  Trajectory trajectory;
  const Eigen::MatrixXcd final_state = integrate(rho0, gen, hamiltonian, config, config.steps, &trajectory);
  if (config.check_halving) {
    const Eigen::MatrixXcd refined = integrate(rho0, gen, hamiltonian, config, 2 * config.steps, nullptr);
    const double change = trace_norm(refined - final_state);
    if (change > config.halving_tolerance) {
      throw ConvergenceError("step size too large: halving the step changes the final state by " +
                             std::to_string(change));
    }
  }
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const Eigen::MatrixXcd& rho = trajectory.states[k];
    if (std::abs(rho.trace() - cd(1.0)) > 1e-8) {
      throw ConvergenceError("trace drift at t = " + std::to_string(trajectory.times[k]));
    }
    if (min_eigenvalue(rho) < -1e-7) {
      throw ConvergenceError("positivity lost at t = " + std::to_string(trajectory.times[k]));
    }
  }
  return trajectory;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, Eigen::Index row,
                          Eigen::Index col) {
  out << "time,re,im,trace,purity,min_eigenvalue\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const Eigen::MatrixXcd& rho = trajectory.states[k];
    const cd element = rho(row, col);
    out << format_number(trajectory.times[k]) << ',' << format_number(element.real()) << ','
        << format_number(element.imag()) << ',' << format_number(rho.trace().real()) << ','
        << format_number(purity(rho)) << ',' << format_number(min_eigenvalue(rho)) << '\n';
  }
}

}  // namespace ccgrav
