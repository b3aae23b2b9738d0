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

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "doctest.h"

#include "ccgrav/analytics.hpp"
#include "ccgrav/dynamics.hpp"
#include "ccgrav/errors.hpp"
#include "ccgrav/fock.hpp"
#include "ccgrav/matrix_util.hpp"

using namespace ccgrav;
using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
constexpr cd kI{0.0, 1.0};

namespace {

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

NoiseGenerator make_generator(std::size_t L, int N, double xi,
                              FeedbackConvention convention = FeedbackConvention::kExcludeSelf,
                              double scale = 1.0) {
  return NoiseGenerator(CouplingKernel(LatticeSpec::chain(static_cast<int>(L)), scale), FockBasis(L, N), xi,
                        convention);
}

// O_j assembled from number operators and the kernel.
Mat feedback_matrix(const FockBasis& basis, const CouplingKernel& kernel, std::size_t j,
                    FeedbackConvention convention) {
  Mat o = Mat::Zero(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.num_sites(); ++k) {
    if (k == j && convention == FeedbackConvention::kExcludeSelf) continue;
    o += kernel.chi(j, k) * number_op(basis, k).matrix;
  }
  return o;
}

// Explicit double commutators summed over sites.
Mat noise_oracle(const Mat& rho, const FockBasis& basis, const CouplingKernel& kernel, double xi,
                 FeedbackConvention convention) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (std::size_t j = 0; j < basis.num_sites(); ++j) {
    const Mat n = number_op(basis, j).matrix;
    const Mat o = feedback_matrix(basis, kernel, j, convention);
    out += -(xi / 2.0) * comm(n, comm(n, rho)) - (1.0 / (2.0 * xi)) * comm(o, comm(o, rho));
  }
  return out;
}

// exp(-i t H) for Hermitian H by eigendecomposition.
Mat unitary_from_spectrum(const Mat& H, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(H);
  const Eigen::VectorXcd phases =
      (-kI * t * solver.eigenvalues().cast<cd>()).array().exp().matrix();
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

// Literal joint-space circuit: system (x) ancilla, explicit unitaries, partial trace.
Mat joint_space_circuit(const Mat& rho, const NoiseGenerator& gen, std::size_t j, double tau,
                        const AncillaOscillator& anc) {
  const Mat n = gen.number_diagonal(j).cast<cd>().asDiagonal();
  const Mat o = gen.feedback_diagonal(j).cast<cd>().asDiagonal();
  const Mat U1 = unitary_from_spectrum(Eigen::kroneckerProduct(n, anc.P()).eval(), std::sqrt(2.0 * gen.xi() * tau));
  const Mat U2 = unitary_from_spectrum(Eigen::kroneckerProduct(o, anc.X()).eval(), std::sqrt(2.0 * tau / gen.xi()));
  const Eigen::VectorXcd vac = anc.vacuum();
  const Mat joint_in = Eigen::kroneckerProduct(rho, (vac * vac.adjoint()).eval()).eval();
  const Mat U = U2 * U1;
  const Mat joint_out = U * joint_in * U.adjoint();
  const int m = anc.levels();
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (Eigen::Index s = 0; s < rho.rows(); ++s) {
    for (Eigen::Index t = 0; t < rho.cols(); ++t) {
      cd sum = 0.0;
      for (int k = 0; k < m; ++k) sum += joint_out(s * m + k, t * m + k);
      out(s, t) = sum;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("ancilla oscillator") {
  const AncillaOscillator anc(24);
  const Mat c = anc.X() * anc.P() - anc.P() * anc.X();
  CHECK((c.topLeftCorner(22, 22) - kI * Mat::Identity(22, 22)).norm() < 1e-12);
  const Eigen::VectorXcd v = anc.vacuum();
  CHECK(std::abs(v.dot(anc.X() * v)) < 1e-10);
  CHECK(std::abs(v.dot(anc.P() * v)) < 1e-10);
  CHECK(std::abs(v.dot(anc.X() * anc.X() * v) - 0.5) < 1e-10);
  CHECK(std::abs(v.dot(anc.P() * anc.P() * v) - 0.5) < 1e-10);
  CHECK(hermiticity_defect(anc.X()) == 0.0);
  CHECK(hermiticity_defect(anc.P()) < 1e-15);
  CHECK_THROWS_AS(AncillaOscillator(2), InvalidArgument);
}

TEST_CASE("generator rejects bad strength and mismatched sectors") {
  const CouplingKernel kernel(LatticeSpec::chain(3));
  CHECK_THROWS_AS(NoiseGenerator(kernel, FockBasis(3, 1), 0.0), InvalidArgument);
  CHECK_THROWS_AS(NoiseGenerator(kernel, FockBasis(3, 1), -1.0), InvalidArgument);
  CHECK_THROWS_AS(NoiseGenerator(kernel, FockBasis(3, 1), INFINITY), InvalidArgument);
  CHECK_THROWS_AS(NoiseGenerator(kernel, FockBasis(2, 1), 1.0), InvalidArgument);
  const NoiseGenerator gen(kernel, FockBasis(3, 1), 1.0);
  CHECK_THROWS_AS(generator_apply(Mat::Identity(2, 2), gen), InvalidArgument);
}

TEST_CASE("generator matches explicit double commutators") {
  std::mt19937_64 rng(11);
  for (auto convention : {FeedbackConvention::kExcludeSelf, FeedbackConvention::kIncludeSelf}) {
    for (std::size_t L : {2u, 3u, 4u}) {
      for (int N : {1, 2}) {
        const double xi = 0.37 + 0.5 * L;
        const CouplingKernel kernel(LatticeSpec::chain(static_cast<int>(L)), 1.3);
        const FockBasis basis(L, N);
        const NoiseGenerator gen(kernel, basis, xi, convention);
        const Mat rho = random_hermitian(gen.dim(), rng);
        const Mat H = random_hermitian(gen.dim(), rng);
        const Mat expected = noise_oracle(rho, basis, kernel, xi, convention) - kI * comm(H, rho);
        CHECK((generator_apply(rho, gen, &H) - expected).norm() < 1e-11);
        CHECK(gen.dephasing_rates().diagonal().norm() == 0.0);
        for (std::size_t j = 0; j < L; ++j) {
          CHECK((gen.feedback_op(j).matrix - feedback_matrix(basis, kernel, j, convention)).norm() < 1e-14);
        }
      }
    }
  }
}

TEST_CASE("site generators sum to the full generator with the coherent interaction") {
  std::mt19937_64 rng(5);
  for (auto convention : {FeedbackConvention::kExcludeSelf, FeedbackConvention::kIncludeSelf}) {
    const NoiseGenerator gen = make_generator(3, 2, 0.8, convention);
    const Mat rho = random_density_matrix(gen.dim(), rng);
    Mat sum = Mat::Zero(gen.dim(), gen.dim());
    for (std::size_t j = 0; j < 3; ++j) {
      sum += site_generator_apply(rho, gen, j);
      // Per-site form: -i {n_j, [O_j, rho]} + noise_j.
      const Mat n = number_op(FockBasis(3, 2), j).matrix;
      const Mat o = gen.feedback_op(j).matrix;
      const Mat c = comm(o, rho);
      const Mat expected = -kI * (n * c + c * n) - (gen.xi() / 2.0) * comm(n, comm(n, rho)) -
                           (1.0 / (2.0 * gen.xi())) * comm(o, comm(o, rho));
      CHECK((site_generator_apply(rho, gen, j) - expected).norm() < 1e-12);
    }
    const Mat H = gen.coherent_interaction().matrix;
    CHECK((sum - generator_apply(rho, gen, &H)).norm() < 1e-12);
  }
  const NoiseGenerator gen = make_generator(3, 2, 1.0);
  const Mat v = interaction_hamiltonian(FockBasis(3, 2), gen.kernel()).matrix;
  CHECK((gen.coherent_interaction().matrix - v).norm() < 1e-13);
}

TEST_CASE("generator preserves trace and hermiticity and fixes diagonal states") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 2 + trial % 3;
    const int N = 1 + trial % 2;
    const NoiseGenerator gen = make_generator(L, N, 0.2 + 0.03 * trial);
    const Mat rho = random_hermitian(gen.dim(), rng);
    const Mat d = generator_apply(rho, gen);
    CHECK(std::abs(d.trace()) < 1e-12);
    CHECK(hermiticity_defect(d) < 1e-12);
    const Mat diag = random_density_matrix(gen.dim(), rng).diagonal().asDiagonal();
    CHECK(generator_apply(diag, gen).norm() == 0.0);
  }
}

TEST_CASE("block circuit matches the joint-space circuit") {
  std::mt19937_64 rng(99);
  const AncillaOscillator anc(24);
  for (auto convention : {FeedbackConvention::kExcludeSelf, FeedbackConvention::kIncludeSelf}) {
    for (std::size_t L : {2u, 3u}) {
      for (int N : {1, 2}) {
        const NoiseGenerator gen = make_generator(L, N, 0.9, convention);
        const Mat rho = random_density_matrix(gen.dim(), rng);
        for (std::size_t j = 0; j < L; ++j) {
          for (double tau : {1e-3, 2e-2}) {
            const Mat fast = circuit_step(rho, gen, j, tau, anc);
            const Mat slow = joint_space_circuit(rho, gen, j, tau, anc);
            CHECK((fast - slow).norm() < 1e-11);
          }
        }
      }
    }
  }
}

TEST_CASE("circuit preserves trace, hermiticity and diagonal states") {
  std::mt19937_64 rng(17);
  const AncillaOscillator anc;
  for (int trial = 0; trial < 100; ++trial) {
    const NoiseGenerator gen = make_generator(2 + trial % 2, 1 + trial % 2, 0.5 + 0.01 * trial);
    const Mat rho = random_density_matrix(gen.dim(), rng);
    const double tau = 1e-3 * (1 + trial % 7);
    const std::size_t j = static_cast<std::size_t>(trial) % gen.num_sites();
    const Mat out = circuit_step(rho, gen, j, tau, anc);
    CHECK(std::abs(out.trace() - cd(1.0)) < 1e-10);
    CHECK(hermiticity_defect(out) < 1e-10);
    CHECK(min_eigenvalue(out) > -1e-10);
    const Mat diag = rho.diagonal().asDiagonal();
    CHECK((circuit_step(diag, gen, j, tau, anc) - diag).norm() < 1e-12);
    CHECK(generator_residual(diag, gen, j, tau, anc) < 1e-10);
  }
}

TEST_CASE("circuit choi matrix is positive") {
  const AncillaOscillator anc;
  const NoiseGenerator gen = make_generator(2, 1, 1.0);
  for (double tau : {1e-3, 1e-2, 5e-2}) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Eigen::Index d = gen.dim();
      Mat choi = Mat::Zero(d * d, d * d);
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          Mat e = Mat::Zero(d, d);
          e(a, b) = 1.0;
          choi.block(a * d, b * d, d, d) = apply_circuit_map(e, gen, j, tau, anc);
        }
      }
      CHECK(min_eigenvalue(choi) >= -1e-8);
    }
  }
}

TEST_CASE("circuit input validation and truncation guard") {
  const AncillaOscillator anc;
  const NoiseGenerator gen = make_generator(2, 1, 1.0);
  Mat bad = Mat::Identity(2, 2);
  CHECK_THROWS_AS(circuit_step(bad, gen, 0, 1e-3, anc), PositivityViolation);  // trace 2
  bad << 1.5, 0.0, 0.0, -0.5;
  CHECK_THROWS_AS(circuit_step(bad, gen, 0, 1e-3, anc), PositivityViolation);
  bad << 0.5, 0.5, 0.0, 0.5;
  CHECK_THROWS_AS(circuit_step(bad, gen, 0, 1e-3, anc), PositivityViolation);
  const Mat rho = Mat::Identity(2, 2) / 2.0;
  CHECK_THROWS_AS(circuit_step(rho, gen, 2, 1e-3, anc), InvalidArgument);
  CHECK_THROWS_AS(circuit_step(rho, gen, 0, -1.0, anc), InvalidArgument);
  CHECK((circuit_step(rho, gen, 0, 0.0, anc) - rho).norm() == 0.0);

  // A large step displaces the ancilla beyond a small truncation.
  CHECK_THROWS_AS(circuit_step(rho, gen, 0, 5.0, AncillaOscillator(8)), TruncationOverflow);
  CHECK_THROWS_AS(circuit_step(rho, gen, 0, 5.0, AncillaOscillator(8)), ConvergenceError);
}

TEST_CASE("circuit residual scales quadratically") {
  const AncillaOscillator anc;
  const NoiseGenerator gen = make_generator(2, 1, 1.0);
  Eigen::VectorXcd psi(2);
  psi << 1.0, 1.0;
  psi /= std::sqrt(2.0);
  const Mat rho = psi * psi.adjoint();
  CHECK(generator_residual(rho, gen, 0, 0.0, anc) == 0.0);
  double prev = generator_residual(rho, gen, 0, 4e-3, anc);
  double prev_sweep = sweep_residual(rho, gen, 4e-3, anc);
  for (double tau : {2e-3, 1e-3, 5e-4}) {
    const double r = generator_residual(rho, gen, 0, tau, anc);
    const double rs = sweep_residual(rho, gen, tau, anc);
    CHECK(r / prev == doctest::Approx(0.25).epsilon(0.2));
    CHECK(rs / prev_sweep == doctest::Approx(0.25).epsilon(0.2));
    prev = r;
    prev_sweep = rs;
  }
  CHECK(generator_residual(rho, gen, 0, 1e-3, anc) < 1e-5);

  // With a free Hamiltonian applied once per sweep.
  const Mat H0 = kinetic_hamiltonian(FockBasis(2, 1), LatticeSpec::chain(2), 1.0).matrix;
  const double r1 = sweep_residual(rho, gen, 2e-3, anc, &H0);
  const double r2 = sweep_residual(rho, gen, 1e-3, anc, &H0);
  CHECK(r2 / r1 == doctest::Approx(0.25).epsilon(0.2));
}

namespace {

// Normal-ordered monomial a^dag_{j1}..a^dag_{jN} a_{i1}..a_{iN} on the
// tensor product of per-site spaces with `levels` levels.
Mat tensor_ladder(std::size_t L, int levels, std::size_t site, bool create) {
  Mat a = Mat::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  if (create) a = a.adjoint().eval();
  Mat out = Mat::Identity(1, 1);
  for (std::size_t s = 0; s < L; ++s) {
    out = Eigen::kroneckerProduct(out, s == site ? a : Mat::Identity(levels, levels)).eval();
  }
  return out;
}

}  // namespace

TEST_CASE("adjoint closed form matches brute force on small lattices") {
  for (auto convention : {FeedbackConvention::kExcludeSelf, FeedbackConvention::kIncludeSelf}) {
    for (std::size_t L : {2u, 3u}) {
      const int levels = 3;
      const NoiseGenerator gen = make_generator(L, 1, 0.7, convention);
      std::vector<Mat> n(L);
      for (std::size_t l = 0; l < L; ++l) n[l] = tensor_ladder(L, levels, l, true) * tensor_ladder(L, levels, l, false);
      for (std::size_t j = 0; j < L; ++j) {
        for (std::size_t i = 0; i < L; ++i) {
          const Mat C = tensor_ladder(L, levels, j, true) * tensor_ladder(L, levels, i, false);
          Mat LC = Mat::Zero(C.rows(), C.cols());
          for (std::size_t l = 0; l < L; ++l) {
            Mat O = Mat::Zero(C.rows(), C.cols());
            for (std::size_t k = 0; k < L; ++k) O += gen.feedback_chi(l, k) * n[k];
            LC += -(gen.xi() / 2.0) * comm(n[l], comm(n[l], C)) - (1.0 / (2.0 * gen.xi())) * comm(O, comm(O, C));
          }
          const std::size_t cr[] = {j};
          const std::size_t an[] = {i};
          const double rate = adjoint_coefficient(gen, cr, an);
          CHECK((LC - rate * C).norm() < 1e-10);
          if (i != j) {
            CHECK(-rate == doctest::Approx(hopping_damping_rate(i, j, gen.xi(), gen.kernel(), convention)));
          }
        }
      }
    }
  }
  const NoiseGenerator gen = make_generator(3, 1, 1.0);
  const std::size_t one[] = {1};
  const std::size_t two[] = {1, 2};
  CHECK(adjoint_coefficient(gen, one, one) == 0.0);
  CHECK_THROWS_AS(adjoint_coefficient(gen, one, two), InvalidArgument);
}

TEST_CASE("adjoint rate depends on chi only through column differences") {
  // Closed form evaluated directly with chi shifted by a constant.
  const NoiseGenerator gen = make_generator(4, 2, 0.6, FeedbackConvention::kIncludeSelf);
  const std::vector<std::size_t> cr = {0, 3};
  const std::vector<std::size_t> an = {1, 1};
  for (double shift : {0.0, 0.4, -2.0}) {
    double feed = 0.0;
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) {
        for (std::size_t l = 0; l < 4; ++l) {
          feed += ((gen.feedback_chi(l, cr[a]) + shift) - (gen.feedback_chi(l, an[a]) + shift)) *
                  ((gen.feedback_chi(l, cr[b]) + shift) - (gen.feedback_chi(l, an[b]) + shift));
        }
      }
    }
    const double back = 1.0 + 4.0 + 1.0;  // site 0: +1, site 1: -2, site 3: +1
    CHECK(adjoint_coefficient(gen, cr, an) == doctest::Approx(-0.3 * back - feed / 1.2).epsilon(1e-13));
  }
}

TEST_CASE("infinite-lattice adjoint rate agrees with kappa^2") {
  const IntVec3 i{0, 0, 0};
  const IntVec3 j{4, 0, 0};
  const double xi = 1.7;
  const IntVec3 cr[] = {j};
  const IntVec3 an[] = {i};
  const AdjointRate rate = adjoint_coefficient_infinite(cr, an, xi);
  const KappaResult k = kappa_sq(i, j);
  CHECK(rate.back_action == 2.0);
  CHECK(rate.value == doctest::Approx(-(xi + k.kappa_sq / (2.0 * xi))).epsilon(1e-9));
  CHECK(rate.tail_bound >= 0.0);

  const IntVec3 same[] = {i};
  CHECK(adjoint_coefficient_infinite(same, same, xi).value == 0.0);

  // Two-particle monomial: total rate is a perfect square in chi differences.
  const IntVec3 cr2[] = {IntVec3{2, 0, 0}, IntVec3{0, 3, 0}};
  const IntVec3 an2[] = {IntVec3{0, 0, 0}, IntVec3{0, 0, 1}};
  const AdjointRate two = adjoint_coefficient_infinite(cr2, an2, xi);
  CHECK(two.back_action == 4.0);
  CHECK(two.feedback > 0.0);
  CHECK_THROWS_AS(adjoint_coefficient_infinite(cr2, an, xi), InvalidArgument);
  CHECK_THROWS_AS(adjoint_coefficient_infinite(cr, an, xi, LatticeSumConfig{5.0, 1e-9}), ConvergenceError);
}

TEST_CASE("noise-only evolution dephases at the closed-form rate") {
  const double xi = 0.8;
  const NoiseGenerator gen = make_generator(3, 1, xi);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
  psi(0) = psi(2) = 1.0 / std::sqrt(2.0);
  const double k2 = kappa_sq_on_lattice(gen.kernel(), 0, 2);
  const double gamma = xi + k2 / (2.0 * xi);
  EvolutionConfig config;
  config.total_time = 3.0 / gamma;
  config.steps = 2000;
  config.record_every = 100;
  const Trajectory traj = evolve(psi * psi.adjoint(), &gen, nullptr, config);
  REQUIRE(traj.states.size() == 21);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double exact = 0.5 * std::exp(-gamma * traj.times[k]);
    CHECK(std::abs(std::abs(traj.states[k](0, 2)) / exact - 1.0) < 1e-6);
    CHECK(std::abs(traj.states[k](0, 0) - cd(0.5)) < 1e-14);
  }
  // Diagonal states are stationary.
  const Mat diag = Eigen::Vector3cd(0.2, 0.3, 0.5).asDiagonal();
  const Trajectory still = evolve(diag, &gen, nullptr, config);
  CHECK((still.states.back() - diag).norm() == 0.0);

  std::ostringstream csv;
  write_trajectory_csv(csv, traj, 0, 2);
  const std::string text = csv.str();
  CHECK(text.rfind("time,re,im,trace,purity,min_eigenvalue\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 22);
}

TEST_CASE("hamiltonian-only evolution is unitary") {
  std::mt19937_64 rng(8);
  const LatticeSpec chain = LatticeSpec::chain(4);
  const FockBasis basis(4, 2);
  const Mat H = kinetic_hamiltonian(basis, chain, 1.0).matrix +
                interaction_hamiltonian(basis, CouplingKernel(chain)).matrix;
  const Mat rho0 = random_pure_state(basis.size(), rng);
  EvolutionConfig config;
  config.total_time = 2.0;
  config.steps = 2000;
  config.record_every = 250;
  const Trajectory traj = evolve(rho0, nullptr, &H, config);
  for (const Mat& rho : traj.states) CHECK(std::abs(purity(rho) - 1.0) < 1e-8);
  const Mat U = unitary_from_spectrum(H, 2.0);
  CHECK(trace_norm(traj.states.back() - U * rho0 * U.adjoint()) < 1e-8);
}

TEST_CASE("second-order integrator converges on pure dephasing") {
  const double xi = 1.3;
  const NoiseGenerator gen = make_generator(2, 1, xi);
  const Mat rho0 = Mat::Constant(2, 2, 0.5);
  const double gamma = xi + kappa_sq_on_lattice(gen.kernel(), 0, 1) / (2.0 * xi);
  EvolutionConfig config;
  config.total_time = 2.0 / gamma;
  config.order = 2;
  config.steps = 4000;
  config.check_halving = false;
  const Trajectory traj = evolve(rho0, &gen, nullptr, config);
  CHECK(std::abs(traj.states.back()(0, 1).real() / (0.5 * std::exp(-2.0)) - 1.0) < 1e-6);
}

TEST_CASE("evolve rejects coarse steps and bad configs") {
  const NoiseGenerator gen = make_generator(3, 1, 1.0);
  const Mat rho = Mat::Identity(3, 3) / 3.0 + Mat::Constant(3, 3, 0.1) - 0.1 * Mat::Identity(3, 3);
  EvolutionConfig config;
  config.total_time = 5.0;
  config.steps = 10;
  CHECK_THROWS_AS(evolve(rho, &gen, nullptr, config), ConvergenceError);
  config.steps = 0;
  CHECK_THROWS_AS(evolve(rho, &gen, nullptr, config), InvalidArgument);
  config.steps = 10;
  config.order = 3;
  CHECK_THROWS_AS(evolve(rho, &gen, nullptr, config), InvalidArgument);
  config.order = 4;
  config.total_time = -1.0;
  CHECK_THROWS_AS(evolve(rho, &gen, nullptr, config), InvalidArgument);
}
