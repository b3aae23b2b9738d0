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

#include "ccgrav/matrix_util.hpp"

#include <cmath>

namespace ccgrav {

namespace {

Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd g(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) g(r, c) = {normal(rng), normal(rng)};
  }
  return g;
}

}  // namespace

double trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues().sum();
}

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double purity(const Eigen::MatrixXcd& rho) { return (rho * rho).trace().real(); }

Eigen::MatrixXcd random_density_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, rng);
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

Eigen::MatrixXcd random_pure_state(Eigen::Index dim, std::mt19937_64& rng) {
  Eigen::VectorXcd psi = gaussian_matrix(dim, 1, rng).col(0);
  psi.normalize();
  return psi * psi.adjoint();
}

Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
  const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace ccgrav
