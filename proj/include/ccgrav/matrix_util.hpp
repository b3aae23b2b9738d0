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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ccgrav {

/// Sum of singular values.
double trace_norm(const Eigen::MatrixXcd& m);

/// max |A - A^dagger| over entries.
double hermiticity_defect(const Eigen::MatrixXcd& m);

/// Smallest eigenvalue of the Hermitian part (A + A^dagger) / 2.
double min_eigenvalue(const Eigen::MatrixXcd& m);

double purity(const Eigen::MatrixXcd& rho);

/// Random full-rank density matrix G G^dagger / tr, G with Gaussian entries.
Eigen::MatrixXcd random_density_matrix(Eigen::Index dim, std::mt19937_64& rng);

/// Random pure state |psi><psi|.
Eigen::MatrixXcd random_pure_state(Eigen::Index dim, std::mt19937_64& rng);

/// Random Hermitian matrix with Gaussian entries (not normalised).
Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::mt19937_64& rng);

}  // namespace ccgrav
