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
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>

#include "doctest.h"

#include "ccgrav/errors.hpp"
#include "ccgrav/lattice.hpp"

using namespace ccgrav;
using std::numbers::pi;

TEST_CASE("chain and block geometry") {
  const LatticeSpec chain = LatticeSpec::chain(5);
  CHECK(chain.dimension() == 1);
  CHECK(chain.num_sites() == 5);
  CHECK(chain.coord(0) == IntVec3{-2, 0, 0});
  CHECK(chain.coord(4) == IntVec3{2, 0, 0});
  CHECK(chain.momentum_cutoff() == doctest::Approx(pi));
  CHECK(LatticeSpec::chain(3, 0.5).momentum_cutoff() == doctest::Approx(2.0 * pi));

  const LatticeSpec block = LatticeSpec::block({2, 3, 4});
  CHECK(block.dimension() == 3);
  CHECK(block.num_sites() == 24);
  for (std::size_t s = 0; s < block.num_sites(); ++s) {
    const auto back = block.index_of(block.coord(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  // x is the slowest index.
  CHECK(block.coord(1)[2] == block.coord(0)[2] + 1);
  CHECK(block.coord(12)[0] == block.coord(0)[0] + 1);
  CHECK_FALSE(block.index_of({100, 0, 0}).has_value());
}

TEST_CASE("invalid lattices are rejected") {
  CHECK_THROWS_AS(LatticeSpec::chain(0), InvalidArgument);
  CHECK_THROWS_AS(LatticeSpec::chain(3, 0.0), InvalidArgument);
  CHECK_THROWS_AS(LatticeSpec::block({2, 0, 2}), InvalidArgument);
  CHECK_THROWS_AS(LatticeSpec::chain(3).coord(3), InvalidArgument);
}

TEST_CASE("separation is euclidean in units of a") {
  const LatticeSpec block = LatticeSpec::block({3, 3, 3}, 2.0);
  const std::size_t a = *block.index_of({-1, -1, -1});
  const std::size_t b = *block.index_of({1, 1, 0});
  CHECK(block.separation(a, b) == doctest::Approx(3.0));
  CHECK(block.separation(a, a) == 0.0);
}

TEST_CASE("mode function values") {
  const LatticeSpec chain = LatticeSpec::chain(3);  // sites at -1, 0, 1
  CHECK(mode_function(chain, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(mode_function(chain, 1, 1.0)) < 1e-15);
  CHECK(std::abs(mode_function(chain, 1, -3.0)) < 1e-15);
  CHECK(mode_function(chain, 1, 0.5) == doctest::Approx(2.0 / pi).epsilon(1e-14));
  // Continuous through the removable singularity.
  CHECK(mode_function(chain, 1, 1e-9) == doctest::Approx(1.0).epsilon(1e-12));

  const LatticeSpec wide = LatticeSpec::chain(3, 2.0);
  CHECK(mode_function(wide, 1, 0.0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(mode_function(wide, 1, 1.0) == doctest::Approx(std::sqrt(2.0) / pi));

  const LatticeSpec block = LatticeSpec::block({3, 3, 3});
  const std::size_t centre = *block.index_of({0, 0, 0});
  const Vec3 x{0.5, 0.25, -0.5};
  CHECK(mode_function(block, centre, x) ==
        doctest::Approx(mode_function(chain, 1, 0.5) * mode_function(chain, 1, 0.25) *
                        mode_function(chain, 1, -0.5)));
}

namespace {

// Momentum-space form of the same overlap: the sinc modes are band limited, so
// <f_j|f_l> = (a / 2 pi) * integral over [-pi/a, pi/a] of exp(i k (x_j - x_l)).
double fourier_overlap(int offset, double a) {
  auto f = [&](double k) { return std::cos(k * offset * a); };
  return a / (2.0 * pi) * boost::math::quadrature::gauss<double, 60>::integrate(f, -pi / a, pi / a);
}

}  // namespace

TEST_CASE("mode overlaps form the identity") {
  const LatticeSpec chain = LatticeSpec::chain(11);
  for (std::size_t j = 0; j < chain.num_sites(); ++j) {
    for (std::size_t l = j; l < chain.num_sites(); ++l) {
      const double value = overlap(chain, j, l);
      const int offset = static_cast<int>(l) - static_cast<int>(j);
      CHECK(std::abs(value - fourier_overlap(offset, 1.0)) < 1e-6);
      CHECK(std::abs(value - (j == l ? 1.0 : 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("overlap is stable under a wider window and tighter refinement") {
  const LatticeSpec chain = LatticeSpec::chain(11, 0.7);
  const double base = overlap(chain, 2, 7);
  const double refined = overlap(chain, 2, 7, OverlapConfig{100.0, 1e-10});
  CHECK(std::abs(base) < 1e-6);
  CHECK(std::abs(base - refined) < 1e-6);
  CHECK(overlap(chain, 4, 4) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("3-D overlaps factorise") {
  const LatticeSpec block = LatticeSpec::block({2, 2, 2});
  CHECK(overlap(block, 0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(overlap(block, 0, 5)) < 1e-6);
}

TEST_CASE("coupling kernel values") {
  const LatticeSpec chain = LatticeSpec::chain(12);
  const CouplingKernel kernel(chain);
  CHECK(kernel.chi(3, 3) == doctest::Approx(-1.0));
  CHECK(kernel.chi(3, 4) == doctest::Approx(-0.5));
  CHECK(kernel.chi(0, 10) == doctest::Approx(-1.0 / 11.0));
  CHECK(kernel.softened_potential(0, 3) == doctest::Approx(-0.25));
  CHECK_THROWS_AS(kernel.softened_potential(2, 2), InvalidArgument);

  const CouplingKernel scaled(LatticeSpec::chain(4, 2.0), 3.0);
  // d = a: -s / (2a)
  CHECK(scaled.softened_potential(0, 1) == doctest::Approx(-3.0 / 4.0));

  CHECK(chi_between({0, 0, 0}, {3, 4, 0}) == doctest::Approx(-1.0 / 6.0));
  CHECK(chi_between({1, 1, 1}, {1, 1, 1}, 2.0) == doctest::Approx(-2.0));
  CHECK_THROWS_AS(CouplingKernel(chain, 0.0), InvalidArgument);
}

TEST_CASE("softened potential approaches Newton at long range") {
  const CouplingKernel kernel(LatticeSpec::chain(1001));
  const double d = 1000.0;
  const double newton = -1.0 / d;  // -G m^2 / (2 d) with G m^2 / 2 = 1
  CHECK(std::abs(kernel.softened_potential(0, 1000) / newton - 1.0) < 1e-3);
}

TEST_CASE("kernel symmetry, sign and monotonicity on random blocks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> extent(1, 4);
    std::uniform_real_distribution<double> scale(0.1, 5.0);
    const double s = scale(rng);
    const CouplingKernel kernel(LatticeSpec::block({extent(rng), extent(rng), extent(rng)}), s);
    const std::size_t n = kernel.lattice().num_sites();
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(kernel.chi(i, i) == doctest::Approx(-s));
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(kernel.chi(i, j) == kernel.chi(j, i));
        CHECK(kernel.chi(i, j) < 0.0);
        if (i != j) CHECK(std::abs(kernel.chi(i, j)) < s);
        for (std::size_t k = 0; k < n; ++k) {
          const double dij = kernel.lattice().separation(i, j);
          const double dik = kernel.lattice().separation(i, k);
          if (i != j && i != k && dij < dik - 1e-12) {
            CHECK(std::abs(kernel.softened_potential(i, j)) > std::abs(kernel.softened_potential(i, k)));
          }
        }
      }
    }
  }
}
