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

#include <stdexcept>
#include <string>

namespace ccgrav {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: out-of-range indices, mismatched lattices, nonpositive
/// physical parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure (quadrature, lattice sum, time stepping) failed to
/// reach its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Ancilla population leaked into the top of the Fock truncation.
class TruncationOverflow : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// Input matrix is not a valid density matrix.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace ccgrav
