// Copyright 2026 The qbath Authors
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

#ifndef QBATH_CORE_HPP
#define QBATH_CORE_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qbath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Dense operator on a 2^N dimensional qubit register.
using OperatorMatrix = ComplexMatrix;

/// Index of a qubit in the register. Node 0 is the leftmost tensor factor.
using NodeId = int;

inline constexpr Complex kI{0.0, 1.0};

/// Argument outside an operation's domain (bad site, empty partition, mismatched dims).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration or topology failed validation.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrated state drifted outside the physical tolerance.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Malformed input text (config, CSV, model file).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system failure; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest entry of |A - A^dagger|.
inline double hermiticity_defect(const ComplexMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace qbath

#endif  // QBATH_CORE_HPP
