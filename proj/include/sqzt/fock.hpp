// Copyright 2026 The sqzt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SQZT_FOCK_HPP_
#define SQZT_FOCK_HPP_

#include <Eigen/Dense>
#include <complex>

#include "sqzt/common.hpp"

// Truncated Fock-basis linear algebra.
//
// Conventions used throughout the toolkit (hbar = 1):
//   x = (a + a^dag)/sqrt(2),  p = (a - a^dag)/(i sqrt(2))
//   vacuum quadrature variance <x^2> = 1/2
//   x_theta = (a e^{-i theta} + a^dag e^{i theta})/sqrt(2)
// With this normalization the squeezing level in dB of a squeezed vacuum
// state with factor r is exactly (20/ln 10) * r.

namespace sqzt::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Default Fock truncation for full-scale reconstructions.
inline constexpr int kDefaultDim = 35;

// Invariant tolerances for DensityMatrix.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

// Default bound on probability mass a factory may silently truncate away.
inline constexpr double kDefaultTailTol = 1e-6;

struct SqueezeParams {
  double r = 0.0;    // squeezing factor, >= 0
  double phi = 0.0;  // squeezing angle, radians in [0, 2pi)
};

/// General (not necessarily Hermitian) operator on the truncated space.
class Operator {
 public:
  Operator(int dim, Matrix elements);
  explicit Operator(Matrix elements);

  int dim() const { return dim_; }
  const Matrix &matrix() const { return m_; }
  Matrix &matrix() { return m_; }

  Operator adjoint() const { return Operator(dim_, m_.adjoint()); }

 private:
  int dim_;
  Matrix m_;
};

/// Hermitian, unit-trace, positive semi-definite matrix. Construction
/// checks Hermiticity and trace; PSD (an O(dim^3) eigensolve) is checked by
/// check_invariants(), which factories' property tests call on every output.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix &matrix() const { return m_; }

  /// Full invariant check including positive semi-definiteness.
  void check_invariants() const;

  /// Truncate to new_dim and renormalize. removed_mass, when given, receives
  /// the probability mass dropped by the projection.
  DensityMatrix project(int new_dim, double *removed_mass = nullptr) const;

 private:
  explicit DensityMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Ladder operator: a[n-1][n] = sqrt(n).
Operator annihilation(int dim);
Operator creation(int dim);
Operator number_operator(int dim);

/// x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2).
Operator quadrature_operator(int dim, double theta);

/// exp(M) by scaling-and-squaring (scale until ||M||_1 <= 0.5, Taylor,
/// square back). Throws NumericFailureError if the result overflows.
Operator matrix_exponential(const Operator &op);

/// S(xi) = exp[(xi^* a^2 - xi a^dag^2)/2], xi = r e^{i phi}, computed through
/// matrix_exponential. Exactly unitary within the truncation.
Operator squeeze_operator(const SqueezeParams &params, int dim);

/// The same operator built from its normal-ordered factorization
///   exp(-e^{i phi} tanh(r)/2 a^dag^2) sech(r)^{n+1/2} exp(e^{-i phi} tanh(r)/2 a^2).
/// All three factors have closed-form banded matrix elements, so the result
/// is the exact truncation of the infinite-dimensional operator (not unitary
/// at the top levels). Much faster than the exponential at large dims.
Operator squeeze_operator_factorized(const SqueezeParams &params, int dim);

struct Eigendecomposition {
  RealVector eigenvalues;  // sorted descending
  Matrix eigenvectors;     // columns, matching order
};

/// Eigendecomposition of a Hermitian matrix (input checked within 1e-8).
Eigendecomposition hermitian_eigendecomposition(const Matrix &m);

}  // namespace sqzt::fock

#endif  // SQZT_FOCK_HPP_
