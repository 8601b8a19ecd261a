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

#include "sqzt/fock.hpp"

#include <cmath>
#include <utility>

namespace sqzt::fock {

namespace {

void require_dim(int dim, int minimum = 2) {
  if (dim < minimum) {
    throw InvalidDimensionError("Fock dimension must be at least " +
                                std::to_string(minimum) + ", got " +
                                std::to_string(dim));
  }
}

}  // namespace

Operator::Operator(int dim, Matrix elements) : dim_(dim), m_(std::move(elements)) {
  require_dim(dim_);
  if (m_.rows() != dim_ || m_.cols() != dim_) {
    throw ContractViolationError("operator matrix shape does not match dim");
  }
  if (!m_.allFinite()) {
    throw ContractViolationError("operator entries must be finite");
  }
}

Operator::Operator(Matrix elements)
    : Operator(static_cast<int>(elements.rows()), std::move(elements)) {}

DensityMatrix DensityMatrix::from_matrix(Matrix m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ContractViolationError("density matrix must be square");
  }
  if (!m.allFinite()) {
    throw ContractViolationError("density matrix entries must be finite");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint().eval()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw ContractViolationError("density matrix is not Hermitian within 1e-12");
  }
  if (std::abs(m.trace() - Complex(1.0, 0.0)) > kTraceTol) {
    throw ContractViolationError("density matrix trace deviates from 1 beyond 1e-10");
  }
  return DensityMatrix(std::move(m));
}

void DensityMatrix::check_invariants() const {
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint().eval()).cwiseAbs().maxCoeff() > kHermitianTol * scale) {
    throw ContractViolationError("invariant violated: Hermiticity");
  }
  if (std::abs(m_.trace() - Complex(1.0, 0.0)) > kTraceTol) {
    throw ContractViolationError("invariant violated: unit trace");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericFailureError("eigensolver failed during invariant check");
  }
  if (solver.eigenvalues().minCoeff() < -kPsdTol) {
    throw ContractViolationError("invariant violated: positive semi-definiteness");
  }
}

DensityMatrix DensityMatrix::project(int new_dim, double *removed_mass) const {
  require_dim(new_dim);
  if (new_dim > dim()) {
    throw InvalidDimensionError("cannot project to a larger dimension");
  }
  Matrix block = m_.topLeftCorner(new_dim, new_dim);
  const double kept = block.trace().real();
  if (removed_mass != nullptr) {
    *removed_mass = 1.0 - kept;
  }
  if (kept <= 0.0) {
    throw NumericFailureError("projection removed all probability mass");
  }
  block /= kept;
  block = ((block + block.adjoint().eval()) * 0.5).eval();  // scrub rounding
  return DensityMatrix(std::move(block));
}

Operator annihilation(int dim) {
  require_dim(dim);
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) {
    m(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return Operator(dim, std::move(m));
}

Operator creation(int dim) { return annihilation(dim).adjoint(); }

Operator number_operator(int dim) {
  require_dim(dim);
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return Operator(dim, std::move(m));
}

Operator quadrature_operator(int dim, double theta) {
  const Matrix a = annihilation(dim).matrix();
  const Complex phase = std::polar(1.0, theta);
  Matrix m = (a * std::conj(phase) + a.adjoint() * phase) / std::sqrt(2.0);
  return Operator(dim, std::move(m));
}

Operator matrix_exponential(const Operator &op) {
  const Matrix &m = op.matrix();
  const int dim = op.dim();

  // ||M||_1 (maximum absolute column sum).
  double norm1 = 0.0;
  for (int j = 0; j < dim; ++j) {
    norm1 = std::max(norm1, m.col(j).cwiseAbs().sum());
  }

  int squarings = 0;
  double scale = 1.0;
  while (norm1 * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }

  const Matrix t = m * scale;
  Matrix result = Matrix::Identity(dim, dim);
  Matrix term = Matrix::Identity(dim, dim);
  // With ||T||_1 <= 0.5 the Taylor tail falls below 1e-16 within ~20 terms.
  for (int k = 1; k <= 32; ++k) {
    term = (term * t / static_cast<double>(k)).eval();
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16 * std::max(1.0, result.cwiseAbs().maxCoeff())) {
      break;
    }
  }
  for (int s = 0; s < squarings; ++s) {
    result = (result * result).eval();
    if (!result.allFinite()) {
      throw NumericFailureError("matrix exponential overflowed while squaring");
    }
  }
  if (!result.allFinite()) {
    throw NumericFailureError("matrix exponential produced non-finite entries");
  }
  return Operator(dim, std::move(result));
}

Operator squeeze_operator(const SqueezeParams &params, int dim) {
  require_dim(dim);
  if (params.r < 0.0) {
    throw ContractViolationError("squeezing factor r must be non-negative");
  }
  const Complex xi = std::polar(params.r, params.phi);
  const Matrix a = annihilation(dim).matrix();
  const Matrix a2 = a * a;
  Matrix gen = 0.5 * (std::conj(xi) * a2 - xi * a2.adjoint());
  return matrix_exponential(Operator(dim, std::move(gen)));
}

Operator squeeze_operator_factorized(const SqueezeParams &params, int dim) {
  require_dim(dim);
  if (params.r < 0.0) {
    throw ContractViolationError("squeezing factor r must be non-negative");
  }
  const double r = params.r;
  if (r == 0.0) {
    return Operator(dim, Matrix::Identity(dim, dim));
  }
  const double tr = std::tanh(r);
  const double log_half_tanh = std::log(tr / 2.0);
  const double log_sech = -std::log(std::cosh(r));
  const Complex up_phase = -std::polar(1.0, params.phi);   // -e^{i phi} per a^dag^2 factor
  const Complex down_phase = std::polar(1.0, -params.phi); // +e^{-i phi} per a^2 factor

  // exp(c a^dag^2) is lower banded: A[n+2k][n] = c^k/k! sqrt((n+2k)!/n!).
  // Entries are assembled in log space to avoid overflowing factorials.
  Matrix up = Matrix::Zero(dim, dim);
  Matrix down = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int k = 0; 2 * k + n < dim; ++k) {
      const double log_mag = k * log_half_tanh - std::lgamma(k + 1.0) +
                             0.5 * (std::lgamma(n + 2.0 * k + 1.0) - std::lgamma(n + 1.0));
      const double mag = std::exp(log_mag);
      const Complex up_k = std::pow(up_phase, k);
      const Complex down_k = std::pow(down_phase, k);
      up(n + 2 * k, n) = mag * up_k;
      down(n, n + 2 * k) = mag * down_k;
    }
  }
  Eigen::VectorXcd mid(dim);
  for (int n = 0; n < dim; ++n) {
    mid(n) = std::exp(log_sech * (n + 0.5));
  }
  Matrix result = up * mid.asDiagonal() * down;
  return Operator(dim, std::move(result));
}

Eigendecomposition hermitian_eigendecomposition(const Matrix &m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ContractViolationError("eigendecomposition input must be square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw ContractViolationError("eigendecomposition input is not Hermitian within 1e-8");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw NumericFailureError("Hermitian eigensolver failed to converge");
  }
  const int n = static_cast<int>(m.rows());
  Eigendecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Eigen sorts ascending; the contract is descending.
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

}  // namespace sqzt::fock
