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

#ifndef SQZT_TESTS_ORACLES_HPP_
#define SQZT_TESTS_ORACLES_HPP_

// Independent test oracles. Everything here is deliberately written against
// the math, not against the library's implementation paths.

#include <cmath>
#include <random>
#include <vector>

#include "sqzt/fock.hpp"
#include "sqzt/homodyne.hpp"

namespace sqzt::oracles {

/// Gauss-Hermite nodes/weights for integrals of e^{-x^2} g(x), by
/// Golub-Welsch on the Jacobi matrix.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussHermite(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double b = std::sqrt(i / 2.0);
      jacobi(i, i - 1) = b;
      jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    nodes.resize(n);
    weights.resize(n);
    const double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
      nodes[i] = solver.eigenvalues()(i);
      const double v0 = solver.eigenvectors()(0, i);
      weights[i] = sqrt_pi * v0 * v0;
    }
  }

  /// Integrates f over the real line; f must contain its own e^{-x^2} decay
  /// (the weight is divided back out).
  template <typename F>
  double integrate(F f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      acc += weights[i] * f(nodes[i]) * std::exp(nodes[i] * nodes[i]);
    }
    return acc;
  }
};

/// Quadrature pdf moment by Gauss-Hermite: integral of x^k p(x|theta).
/// Exact (up to rounding) when n >= dim + k, since p is a Hermite-function
/// polynomial times e^{-x^2}.
inline double pdf_moment(const fock::DensityMatrix &rho, double theta, int k,
                         int nodes = 240) {
  const GaussHermite gh(nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
    const double x = gh.nodes[i];
    const double p = homodyne::quadrature_pdf(rho, theta, x);
    acc += gh.weights[i] * std::exp(x * x) * std::pow(x, k) * p;
  }
  return acc;
}

/// Random density matrix: normalized A A^dag for a complex Gaussian A.
inline fock::DensityMatrix random_density(int dim, std::mt19937_64 &rng) {
  fock::Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = fock::Complex(normal01(rng), normal01(rng));
    }
  }
  fock::Matrix m = a * a.adjoint();
  m /= m.trace().real();
  m = ((m + m.adjoint().eval()) * 0.5).eval();
  return fock::DensityMatrix::from_matrix(std::move(m));
}

/// Haar-ish random unitary via QR of a complex Gaussian.
inline fock::Matrix random_unitary(int dim, std::mt19937_64 &rng) {
  fock::Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      a(i, j) = fock::Complex(normal01(rng), normal01(rng));
    }
  }
  Eigen::HouseholderQR<fock::Matrix> qr(a);
  fock::Matrix q = qr.householderQ();
  return q;
}

inline double mean_of(const std::vector<double> &v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / v.size();
}

inline double variance_of(const std::vector<double> &v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / v.size();
}

}  // namespace sqzt::oracles

#endif  // SQZT_TESTS_ORACLES_HPP_
