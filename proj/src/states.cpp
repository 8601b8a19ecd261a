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

#include "sqzt/states.hpp"

#include <cmath>

namespace sqzt::states {

namespace {

constexpr int kWorkDimCap = 256;

void require_dim(int dim) {
  if (dim < 2) {
    throw InvalidDimensionError("state factories require dim >= 2");
  }
}

fock::Matrix thermal_diagonal(double nbar, int dim) {
  fock::Matrix m = fock::Matrix::Zero(dim, dim);
  if (nbar <= 0.0) {
    m(0, 0) = 1.0;
    return m;
  }
  // p_n = nbar^n / (1+nbar)^(n+1), filled without renormalizing; callers
  // decide what to do with the tail.
  const double ratio = nbar / (1.0 + nbar);
  double p = 1.0 / (1.0 + nbar);
  for (int n = 0; n < dim; ++n) {
    m(n, n) = p;
    p *= ratio;
  }
  return m;
}

double thermal_tail(double nbar, int dim) {
  if (nbar <= 0.0) return 0.0;
  return std::pow(nbar / (1.0 + nbar), dim);
}

fock::DensityMatrix finalize(fock::Matrix m, double tail_tol, const char *what) {
  const double kept = m.trace().real();
  if (1.0 - kept >= tail_tol) {
    throw TruncationOverflowError(std::string(what) +
                                  ": truncated tail mass " + std::to_string(1.0 - kept) +
                                  " exceeds tolerance " + std::to_string(tail_tol));
  }
  m /= kept;
  m = ((m + m.adjoint().eval()) * 0.5).eval();
  return fock::DensityMatrix::from_matrix(std::move(m));
}

}  // namespace

int working_dim(double r, double nbar, int dim, double tail_tol) {
  // Photon-number tails: a squeezed thermal state decays geometrically with
  // per-photon ratio ~max(tanh r, nbar/(1+nbar)). Pick the dimension where
  // that bound drops two decades below the tolerance.
  const double target = std::max(tail_tol * 1e-2, 1e-14);
  const double q = std::max({std::tanh(r), nbar / (1.0 + nbar), 0.05});
  const double mean = nbar + (2.0 * nbar + 1.0) * std::sinh(r) * std::sinh(r);
  int est = static_cast<int>(std::ceil(std::log(target * (1.0 - q)) / std::log(q))) +
            static_cast<int>(std::ceil(2.0 * mean)) + 8;
  est = std::max(est, dim);
  return std::min(est, kWorkDimCap);
}

fock::DensityMatrix vacuum(int dim) {
  require_dim(dim);
  fock::Matrix m = fock::Matrix::Zero(dim, dim);
  m(0, 0) = 1.0;
  return fock::DensityMatrix::from_matrix(std::move(m));
}

fock::DensityMatrix thermal(const ThermalParams &params, int dim, double tail_tol) {
  require_dim(dim);
  if (params.nbar < 0.0 || !std::isfinite(params.nbar)) {
    throw ContractViolationError("thermal nbar must be finite and >= 0");
  }
  fock::Matrix m = thermal_diagonal(params.nbar, dim);
  return finalize(std::move(m), tail_tol, "thermal");
}

fock::DensityMatrix squeezed_vacuum(const fock::SqueezeParams &sq, int dim,
                                    double tail_tol) {
  require_dim(dim);
  if (sq.r == 0.0) return vacuum(dim);
  // The factorized operator's low block is exact, so the first dim entries
  // of S|0> need no enlarged working dimension; the lost norm is the true
  // tail mass.
  const fock::Operator s = fock::squeeze_operator_factorized(sq, dim);
  Eigen::VectorXcd psi = s.matrix().col(0);
  fock::Matrix m = psi * psi.adjoint();
  return finalize(std::move(m), tail_tol, "squeezed_vacuum");
}

fock::DensityMatrix squeezed_thermal(const fock::SqueezeParams &sq,
                                     const ThermalParams &th, int dim,
                                     double tail_tol) {
  require_dim(dim);
  if (th.nbar < 0.0 || !std::isfinite(th.nbar)) {
    throw ContractViolationError("thermal nbar must be finite and >= 0");
  }
  if (th.nbar == 0.0) return squeezed_vacuum(sq, dim, tail_tol);
  if (sq.r == 0.0) return thermal(th, dim, tail_tol);

  // The thermal input must be supported well inside the working dimension,
  // otherwise the computed block is not the true state's block.
  int work = working_dim(sq.r, th.nbar, dim, tail_tol);
  while (thermal_tail(th.nbar, work) > std::max(tail_tol * 1e-3, 1e-15) &&
         work < kWorkDimCap) {
    work = std::min(work + 16, kWorkDimCap);
  }
  if (thermal_tail(th.nbar, work) > tail_tol) {
    throw TruncationOverflowError("squeezed_thermal: nbar too large for supported dims");
  }

  const fock::Operator s = fock::squeeze_operator_factorized(sq, work);
  const fock::Matrix rho_th = thermal_diagonal(th.nbar, work);
  // Only the first dim rows of S matter for the projected block.
  const fock::Matrix s_block = s.matrix().topRows(dim);
  fock::Matrix m = s_block * rho_th * s_block.adjoint();
  return finalize(std::move(m), tail_tol, "squeezed_thermal");
}

StateParams sample_params(const StateFamily &family, std::mt19937_64 &rng) {
  StateParams p;
  p.sq_db = uniform(rng, 0.0, family.max_db);
  p.phi = uniform(rng, 0.0, 2.0 * M_PI);
  const double lo = std::log(family.nbar_min);
  const double hi = std::log(family.nbar_max);
  p.nbar = std::exp(uniform(rng, lo, hi));
  p.loss = uniform(rng, 0.0, family.loss_max);
  p.theta_pn = uniform(rng, 0.0, family.theta_max);
  return p;
}

}  // namespace sqzt::states
