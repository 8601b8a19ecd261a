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

#include "sqzt/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "sqzt/homodyne.hpp"

namespace sqzt::metrics {

namespace {

fock::Matrix psd_sqrt(const fock::Matrix &m) {
  const fock::Eigendecomposition eig = fock::hermitian_eigendecomposition(m);
  const int n = static_cast<int>(m.rows());
  fock::Matrix out = fock::Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double lam = eig.eigenvalues(i);
    if (lam < -1e-8) {
      throw ContractViolationError("matrix square root of a non-PSD input");
    }
    const double s = std::sqrt(std::max(lam, 0.0));
    out.noalias() += s * eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
  }
  return out;
}

}  // namespace

double fidelity(const fock::DensityMatrix &rho, const fock::DensityMatrix &sigma) {
  if (rho.dim() != sigma.dim()) {
    throw ContractViolationError("fidelity requires equal dimensions");
  }
  const fock::Matrix root = psd_sqrt(rho.matrix());
  fock::Matrix inner = root * sigma.matrix() * root;
  inner = ((inner + inner.adjoint().eval()) * 0.5).eval();
  const fock::Eigendecomposition eig = fock::hermitian_eigendecomposition(inner);
  double sum = 0.0;
  for (int i = 0; i < rho.dim(); ++i) {
    sum += std::sqrt(std::max(eig.eigenvalues(i), 0.0));
  }
  return sum * sum;
}

double purity(const fock::DensityMatrix &rho) {
  const double p = rho.matrix().squaredNorm();  // tr(rho^2) for Hermitian rho
  const double lo = 1.0 / rho.dim() - 1e-9;
  const double hi = 1.0 + 1e-9;
  if (p < lo - 1e-6 || p > hi + 1e-6) {
    throw NumericFailureError("purity far outside the physical band");
  }
  return std::clamp(p, lo, hi);
}

SqueezingLevels squeezing_levels(const fock::DensityMatrix &rho) {
  const homodyne::Covariance cov = homodyne::covariance(rho);
  const double v_min = cov.min_variance();
  const double v_max = cov.max_variance();
  if (v_min <= 0.0) {
    throw NumericFailureError("covariance matrix is not positive definite");
  }
  SqueezingLevels out;
  out.sq_db = -10.0 * std::log10(v_min / 0.5);
  out.as_db = 10.0 * std::log10(v_max / 0.5);
  double angle = 0.5 * std::atan2(2.0 * cov.cxp, cov.vxx - cov.vpp);
  if (cov.variance_at(angle) > cov.variance_at(angle + M_PI / 2.0)) {
    angle += M_PI / 2.0;
  }
  angle = std::fmod(angle, M_PI);
  if (angle < 0.0) angle += M_PI;
  out.angle_min = angle;
  return out;
}

double WignerGrid::riemann_sum() const {
  if (x_axis.size() < 2 || p_axis.size() < 2) return 0.0;
  const double dx = x_axis[1] - x_axis[0];
  const double dp = p_axis[1] - p_axis[0];
  return values.sum() * dx * dp;
}

std::vector<double> default_wigner_axis(int points, double span_sigmas) {
  const double span = span_sigmas * std::sqrt(0.5);
  std::vector<double> axis(points);
  for (int i = 0; i < points; ++i) {
    axis[i] = -span + 2.0 * span * i / (points - 1.0);
  }
  return axis;
}

namespace {

// One row of the Wigner grid (fixed x, all p). Accumulates both triangles of
// rho independently so the imaginary parts cancel only to rounding; the
// residue is returned for the numeric-failure check.
//
// W(x,p) = (1/pi) e^{-z} sum_d sum_n (-1)^n sqrt(n!/(n+d)!) L_n^d(2z)
//          * [rho_{n+d,n} beta^d + rho_{n,n+d} conj(beta)^d],   d >= 1 terms,
// beta = sqrt(2)(x - i p), z = x^2 + p^2; e^{-z} is folded into the Laguerre
// recurrence seed to keep intermediates bounded.
double wigner_row(const fock::Matrix &rho, const std::vector<double> &ctab, int dim,
                  double x, const std::vector<double> &p_axis, double *out) {
  double residue = 0.0;
  for (std::size_t jp = 0; jp < p_axis.size(); ++jp) {
    const double p = p_axis[jp];
    const double z = x * x + p * p;
    const double y = 2.0 * z;
    const fock::Complex beta = std::sqrt(2.0) * fock::Complex(x, -p);
    fock::Complex acc = 0.0;
    fock::Complex beta_d = 1.0;
    for (int d = 0; d < dim; ++d) {
      if (d > 0) beta_d *= beta;
      // Scaled Laguerre recurrence: Lt_n = e^{-z} L_n^d(y).
      double lt_prev = std::exp(-z);
      double lt = lt_prev * (1.0 + d - y);
      fock::Complex lower = 0.0;  // sum_n rho_{n+d,n} k_{n,d}
      fock::Complex upper = 0.0;  // sum_n rho_{n,n+d} k_{n,d}
      for (int n = 0; n + d < dim; ++n) {
        double lcur;
        if (n == 0) {
          lcur = lt_prev;
        } else if (n == 1) {
          lcur = lt;
        } else {
          const double lnext =
              ((2.0 * (n - 1) + 1.0 + d - y) * lt - (n - 1.0 + d) * lt_prev) / n;
          lt_prev = lt;
          lt = lnext;
          lcur = lnext;
        }
        const double k = ((n & 1) ? -1.0 : 1.0) * ctab[n * dim + d] * lcur;
        lower += rho(n + d, n) * k;
        upper += rho(n, n + d) * k;
      }
      if (d == 0) {
        acc += 0.5 * (lower + upper);  // both triangles saw the diagonal
      } else {
        acc += beta_d * lower + std::conj(beta_d) * upper;
      }
    }
    out[jp] = acc.real() / M_PI;
    residue = std::max(residue, std::abs(acc.imag()) / M_PI);
  }
  return residue;
}

std::vector<double> sqrt_factorial_ratio_table(int dim) {
  // ctab[n*dim + d] = sqrt(n! / (n+d)!)
  std::vector<double> ctab(static_cast<std::size_t>(dim) * dim);
  for (int n = 0; n < dim; ++n) {
    const double lg_n = std::lgamma(n + 1.0);
    for (int d = 0; n + d < dim; ++d) {
      ctab[n * dim + d] = std::exp(0.5 * (lg_n - std::lgamma(n + d + 1.0)));
    }
  }
  return ctab;
}

WignerGrid wigner_impl(const fock::DensityMatrix &rho,
                       const std::vector<double> &x_axis,
                       const std::vector<double> &p_axis, bool parallel) {
  if (x_axis.size() < 2 || p_axis.size() < 2) {
    throw ContractViolationError("wigner grid axes need at least 2 points");
  }
  const int dim = rho.dim();
  const std::vector<double> ctab = sqrt_factorial_ratio_table(dim);
  WignerGrid grid;
  grid.x_axis = x_axis;
  grid.p_axis = p_axis;
  grid.values.resize(x_axis.size(), p_axis.size());
  std::vector<double> residues(x_axis.size(), 0.0);

  const int rows = static_cast<int>(x_axis.size());
  const int threads = parallel ? thread_count() : 1;
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int i = 0; i < rows; ++i) {
    std::vector<double> row(p_axis.size());
    residues[i] = wigner_row(rho.matrix(), ctab, dim, x_axis[i], p_axis, row.data());
    for (std::size_t j = 0; j < p_axis.size(); ++j) grid.values(i, j) = row[j];
  }

  const double residue = *std::max_element(residues.begin(), residues.end());
  if (residue > 1e-10) {
    throw NumericFailureError("wigner imaginary residue " + std::to_string(residue) +
                              " above threshold");
  }
  return grid;
}

}  // namespace

WignerGrid wigner(const fock::DensityMatrix &rho, const std::vector<double> &x_axis,
                  const std::vector<double> &p_axis) {
  return wigner_impl(rho, x_axis, p_axis, true);
}

WignerGrid wigner_serial(const fock::DensityMatrix &rho,
                         const std::vector<double> &x_axis,
                         const std::vector<double> &p_axis) {
  return wigner_impl(rho, x_axis, p_axis, false);
}

Decomposition decompose(const fock::DensityMatrix &rho) {
  const int dim = rho.dim();
  const fock::Eigendecomposition eig = fock::hermitian_eigendecomposition(rho.matrix());
  const double sigma1 = eig.eigenvalues(0);
  const bool ambiguous = dim > 1 && (sigma1 - eig.eigenvalues(1)) < 1e-9;

  // Phase convention: first component with significant magnitude made real
  // positive, so the dominant projector is deterministic under degeneracy.
  Eigen::VectorXcd v = eig.eigenvectors.col(0);
  for (int i = 0; i < dim; ++i) {
    if (std::abs(v(i)) > 1e-8) {
      v *= std::polar(1.0, -std::arg(v(i)));
      break;
    }
  }
  fock::Matrix dom = v * v.adjoint();
  dom = ((dom + dom.adjoint().eval()) * 0.5).eval();

  const double sigma_non = 1.0 - sigma1;
  fock::Matrix res;
  if (sigma_non > 1e-12) {
    res = fock::Matrix::Zero(dim, dim);
    double kept = 0.0;
    for (int i = 1; i < dim; ++i) {
      const double lam = std::max(eig.eigenvalues(i), 0.0);
      if (lam == 0.0) continue;
      res.noalias() += lam * eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint();
      kept += lam;
    }
    if (kept <= 0.0) {
      res = fock::Matrix::Identity(dim, dim) / dim;
    } else {
      res /= kept;
      res = ((res + res.adjoint().eval()) * 0.5).eval();
    }
  } else {
    res = fock::Matrix::Identity(dim, dim) / dim;
  }

  return Decomposition{sigma1, fock::DensityMatrix::from_matrix(std::move(dom)),
                       sigma_non, fock::DensityMatrix::from_matrix(std::move(res)),
                       ambiguous};
}

namespace {

double match_objective(const fock::DensityMatrix &rho, double r, double phi,
                       double nbar) {
  if (r < 0.0 || nbar < 0.0) return 0.0;
  try {
    const fock::DensityMatrix cand = states::squeezed_thermal(
        {r, phi}, {nbar}, rho.dim(), /*tail_tol=*/0.2);
    return fidelity(rho, cand);
  } catch (const Error &) {
    return 0.0;
  }
}

}  // namespace

SqueezedThermalMatch match_squeezed_thermal(const fock::DensityMatrix &rho) {
  // Moment-based start: a squeezed thermal state has V_min V_max = ((2n+1)/2)^2
  // and V_max/V_min = e^{4r}.
  const homodyne::Covariance cov = homodyne::covariance(rho);
  const double v_min = std::max(cov.min_variance(), 1e-6);
  const double v_max = std::max(cov.max_variance(), v_min);
  double nbar = std::max(std::sqrt(v_min * v_max) - 0.5, 0.0);
  double r = 0.25 * std::log(v_max / v_min);
  const SqueezingLevels lev = squeezing_levels(rho);
  double phi = std::fmod(2.0 * lev.angle_min, 2.0 * M_PI);

  double best = match_objective(rho, r, phi, nbar);
  // Coordinate refinement around the moment estimate.
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int coord = 0; coord < 3; ++coord) {
      const double base[3] = {r, phi, nbar};
      double width = (coord == 0 ? 0.2 : coord == 1 ? 0.3 : 0.15) / (sweep + 1.0);
      double arg_best = base[coord];
      for (int step = -4; step <= 4; ++step) {
        double trial[3] = {r, phi, nbar};
        trial[coord] = base[coord] + width * step / 4.0;
        const double f = match_objective(rho, trial[0], trial[1], trial[2]);
        if (f > best) {
          best = f;
          arg_best = trial[coord];
        }
      }
      (coord == 0 ? r : coord == 1 ? phi : nbar) = arg_best;
    }
  }
  return SqueezedThermalMatch{{std::max(r, 0.0), phi}, {std::max(nbar, 0.0)}, best};
}

}  // namespace sqzt::metrics
