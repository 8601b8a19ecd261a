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

#ifndef SQZT_METRICS_HPP_
#define SQZT_METRICS_HPP_

#include <optional>
#include <vector>

#include "sqzt/fock.hpp"
#include "sqzt/states.hpp"

// Evaluation of reconstructed states: fidelity, purity, squeezing levels,
// Wigner function and dominant-component decomposition.

namespace sqzt::metrics {

/// |tr sqrt(sqrt(rho) sigma sqrt(rho))|^2. Matrix square roots via
/// eigendecomposition with negative eigenvalues (within -1e-10) clamped to
/// zero, since reconstructions sit on the PSD boundary.
double fidelity(const fock::DensityMatrix &rho, const fock::DensityMatrix &sigma);

/// tr(rho^2), clamped to the [1/dim - eps, 1 + eps] sanity band.
double purity(const fock::DensityMatrix &rho);

struct SqueezingLevels {
  double sq_db = 0.0;      // -10 log10(V_min / V_vac)
  double as_db = 0.0;      // +10 log10(V_max / V_vac)
  double angle_min = 0.0;  // quadrature angle of V_min, in [0, pi)
};

/// Extremal quadrature variances from the (x, p) covariance matrix.
SqueezingLevels squeezing_levels(const fock::DensityMatrix &rho);

struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  Eigen::MatrixXd values;  // values(i, j) = W(x_axis[i], p_axis[j])

  /// Riemann sum, approximately 1 on a wide enough grid.
  double riemann_sum() const;
};

/// W(x,p) from the Laguerre-kernel Fock expansion. Throws NumericFailureError
/// if the accumulated imaginary residue exceeds 1e-10.
WignerGrid wigner(const fock::DensityMatrix &rho, const std::vector<double> &x_axis,
                  const std::vector<double> &p_axis);

/// Serial reference; bit-identical to wigner().
WignerGrid wigner_serial(const fock::DensityMatrix &rho,
                         const std::vector<double> &x_axis,
                         const std::vector<double> &p_axis);

/// Uniform axis of n points over +-span_sigmas vacuum sigmas (default grid:
/// 201 points over +-6 sigma_vac).
std::vector<double> default_wigner_axis(int points = 201, double span_sigmas = 6.0);

struct Decomposition {
  double sigma1 = 0.0;             // dominant weight
  fock::DensityMatrix dominant;    // rank-1 projector of the top eigenvector
  double sigma_non = 0.0;          // 1 - sigma1
  fock::DensityMatrix residual;    // renormalized remainder
  bool ambiguous = false;          // top eigenvalue gap below 1e-9
};

/// Spectral split rho = sigma1 |v1><v1| + sigma_non residual. The top
/// eigenvector's phase is fixed so its first significant component is real
/// positive; a degenerate top eigenvalue is flagged and tie-broken
/// deterministically by that phase convention.
Decomposition decompose(const fock::DensityMatrix &rho);

struct SqueezedThermalMatch {
  fock::SqueezeParams sq;
  states::ThermalParams th;
  double fidelity = 0.0;
};

/// Best squeezed-thermal approximation of rho by direct search over
/// (r, phi, nbar), used when reporting the non-dominant remainder.
SqueezedThermalMatch match_squeezed_thermal(const fock::DensityMatrix &rho);

}  // namespace sqzt::metrics

#endif  // SQZT_METRICS_HPP_
