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

#include "sqzt/channels.hpp"

#include <cmath>
#include <vector>

namespace sqzt::channels {

namespace {

void check_loss(double loss) {
  if (!(loss >= 0.0 && loss <= 1.0)) {
    throw ContractViolationError("loss fraction must lie in [0, 1]");
  }
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta < M_PI / 2.0)) {
    throw ContractViolationError("phase-noise theta must lie in [0, pi/2)");
  }
}

}  // namespace

fock::DensityMatrix apply_loss(const fock::DensityMatrix &rho, const LossParam &loss) {
  check_loss(loss.loss);
  const double l = loss.loss;
  const int dim = rho.dim();
  if (l == 0.0) return rho;

  const fock::Matrix &in = rho.matrix();
  fock::Matrix out = fock::Matrix::Zero(dim, dim);

  if (l == 1.0) {
    out(0, 0) = 1.0;
    return fock::DensityMatrix::from_matrix(std::move(out));
  }

  const double eta = 1.0 - l;
  const double log_eta = std::log(eta);
  const double log_one_minus_eta = std::log(l);
  std::vector<double> lgam(dim + 1);
  for (int n = 0; n <= dim; ++n) lgam[n] = std::lgamma(n + 1.0);

  // Kraus weight sqrt(C(n,k) eta^(n-k) (1-eta)^k), assembled in log space.
  auto amp = [&](int n, int k) {
    const double log_c = lgam[n] - lgam[k] - lgam[n - k];
    return std::exp(0.5 * (log_c + (n - k) * log_eta + k * log_one_minus_eta));
  };

  for (int k = 0; k < dim; ++k) {
    for (int m = k; m < dim; ++m) {
      const double am = amp(m, k);
      for (int n = k; n < dim; ++n) {
        out(m - k, n - k) += am * amp(n, k) * in(m, n);
      }
    }
  }

  const double tr = out.trace().real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw NumericFailureError("loss channel failed to preserve trace");
  }
  out /= tr;
  out = ((out + out.adjoint().eval()) * 0.5).eval();
  return fock::DensityMatrix::from_matrix(std::move(out));
}

fock::DensityMatrix apply_phase_noise(const fock::DensityMatrix &rho,
                                      const PhaseNoiseParam &pn,
                                      PhaseNoiseModel model) {
  check_theta(pn.theta);
  const int dim = rho.dim();
  if (pn.theta == 0.0) return rho;

  // U(theta) = exp(-i theta n) is diagonal, so both jitter models act
  // entrywise on rho_{mn} through a factor depending on m - n only.
  fock::Matrix out = rho.matrix();
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      const double d = static_cast<double>(m - n);
      const double factor = model == PhaseNoiseModel::kTwoPoint
                                ? std::cos(d * pn.theta)
                                : std::exp(-0.5 * d * d * pn.theta * pn.theta);
      out(m, n) *= factor;
    }
  }
  return fock::DensityMatrix::from_matrix(std::move(out));
}

fock::DensityMatrix degrade(const fock::DensityMatrix &rho, const LossParam &loss,
                            const PhaseNoiseParam &pn, DegradeOrder order,
                            PhaseNoiseModel model) {
  if (order == DegradeOrder::kPhaseNoiseThenLoss) {
    return apply_loss(apply_phase_noise(rho, pn, model), loss);
  }
  return apply_phase_noise(apply_loss(rho, loss), pn, model);
}

std::pair<double, double> predicted_levels(double ideal_sq_db, double loss,
                                           double theta) {
  if (ideal_sq_db < 0.0) {
    throw ContractViolationError("ideal squeezing level must be >= 0 dB");
  }
  check_loss(loss);
  check_theta(theta);
  const double v_sq_id = std::pow(10.0, -ideal_sq_db / 10.0);
  const double v_as_id = 1.0 / v_sq_id;
  const double c2 = std::cos(theta) * std::cos(theta);
  const double s2 = 1.0 - c2;
  const double v_sq = (1.0 - loss) * (v_sq_id * c2 + v_as_id * s2) + loss;
  const double v_as = (1.0 - loss) * (v_as_id * c2 + v_sq_id * s2) + loss;
  return {-10.0 * std::log10(v_sq), 10.0 * std::log10(v_as)};
}

}  // namespace sqzt::channels
