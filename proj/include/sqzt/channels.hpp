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

#ifndef SQZT_CHANNELS_HPP_
#define SQZT_CHANNELS_HPP_

#include <utility>

#include "sqzt/fock.hpp"

// Degradation channels: optical loss and phase noise.
//
// Measured squeezing/anti-squeezing levels are modeled, in
// vacuum-normalized linear variance units (vacuum == 1), as
//   V_sq = (1-L) [V_sq_id cos^2(theta) + V_as_id sin^2(theta)] + L
//   V_as = (1-L) [V_as_id cos^2(theta) + V_sq_id sin^2(theta)] + L
// The Kraus loss channel and the two-point phase jitter below reproduce
// these laws exactly on quadrature variances.

namespace sqzt::channels {

struct LossParam {
  double loss = 0.0;  // power loss fraction L in [0, 1]
};

struct PhaseNoiseParam {
  double theta = 0.0;  // jitter magnitude, radians, in [0, pi/2)
};

enum class PhaseNoiseModel {
  // rho' = 1/2 U(+theta) rho U(-theta) + 1/2 U(-theta) rho U(+theta);
  // matches the cos^2/sin^2 mixing law exactly.
  kTwoPoint,
  // Gaussian jitter of rms theta; matches the law only to second order.
  // Provided for realism studies.
  kGaussian,
};

/// Pure loss: rho' = sum_k A_k rho A_k^dag with the ladder Kraus operators
/// A_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>, eta = 1 - L.
fock::DensityMatrix apply_loss(const fock::DensityMatrix &rho, const LossParam &loss);

fock::DensityMatrix apply_phase_noise(const fock::DensityMatrix &rho,
                                      const PhaseNoiseParam &pn,
                                      PhaseNoiseModel model = PhaseNoiseModel::kTwoPoint);

enum class DegradeOrder {
  kPhaseNoiseThenLoss,  // default; matches the (1-L)[mix] + L form
  kLossThenPhaseNoise,
};

/// Convenience composition of both channels.
fock::DensityMatrix degrade(const fock::DensityMatrix &rho, const LossParam &loss,
                            const PhaseNoiseParam &pn,
                            DegradeOrder order = DegradeOrder::kPhaseNoiseThenLoss,
                            PhaseNoiseModel model = PhaseNoiseModel::kTwoPoint);

/// Measured (squeezing, anti-squeezing) levels in dB for an ideal pure
/// squeezed state of level ideal_sq_db pushed through (L, theta).
std::pair<double, double> predicted_levels(double ideal_sq_db, double loss,
                                           double theta);

}  // namespace sqzt::channels

#endif  // SQZT_CHANNELS_HPP_
