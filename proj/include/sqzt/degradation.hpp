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

#ifndef SQZT_DEGRADATION_HPP_
#define SQZT_DEGRADATION_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "sqzt/fock.hpp"

// Fits the loss/phase-noise level model to measured (squeezing,
// anti-squeezing) points by orthogonal distance regression in dB space: the
// curve parameter (ideal squeezing) is profiled out per point by a 1-D
// golden-section search, and (L, theta) are optimized by Gauss-Newton with
// Levenberg damping on (logit L, log theta).

namespace sqzt::degradation {

struct LevelPoint {
  double sq_db = 0.0;
  double as_db = 0.0;
  std::string label;
  std::optional<double> pump_mw;
};

struct DegradationFit {
  double loss = 0.0;            // L in [0, 1]
  double theta = 0.0;           // radians >= 0
  double residual_rms = 0.0;    // dB
  std::array<double, 4> covariance{};  // row-major 2x2 for (L, theta)
  bool converged = false;

  /// Distance from a point to the fitted curve, minimized over the ideal
  /// squeezing; also reports the minimizing ideal level.
  double orthogonal_distance(const LevelPoint &point, double *ideal_db = nullptr) const;
};

/// The measured lab points the model is typically fitted to.
std::vector<LevelPoint> reference_points();

DegradationFit fit(const std::vector<LevelPoint> &points);

struct BandSample {
  double ideal_db = 0.0;
  double sq_db = 0.0;
  double as_db = 0.0;
  double sq_sigma = 0.0;  // 1-sigma half-width from the parameter covariance
  double as_sigma = 0.0;
};

std::vector<BandSample> predict_band(const DegradationFit &fit,
                                     const std::vector<double> &ideal_db_range);

struct PurityRow {
  double ideal_db = 0.0;
  double as_db = 0.0;
  double purity = 0.0;
};

/// Synthesizes the degraded state for each ideal level with the fitted
/// (L, theta) and reports measured anti-squeezing against purity.
std::vector<PurityRow> purity_vs_antisqueezing(const DegradationFit &fit,
                                               const std::vector<double> &ideal_db_range,
                                               int dim,
                                               double tail_tol = fock::kDefaultTailTol);

}  // namespace sqzt::degradation

#endif  // SQZT_DEGRADATION_HPP_
