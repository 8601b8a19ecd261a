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

#ifndef SQZT_MLE_HPP_
#define SQZT_MLE_HPP_

#include <optional>
#include <vector>

#include "sqzt/fock.hpp"
#include "sqzt/homodyne.hpp"

// Iterative maximum-likelihood reconstruction (diluted R rho R) from a
// quadrature record. Samples are folded to phases in [0, pi) (a point at
// theta + pi equals -x at theta), binned into phase_bins x quad_bins cells,
// and the bin projectors are integrated with a 3-subnode midpoint rule.

namespace sqzt::mle {

struct MleConfig {
  int dim = 20;
  int phase_bins = 20;
  int quad_bins = 100;
  int max_iters = 2000;
  double dilution = 0.5;      // initial epsilon; halved on likelihood decrease
  double tolerance = 1e-9;    // |delta logL| stop threshold
  int stable_iterations = 3;  // consecutive small deltas required to stop
};

struct MleDiagnostics {
  int iterations = 0;
  bool converged = false;
  int rejected_steps = 0;
  double final_log_likelihood = 0.0;
  std::vector<double> loglik_trace;
  double wall_time_ms = 0.0;
};

struct MleResult {
  fock::DensityMatrix rho;
  MleDiagnostics diagnostics;
};

/// Phase-folded 2-D histogram of a record.
struct BinnedRecord {
  int phase_bins = 0;
  int quad_bins = 0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::vector<double> counts;  // phase-major: counts[p * quad_bins + q]
  double total = 0.0;

  double phase_center(int p) const { return (p + 0.5) * M_PI / phase_bins; }
  double bin_width() const { return (x_max - x_min) / quad_bins; }
};

BinnedRecord bin_record(const homodyne::QuadratureRecord &record, const MleConfig &cfg);

/// Reconstruction from raw samples; init defaults to the maximally mixed
/// state. Non-convergence returns the best iterate with converged = false.
MleResult mle_reconstruct(const homodyne::QuadratureRecord &record,
                          const MleConfig &cfg,
                          const std::optional<fock::DensityMatrix> &init = std::nullopt);

/// Reconstruction from an already-binned histogram; counts may be any
/// non-negative weights (e.g. exact bin probabilities for fixed-point tests).
MleResult mle_reconstruct_binned(const BinnedRecord &binned, const MleConfig &cfg,
                                 const std::optional<fock::DensityMatrix> &init =
                                     std::nullopt);

/// sum_j f_j ln p_j(rho) over nonempty bins, with f_j the normalized counts.
/// Returns -infinity when some p_j vanishes on a counted bin.
double log_likelihood(const fock::DensityMatrix &rho,
                      const homodyne::QuadratureRecord &record, const MleConfig &cfg);

}  // namespace sqzt::mle

#endif  // SQZT_MLE_HPP_
