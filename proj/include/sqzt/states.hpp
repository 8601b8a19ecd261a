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

#ifndef SQZT_STATES_HPP_
#define SQZT_STATES_HPP_

#include "sqzt/fock.hpp"

// State factories for vacuum, thermal, squeezed vacuum and squeezed thermal
// density matrices.
//
// Squeezed states are assembled at an enlarged working dimension from the
// exact banded factorization of S(xi), then projected down to the requested
// dim. The projected-out probability mass is the true truncation leakage of
// the state; factories reject the construction (truncation-overflow) when it
// reaches tail_tol, and renormalize otherwise.

namespace sqzt::states {

struct ThermalParams {
  double nbar = 0.0;  // mean photon number, >= 0
};

/// dB <-> squeezing factor under the hbar = 1 convention:
/// level_db = (20/ln 10) * r.
inline double squeeze_factor_from_db(double db) { return db * std::log(10.0) / 20.0; }
inline double db_from_squeeze_factor(double r) { return r * 20.0 / std::log(10.0); }

fock::DensityMatrix vacuum(int dim);

fock::DensityMatrix thermal(const ThermalParams &params, int dim,
                            double tail_tol = fock::kDefaultTailTol);

fock::DensityMatrix squeezed_vacuum(const fock::SqueezeParams &sq, int dim,
                                    double tail_tol = fock::kDefaultTailTol);

fock::DensityMatrix squeezed_thermal(const fock::SqueezeParams &sq,
                                     const ThermalParams &th, int dim,
                                     double tail_tol = fock::kDefaultTailTol);

/// Working dimension large enough that the Fock support of a squeezed
/// thermal state (r, nbar) is represented to well below tail_tol before
/// projection. Capped at 256.
int working_dim(double r, double nbar, int dim, double tail_tol);

/// Parameters of one member of the training-set state family: a squeezed
/// thermal state pushed through phase noise and loss.
struct StateParams {
  double sq_db = 0.0;     // ideal squeezing level, dB
  double phi = 0.0;       // squeezing angle, radians
  double nbar = 0.0;      // thermal occupation
  double loss = 0.0;      // power loss fraction L
  double theta_pn = 0.0;  // phase-noise magnitude, radians
};

/// Sampling ranges for the family: squeezing level uniform in [0, max_db],
/// phi uniform in [0, 2pi), nbar log-uniform in [nbar_min, nbar_max],
/// loss uniform in [0, loss_max], phase noise uniform in [0, theta_max].
struct StateFamily {
  double max_db = 8.0;
  double nbar_min = 1e-3;
  double nbar_max = 0.5;
  double loss_max = 0.3;
  double theta_max = 0.1;
};

StateParams sample_params(const StateFamily &family, std::mt19937_64 &rng);

}  // namespace sqzt::states

#endif  // SQZT_STATES_HPP_
