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

#ifndef SQZT_CORPUS_HPP_
#define SQZT_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sqzt/channels.hpp"
#include "sqzt/homodyne.hpp"
#include "sqzt/nn.hpp"
#include "sqzt/states.hpp"

// Dataset machinery: synthesis of degraded squeezed-thermal states, exact
// record sampling for that family, and the on-disk training corpus
// (record/density-matrix file pairs plus a JSON index).

namespace sqzt::corpus {

/// Degraded squeezed thermal state, assembled at an enlarged working
/// dimension (channels applied there) and projected down to dim.
/// tail_tol bounds the projected-out mass.
fock::DensityMatrix synth_state(const states::StateParams &params, int dim,
                                double tail_tol = fock::kDefaultTailTol,
                                int work_dim_override = 0);

/// Exact quadrature sampling for the family: after two-point phase jitter
/// and loss, a squeezed thermal state's quadrature distribution at LO phase
/// beta is the equal mixture of two zero-mean Gaussians with variances
///   V(+-) = (1-L) V_st(beta -+ theta_pn) + L/2,
///   V_st(g) = (2 nbar + 1)(e^{-2r} cos^2(g - phi/2) + e^{2r} sin^2(g - phi/2))/2.
/// This is the distribution of the untruncated state (no Fock cutoff).
homodyne::QuadratureRecord sample_family_record(const states::StateParams &params,
                                                const homodyne::PhaseSchedule &schedule,
                                                int count, std::uint64_t seed);

/// The per-phase mixture variances used by sample_family_record.
std::pair<double, double> family_variances(const states::StateParams &params,
                                           double lo_phase);

struct CorpusConfig {
  int count = 1000;
  int dim = 12;
  int record_len = 256;
  std::uint64_t base_seed = 1;
  states::StateFamily family;
  double tail_tol = 0.05;  // desk targets are truncated projections
  bool binary_records = true;
};

struct CorpusEntry {
  std::string record_file;
  std::string dm_file;
  std::uint64_t seed = 0;
  states::StateParams params;
};

struct CorpusIndex {
  CorpusConfig config;
  std::vector<CorpusEntry> entries;
};

/// Writes count (record, density-matrix) pairs plus index.json under dir.
/// Sample i derives its stream from base_seed + i, so generation is
/// parallel yet reproducible.
CorpusIndex generate(const CorpusConfig &config, const std::string &dir);

CorpusIndex read_index(const std::string &dir);

/// Loads a corpus into tensors for the given architecture.
nn::TrainingSet load_training_set(const std::string &dir,
                                  const nn::NetArchitecture &arch, int limit = 0,
                                  int skip = 0);

}  // namespace sqzt::corpus

#endif  // SQZT_CORPUS_HPP_
