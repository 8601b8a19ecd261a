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

#ifndef SQZT_NN_HPP_
#define SQZT_NN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqzt/fock.hpp"
#include "sqzt/homodyne.hpp"
#include "sqzt/states.hpp"

// 1-D residual convolutional network mapping a quadrature sequence to a
// Cholesky factor, hence to a physical density matrix.
//
// Topology: four convolution blocks (stride-2 entry, ReLU), each with a
// block-level shortcut (1x1 projection when channels change, otherwise a
// stride-2 average pool), plus one long skip from the first block's output
// to the last block's; average pooling everywhere, never max. The head is
// global average pooling and two dense layers whose outputs parameterize a
// lower-triangular matrix T with softplus on the diagonal;
// rho = T T^dag / tr(T T^dag) is physical for any weights.

namespace sqzt::nn {

enum class InputMode { kSequence, kHistogram };

struct BlockSpec {
  int channels = 0;
  int convs = 0;  // convolutions in the main path
};

struct NetArchitecture {
  InputMode mode = InputMode::kSequence;
  int input_len = 256;  // per-channel sequence length; must be divisible by 16
  int dim = 12;
  std::vector<BlockSpec> blocks = {{16, 3}, {32, 3}, {64, 3}, {64, 2}};
  int first_kernel = 7;  // first convolution of the network
  int kernel = 3;        // all other main-path convolutions
  int dense_hidden = 256;
  bool block_shortcuts = true;
  bool long_skip = true;
  int hist_phase_bins = 16;   // histogram mode: input channels
  double hist_span = 10.0;    // histogram mode: |x| range of the value bins

  int input_channels() const {
    return mode == InputMode::kSequence ? 3 : hist_phase_bins;
  }
  int head_outputs() const { return dim * dim; }

  std::string to_json() const;
  static NetArchitecture from_json(const std::string &json_text);

  /// Desk-scale preset (the test default).
  static NetArchitecture desk(int dim = 12, int input_len = 256);
  /// Full-scale preset for 35x35 reconstructions from long records.
  static NetArchitecture full(int dim = fock::kDefaultDim, int input_len = 2048);
};

struct NetworkModel {
  NetArchitecture arch;
  std::vector<double> weights;

  void validate() const;  // architecture/weight-count consistency, finiteness
};

/// Named weight segments (convN.w, convN.b, dense1.w, ...), for tests and
/// targeted inspection.
struct WeightSegment {
  std::string name;
  std::size_t offset = 0;
  std::size_t count = 0;
};
std::vector<WeightSegment> weight_segments(const NetArchitecture &arch);
std::size_t weight_count(const NetArchitecture &arch);

/// He-initialized model; the final dense bias seeds the Cholesky diagonal at
/// softplus^{-1}(1) so an untrained model outputs the maximally mixed state.
NetworkModel make_model(const NetArchitecture &arch, std::uint64_t seed);

struct CholeskyFactor {
  int dim = 0;
  fock::Matrix lower;  // lower-triangular, real diagonal

  void validate() const;
};

/// rho = T T^dag / tr(T T^dag). Throws DegenerateFactorError for an
/// all-zero factor; otherwise the output is physical by construction.
fock::DensityMatrix density_from_cholesky(const CholeskyFactor &factor);

/// Network input: channels x length, channel-major.
struct Tensor {
  int channels = 0;
  int length = 0;
  std::vector<double> data;

  double &at(int c, int i) { return data[static_cast<std::size_t>(c) * length + i]; }
  double at(int c, int i) const {
    return data[static_cast<std::size_t>(c) * length + i];
  }
};

/// Sequence mode: channels (value, cos phase, sin phase), nearest-resampled
/// to input_len. Histogram mode: phase-binned, value-binned normalized
/// counts (order-invariant within a phase bin).
Tensor encode_record(const NetArchitecture &arch,
                     const homodyne::QuadratureRecord &record);

CholeskyFactor forward(const NetworkModel &model, const Tensor &input);

double loss_frobenius(const fock::DensityMatrix &pred,
                      const fock::DensityMatrix &target);

/// Loss and exact reverse-mode gradient of
/// loss_frobenius(density_from_cholesky(forward(input)), target) in all
/// weights. grad must have weight_count entries; it is overwritten.
double backward(const NetworkModel &model, const Tensor &input,
                const fock::DensityMatrix &target, std::span<double> grad);

struct TrainingSet {
  std::vector<Tensor> inputs;
  std::vector<fock::DensityMatrix> targets;
  std::vector<states::StateParams> params;  // per-sample metadata

  std::size_t size() const { return inputs.size(); }
  void validate() const;
};

struct TrainOptions {
  int epochs = 30;
  int batch = 32;
  double lr = 1e-3;
  double momentum = 0.9;
  bool cosine_decay = true;
  std::uint64_t seed = 1;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  bool diverged = false;
};

/// SGD with momentum and cosine decay. Deterministic given the seed: batch
/// gradients accumulate per-sample in index order regardless of thread
/// count. On divergence (non-finite epoch loss) the weights revert to the
/// last finite epoch and training aborts.
TrainHistory train(NetworkModel &model, const TrainingSet &data,
                   const TrainOptions &opts);

/// Mean loss and summed gradient over the given sample indices.
double batch_gradient(const NetworkModel &model, const TrainingSet &data,
                      std::span<const int> indices, std::vector<double> &grad);
/// Serial reference; bit-identical to batch_gradient().
double batch_gradient_serial(const NetworkModel &model, const TrainingSet &data,
                             std::span<const int> indices, std::vector<double> &grad);

struct Prediction {
  fock::DensityMatrix rho;
  double wall_time_ms = 0.0;
};

Prediction predict_density(const NetworkModel &model,
                           const homodyne::QuadratureRecord &record);

void save_model(const NetworkModel &model, const std::string &path);
NetworkModel load_model(const std::string &path);

}  // namespace sqzt::nn

#endif  // SQZT_NN_HPP_
