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

#include <omp.h>

#include <bit>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "nn_internal.hpp"
#include "sqzt/io.hpp"

namespace sqzt::nn {

namespace {

using internal::Acts;
using internal::Plan;

// Per-sample gradients of a chunk are computed independently (possibly in
// parallel) and folded in sample-index order, so the accumulated batch
// gradient is identical at any thread count.
constexpr int kChunk = 8;

double batch_gradient_impl(const NetworkModel &model, const TrainingSet &data,
                           std::span<const int> indices, std::vector<double> &grad,
                           bool parallel) {
  const Plan plan = internal::build_plan(model.arch);
  const std::size_t n_weights = model.weights.size();
  grad.assign(n_weights, 0.0);
  if (indices.empty()) return 0.0;

  std::vector<double> scratch(static_cast<std::size_t>(kChunk) * n_weights);
  std::vector<double> losses(kChunk);
  double loss_sum = 0.0;

  const int n = static_cast<int>(indices.size());
  const int threads = parallel ? thread_count() : 1;
  for (int start = 0; start < n; start += kChunk) {
    const int members = std::min(kChunk, n - start);
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
    for (int c = 0; c < members; ++c) {
      const int idx = indices[start + c];
      double *g = scratch.data() + static_cast<std::size_t>(c) * n_weights;
      std::fill(g, g + n_weights, 0.0);
      Acts acts;
      losses[c] = internal::sample_backward(model, plan, data.inputs[idx],
                                            data.targets[idx].matrix(), g, acts);
    }
    for (int c = 0; c < members; ++c) {
      const double *g = scratch.data() + static_cast<std::size_t>(c) * n_weights;
      for (std::size_t i = 0; i < n_weights; ++i) grad[i] += g[i];
      loss_sum += losses[c];
    }
  }

  const double inv = 1.0 / n;
  for (double &g : grad) g *= inv;
  return loss_sum * inv;
}

}  // namespace

void TrainingSet::validate() const {
  if (inputs.size() != targets.size()) {
    throw ContractViolationError("training set inputs/targets length mismatch");
  }
  if (inputs.empty()) {
    throw InsufficientDataError("training set is empty");
  }
}

double batch_gradient(const NetworkModel &model, const TrainingSet &data,
                      std::span<const int> indices, std::vector<double> &grad) {
  return batch_gradient_impl(model, data, indices, grad, true);
}

double batch_gradient_serial(const NetworkModel &model, const TrainingSet &data,
                             std::span<const int> indices, std::vector<double> &grad) {
  return batch_gradient_impl(model, data, indices, grad, false);
}

TrainHistory train(NetworkModel &model, const TrainingSet &data,
                   const TrainOptions &opts) {
  model.validate();
  data.validate();
  if (opts.epochs < 0 || opts.batch < 1) {
    throw ContractViolationError("train needs epochs >= 0 and batch >= 1");
  }
  TrainHistory history;
  if (opts.epochs == 0) return history;

  const int n = static_cast<int>(data.size());
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  auto rng = make_rng(opts.seed, 0x7368756666);  // shuffle stream
  std::vector<double> velocity(model.weights.size(), 0.0);
  std::vector<double> grad;
  std::vector<double> last_finite = model.weights;

  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    const double lr =
        opts.cosine_decay
            ? opts.lr * 0.5 * (1.0 + std::cos(M_PI * epoch / opts.epochs))
            : opts.lr;

    // Fisher-Yates with the dedicated stream.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[i], order[j]);
    }

    double epoch_loss = 0.0;
    for (int start = 0; start < n; start += opts.batch) {
      const int members = std::min(opts.batch, n - start);
      const double loss = batch_gradient(
          model, data, std::span<const int>(order.data() + start, members), grad);
      epoch_loss += loss * members;
      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        velocity[i] = opts.momentum * velocity[i] - lr * grad[i];
        model.weights[i] += velocity[i];
      }
    }
    epoch_loss /= n;
    history.epoch_loss.push_back(epoch_loss);

    if (!std::isfinite(epoch_loss)) {
      model.weights = last_finite;
      history.diverged = true;
      break;
    }
    last_finite = model.weights;
  }
  return history;
}

Prediction predict_density(const NetworkModel &model,
                           const homodyne::QuadratureRecord &record) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tensor input = encode_record(model.arch, record);
  const Plan plan = internal::build_plan(model.arch);
  Acts acts;
  internal::forward_ws(model, plan, input, acts);
  CholeskyFactor factor;
  factor.dim = model.arch.dim;
  factor.lower = acts.t_factor;
  fock::DensityMatrix rho = density_from_cholesky(factor);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return Prediction{std::move(rho), ms};
}

void save_model(const NetworkModel &model, const std::string &path) {
  model.validate();
  io::Container box;
  box.kind = io::PayloadKind::kModel;
  box.header_json = nlohmann::json{
      {"arch", nlohmann::json::parse(model.arch.to_json())},
      {"weights", model.weights.size()}}
                        .dump();
  box.payload.reserve(8 + model.weights.size() * 8);
  io::append_u64(box.payload, model.weights.size());
  for (double w : model.weights) io::append_f64(box.payload, w);
  io::write_container(path, box);
}

NetworkModel load_model(const std::string &path) {
  const io::Container box = io::read_container(path, io::PayloadKind::kModel);
  nlohmann::json header = nlohmann::json::parse(box.header_json, nullptr, false);
  if (header.is_discarded() || !header.contains("arch") ||
      !header.contains("weights")) {
    throw MalformedFileError(path + ": malformed model header");
  }
  NetworkModel model;
  model.arch = NetArchitecture::from_json(header["arch"].dump());
  const std::uint64_t count = header["weights"].get<std::uint64_t>();
  if (count != weight_count(model.arch)) {
    throw MalformedFileError(path + ": weight count does not match architecture");
  }
  if (box.payload.size() != 8 + count * 8) {
    throw MalformedFileError(path + ": model payload size mismatch");
  }
  std::uint64_t stored = 0;
  for (int i = 7; i >= 0; --i) stored = (stored << 8) | box.payload[i];
  if (stored != count) {
    throw MalformedFileError(path + ": model payload length field mismatch");
  }
  model.weights.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    const std::uint8_t *p = box.payload.data() + 8 + i * 8;
    for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
    model.weights[i] = std::bit_cast<double>(bits);
  }
  model.validate();
  return model;
}

}  // namespace sqzt::nn
