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

#include "sqzt/nn.hpp"

#include <cmath>
#include <cstring>

#include <json.hpp>

#include "nn_internal.hpp"

namespace sqzt::nn {

namespace internal {

namespace {

ConvDesc make_conv(int in_ch, int out_ch, int kernel, int stride, int in_len,
                   std::size_t &offset) {
  ConvDesc d;
  d.in_ch = in_ch;
  d.out_ch = out_ch;
  d.kernel = kernel;
  d.stride = stride;
  d.pad = kernel / 2;
  d.in_len = in_len;
  d.out_len = (in_len + 2 * d.pad - kernel) / stride + 1;
  d.w_off = offset;
  offset += static_cast<std::size_t>(out_ch) * in_ch * kernel;
  d.b_off = offset;
  offset += out_ch;
  return d;
}

}  // namespace

Plan build_plan(const NetArchitecture &arch) {
  if (arch.dim < 2) throw InvalidDimensionError("network dim must be >= 2");
  if (arch.blocks.empty()) {
    throw ContractViolationError("network needs at least one block");
  }
  Plan plan;
  std::size_t offset = 0;
  int ch = arch.input_channels();
  int len = arch.input_len;
  int block1_ch = 0;
  int block1_len = 0;

  for (std::size_t b = 0; b < arch.blocks.size(); ++b) {
    const BlockSpec &spec = arch.blocks[b];
    if (spec.channels < 1 || spec.convs < 1) {
      throw ContractViolationError("block needs channels >= 1 and convs >= 1");
    }
    if (len % 2 != 0) {
      throw ContractViolationError("input_len must be divisible by 2^blocks");
    }
    BlockDesc block;
    const int entry_kernel = b == 0 ? arch.first_kernel : arch.kernel;
    block.convs.push_back(make_conv(ch, spec.channels, entry_kernel, 2, len, offset));
    for (int c = 1; c < spec.convs; ++c) {
      block.convs.push_back(
          make_conv(spec.channels, spec.channels, arch.kernel, 1, len / 2, offset));
    }
    if (arch.block_shortcuts) {
      if (ch != spec.channels) {
        block.has_proj = true;
        block.proj = make_conv(ch, spec.channels, 1, 2, len, offset);
      } else {
        block.has_pool = true;
      }
    }
    plan.blocks.push_back(std::move(block));
    ch = spec.channels;
    len /= 2;
    if (b == 0) {
      block1_ch = ch;
      block1_len = len;
    }
  }

  plan.final_channels = ch;
  plan.final_len = len;
  if (len < 1) throw ContractViolationError("input_len too short for the block count");

  if (arch.long_skip && arch.blocks.size() >= 2) {
    plan.long_skip = true;
    plan.skip_pool = block1_len / len;
    std::size_t skip_in_len = len;
    plan.skip_conv = make_conv(block1_ch, ch, 1, 1, static_cast<int>(skip_in_len),
                               offset);
  }

  plan.dense1.in = ch;
  plan.dense1.out = arch.dense_hidden;
  plan.dense1.w_off = offset;
  offset += static_cast<std::size_t>(ch) * arch.dense_hidden;
  plan.dense1.b_off = offset;
  offset += arch.dense_hidden;

  plan.dense2.in = arch.dense_hidden;
  plan.dense2.out = arch.head_outputs();
  plan.dense2.w_off = offset;
  offset += static_cast<std::size_t>(arch.dense_hidden) * arch.head_outputs();
  plan.dense2.b_off = offset;
  offset += arch.head_outputs();

  plan.total = offset;
  return plan;
}

double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

namespace {

void conv_forward(const Tensor &in, const ConvDesc &d, const double *weights,
                  Tensor &out) {
  out.channels = d.out_ch;
  out.length = d.out_len;
  out.data.assign(static_cast<std::size_t>(d.out_ch) * d.out_len, 0.0);
  const double *w = weights + d.w_off;
  const double *b = weights + d.b_off;
  for (int oc = 0; oc < d.out_ch; ++oc) {
    double *dst = out.data.data() + static_cast<std::size_t>(oc) * d.out_len;
    for (int i = 0; i < d.out_len; ++i) dst[i] = b[oc];
    for (int ic = 0; ic < d.in_ch; ++ic) {
      const double *src = in.data.data() + static_cast<std::size_t>(ic) * d.in_len;
      const double *wk =
          w + (static_cast<std::size_t>(oc) * d.in_ch + ic) * d.kernel;
      for (int k = 0; k < d.kernel; ++k) {
        const double wv = wk[k];
        if (wv == 0.0) continue;
        const int off = k - d.pad;
        int i_lo = 0;
        while (i_lo * d.stride + off < 0) ++i_lo;
        int i_hi = d.out_len;  // exclusive
        while (i_hi > i_lo && (i_hi - 1) * d.stride + off >= d.in_len) --i_hi;
        const double *s = src + i_lo * d.stride + off;
        if (d.stride == 1) {
          for (int i = i_lo; i < i_hi; ++i) dst[i] += wv * s[i - i_lo];
        } else {
          for (int i = i_lo; i < i_hi; ++i) dst[i] += wv * s[(i - i_lo) * d.stride];
        }
      }
    }
  }
}

// Accumulates weight/bias gradients and (optionally) input gradients.
void conv_backward(const Tensor &in, const ConvDesc &d, const double *weights,
                   const Tensor &gout, double *grad, Tensor *gin) {
  const double *w = weights + d.w_off;
  double *gw = grad + d.w_off;
  double *gb = grad + d.b_off;
  for (int oc = 0; oc < d.out_ch; ++oc) {
    const double *go = gout.data.data() + static_cast<std::size_t>(oc) * d.out_len;
    double acc_b = 0.0;
    for (int i = 0; i < d.out_len; ++i) acc_b += go[i];
    gb[oc] += acc_b;
    for (int ic = 0; ic < d.in_ch; ++ic) {
      const double *src = in.data.data() + static_cast<std::size_t>(ic) * d.in_len;
      double *gsrc =
          gin != nullptr ? gin->data.data() + static_cast<std::size_t>(ic) * d.in_len
                         : nullptr;
      const std::size_t w_base = (static_cast<std::size_t>(oc) * d.in_ch + ic) * d.kernel;
      for (int k = 0; k < d.kernel; ++k) {
        const int off = k - d.pad;
        int i_lo = 0;
        while (i_lo * d.stride + off < 0) ++i_lo;
        int i_hi = d.out_len;
        while (i_hi > i_lo && (i_hi - 1) * d.stride + off >= d.in_len) --i_hi;
        double acc_w = 0.0;
        const double wv = w[w_base + k];
        for (int i = i_lo; i < i_hi; ++i) {
          const int j = i * d.stride + off;
          acc_w += go[i] * src[j];
          if (gsrc != nullptr) gsrc[j] += wv * go[i];
        }
        gw[w_base + k] += acc_w;
      }
    }
  }
}

void relu_inplace(Tensor &t) {
  for (double &v : t.data) v = v > 0.0 ? v : 0.0;
}

// gin masked by the post-activation values (out > 0).
void relu_backward(const Tensor &post, Tensor &g) {
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (post.data[i] <= 0.0) g.data[i] = 0.0;
  }
}

void avgpool_forward(const Tensor &in, int k, Tensor &out) {
  out.channels = in.channels;
  out.length = in.length / k;
  out.data.assign(static_cast<std::size_t>(out.channels) * out.length, 0.0);
  const double inv = 1.0 / k;
  for (int c = 0; c < in.channels; ++c) {
    const double *src = in.data.data() + static_cast<std::size_t>(c) * in.length;
    double *dst = out.data.data() + static_cast<std::size_t>(c) * out.length;
    for (int i = 0; i < out.length; ++i) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j) acc += src[i * k + j];
      dst[i] = acc * inv;
    }
  }
}

void avgpool_backward(const Tensor &gout, int k, Tensor &gin) {
  const double inv = 1.0 / k;
  for (int c = 0; c < gout.channels; ++c) {
    const double *go = gout.data.data() + static_cast<std::size_t>(c) * gout.length;
    double *gi = gin.data.data() + static_cast<std::size_t>(c) * gin.length;
    for (int i = 0; i < gout.length; ++i) {
      for (int j = 0; j < k; ++j) gi[i * k + j] += go[i] * inv;
    }
  }
}

void dense_forward(const std::vector<double> &in, const DenseDesc &d,
                   const double *weights, std::vector<double> &out) {
  out.assign(d.out, 0.0);
  const double *w = weights + d.w_off;
  const double *b = weights + d.b_off;
  for (int o = 0; o < d.out; ++o) {
    double acc = b[o];
    const double *row = w + static_cast<std::size_t>(o) * d.in;
    for (int i = 0; i < d.in; ++i) acc += row[i] * in[i];
    out[o] = acc;
  }
}

void dense_backward(const std::vector<double> &in, const DenseDesc &d,
                    const double *weights, const std::vector<double> &gout,
                    double *grad, std::vector<double> *gin) {
  const double *w = weights + d.w_off;
  double *gw = grad + d.w_off;
  double *gb = grad + d.b_off;
  if (gin != nullptr) gin->assign(d.in, 0.0);
  for (int o = 0; o < d.out; ++o) {
    const double g = gout[o];
    gb[o] += g;
    double *grow = gw + static_cast<std::size_t>(o) * d.in;
    const double *row = w + static_cast<std::size_t>(o) * d.in;
    for (int i = 0; i < d.in; ++i) {
      grow[i] += g * in[i];
      if (gin != nullptr) (*gin)[i] += row[i] * g;
    }
  }
}

fock::Matrix head_to_factor(const std::vector<double> &head, int dim) {
  fock::Matrix t = fock::Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) t(i, i) = softplus(head[i]);
  int slot = dim;
  for (int i = 1; i < dim; ++i) {
    for (int j = 0; j < i; ++j) {
      t(i, j) = fock::Complex(head[slot], head[slot + 1]);
      slot += 2;
    }
  }
  return t;
}

}  // namespace

void forward_ws(const NetworkModel &model, const Plan &plan, const Tensor &input,
                Acts &acts) {
  const NetArchitecture &arch = model.arch;
  if (input.channels != arch.input_channels() || input.length != arch.input_len) {
    throw ContractViolationError("input tensor shape does not match the architecture");
  }
  const double *w = model.weights.data();

  acts.blocks.resize(plan.blocks.size());
  const Tensor *x = &input;
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    const BlockDesc &bd = plan.blocks[b];
    BlockActs &ba = acts.blocks[b];
    ba.conv_out.resize(bd.convs.size());
    const Tensor *cur = x;
    for (std::size_t c = 0; c < bd.convs.size(); ++c) {
      conv_forward(*cur, bd.convs[c], w, ba.conv_out[c]);
      if (c + 1 < bd.convs.size()) relu_inplace(ba.conv_out[c]);
      cur = &ba.conv_out[c];
    }
    if (bd.has_proj) {
      conv_forward(*x, bd.proj, w, ba.shortcut);
    } else if (bd.has_pool) {
      avgpool_forward(*x, 2, ba.shortcut);
    }
    ba.sum = ba.conv_out.back();
    if (bd.has_proj || bd.has_pool) {
      for (std::size_t i = 0; i < ba.sum.data.size(); ++i) {
        ba.sum.data[i] += ba.shortcut.data[i];
      }
    }
    ba.out = ba.sum;
    relu_inplace(ba.out);
    x = &ba.out;
  }

  if (plan.long_skip) {
    avgpool_forward(acts.blocks[0].out, plan.skip_pool, acts.skip_pooled);
    conv_forward(acts.skip_pooled, plan.skip_conv, w, acts.skip_out);
    acts.merged = *x;
    for (std::size_t i = 0; i < acts.merged.data.size(); ++i) {
      acts.merged.data[i] += acts.skip_out.data[i];
    }
  } else {
    acts.merged = *x;
  }

  // Global average pool.
  acts.gap.assign(plan.final_channels, 0.0);
  for (int c = 0; c < plan.final_channels; ++c) {
    double acc = 0.0;
    for (int i = 0; i < plan.final_len; ++i) acc += acts.merged.at(c, i);
    acts.gap[c] = acc / plan.final_len;
  }

  dense_forward(acts.gap, plan.dense1, w, acts.d1_pre);
  acts.d1_act = acts.d1_pre;
  for (double &v : acts.d1_act) v = v > 0.0 ? v : 0.0;
  dense_forward(acts.d1_act, plan.dense2, w, acts.head);

  acts.t_factor = head_to_factor(acts.head, arch.dim);
  const double scale = acts.t_factor.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !acts.t_factor.allFinite()) {
    throw DegenerateFactorError("network produced a degenerate Cholesky factor");
  }
  acts.t_scale = scale;
  const fock::Matrix t_scaled = acts.t_factor / scale;
  acts.m = t_scaled * t_scaled.adjoint();
  acts.m_trace = acts.m.trace().real();
  acts.rho = acts.m / acts.m_trace;
  acts.rho = ((acts.rho + acts.rho.adjoint().eval()) * 0.5).eval();
}

double sample_backward(const NetworkModel &model, const Plan &plan,
                       const Tensor &input, const fock::Matrix &target,
                       double *grad, Acts &acts) {
  forward_ws(model, plan, input, acts);
  const int dim = model.arch.dim;
  const double *w = model.weights.data();

  const fock::Matrix diff = acts.rho - target;
  const double loss = diff.squaredNorm();

  // Head gradient: through trace normalization and T T^dag. The overall
  // scale of T cancels in rho, so the prescale factor is a constant here.
  const fock::Matrix g = 2.0 * diff;
  fock::Matrix d_m = g / acts.m_trace;
  const double d_trace = -(g.conjugate().cwiseProduct(acts.m)).sum().real() /
                         (acts.m_trace * acts.m_trace);
  for (int i = 0; i < dim; ++i) d_m(i, i) += d_trace;
  const fock::Matrix t_scaled = acts.t_factor / acts.t_scale;
  const fock::Matrix grad_t = (2.0 * d_m * t_scaled) / acts.t_scale;

  std::vector<double> g_head(model.arch.head_outputs(), 0.0);
  for (int i = 0; i < dim; ++i) {
    const double sig = 1.0 / (1.0 + std::exp(-acts.head[i]));
    g_head[i] = grad_t(i, i).real() * sig;
  }
  int slot = dim;
  for (int i = 1; i < dim; ++i) {
    for (int j = 0; j < i; ++j) {
      g_head[slot] = grad_t(i, j).real();
      g_head[slot + 1] = grad_t(i, j).imag();
      slot += 2;
    }
  }

  // Dense layers.
  std::vector<double> g_d1act;
  dense_backward(acts.d1_act, plan.dense2, w, g_head, grad, &g_d1act);
  for (int i = 0; i < plan.dense1.out; ++i) {
    if (acts.d1_act[i] <= 0.0) g_d1act[i] = 0.0;
  }
  std::vector<double> g_gap;
  dense_backward(acts.gap, plan.dense1, w, g_d1act, grad, &g_gap);

  // Un-pool the global average.
  Tensor g_merged;
  g_merged.channels = plan.final_channels;
  g_merged.length = plan.final_len;
  g_merged.data.assign(acts.merged.data.size(), 0.0);
  for (int c = 0; c < plan.final_channels; ++c) {
    const double gv = g_gap[c] / plan.final_len;
    for (int i = 0; i < plan.final_len; ++i) g_merged.at(c, i) = gv;
  }

  // Long skip: merged = blocks.back().out + skip_conv(pool(blocks[0].out)).
  Tensor g_block1_extra;  // gradient flowing into block 1 output via the skip
  if (plan.long_skip) {
    Tensor g_skip_pooled;
    g_skip_pooled.channels = acts.skip_pooled.channels;
    g_skip_pooled.length = acts.skip_pooled.length;
    g_skip_pooled.data.assign(acts.skip_pooled.data.size(), 0.0);
    conv_backward(acts.skip_pooled, plan.skip_conv, w, g_merged, grad,
                  &g_skip_pooled);
    g_block1_extra.channels = acts.blocks[0].out.channels;
    g_block1_extra.length = acts.blocks[0].out.length;
    g_block1_extra.data.assign(acts.blocks[0].out.data.size(), 0.0);
    avgpool_backward(g_skip_pooled, plan.skip_pool, g_block1_extra);
  }

  // Blocks in reverse. g_out carries dL/d(block output).
  Tensor g_out = std::move(g_merged);
  for (int b = static_cast<int>(plan.blocks.size()) - 1; b >= 0; --b) {
    const BlockDesc &bd = plan.blocks[b];
    BlockActs &ba = acts.blocks[b];
    if (b == 0 && plan.long_skip) {
      for (std::size_t i = 0; i < g_out.data.size(); ++i) {
        g_out.data[i] += g_block1_extra.data[i];
      }
    }
    relu_backward(ba.out, g_out);  // through the block-output ReLU

    const Tensor &block_in = b == 0 ? input : acts.blocks[b - 1].out;
    Tensor g_in;
    g_in.channels = block_in.channels;
    g_in.length = block_in.length;
    g_in.data.assign(block_in.data.size(), 0.0);

    // Shortcut branch.
    if (bd.has_proj) {
      conv_backward(block_in, bd.proj, w, g_out, grad, &g_in);
    } else if (bd.has_pool) {
      avgpool_backward(g_out, 2, g_in);
    }

    // Main path, last conv first.
    Tensor g_cur = g_out;  // gradient at the last conv's raw output
    for (int c = static_cast<int>(bd.convs.size()) - 1; c >= 0; --c) {
      const Tensor &conv_in = c == 0 ? block_in : ba.conv_out[c - 1];
      if (c == 0) {
        conv_backward(conv_in, bd.convs[c], w, g_cur, grad, &g_in);
      } else {
        Tensor g_prev;
        g_prev.channels = conv_in.channels;
        g_prev.length = conv_in.length;
        g_prev.data.assign(conv_in.data.size(), 0.0);
        conv_backward(conv_in, bd.convs[c], w, g_cur, grad, &g_prev);
        relu_backward(ba.conv_out[c - 1], g_prev);
        g_cur = std::move(g_prev);
      }
    }
    g_out = std::move(g_in);
  }
  return loss;
}

}  // namespace internal

//===========================================================================
// Public API
//===========================================================================

using internal::Plan;

NetArchitecture NetArchitecture::desk(int dim, int input_len) {
  NetArchitecture arch;
  arch.dim = dim;
  arch.input_len = input_len;
  return arch;
}

NetArchitecture NetArchitecture::full(int dim, int input_len) {
  NetArchitecture arch;
  arch.dim = dim;
  arch.input_len = input_len;
  return arch;
}

std::string NetArchitecture::to_json() const {
  nlohmann::json blocks_json = nlohmann::json::array();
  for (const BlockSpec &b : blocks) {
    blocks_json.push_back({{"channels", b.channels}, {"convs", b.convs}});
  }
  return nlohmann::json{
      {"mode", mode == InputMode::kSequence ? "sequence" : "histogram"},
      {"input_len", input_len},
      {"dim", dim},
      {"blocks", blocks_json},
      {"first_kernel", first_kernel},
      {"kernel", kernel},
      {"dense_hidden", dense_hidden},
      {"block_shortcuts", block_shortcuts},
      {"long_skip", long_skip},
      {"hist_phase_bins", hist_phase_bins},
      {"hist_span", hist_span}}
      .dump();
}

NetArchitecture NetArchitecture::from_json(const std::string &json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MalformedFileError("architecture descriptor is not valid JSON");
  }
  try {
    NetArchitecture arch;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "sequence") {
      arch.mode = InputMode::kSequence;
    } else if (mode == "histogram") {
      arch.mode = InputMode::kHistogram;
    } else {
      throw MalformedFileError("unknown input mode '" + mode + "'");
    }
    arch.input_len = j.at("input_len").get<int>();
    arch.dim = j.at("dim").get<int>();
    arch.blocks.clear();
    for (const auto &b : j.at("blocks")) {
      arch.blocks.push_back({b.at("channels").get<int>(), b.at("convs").get<int>()});
    }
    arch.first_kernel = j.at("first_kernel").get<int>();
    arch.kernel = j.at("kernel").get<int>();
    arch.dense_hidden = j.at("dense_hidden").get<int>();
    arch.block_shortcuts = j.at("block_shortcuts").get<bool>();
    arch.long_skip = j.at("long_skip").get<bool>();
    arch.hist_phase_bins = j.at("hist_phase_bins").get<int>();
    arch.hist_span = j.at("hist_span").get<double>();
    return arch;
  } catch (const nlohmann::json::exception &e) {
    throw MalformedFileError(std::string("architecture descriptor: ") + e.what());
  }
}

std::vector<WeightSegment> weight_segments(const NetArchitecture &arch) {
  const Plan plan = internal::build_plan(arch);
  std::vector<WeightSegment> segs;
  auto add_conv = [&](const std::string &name, const internal::ConvDesc &d) {
    segs.push_back({name + ".w", d.w_off,
                    static_cast<std::size_t>(d.out_ch) * d.in_ch * d.kernel});
    segs.push_back({name + ".b", d.b_off, static_cast<std::size_t>(d.out_ch)});
  };
  for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
    for (std::size_t c = 0; c < plan.blocks[b].convs.size(); ++c) {
      add_conv("block" + std::to_string(b) + ".conv" + std::to_string(c),
               plan.blocks[b].convs[c]);
    }
    if (plan.blocks[b].has_proj) {
      add_conv("block" + std::to_string(b) + ".proj", plan.blocks[b].proj);
    }
  }
  if (plan.long_skip) add_conv("skip", plan.skip_conv);
  segs.push_back({"dense1.w", plan.dense1.w_off,
                  static_cast<std::size_t>(plan.dense1.in) * plan.dense1.out});
  segs.push_back({"dense1.b", plan.dense1.b_off,
                  static_cast<std::size_t>(plan.dense1.out)});
  segs.push_back({"dense2.w", plan.dense2.w_off,
                  static_cast<std::size_t>(plan.dense2.in) * plan.dense2.out});
  segs.push_back({"dense2.b", plan.dense2.b_off,
                  static_cast<std::size_t>(plan.dense2.out)});
  return segs;
}

std::size_t weight_count(const NetArchitecture &arch) {
  return internal::build_plan(arch).total;
}

void NetworkModel::validate() const {
  if (weights.size() != weight_count(arch)) {
    throw ContractViolationError("model weight count does not match architecture");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw ContractViolationError("model weights must be finite");
    }
  }
}

NetworkModel make_model(const NetArchitecture &arch, std::uint64_t seed) {
  const Plan plan = internal::build_plan(arch);
  NetworkModel model;
  model.arch = arch;
  model.weights.assign(plan.total, 0.0);
  auto rng = make_rng(seed, 0x6d6f64656c);  // "model" stream

  auto init_conv = [&](const internal::ConvDesc &d) {
    const double std = std::sqrt(2.0 / (static_cast<double>(d.in_ch) * d.kernel));
    const std::size_t n = static_cast<std::size_t>(d.out_ch) * d.in_ch * d.kernel;
    for (std::size_t i = 0; i < n; ++i) {
      model.weights[d.w_off + i] = std * normal01(rng);
    }
  };
  for (const auto &block : plan.blocks) {
    for (const auto &conv : block.convs) init_conv(conv);
    if (block.has_proj) init_conv(block.proj);
  }
  if (plan.long_skip) init_conv(plan.skip_conv);

  {
    const double std = std::sqrt(2.0 / plan.dense1.in);
    const std::size_t n = static_cast<std::size_t>(plan.dense1.in) * plan.dense1.out;
    for (std::size_t i = 0; i < n; ++i) {
      model.weights[plan.dense1.w_off + i] = std * normal01(rng);
    }
  }
  {
    // Small head init plus a bias seeding T at the identity, so the fresh
    // model outputs the maximally mixed state.
    const double std = 0.1 * std::sqrt(2.0 / plan.dense2.in);
    const std::size_t n = static_cast<std::size_t>(plan.dense2.in) * plan.dense2.out;
    for (std::size_t i = 0; i < n; ++i) {
      model.weights[plan.dense2.w_off + i] = std * normal01(rng);
    }
    const double diag_bias = std::log(std::exp(1.0) - 1.0);  // softplus^{-1}(1)
    for (int i = 0; i < arch.dim; ++i) {
      model.weights[plan.dense2.b_off + i] = diag_bias;
    }
  }
  return model;
}

void CholeskyFactor::validate() const {
  if (lower.rows() != dim || lower.cols() != dim || dim < 1) {
    throw ContractViolationError("cholesky factor shape mismatch");
  }
  if (!lower.allFinite()) {
    throw ContractViolationError("cholesky factor entries must be finite");
  }
  bool nonzero = false;
  for (int i = 0; i < dim; ++i) {
    if (lower(i, i).imag() != 0.0) {
      throw ContractViolationError("cholesky factor diagonal must be real");
    }
    for (int j = i + 1; j < dim; ++j) {
      if (lower(i, j) != fock::Complex(0.0, 0.0)) {
        throw ContractViolationError("cholesky factor must be lower-triangular");
      }
    }
    for (int j = 0; j <= i; ++j) {
      if (lower(i, j) != fock::Complex(0.0, 0.0)) nonzero = true;
    }
  }
  if (!nonzero) {
    throw DegenerateFactorError("cholesky factor is identically zero");
  }
}

fock::DensityMatrix density_from_cholesky(const CholeskyFactor &factor) {
  factor.validate();
  const double scale = factor.lower.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    throw DegenerateFactorError("cholesky factor is identically zero");
  }
  const fock::Matrix t = factor.lower / scale;
  fock::Matrix m = t * t.adjoint();
  const double tr = m.trace().real();
  if (!(tr > 0.0) || !std::isfinite(tr)) {
    throw DegenerateFactorError("cholesky factor trace is degenerate");
  }
  m /= tr;
  m = ((m + m.adjoint().eval()) * 0.5).eval();
  return fock::DensityMatrix::from_matrix(std::move(m));
}

Tensor encode_record(const NetArchitecture &arch,
                     const homodyne::QuadratureRecord &record) {
  record.validate();
  Tensor t;
  t.channels = arch.input_channels();
  t.length = arch.input_len;
  t.data.assign(static_cast<std::size_t>(t.channels) * t.length, 0.0);

  if (arch.mode == InputMode::kSequence) {
    const std::size_t n = record.size();
    for (int i = 0; i < arch.input_len; ++i) {
      const std::size_t j = static_cast<std::size_t>(i) * n / arch.input_len;
      t.at(0, i) = record.value[j];
      t.at(1, i) = std::cos(record.phase[j]);
      t.at(2, i) = std::sin(record.phase[j]);
    }
    return t;
  }

  // Histogram mode: channels are phase bins, positions are value bins.
  const int p_bins = arch.hist_phase_bins;
  const int q_bins = arch.input_len;
  double total = 0.0;
  for (std::size_t s = 0; s < record.size(); ++s) {
    double theta = std::fmod(record.phase[s], M_PI);
    double value = record.value[s];
    if (std::fmod(record.phase[s], 2.0 * M_PI) >= M_PI) value = -value;
    if (theta < 0.0) theta += M_PI;
    int p = std::min(static_cast<int>(theta / M_PI * p_bins), p_bins - 1);
    int q = static_cast<int>((value + arch.hist_span) / (2.0 * arch.hist_span) *
                             q_bins);
    q = std::clamp(q, 0, q_bins - 1);
    t.at(p, q) += 1.0;
    total += 1.0;
  }
  const double norm = static_cast<double>(p_bins) * q_bins / total;
  for (double &v : t.data) v *= norm;
  return t;
}

CholeskyFactor forward(const NetworkModel &model, const Tensor &input) {
  model.validate();
  const Plan plan = internal::build_plan(model.arch);
  internal::Acts acts;
  internal::forward_ws(model, plan, input, acts);
  CholeskyFactor factor;
  factor.dim = model.arch.dim;
  factor.lower = acts.t_factor;
  return factor;
}

double loss_frobenius(const fock::DensityMatrix &pred,
                      const fock::DensityMatrix &target) {
  if (pred.dim() != target.dim()) {
    throw ContractViolationError("loss_frobenius requires equal dimensions");
  }
  return (pred.matrix() - target.matrix()).squaredNorm();
}

double backward(const NetworkModel &model, const Tensor &input,
                const fock::DensityMatrix &target, std::span<double> grad) {
  model.validate();
  if (grad.size() != model.weights.size()) {
    throw ContractViolationError("gradient span size mismatch");
  }
  if (target.dim() != model.arch.dim) {
    throw ContractViolationError("target dim does not match model dim");
  }
  const Plan plan = internal::build_plan(model.arch);
  std::fill(grad.begin(), grad.end(), 0.0);
  internal::Acts acts;
  return internal::sample_backward(model, plan, input, target.matrix(), grad.data(),
                                   acts);
}

}  // namespace sqzt::nn
