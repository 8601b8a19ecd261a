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

#ifndef SQZT_SRC_NN_INTERNAL_HPP_
#define SQZT_SRC_NN_INTERNAL_HPP_

#include "sqzt/nn.hpp"

// Weight-layout plan and per-sample forward/backward internals shared by
// nn.cpp and nn_train.cpp.

namespace sqzt::nn::internal {

struct ConvDesc {
  int in_ch = 0;
  int out_ch = 0;
  int kernel = 1;
  int stride = 1;
  int pad = 0;
  int in_len = 0;
  int out_len = 0;
  std::size_t w_off = 0;
  std::size_t b_off = 0;
};

struct DenseDesc {
  int in = 0;
  int out = 0;
  std::size_t w_off = 0;
  std::size_t b_off = 0;
};

struct BlockDesc {
  std::vector<ConvDesc> convs;
  bool has_proj = false;
  ConvDesc proj;       // 1x1 stride-2 projection when channels change
  bool has_pool = false;  // stride-2 average-pool identity otherwise
};

struct Plan {
  std::vector<BlockDesc> blocks;
  bool long_skip = false;
  int skip_pool = 1;  // pool kernel == stride from block-1 output
  ConvDesc skip_conv;
  int final_channels = 0;
  int final_len = 0;
  DenseDesc dense1;
  DenseDesc dense2;
  std::size_t total = 0;
};

Plan build_plan(const NetArchitecture &arch);

struct BlockActs {
  std::vector<Tensor> conv_out;  // post-ReLU except the last (pre-activation)
  Tensor shortcut;
  Tensor sum;  // pre-activation block output
  Tensor out;  // relu(sum)
};

struct Acts {
  std::vector<BlockActs> blocks;
  Tensor skip_pooled;
  Tensor skip_out;
  Tensor merged;
  std::vector<double> gap;
  std::vector<double> d1_pre;
  std::vector<double> d1_act;
  std::vector<double> head;  // dim^2 raw outputs
  fock::Matrix t_factor;
  double t_scale = 1.0;
  fock::Matrix m;       // scaled T T^dag
  double m_trace = 1.0;
  fock::Matrix rho;
};

/// Forward pass through the graph, keeping every activation.
void forward_ws(const NetworkModel &model, const Plan &plan, const Tensor &input,
                Acts &acts);

/// Loss plus gradient (overwritten) for one sample; recomputes the forward.
double sample_backward(const NetworkModel &model, const Plan &plan,
                       const Tensor &input, const fock::Matrix &target,
                       double *grad, Acts &acts);

double softplus(double x);

}  // namespace sqzt::nn::internal

#endif  // SQZT_SRC_NN_INTERNAL_HPP_
