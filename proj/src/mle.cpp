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

#include "sqzt/mle.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <limits>

namespace sqzt::mle {

namespace {

constexpr double kProbFloor = 1e-100;
constexpr int kSubnodes = 3;

void check_config(const MleConfig &cfg) {
  if (cfg.dim < 2) throw InvalidDimensionError("mle dim must be >= 2");
  if (cfg.max_iters < 1) throw ContractViolationError("max_iters must be >= 1");
  if (!(cfg.dilution > 0.0 && cfg.dilution <= 1.0)) {
    throw ContractViolationError("dilution must lie in (0, 1]");
  }
  if (cfg.phase_bins < 1 || cfg.quad_bins < 2) {
    throw ContractViolationError("mle needs phase_bins >= 1 and quad_bins >= 2");
  }
}

// Quadrature nodes of the 3-subnode midpoint rule, all bins, shared across
// phase bins. Node weight is bin_width/3.
std::vector<double> bin_nodes(const BinnedRecord &binned) {
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(binned.quad_bins) * kSubnodes);
  const double w = binned.bin_width();
  for (int q = 0; q < binned.quad_bins; ++q) {
    const double lo = binned.x_min + q * w;
    for (int s = 0; s < kSubnodes; ++s) {
      nodes.push_back(lo + w * (2.0 * s + 1.0) / (2.0 * kSubnodes));
    }
  }
  return nodes;
}

// Shared per-reconstruction tables.
struct Workspace {
  std::vector<double> nodes;          // quad_bins * kSubnodes
  std::vector<double> psi;            // dim x nodes, psi[n * nodes + i]
  std::vector<double> node_pdf;       // phase_bins x nodes
  std::vector<double> bin_probs;      // phase_bins x quad_bins
  std::vector<double> coeff;          // phase_bins x nodes, (f/p) * weight
};

Workspace make_workspace(const BinnedRecord &binned, int dim) {
  Workspace ws;
  ws.nodes = bin_nodes(binned);
  const std::size_t n_nodes = ws.nodes.size();
  ws.psi.resize(static_cast<std::size_t>(dim) * n_nodes);
  std::vector<double> column(dim);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    homodyne::hermite_psi(dim, ws.nodes[i], column.data());
    for (int n = 0; n < dim; ++n) ws.psi[n * n_nodes + i] = column[n];
  }
  ws.node_pdf.assign(static_cast<std::size_t>(binned.phase_bins) * n_nodes, 0.0);
  ws.bin_probs.assign(static_cast<std::size_t>(binned.phase_bins) * binned.quad_bins,
                      0.0);
  ws.coeff.assign(static_cast<std::size_t>(binned.phase_bins) * n_nodes, 0.0);
  return ws;
}

// pdf of rho at all nodes for every phase bin, then integrated bin
// probabilities. Parallel over phase bins; each bin's arithmetic is
// self-contained, so the result is identical at any thread count.
void eval_probs(const fock::Matrix &rho, const BinnedRecord &binned, Workspace &ws) {
  const int dim = static_cast<int>(rho.rows());
  const std::size_t n_nodes = ws.nodes.size();
  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int p = 0; p < binned.phase_bins; ++p) {
    const double theta = binned.phase_center(p);
    double *pdf = ws.node_pdf.data() + static_cast<std::size_t>(p) * n_nodes;
    for (std::size_t i = 0; i < n_nodes; ++i) pdf[i] = 0.0;
    for (int n = 0; n < dim; ++n) {
      const double *psi_n = ws.psi.data() + static_cast<std::size_t>(n) * n_nodes;
      const double rnn = rho(n, n).real();
      for (std::size_t i = 0; i < n_nodes; ++i) pdf[i] += rnn * psi_n[i] * psi_n[i];
    }
    for (int d = 1; d < dim; ++d) {
      const double tr = std::cos(d * theta);
      const double ti = std::sin(d * theta);
      for (int n = 0; n + d < dim; ++n) {
        const fock::Complex r = rho(n, n + d);
        const double w = 2.0 * (r.real() * tr - r.imag() * ti);
        if (w == 0.0) continue;
        const double *psi_n = ws.psi.data() + static_cast<std::size_t>(n) * n_nodes;
        const double *psi_m =
            ws.psi.data() + static_cast<std::size_t>(n + d) * n_nodes;
        for (std::size_t i = 0; i < n_nodes; ++i) pdf[i] += w * psi_n[i] * psi_m[i];
      }
    }
    const double node_w = binned.bin_width() / kSubnodes;
    double *probs = ws.bin_probs.data() + static_cast<std::size_t>(p) * binned.quad_bins;
    for (int q = 0; q < binned.quad_bins; ++q) {
      double acc = 0.0;
      for (int s = 0; s < kSubnodes; ++s) acc += pdf[q * kSubnodes + s];
      probs[q] = std::max(acc * node_w, 0.0);
    }
  }
}

double log_likelihood_binned(const BinnedRecord &binned, const Workspace &ws) {
  double logl = 0.0;
  for (int p = 0; p < binned.phase_bins; ++p) {
    for (int q = 0; q < binned.quad_bins; ++q) {
      const double f = binned.counts[p * binned.quad_bins + q] / binned.total;
      if (f <= 0.0) continue;
      const double prob = ws.bin_probs[p * binned.quad_bins + q];
      if (prob <= 0.0) return -std::numeric_limits<double>::infinity();
      logl += f * std::log(prob);
    }
  }
  return logl;
}

// R = sum_j (f_j / p_j) Pi_j assembled as R_mn = sum_p e^{i(m-n)theta_p} G^p_mn
// with G^p_mn = sum_nodes coeff * psi_m psi_n. Parallel over the upper
// triangle of (m, n); every entry sums phases and nodes in a fixed order.
void build_r(const BinnedRecord &binned, Workspace &ws, fock::Matrix &r_out) {
  const int dim = static_cast<int>(r_out.rows());
  const std::size_t n_nodes = ws.nodes.size();
  const double node_w = binned.bin_width() / kSubnodes;
  for (int p = 0; p < binned.phase_bins; ++p) {
    const double *probs =
        ws.bin_probs.data() + static_cast<std::size_t>(p) * binned.quad_bins;
    double *coeff = ws.coeff.data() + static_cast<std::size_t>(p) * n_nodes;
    for (int q = 0; q < binned.quad_bins; ++q) {
      const double f = binned.counts[p * binned.quad_bins + q] / binned.total;
      const double scale =
          f > 0.0 ? f / std::max(probs[q], kProbFloor) * node_w : 0.0;
      for (int s = 0; s < kSubnodes; ++s) coeff[q * kSubnodes + s] = scale;
    }
  }

  const int n_pairs = dim * (dim + 1) / 2;
  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int pair = 0; pair < n_pairs; ++pair) {
    // Unrank the pair index into (m, n), m <= n.
    int m = 0;
    int rem = pair;
    while (rem >= dim - m) {
      rem -= dim - m;
      ++m;
    }
    const int n = m + rem;
    const double *psi_m = ws.psi.data() + static_cast<std::size_t>(m) * n_nodes;
    const double *psi_n = ws.psi.data() + static_cast<std::size_t>(n) * n_nodes;
    fock::Complex acc = 0.0;
    for (int p = 0; p < binned.phase_bins; ++p) {
      const double *coeff = ws.coeff.data() + static_cast<std::size_t>(p) * n_nodes;
      double g = 0.0;
      for (std::size_t i = 0; i < n_nodes; ++i) g += coeff[i] * psi_m[i] * psi_n[i];
      const double delta = static_cast<double>(m - n);
      acc += g * std::polar(1.0, delta * binned.phase_center(p));
    }
    r_out(m, n) = acc;
    r_out(n, m) = std::conj(acc);
  }
}

}  // namespace

BinnedRecord bin_record(const homodyne::QuadratureRecord &record, const MleConfig &cfg) {
  check_config(cfg);
  if (record.size() == 0) {
    throw InsufficientDataError("mle requires a nonempty record");
  }
  record.validate();

  BinnedRecord binned;
  binned.phase_bins = cfg.phase_bins;
  binned.quad_bins = cfg.quad_bins;

  double x_absmax = 0.0;
  for (double v : record.value) x_absmax = std::max(x_absmax, std::abs(v));
  const double span = std::max(x_absmax * 1.05, 3.0 * std::sqrt(0.5));
  binned.x_min = -span;
  binned.x_max = span;
  binned.counts.assign(static_cast<std::size_t>(cfg.phase_bins) * cfg.quad_bins, 0.0);

  for (std::size_t i = 0; i < record.size(); ++i) {
    double theta = std::fmod(record.phase[i], M_PI);
    double value = record.value[i];
    if (std::fmod(record.phase[i], 2.0 * M_PI) >= M_PI) value = -value;
    if (theta < 0.0) theta += M_PI;
    int p = static_cast<int>(theta / M_PI * cfg.phase_bins);
    p = std::min(p, cfg.phase_bins - 1);
    int q = static_cast<int>((value - binned.x_min) / (2.0 * span) * cfg.quad_bins);
    q = std::clamp(q, 0, cfg.quad_bins - 1);
    binned.counts[p * cfg.quad_bins + q] += 1.0;
  }
  binned.total = static_cast<double>(record.size());
  return binned;
}

MleResult mle_reconstruct_binned(const BinnedRecord &binned, const MleConfig &cfg,
                                 const std::optional<fock::DensityMatrix> &init) {
  check_config(cfg);
  if (binned.total <= 0.0) {
    throw InsufficientDataError("mle requires nonzero total counts");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = cfg.dim;

  fock::Matrix rho = init.has_value()
                         ? init->matrix()
                         : fock::Matrix(fock::Matrix::Identity(dim, dim) / dim);
  if (rho.rows() != dim) {
    throw ContractViolationError("init density matrix dim does not match config");
  }

  Workspace ws = make_workspace(binned, dim);
  eval_probs(rho, binned, ws);
  double logl = log_likelihood_binned(binned, ws);

  MleDiagnostics diag;
  diag.loglik_trace.push_back(logl);

  fock::Matrix best = rho;
  double best_logl = logl;
  double eps = cfg.dilution;
  int successes = 0;
  int stable = 0;
  fock::Matrix r_op(dim, dim);

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    diag.iterations = iter + 1;
    build_r(binned, ws, r_op);

    fock::Matrix t = fock::Matrix::Identity(dim, dim) + eps * (r_op - fock::Matrix::Identity(dim, dim));
    fock::Matrix cand = t * rho * t.adjoint();
    cand = ((cand + cand.adjoint().eval()) * 0.5).eval();
    const double tr = cand.trace().real();
    if (!(tr > 0.0) || !cand.allFinite()) {
      throw NumericFailureError("mle iterate lost positivity of the trace");
    }
    cand /= tr;

    eval_probs(cand, binned, ws);
    const double cand_logl = log_likelihood_binned(binned, ws);

    if (cand_logl >= logl - 1e-12) {
      const double delta = std::abs(cand_logl - logl);
      rho = std::move(cand);
      logl = cand_logl;
      diag.loglik_trace.push_back(logl);
      if (logl >= best_logl) {
        best_logl = logl;
        best = rho;
      }
      if (++successes >= 5) {
        eps = cfg.dilution;
        successes = 0;
      }
      stable = delta < cfg.tolerance ? stable + 1 : 0;
      if (stable >= cfg.stable_iterations) {
        diag.converged = true;
        break;
      }
    } else {
      ++diag.rejected_steps;
      successes = 0;
      eps *= 0.5;
      // Restore the probabilities of the current iterate for the next R.
      eval_probs(rho, binned, ws);
      if (eps < 1e-8) break;  // no useful step remains
    }
  }

  diag.final_log_likelihood = best_logl;
  diag.wall_time_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return MleResult{fock::DensityMatrix::from_matrix(std::move(best)), std::move(diag)};
}

MleResult mle_reconstruct(const homodyne::QuadratureRecord &record, const MleConfig &cfg,
                          const std::optional<fock::DensityMatrix> &init) {
  return mle_reconstruct_binned(bin_record(record, cfg), cfg, init);
}

double log_likelihood(const fock::DensityMatrix &rho,
                      const homodyne::QuadratureRecord &record, const MleConfig &cfg) {
  MleConfig local = cfg;
  local.dim = rho.dim();
  const BinnedRecord binned = bin_record(record, local);
  Workspace ws = make_workspace(binned, local.dim);
  eval_probs(rho.matrix(), binned, ws);
  return log_likelihood_binned(binned, ws);
}

}  // namespace sqzt::mle
