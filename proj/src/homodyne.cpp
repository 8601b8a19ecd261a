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

#include "sqzt/homodyne.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "sqzt/io.hpp"

namespace sqzt::homodyne {

void QuadratureRecord::validate() const {
  if (phase.size() != value.size()) {
    throw ContractViolationError("record phase/value lengths differ");
  }
  if (phase.empty()) {
    throw ContractViolationError("record must hold at least one point");
  }
  for (std::size_t i = 0; i < phase.size(); ++i) {
    if (!std::isfinite(phase[i]) || !std::isfinite(value[i])) {
      throw ContractViolationError("record entries must be finite");
    }
    if (phase[i] < 0.0 || phase[i] >= 2.0 * M_PI) {
      throw ContractViolationError("record phases must lie in [0, 2pi)");
    }
  }
}

PhaseSchedule PhaseSchedule::linear_scan(double lo, double hi) {
  PhaseSchedule s;
  s.kind = Kind::kLinearScan;
  s.lo = lo;
  s.hi = hi;
  return s;
}

PhaseSchedule PhaseSchedule::fixed_set(std::vector<double> phases) {
  if (phases.empty()) {
    throw ContractViolationError("fixed phase set must be nonempty");
  }
  PhaseSchedule s;
  s.kind = Kind::kFixedSet;
  s.fixed = std::move(phases);
  return s;
}

PhaseSchedule PhaseSchedule::random_uniform(double lo, double hi) {
  PhaseSchedule s;
  s.kind = Kind::kRandomUniform;
  s.lo = lo;
  s.hi = hi;
  return s;
}

void hermite_psi(int dim, double x, double *out) {
  // psi_0 = pi^{-1/4} e^{-x^2/2}; psi_n = sqrt(2/n) x psi_{n-1}
  //                                     - sqrt((n-1)/n) psi_{n-2}
  const double psi0 = 0.7511255444649425 * std::exp(-0.5 * x * x);
  out[0] = psi0;
  if (dim > 1) out[1] = std::sqrt(2.0) * x * psi0;
  for (int n = 2; n < dim; ++n) {
    out[n] = std::sqrt(2.0 / n) * x * out[n - 1] -
             std::sqrt((n - 1.0) / n) * out[n - 2];
  }
}

double quadrature_pdf(const fock::DensityMatrix &rho, double theta, double x) {
  const int dim = rho.dim();
  std::vector<double> psi(dim);
  hermite_psi(dim, x, psi.data());
  const fock::Matrix &m = rho.matrix();
  double p = 0.0;
  for (int n = 0; n < dim; ++n) {
    p += m(n, n).real() * psi[n] * psi[n];
  }
  for (int d = 1; d < dim; ++d) {
    const fock::Complex twist = std::polar(1.0, d * theta);
    fock::Complex cd = 0.0;
    for (int n = 0; n + d < dim; ++n) {
      cd += m(n, n + d) * (psi[n] * psi[n + d]);
    }
    p += 2.0 * (cd * twist).real();
  }
  return p;
}

double quadrature_variance(const fock::DensityMatrix &rho, double theta) {
  const Covariance cov = covariance(rho);
  return cov.variance_at(theta);
}

double Covariance::variance_at(double theta) const {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return vxx * c * c + vpp * s * s + 2.0 * cxp * c * s;
}

double Covariance::max_variance() const {
  const double mid = 0.5 * (vxx + vpp);
  const double off = std::hypot(0.5 * (vxx - vpp), cxp);
  return mid + off;
}

double Covariance::min_variance() const {
  const double mid = 0.5 * (vxx + vpp);
  const double off = std::hypot(0.5 * (vxx - vpp), cxp);
  return mid - off;
}

Covariance covariance(const fock::DensityMatrix &rho) {
  const fock::Matrix &m = rho.matrix();
  const int dim = rho.dim();
  // <a>, <a^2>, <n> from the first two off-diagonals and the diagonal.
  fock::Complex a_mean = 0.0;
  fock::Complex a2_mean = 0.0;
  double n_mean = 0.0;
  for (int n = 0; n < dim; ++n) {
    n_mean += n * m(n, n).real();
    if (n + 1 < dim) a_mean += std::sqrt(n + 1.0) * m(n + 1, n);
    if (n + 2 < dim) a2_mean += std::sqrt((n + 1.0) * (n + 2.0)) * m(n + 2, n);
  }
  Covariance cov;
  cov.mean_x = std::sqrt(2.0) * a_mean.real();
  cov.mean_p = std::sqrt(2.0) * a_mean.imag();
  cov.vxx = a2_mean.real() + n_mean + 0.5 - cov.mean_x * cov.mean_x;
  cov.vpp = -a2_mean.real() + n_mean + 0.5 - cov.mean_p * cov.mean_p;
  cov.cxp = a2_mean.imag() - cov.mean_x * cov.mean_p;
  return cov;
}

PdfGrid::PdfGrid(const fock::DensityMatrix &rho, std::vector<double> nodes)
    : dim_(rho.dim()), nodes_(std::move(nodes)) {
  const int n_nodes = static_cast<int>(nodes_.size());
  const fock::Matrix &m = rho.matrix();
  profiles_.assign(dim_, std::vector<double>());
  for (int d = 0; d < dim_; ++d) profiles_[d].assign(2 * n_nodes, 0.0);

  std::vector<double> psi(dim_);
  for (int i = 0; i < n_nodes; ++i) {
    hermite_psi(dim_, nodes_[i], psi.data());
    for (int d = 0; d < dim_; ++d) {
      fock::Complex cd = 0.0;
      for (int n = 0; n + d < dim_; ++n) {
        cd += m(n, n + d) * (psi[n] * psi[n + d]);
      }
      profiles_[d][2 * i] = cd.real();
      profiles_[d][2 * i + 1] = cd.imag();
    }
  }
}

void PdfGrid::eval(double theta, double *out) const {
  const int n_nodes = static_cast<int>(nodes_.size());
  const std::vector<double> &c0 = profiles_[0];
  for (int i = 0; i < n_nodes; ++i) out[i] = c0[2 * i];
  for (int d = 1; d < dim_; ++d) {
    const double tr = std::cos(d * theta);
    const double ti = std::sin(d * theta);
    const std::vector<double> &cd = profiles_[d];
    for (int i = 0; i < n_nodes; ++i) {
      // 2 Re[c_d e^{i d theta}]
      out[i] += 2.0 * (cd[2 * i] * tr - cd[2 * i + 1] * ti);
    }
  }
}

std::vector<double> sampling_grid(const fock::DensityMatrix &rho, int nodes) {
  const Covariance cov = covariance(rho);
  const double sigma_vac = std::sqrt(0.5);
  const double stretch = std::sqrt(std::max(cov.max_variance(), 0.5) / 0.5);
  const double span = (6.0 + 3.0 * stretch) * sigma_vac +
                      std::max(std::abs(cov.mean_x), std::abs(cov.mean_p));
  std::vector<double> grid(nodes);
  for (int i = 0; i < nodes; ++i) {
    grid[i] = -span + 2.0 * span * i / (nodes - 1.0);
  }
  return grid;
}

namespace {

std::vector<double> schedule_phases(const PhaseSchedule &schedule, int count,
                                    std::uint64_t seed) {
  std::vector<double> phases(count);
  switch (schedule.kind) {
    case PhaseSchedule::Kind::kLinearScan:
      for (int i = 0; i < count; ++i) {
        phases[i] = schedule.lo + (schedule.hi - schedule.lo) * i / count;
      }
      break;
    case PhaseSchedule::Kind::kFixedSet:
      for (int i = 0; i < count; ++i) {
        phases[i] = schedule.fixed[i % schedule.fixed.size()];
      }
      break;
    case PhaseSchedule::Kind::kRandomUniform: {
      auto rng = make_rng(seed, 1);
      for (int i = 0; i < count; ++i) {
        phases[i] = uniform(rng, schedule.lo, schedule.hi);
      }
      break;
    }
  }
  for (double &p : phases) {
    p = std::fmod(p, 2.0 * M_PI);
    if (p < 0.0) p += 2.0 * M_PI;
  }
  return phases;
}

// Inverse of the trapezoid CDF over the grid for one uniform draw.
double invert_cdf(const std::vector<double> &grid, const std::vector<double> &cdf,
                  double u) {
  const double target = u * cdf.back();
  auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.begin()) return grid.front();
  if (it == cdf.end()) return grid.back();
  const std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
  const double c0 = cdf[hi - 1];
  const double c1 = cdf[hi];
  const double t = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
  return grid[hi - 1] + t * (grid[hi] - grid[hi - 1]);
}

// One inverse-CDF draw at a given phase. Shared by the serial reference and
// the OpenMP kernel so both produce bit-identical values.
double sample_point(const PdfGrid &pdf, const std::vector<double> &grid,
                    double phase, double u, std::vector<double> &density,
                    std::vector<double> &cdf) {
  pdf.eval(phase, density.data());
  cdf[0] = 0.0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    const double a = std::max(density[j - 1], 0.0);
    const double b = std::max(density[j], 0.0);
    cdf[j] = cdf[j - 1] + 0.5 * (a + b) * (grid[j] - grid[j - 1]);
  }
  return invert_cdf(grid, cdf, u);
}

struct SampleInputs {
  std::vector<double> grid;
  PdfGrid pdf;
  std::vector<double> phases;
  std::vector<double> uniforms;
};

SampleInputs prepare_sample(const fock::DensityMatrix &rho,
                            const PhaseSchedule &schedule, int count,
                            std::uint64_t seed) {
  if (count < 1) {
    throw ContractViolationError("sample count must be >= 1");
  }
  std::vector<double> grid = sampling_grid(rho);
  PdfGrid pdf(rho, grid);
  std::vector<double> phases = schedule_phases(schedule, count, seed);
  std::vector<double> uniforms(count);
  auto rng = make_rng(seed, 0);
  for (int i = 0; i < count; ++i) uniforms[i] = uniform01(rng);
  return {std::move(grid), std::move(pdf), std::move(phases), std::move(uniforms)};
}

}  // namespace

QuadratureRecord sample(const fock::DensityMatrix &rho, const PhaseSchedule &schedule,
                        int count, std::uint64_t seed) {
  SampleInputs in = prepare_sample(rho, schedule, count, seed);
  QuadratureRecord record;
  record.phase = in.phases;
  record.value.assign(count, 0.0);
  const int threads = thread_count();
#pragma omp parallel num_threads(threads) if (threads > 1)
  {
    std::vector<double> density(in.grid.size());
    std::vector<double> cdf(in.grid.size());
#pragma omp for schedule(static)
    for (int i = 0; i < count; ++i) {
      record.value[i] =
          sample_point(in.pdf, in.grid, in.phases[i], in.uniforms[i], density, cdf);
    }
  }
  return record;
}

QuadratureRecord sample_serial(const fock::DensityMatrix &rho,
                               const PhaseSchedule &schedule, int count,
                               std::uint64_t seed) {
  SampleInputs in = prepare_sample(rho, schedule, count, seed);
  QuadratureRecord record;
  record.phase = in.phases;
  record.value.assign(count, 0.0);
  std::vector<double> density(in.grid.size());
  std::vector<double> cdf(in.grid.size());
  for (int i = 0; i < count; ++i) {
    record.value[i] =
        sample_point(in.pdf, in.grid, in.phases[i], in.uniforms[i], density, cdf);
  }
  return record;
}

void save_record(const QuadratureRecord &record, const std::string &path) {
  io::write_record_binary(record, path);
}

void save_record_csv(const QuadratureRecord &record, const std::string &path) {
  io::write_record_csv(record, path);
}

QuadratureRecord load_record(const std::string &path) {
  return io::read_record_auto(path);
}

}  // namespace sqzt::homodyne
