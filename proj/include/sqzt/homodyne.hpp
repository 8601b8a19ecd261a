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

#ifndef SQZT_HOMODYNE_HPP_
#define SQZT_HOMODYNE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sqzt/fock.hpp"

// Balanced-homodyne measurement simulation: exact quadrature distributions
// p(x|theta) = <x,theta| rho |x,theta> and reproducible sampling with a
// scanned local-oscillator phase.

namespace sqzt::homodyne {

/// Number of measurement points in the paper-standard record.
inline constexpr int kStandardRecordLength = 2048;

/// Nodes of the cached inverse-CDF grid used by sample().
inline constexpr int kCdfNodes = 4096;

struct QuadratureRecord {
  std::vector<double> phase;  // radians in [0, 2pi)
  std::vector<double> value;  // quadrature amplitude

  std::size_t size() const { return phase.size(); }
  void validate() const;
};

struct PhaseSchedule {
  enum class Kind { kLinearScan, kFixedSet, kRandomUniform };

  Kind kind = Kind::kLinearScan;
  double lo = 0.0;
  double hi = M_PI;
  std::vector<double> fixed;

  static PhaseSchedule linear_scan(double lo = 0.0, double hi = M_PI);
  static PhaseSchedule fixed_set(std::vector<double> phases);
  static PhaseSchedule random_uniform(double lo = 0.0, double hi = M_PI);
};

/// Hermite functions psi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x^2/2},
/// n = 0..dim-1, by stable upward recurrence.
void hermite_psi(int dim, double x, double *out);

double quadrature_pdf(const fock::DensityMatrix &rho, double theta, double x);

double quadrature_variance(const fock::DensityMatrix &rho, double theta);

/// Central second moments of (x, p) plus first moments.
struct Covariance {
  double vxx = 0.0;
  double vpp = 0.0;
  double cxp = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;

  double variance_at(double theta) const;
  double max_variance() const;
  double min_variance() const;
};

Covariance covariance(const fock::DensityMatrix &rho);

/// i.i.d.-per-phase draws via inverse CDF on a cached grid spanning
/// +-(6 + 3 e^{r_max}) sigma_vac with kCdfNodes nodes. Deterministic given
/// (seed, schedule); the phase stream and the uniform stream are split so
/// results do not depend on evaluation order.
QuadratureRecord sample(const fock::DensityMatrix &rho, const PhaseSchedule &schedule,
                        int count, std::uint64_t seed);

/// Serial reference implementation; bit-identical to sample().
QuadratureRecord sample_serial(const fock::DensityMatrix &rho,
                               const PhaseSchedule &schedule, int count,
                               std::uint64_t seed);

/// CSV (header "phase_rad,quadrature") or the binary record container;
/// load sniffs the format. Implemented in io.
void save_record(const QuadratureRecord &record, const std::string &path);
void save_record_csv(const QuadratureRecord &record, const std::string &path);
QuadratureRecord load_record(const std::string &path);

//===========================================================================
// Grid evaluation machinery, shared with the MLE kernels and benchmarks.
// pdf values over a fixed x-grid for any theta in O(nodes * dim) after an
// O(nodes * dim^2) setup, via the diagonal profiles
//   c_d(x) = sum_m rho_{m,m+d} psi_m(x) psi_{m+d}(x)
//   p(x|theta) = c_0(x) + 2 sum_{d>=1} Re[c_d(x) e^{i d theta}].
//===========================================================================

class PdfGrid {
 public:
  PdfGrid(const fock::DensityMatrix &rho, std::vector<double> nodes);

  const std::vector<double> &nodes() const { return nodes_; }
  int dim() const { return dim_; }

  /// pdf at every node for one LO phase; out must hold nodes().size().
  void eval(double theta, double *out) const;

 private:
  int dim_;
  std::vector<double> nodes_;
  // profiles_[d][i]: complex c_d at node i, stored re/im interleaved
  std::vector<std::vector<double>> profiles_;
};

/// Uniform grid of kCdfNodes covering the sampling span for rho.
std::vector<double> sampling_grid(const fock::DensityMatrix &rho, int nodes = kCdfNodes);

}  // namespace sqzt::homodyne

#endif  // SQZT_HOMODYNE_HPP_
