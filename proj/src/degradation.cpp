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

#include "sqzt/degradation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "sqzt/channels.hpp"
#include "sqzt/homodyne.hpp"
#include "sqzt/metrics.hpp"
#include "sqzt/states.hpp"

namespace sqzt::degradation {

namespace {

constexpr double kIdealMaxDb = 26.0;
constexpr double kThetaMax = 0.6;

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

struct Params {
  double loss;
  double theta;
};

Params from_u(const double *u) {
  return {sigmoid(u[0]), kThetaMax * sigmoid(u[1])};
}

double point_distance_sq(const LevelPoint &point, const Params &prm,
                         double *ideal_best) {
  auto dist2 = [&](double s) {
    const auto [sq, as] = channels::predicted_levels(s, prm.loss, prm.theta);
    const double dx = sq - point.sq_db;
    const double dy = as - point.as_db;
    return dx * dx + dy * dy;
  };
  // Dense scan to bracket the global minimum, then golden-section refine.
  constexpr int kScan = 64;
  double best_s = 0.0;
  double best = dist2(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double s = kIdealMaxDb * i / kScan;
    const double d = dist2(s);
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  double lo = std::max(0.0, best_s - kIdealMaxDb / kScan);
  double hi = std::min(kIdealMaxDb, best_s + kIdealMaxDb / kScan);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = dist2(x1);
  double f2 = dist2(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = dist2(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = dist2(x2);
    }
  }
  const double s_opt = 0.5 * (lo + hi);
  if (ideal_best != nullptr) *ideal_best = s_opt;
  return dist2(s_opt);
}

// Residual vector: per-point orthogonal distances. Inner profiling runs in
// parallel; each point is independent.
void residuals(const std::vector<LevelPoint> &points, const Params &prm,
               std::vector<double> &out) {
  const int n = static_cast<int>(points.size());
  out.resize(n);
  const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (int i = 0; i < n; ++i) {
    out[i] = std::sqrt(point_distance_sq(points[i], prm, nullptr));
  }
}

double rss_of(const std::vector<double> &r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return s;
}

}  // namespace

double DegradationFit::orthogonal_distance(const LevelPoint &point,
                                           double *ideal_db) const {
  return std::sqrt(point_distance_sq(point, Params{loss, theta}, ideal_db));
}

std::vector<LevelPoint> reference_points() {
  return {
      {3.76, 3.89, "A", 5.0},
      {7.39, 12.16, "B", 55.0},
      {7.91, 18.56, "C", 77.0},
      {9.38, 19.69, "D", 80.0},
  };
}

DegradationFit fit(const std::vector<LevelPoint> &points) {
  if (points.size() < 2) {
    throw InsufficientDataError("degradation fit needs at least 2 points");
  }
  bool all_same = true;
  for (const auto &p : points) {
    if (p.sq_db != points[0].sq_db || p.as_db != points[0].as_db) all_same = false;
    if (!std::isfinite(p.sq_db) || !std::isfinite(p.as_db)) {
      throw ContractViolationError("level points must be finite");
    }
  }
  if (all_same) {
    throw InsufficientDataError("degradation fit needs non-identical points");
  }

  // Initialization from the highest-squeezing point: solve the theta = 0
  // model (V_sq - L)(V_as - L) = (1 - L)^2 for L, then attribute the
  // remaining anti-squeezing excess to theta.
  const LevelPoint &top =
      *std::max_element(points.begin(), points.end(),
                        [](const LevelPoint &a, const LevelPoint &b) {
                          return a.sq_db < b.sq_db;
                        });
  const double v_sq = std::pow(10.0, -top.sq_db / 10.0);
  const double v_as = std::pow(10.0, top.as_db / 10.0);
  double l0 = (2.0 - v_sq - v_as) != 0.0
                  ? (1.0 - v_sq * v_as) / (2.0 - v_sq - v_as)
                  : 0.05;
  l0 = std::clamp(l0, 1e-4, 0.8);
  double theta0 = 0.02;
  {
    const double vsum = (v_sq + v_as - 2.0 * l0) / (1.0 - l0);
    if (vsum > 2.0) {
      const double v = 0.5 * (vsum - std::sqrt(vsum * vsum - 4.0));
      const double denom = (1.0 - l0) * (1.0 / v - v);
      if (denom > 0.0) {
        const double s2 = (v_sq - l0 - (1.0 - l0) * v) / denom;
        if (s2 > 0.0 && s2 < 0.25) theta0 = std::asin(std::sqrt(s2));
      }
    }
  }

  double u[2] = {logit(l0), logit(std::clamp(theta0 / kThetaMax, 1e-6, 0.999))};

  std::vector<double> res;
  residuals(points, from_u(u), res);
  double rss = rss_of(res);

  const int n = static_cast<int>(points.size());
  double lambda = 1e-3;
  bool converged = false;
  Eigen::Matrix2d jtj_final = Eigen::Matrix2d::Zero();

  for (int iter = 0; iter < 200; ++iter) {
    // Forward-difference Jacobian in u.
    Eigen::MatrixXd jac(n, 2);
    const double h = 1e-6;
    for (int k = 0; k < 2; ++k) {
      double up[2] = {u[0], u[1]};
      up[k] += h;
      std::vector<double> res_p;
      residuals(points, from_u(up), res_p);
      for (int i = 0; i < n; ++i) jac(i, k) = (res_p[i] - res[i]) / h;
    }
    Eigen::Map<Eigen::VectorXd> r_vec(res.data(), n);
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d jtr = jac.transpose() * r_vec;
    jtj_final = jtj;

    if (jtr.norm() < 1e-13) {
      converged = true;
      break;
    }

    bool stepped = false;
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::Matrix2d damped = jtj;
      damped(0, 0) += lambda * std::max(jtj(0, 0), 1e-12);
      damped(1, 1) += lambda * std::max(jtj(1, 1), 1e-12);
      const Eigen::Vector2d step = damped.ldlt().solve(jtr);
      double u_try[2] = {u[0] - step(0), u[1] - step(1)};
      u_try[0] = std::clamp(u_try[0], -40.0, 40.0);
      u_try[1] = std::clamp(u_try[1], -40.0, 40.0);
      std::vector<double> res_try;
      residuals(points, from_u(u_try), res_try);
      const double rss_try = rss_of(res_try);
      if (rss_try <= rss) {
        const double improvement = rss - rss_try;
        u[0] = u_try[0];
        u[1] = u_try[1];
        res = std::move(res_try);
        rss = rss_try;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (improvement < 1e-15 * std::max(rss, 1e-30)) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped || converged) {
      converged = converged || !stepped;
      break;
    }
  }

  const Params prm = from_u(u);
  DegradationFit out;
  out.loss = prm.loss;
  out.theta = prm.theta;
  out.residual_rms = std::sqrt(rss / n);
  out.converged = converged;

  // Covariance in (L, theta): propagate the u-space Gauss-Newton covariance
  // through the sigmoid reparametrization.
  const int dof = std::max(n - 2, 1);
  const double sigma2 = rss / dof;
  Eigen::Matrix2d cov_u = Eigen::Matrix2d::Zero();
  const double det = jtj_final.determinant();
  if (det > 1e-30) {
    cov_u = sigma2 * jtj_final.inverse();
  }
  const double dl_du = prm.loss * (1.0 - prm.loss);
  const double dt_du = prm.theta * (1.0 - prm.theta / kThetaMax);
  Eigen::Matrix2d scale;
  scale << dl_du, 0.0, 0.0, dt_du;
  const Eigen::Matrix2d cov = scale * cov_u * scale;
  out.covariance = {cov(0, 0), cov(0, 1), cov(1, 0), cov(1, 1)};
  return out;
}

std::vector<BandSample> predict_band(const DegradationFit &fit,
                                     const std::vector<double> &ideal_db_range) {
  std::vector<BandSample> band;
  band.reserve(ideal_db_range.size());
  Eigen::Matrix2d cov;
  cov << fit.covariance[0], fit.covariance[1], fit.covariance[2], fit.covariance[3];
  for (double s : ideal_db_range) {
    BandSample sample;
    sample.ideal_db = s;
    const auto [sq, as] = channels::predicted_levels(s, fit.loss, fit.theta);
    sample.sq_db = sq;
    sample.as_db = as;
    // First-order propagation through (L, theta).
    const double hl = std::max(1e-7, 1e-6 * std::max(fit.loss, 1e-3));
    const double ht = std::max(1e-7, 1e-6 * std::max(fit.theta, 1e-3));
    const double l_hi = std::min(fit.loss + hl, 1.0);
    const auto [sq_l, as_l] = channels::predicted_levels(s, l_hi, fit.theta);
    const auto [sq_t, as_t] = channels::predicted_levels(s, fit.loss, fit.theta + ht);
    Eigen::Matrix2d g;
    g << (sq_l - sq) / (l_hi - fit.loss), (sq_t - sq) / ht,
        (as_l - as) / (l_hi - fit.loss), (as_t - as) / ht;
    const Eigen::Matrix2d prop = g * cov * g.transpose();
    sample.sq_sigma = std::sqrt(std::max(prop(0, 0), 0.0));
    sample.as_sigma = std::sqrt(std::max(prop(1, 1), 0.0));
    band.push_back(sample);
  }
  return band;
}

std::vector<PurityRow> purity_vs_antisqueezing(const DegradationFit &fit,
                                               const std::vector<double> &ideal_db_range,
                                               int dim, double tail_tol) {
  std::vector<PurityRow> rows;
  rows.reserve(ideal_db_range.size());
  for (double s : ideal_db_range) {
    const double r = states::squeeze_factor_from_db(s);
    const fock::DensityMatrix ideal = states::squeezed_vacuum({r, 0.0}, dim, tail_tol);
    const fock::DensityMatrix degraded =
        channels::degrade(ideal, {fit.loss}, {fit.theta});
    PurityRow row;
    row.ideal_db = s;
    row.as_db = metrics::squeezing_levels(degraded).as_db;
    row.purity = metrics::purity(degraded);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sqzt::degradation
