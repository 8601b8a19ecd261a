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

#include "sqzt/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqzt/corpus.hpp"
#include "sqzt/degradation.hpp"
#include "sqzt/io.hpp"
#include "sqzt/metrics.hpp"
#include "sqzt/mle.hpp"
#include "sqzt/nn.hpp"

namespace sqzt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalFlags {
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = leave the SQZTOMO_THREADS / hardware default
  std::string out_dir = ".";
};

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

void write_manifest(const GlobalFlags &g, const std::string &command,
                    const json &config, const std::vector<std::string> &inputs,
                    const std::vector<std::string> &outputs, double wall_ms) {
  fs::create_directories(g.out_dir);
  const json manifest = {{"command", command},
                         {"tool_version", kToolVersion},
                         {"seed", g.seed},
                         {"seed_scheme", kSeedScheme},
                         {"threads", thread_count()},
                         {"config", config},
                         {"inputs", inputs},
                         {"outputs", outputs},
                         {"wall_time_ms", wall_ms}};
  io::write_file_text((fs::path(g.out_dir) / ("manifest-" + command + ".json")).string(),
                      manifest.dump(1));
}

std::string joined(const GlobalFlags &g, const std::string &name) {
  return (fs::path(g.out_dir) / name).string();
}

std::vector<degradation::LevelPoint> read_points_csv(const std::string &path) {
  const std::string text = io::read_file_text(path);
  std::vector<degradation::LevelPoint> points;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "sq_db" || fields[1] != "as_db") {
        throw MalformedFileError(path + ":1: expected header starting 'sq_db,as_db'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 2) {
      throw MalformedFileError(path + ":" + std::to_string(line_no) +
                               ": need at least sq_db,as_db");
    }
    degradation::LevelPoint p;
    char *end = nullptr;
    p.sq_db = std::strtod(fields[0].c_str(), &end);
    if (end != fields[0].c_str() + fields[0].size()) {
      throw MalformedFileError(path + ":" + std::to_string(line_no) + ": bad sq_db");
    }
    p.as_db = std::strtod(fields[1].c_str(), &end);
    if (end != fields[1].c_str() + fields[1].size()) {
      throw MalformedFileError(path + ":" + std::to_string(line_no) + ": bad as_db");
    }
    if (fields.size() >= 3) p.label = fields[2];
    if (fields.size() >= 4 && !fields[3].empty()) {
      p.pump_mw = std::strtod(fields[3].c_str(), nullptr);
    }
    points.push_back(std::move(p));
  }
  if (points.empty()) {
    throw MalformedFileError(path + ": no data points");
  }
  return points;
}

//---------------------------------------------------------------------------
// simulate
//---------------------------------------------------------------------------

int cmd_simulate(const GlobalFlags &g, const states::StateParams &params, int dim,
                 int count, const std::string &schedule_kind, bool csv,
                 const std::string &sampler, double tail_tol) {
  Timer timer;
  const homodyne::PhaseSchedule schedule =
      schedule_kind == "random" ? homodyne::PhaseSchedule::random_uniform()
                                : homodyne::PhaseSchedule::linear_scan();

  const fock::DensityMatrix truth = corpus::synth_state(params, dim, tail_tol);
  homodyne::QuadratureRecord record =
      sampler == "grid" ? homodyne::sample(truth, schedule, count, g.seed)
                        : corpus::sample_family_record(params, schedule, count, g.seed);

  fs::create_directories(g.out_dir);
  const std::string record_path = joined(g, csv ? "record.csv" : "record.rec");
  if (csv) {
    io::write_record_csv(record, record_path);
  } else {
    io::write_record_binary(record, record_path);
  }
  const std::string truth_path = joined(g, "truth.dm");
  io::write_density_matrix(truth, truth_path);

  const json config = {{"sq_db", params.sq_db},   {"phi", params.phi},
                       {"nbar", params.nbar},     {"loss", params.loss},
                       {"phase_noise", params.theta_pn},
                       {"dim", dim},              {"n", count},
                       {"schedule", schedule_kind}, {"sampler", sampler},
                       {"tail_tol", tail_tol},    {"csv", csv}};
  write_manifest(g, "simulate", config, {}, {record_path, truth_path}, timer.ms());
  std::cout << "simulate: wrote " << record_path << " and " << truth_path << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// gen-corpus
//---------------------------------------------------------------------------

int cmd_gen_corpus(const GlobalFlags &g, corpus::CorpusConfig config) {
  Timer timer;
  config.base_seed = g.seed;
  const corpus::CorpusIndex index = corpus::generate(config, g.out_dir);
  const json cfg = {{"count", config.count},
                    {"dim", config.dim},
                    {"record_len", config.record_len},
                    {"max_db", config.family.max_db},
                    {"nbar_min", config.family.nbar_min},
                    {"nbar_max", config.family.nbar_max},
                    {"loss_max", config.family.loss_max},
                    {"theta_max", config.family.theta_max},
                    {"tail_tol", config.tail_tol},
                    {"binary_records", config.binary_records}};
  write_manifest(g, "gen-corpus", cfg, {},
                 {(fs::path(g.out_dir) / "index.json").string()}, timer.ms());
  std::cout << "gen-corpus: " << index.entries.size() << " samples in " << g.out_dir
            << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// reconstruct-mle
//---------------------------------------------------------------------------

int cmd_reconstruct_mle(const GlobalFlags &g, const std::string &input,
                        const std::string &out, const std::string &diagnostics,
                        const mle::MleConfig &cfg) {
  Timer timer;
  const homodyne::QuadratureRecord record = io::read_record_auto(input);
  const mle::MleResult result = mle::mle_reconstruct(record, cfg);
  io::write_density_matrix(result.rho, out);

  std::vector<std::string> outputs = {out};
  if (!diagnostics.empty()) {
    const json diag = {{"iterations", result.diagnostics.iterations},
                       {"converged", result.diagnostics.converged},
                       {"rejected_steps", result.diagnostics.rejected_steps},
                       {"final_log_likelihood", result.diagnostics.final_log_likelihood},
                       {"loglik_trace", result.diagnostics.loglik_trace},
                       {"wall_time_ms", result.diagnostics.wall_time_ms}};
    io::write_file_text(diagnostics, diag.dump(1));
    outputs.push_back(diagnostics);
  }
  const json config = {{"dim", cfg.dim},
                       {"phase_bins", cfg.phase_bins},
                       {"quad_bins", cfg.quad_bins},
                       {"max_iters", cfg.max_iters},
                       {"dilution", cfg.dilution},
                       {"tolerance", cfg.tolerance}};
  write_manifest(g, "reconstruct-mle", config, {input}, outputs, timer.ms());
  std::cout << "reconstruct-mle: " << result.diagnostics.iterations << " iterations, "
            << (result.diagnostics.converged ? "converged" : "NOT converged")
            << ", logL " << result.diagnostics.final_log_likelihood << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// train
//---------------------------------------------------------------------------

int cmd_train(const GlobalFlags &g, const std::string &corpus_dir,
              const std::string &out, const std::string &history_path,
              nn::TrainOptions opts, int dim, int input_len, int val_count,
              const std::string &mode) {
  Timer timer;
  const corpus::CorpusIndex index = corpus::read_index(corpus_dir);
  nn::NetArchitecture arch = nn::NetArchitecture::desk(
      dim > 0 ? dim : index.config.dim,
      input_len > 0 ? input_len : index.config.record_len);
  if (mode == "histogram") arch.mode = nn::InputMode::kHistogram;

  opts.seed = g.seed;
  const int total = static_cast<int>(index.entries.size());
  const int train_count = total - std::max(val_count, 0);
  if (train_count < 1) {
    throw InsufficientDataError("corpus too small for the requested validation split");
  }
  const nn::TrainingSet train_set =
      corpus::load_training_set(corpus_dir, arch, train_count, 0);
  nn::NetworkModel model = nn::make_model(arch, g.seed);
  const nn::TrainHistory history = nn::train(model, train_set, opts);
  nn::save_model(model, out);

  std::vector<std::string> outputs = {out};
  if (!history_path.empty()) {
    const json hist = {{"epoch_loss", history.epoch_loss},
                       {"diverged", history.diverged}};
    io::write_file_text(history_path, hist.dump(1));
    outputs.push_back(history_path);
  }
  const json config = {{"corpus", corpus_dir},
                       {"epochs", opts.epochs},
                       {"batch", opts.batch},
                       {"lr", opts.lr},
                       {"momentum", opts.momentum},
                       {"dim", arch.dim},
                       {"input_len", arch.input_len},
                       {"mode", mode},
                       {"train_count", train_count}};
  write_manifest(g, "train", config, {corpus_dir}, outputs, timer.ms());
  std::cout << "train: " << history.epoch_loss.size() << " epochs, final loss "
            << (history.epoch_loss.empty() ? 0.0 : history.epoch_loss.back())
            << (history.diverged ? " (DIVERGED, reverted)" : "") << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// reconstruct-nn
//---------------------------------------------------------------------------

int cmd_reconstruct_nn(const GlobalFlags &g, const std::string &model_path,
                       const std::string &input, const std::string &out,
                       bool print_time) {
  Timer timer;
  if (!fs::exists(model_path)) {
    throw MalformedFileError(model_path +
                             ": model file not found (train one with `sqzt train`)");
  }
  const nn::NetworkModel model = nn::load_model(model_path);
  const homodyne::QuadratureRecord record = io::read_record_auto(input);
  const nn::Prediction pred = nn::predict_density(model, record);
  io::write_density_matrix(pred.rho, out);
  if (print_time) {
    std::cout << "reconstruct-nn: " << pred.wall_time_ms << " ms\n";
  }
  const json config = {{"model", model_path}, {"time", print_time}};
  write_manifest(g, "reconstruct-nn", config, {model_path, input}, {out}, timer.ms());
  return 0;
}

//---------------------------------------------------------------------------
// evaluate
//---------------------------------------------------------------------------

int cmd_evaluate(const GlobalFlags &g, const std::string &rho_path,
                 const std::string &reference, const std::string &report) {
  Timer timer;
  const fock::DensityMatrix rho = io::read_density_matrix(rho_path);
  const metrics::SqueezingLevels levels = metrics::squeezing_levels(rho);
  const metrics::Decomposition dec = metrics::decompose(rho);
  const metrics::SqueezedThermalMatch match =
      metrics::match_squeezed_thermal(dec.residual);

  json out = {{"purity", metrics::purity(rho)},
              {"squeezing_db", levels.sq_db},
              {"anti_squeezing_db", levels.as_db},
              {"angle_min_rad", levels.angle_min},
              {"sigma1", dec.sigma1},
              {"sigma_non", dec.sigma_non},
              {"degenerate_top", dec.ambiguous},
              {"residual_squeezed_thermal_match",
               {{"r", match.sq.r},
                {"phi", match.sq.phi},
                {"nbar", match.th.nbar},
                {"fidelity", match.fidelity}}}};
  std::vector<std::string> inputs = {rho_path};
  if (!reference.empty()) {
    const fock::DensityMatrix ref = io::read_density_matrix(reference);
    out["fidelity_to_reference"] = metrics::fidelity(rho, ref);
    inputs.push_back(reference);
  }
  io::write_file_text(report, out.dump(1));
  write_manifest(g, "evaluate", {{"reference", reference}}, inputs, {report},
                 timer.ms());
  std::cout << "evaluate: report written to " << report << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// wigner
//---------------------------------------------------------------------------

int cmd_wigner(const GlobalFlags &g, const std::string &rho_path,
               const std::string &out, int points, double span) {
  Timer timer;
  const fock::DensityMatrix rho = io::read_density_matrix(rho_path);
  const std::vector<double> axis = metrics::default_wigner_axis(points, span);
  const metrics::WignerGrid grid = metrics::wigner(rho, axis, axis);
  std::string text = "x,p,w\n";
  char line[96];
  for (std::size_t i = 0; i < grid.x_axis.size(); ++i) {
    for (std::size_t j = 0; j < grid.p_axis.size(); ++j) {
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", grid.x_axis[i],
                    grid.p_axis[j], grid.values(i, j));
      text += line;
    }
  }
  io::write_file_text(out, text);
  write_manifest(g, "wigner", {{"points", points}, {"span_sigmas", span}}, {rho_path},
                 {out}, timer.ms());
  std::cout << "wigner: grid sum " << grid.riemann_sum() << ", written to " << out
            << "\n";
  return 0;
}

//---------------------------------------------------------------------------
// fit-degradation
//---------------------------------------------------------------------------

int cmd_fit_degradation(const GlobalFlags &g, const std::string &points_path,
                        const std::string &out, const std::string &band_path,
                        const std::string &purity_path, int purity_dim) {
  Timer timer;
  const std::vector<degradation::LevelPoint> points =
      points_path.empty() ? degradation::reference_points()
                          : read_points_csv(points_path);
  const degradation::DegradationFit fit = degradation::fit(points);

  const json fit_json = {{"loss", fit.loss},
                         {"theta_rad", fit.theta},
                         {"residual_rms_db", fit.residual_rms},
                         {"converged", fit.converged},
                         {"covariance", fit.covariance}};
  io::write_file_text(out, fit_json.dump(1));
  std::vector<std::string> outputs = {out};

  std::vector<double> range;
  for (double s = 0.0; s <= 20.0 + 1e-9; s += 0.25) range.push_back(s);

  if (!band_path.empty()) {
    const std::vector<degradation::BandSample> band =
        degradation::predict_band(fit, range);
    std::string text = "ideal_db,sq_db,as_db,sq_sigma,as_sigma\n";
    char line[128];
    for (const auto &b : band) {
      std::snprintf(line, sizeof(line), "%.6f,%.9f,%.9f,%.9f,%.9f\n", b.ideal_db,
                    b.sq_db, b.as_db, b.sq_sigma, b.as_sigma);
      text += line;
    }
    io::write_file_text(band_path, text);
    outputs.push_back(band_path);
  }

  if (!purity_path.empty()) {
    std::vector<double> prange;
    for (double s = 0.5; s <= 12.0 + 1e-9; s += 0.25) prange.push_back(s);
    const auto rows = degradation::purity_vs_antisqueezing(fit, prange, purity_dim,
                                                           /*tail_tol=*/1e-3);
    std::string text = "ideal_db,as_db,purity\n";
    char line[96];
    for (const auto &r : rows) {
      std::snprintf(line, sizeof(line), "%.6f,%.9f,%.9f\n", r.ideal_db, r.as_db,
                    r.purity);
      text += line;
    }
    io::write_file_text(purity_path, text);
    outputs.push_back(purity_path);
  }

  write_manifest(g, "fit-degradation", {{"points", points_path}},
                 {points_path.empty() ? "(built-in reference points)" : points_path},
                 outputs, timer.ms());
  std::cout << "fit-degradation: L = " << fit.loss << ", theta = " << fit.theta
            << " rad, residual " << fit.residual_rms << " dB\n";
  return 0;
}

//---------------------------------------------------------------------------
// compare
//---------------------------------------------------------------------------

int cmd_compare(const GlobalFlags &g, const std::string &model_path, int n_states,
                double db_min, double db_max, std::vector<int> lengths, int dim,
                const std::string &out_csv, const std::string &out_json,
                const mle::MleConfig &mle_base) {
  Timer timer;
  if (lengths.empty()) {
    throw ContractViolationError("compare needs a nonempty length sweep");
  }
  if (!fs::exists(model_path)) {
    throw MalformedFileError(model_path +
                             ": model file not found (train one with `sqzt train`)");
  }
  const nn::NetworkModel model = nn::load_model(model_path);

  struct Cell {
    double mle_fid_mean, mle_fid_std, mle_ms;
    double nn_fid_mean, nn_fid_std, nn_ms;
  };
  std::vector<Cell> cells(lengths.size());

  // One state set for the whole sweep; records are resampled per length so
  // every cell sees the same underlying states.
  std::vector<states::StateParams> params(n_states);
  std::vector<fock::DensityMatrix> truths;
  truths.reserve(n_states);
  for (int s = 0; s < n_states; ++s) {
    auto rng = make_rng(g.seed + s, 0x636d70);
    states::StateParams p;
    p.sq_db = uniform(rng, db_min, db_max);
    p.phi = uniform(rng, 0.0, 2.0 * M_PI);
    params[s] = p;
    truths.push_back(corpus::synth_state(p, dim, /*tail_tol=*/0.05));
  }

  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const int len = lengths[li];
    std::vector<double> mle_f(n_states), nn_f(n_states);
    double mle_ms = 0.0, nn_ms = 0.0;
    for (int s = 0; s < n_states; ++s) {
      const homodyne::QuadratureRecord record = corpus::sample_family_record(
          params[s], homodyne::PhaseSchedule::linear_scan(), len,
          g.seed + 1000003ull * (s + 1) + li);
      mle::MleConfig cfg = mle_base;
      cfg.dim = dim;
      const auto t_mle = std::chrono::steady_clock::now();
      const mle::MleResult res = mle::mle_reconstruct(record, cfg);
      mle_ms += std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t_mle)
                    .count();
      mle_f[s] = metrics::fidelity(res.rho, truths[s]);

      const nn::Prediction pred = nn::predict_density(model, record);
      nn_ms += pred.wall_time_ms;
      fock::DensityMatrix nn_rho = pred.rho;
      if (model.arch.dim > dim) {
        nn_rho = nn_rho.project(dim);
      } else if (model.arch.dim < dim) {
        throw ContractViolationError("model dim smaller than comparison dim");
      }
      nn_f[s] = metrics::fidelity(nn_rho, truths[s]);
    }
    auto mean_std = [](const std::vector<double> &v) {
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      double var = 0.0;
      for (double x : v) var += (x - m) * (x - m);
      return std::pair<double, double>(m, std::sqrt(var / v.size()));
    };
    const auto [mm, ms] = mean_std(mle_f);
    const auto [nm, ns] = mean_std(nn_f);
    cells[li] = {mm, ms, mle_ms / n_states, nm, ns, nn_ms / n_states};
  }

  std::string csv = "length,mle_fidelity_mean,mle_fidelity_std,mle_ms,"
                    "nn_fidelity_mean,nn_fidelity_std,nn_ms\n";
  json cells_json = json::array();
  char line[160];
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    const Cell &c = cells[li];
    std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.3f,%.6f,%.6f,%.3f\n",
                  lengths[li], c.mle_fid_mean, c.mle_fid_std, c.mle_ms, c.nn_fid_mean,
                  c.nn_fid_std, c.nn_ms);
    csv += line;
    cells_json.push_back({{"length", lengths[li]},
                          {"mle_fidelity_mean", c.mle_fid_mean},
                          {"mle_fidelity_std", c.mle_fid_std},
                          {"mle_ms", c.mle_ms},
                          {"nn_fidelity_mean", c.nn_fid_mean},
                          {"nn_fidelity_std", c.nn_fid_std},
                          {"nn_ms", c.nn_ms}});
  }
  io::write_file_text(out_csv, csv);
  io::write_file_text(out_json,
                      json{{"states", n_states},
                           {"db_min", db_min},
                           {"db_max", db_max},
                           {"dim", dim},
                           {"cells", cells_json}}
                          .dump(1));
  write_manifest(g, "compare",
                 {{"states", n_states}, {"db_min", db_min}, {"db_max", db_max},
                  {"lengths", lengths}, {"dim", dim}},
                 {model_path}, {out_csv, out_json}, timer.ms());
  std::cout << "compare: report written to " << out_csv << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char *const *argv) {
  CLI::App app{"squeezed-light tomography toolkit"};
  app.require_subcommand(1);

  GlobalFlags g;
  app.add_option("--seed", g.seed, "base seed for all randomness");
  app.add_option("--threads", g.threads, "worker threads (default: SQZTOMO_THREADS or hardware)");
  app.add_option("--out-dir", g.out_dir, "output directory for artifacts and manifests");

  // simulate
  auto *sim = app.add_subcommand("simulate", "simulate a degraded squeezed state and a record");
  states::StateParams sim_params;
  int sim_dim = 12;
  int sim_n = homodyne::kStandardRecordLength;
  std::string sim_schedule = "linear";
  std::string sim_sampler = "analytic";
  double sim_tail_tol = 0.05;
  bool sim_csv = false;
  sim->add_option("--sq-db", sim_params.sq_db, "ideal squeezing level, dB")->check(CLI::NonNegativeNumber);
  sim->add_option("--phi", sim_params.phi, "squeezing angle, rad");
  sim->add_option("--nbar", sim_params.nbar, "thermal occupation")->check(CLI::NonNegativeNumber);
  sim->add_option("--loss", sim_params.loss, "loss fraction L")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--phase-noise", sim_params.theta_pn, "phase noise, rad")->check(CLI::Range(0.0, 1.5));
  sim->add_option("--dim", sim_dim, "Fock truncation of the truth state");
  sim->add_option("--n", sim_n, "record length")->check(CLI::PositiveNumber);
  sim->add_option("--schedule", sim_schedule, "linear|random")->check(CLI::IsMember({"linear", "random"}));
  sim->add_option("--sampler", sim_sampler, "analytic|grid")->check(CLI::IsMember({"analytic", "grid"}));
  sim->add_option("--tail-tol", sim_tail_tol, "truncation tail tolerance");
  sim->add_flag("--csv", sim_csv, "write the record as CSV instead of binary");

  // gen-corpus
  auto *gen = app.add_subcommand("gen-corpus", "generate a training corpus");
  corpus::CorpusConfig gen_cfg;
  bool gen_csv = false;
  gen->add_option("--count", gen_cfg.count, "number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--dim", gen_cfg.dim, "Fock truncation of targets");
  gen->add_option("--record-len", gen_cfg.record_len, "points per record");
  gen->add_option("--max-db", gen_cfg.family.max_db, "max ideal squeezing, dB");
  gen->add_option("--nbar-min", gen_cfg.family.nbar_min, "min thermal occupation");
  gen->add_option("--nbar-max", gen_cfg.family.nbar_max, "max thermal occupation");
  gen->add_option("--loss-max", gen_cfg.family.loss_max, "max loss fraction");
  gen->add_option("--theta-max", gen_cfg.family.theta_max, "max phase noise, rad");
  gen->add_option("--tail-tol", gen_cfg.tail_tol, "truncation tail tolerance");
  gen->add_flag("--csv", gen_csv, "write records as CSV");

  // reconstruct-mle
  auto *rmle = app.add_subcommand("reconstruct-mle", "maximum-likelihood reconstruction");
  std::string rmle_input, rmle_out = "rho.dm", rmle_diag;
  mle::MleConfig rmle_cfg;
  rmle->add_option("--input", rmle_input, "record file (CSV or binary)")->required();
  rmle->add_option("--dim", rmle_cfg.dim, "Fock truncation");
  rmle->add_option("--out", rmle_out, "output density matrix");
  rmle->add_option("--diagnostics", rmle_diag, "diagnostics JSON path");
  rmle->add_option("--max-iters", rmle_cfg.max_iters);
  rmle->add_option("--phase-bins", rmle_cfg.phase_bins);
  rmle->add_option("--quad-bins", rmle_cfg.quad_bins);
  rmle->add_option("--dilution", rmle_cfg.dilution);
  rmle->add_option("--tolerance", rmle_cfg.tolerance);

  // train
  auto *tr = app.add_subcommand("train", "train the network on a corpus");
  std::string tr_corpus, tr_out = "model.nnm", tr_history;
  nn::TrainOptions tr_opts;
  int tr_dim = 0, tr_input_len = 0, tr_val = 0;
  std::string tr_mode = "sequence";
  tr->add_option("--corpus", tr_corpus, "corpus directory")->required();
  tr->add_option("--epochs", tr_opts.epochs)->check(CLI::NonNegativeNumber);
  tr->add_option("--batch", tr_opts.batch)->check(CLI::PositiveNumber);
  tr->add_option("--lr", tr_opts.lr);
  tr->add_option("--momentum", tr_opts.momentum);
  tr->add_option("--out", tr_out, "output model file");
  tr->add_option("--history", tr_history, "training history JSON path");
  tr->add_option("--dim", tr_dim, "override network dim (default: corpus dim)");
  tr->add_option("--input-len", tr_input_len, "override input length (default: record length)");
  tr->add_option("--holdout", tr_val, "samples held out from the end of the corpus");
  tr->add_option("--mode", tr_mode, "sequence|histogram")->check(CLI::IsMember({"sequence", "histogram"}));

  // reconstruct-nn
  auto *rnn = app.add_subcommand("reconstruct-nn", "network reconstruction");
  std::string rnn_model, rnn_input, rnn_out = "rho.dm";
  bool rnn_time = false;
  rnn->add_option("--model", rnn_model, "model file")->required();
  rnn->add_option("--input", rnn_input, "record file")->required();
  rnn->add_option("--out", rnn_out, "output density matrix");
  rnn->add_flag("--time", rnn_time, "print reconstruction wall time");

  // evaluate
  auto *ev = app.add_subcommand("evaluate", "metrics report for a density matrix");
  std::string ev_rho, ev_ref, ev_report = "report.json";
  ev->add_option("--rho", ev_rho, "density matrix file")->required();
  ev->add_option("--reference", ev_ref, "optional reference density matrix");
  ev->add_option("--report", ev_report, "report JSON path");

  // wigner
  auto *wg = app.add_subcommand("wigner", "Wigner function grid as CSV");
  std::string wg_rho, wg_out = "wigner.csv";
  int wg_points = 201;
  double wg_span = 6.0;
  wg->add_option("--rho", wg_rho, "density matrix file")->required();
  wg->add_option("--out", wg_out, "output CSV");
  wg->add_option("--points", wg_points)->check(CLI::Range(2, 4096));
  wg->add_option("--span", wg_span, "half-width in vacuum sigmas");

  // fit-degradation
  auto *fd = app.add_subcommand("fit-degradation", "fit (L, theta) to level points");
  std::string fd_points, fd_out = "fit.json", fd_band, fd_purity;
  int fd_purity_dim = 40;
  fd->add_option("--points", fd_points, "points CSV (default: built-in reference markers)");
  fd->add_option("--out", fd_out, "fit JSON path");
  fd->add_option("--band", fd_band, "curve + 1-sigma band CSV path");
  fd->add_option("--purity-table", fd_purity, "purity vs anti-squeezing CSV path");
  fd->add_option("--purity-dim", fd_purity_dim, "Fock dim for the purity synthesis");

  // compare
  auto *cp = app.add_subcommand("compare", "MLE vs NN benchmark over record lengths");
  std::string cp_model, cp_csv = "compare.csv", cp_json = "compare.json";
  int cp_states = 20, cp_dim = 12;
  double cp_db_min = 2.0, cp_db_max = 8.0;
  std::vector<int> cp_lengths = {256, 512, 1024, 2048};
  mle::MleConfig cp_mle;
  cp->add_option("--model", cp_model, "trained model file")->required();
  cp->add_option("--states", cp_states)->check(CLI::PositiveNumber);
  cp->add_option("--db-min", cp_db_min);
  cp->add_option("--db-max", cp_db_max);
  cp->add_option("--lengths", cp_lengths, "record length sweep")->expected(-1);
  cp->add_option("--dim", cp_dim, "comparison Fock dim");
  cp->add_option("--mle-max-iters", cp_mle.max_iters);
  cp->add_option("--out", cp_csv, "output CSV");
  cp->add_option("--out-json", cp_json, "output JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (g.threads > 0) set_thread_count(g.threads);

  try {
    if (sim->parsed()) {
      return cmd_simulate(g, sim_params, sim_dim, sim_n, sim_schedule, sim_csv,
                          sim_sampler, sim_tail_tol);
    }
    if (gen->parsed()) {
      gen_cfg.binary_records = !gen_csv;
      return cmd_gen_corpus(g, gen_cfg);
    }
    if (rmle->parsed()) {
      return cmd_reconstruct_mle(g, rmle_input, rmle_out, rmle_diag, rmle_cfg);
    }
    if (tr->parsed()) {
      return cmd_train(g, tr_corpus, tr_out, tr_history, tr_opts, tr_dim,
                       tr_input_len, tr_val, tr_mode);
    }
    if (rnn->parsed()) {
      return cmd_reconstruct_nn(g, rnn_model, rnn_input, rnn_out, rnn_time);
    }
    if (ev->parsed()) {
      return cmd_evaluate(g, ev_rho, ev_ref, ev_report);
    }
    if (wg->parsed()) {
      return cmd_wigner(g, wg_rho, wg_out, wg_points, wg_span);
    }
    if (fd->parsed()) {
      return cmd_fit_degradation(g, fd_points, fd_out, fd_band, fd_purity,
                                 fd_purity_dim);
    }
    if (cp->parsed()) {
      return cmd_compare(g, cp_model, cp_states, cp_db_min, cp_db_max, cp_lengths,
                         cp_dim, cp_csv, cp_json, cp_mle);
    }
  } catch (const MalformedFileError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const VersionMismatchError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InsufficientDataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}

}  // namespace sqzt::cli
