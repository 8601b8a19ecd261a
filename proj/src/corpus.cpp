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

#include "sqzt/corpus.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "sqzt/io.hpp"

namespace sqzt::corpus {

namespace {

namespace fs = std::filesystem;

nlohmann::json params_to_json(const states::StateParams &p) {
  return {{"sq_db", p.sq_db},
          {"phi", p.phi},
          {"nbar", p.nbar},
          {"loss", p.loss},
          {"theta_pn", p.theta_pn}};
}

states::StateParams params_from_json(const nlohmann::json &j) {
  states::StateParams p;
  p.sq_db = j.at("sq_db").get<double>();
  p.phi = j.at("phi").get<double>();
  p.nbar = j.at("nbar").get<double>();
  p.loss = j.at("loss").get<double>();
  p.theta_pn = j.at("theta_pn").get<double>();
  return p;
}

}  // namespace

fock::DensityMatrix synth_state(const states::StateParams &params, int dim,
                                double tail_tol, int work_dim_override) {
  const double r = states::squeeze_factor_from_db(params.sq_db);
  int work = work_dim_override > 0
                 ? work_dim_override
                 : states::working_dim(r, params.nbar, dim, tail_tol);
  work = std::max(work, dim);
  // The channels act at the working dimension; loss only moves mass toward
  // the vacuum, so projecting afterwards is safe.
  fock::DensityMatrix rho =
      params.nbar > 0.0
          ? states::squeezed_thermal({r, params.phi}, {params.nbar}, work, tail_tol)
          : states::squeezed_vacuum({r, params.phi}, work, tail_tol);
  rho = channels::degrade(rho, {params.loss}, {params.theta_pn});
  double removed = 0.0;
  fock::DensityMatrix out = rho.project(dim, &removed);
  if (removed >= tail_tol) {
    throw TruncationOverflowError("synth_state: projected tail mass " +
                                  std::to_string(removed) + " exceeds tolerance");
  }
  return out;
}

std::pair<double, double> family_variances(const states::StateParams &params,
                                           double lo_phase) {
  const double r = states::squeeze_factor_from_db(params.sq_db);
  const double n2 = 2.0 * params.nbar + 1.0;
  auto v_st = [&](double gamma) {
    const double c = std::cos(gamma - params.phi / 2.0);
    const double s = std::sin(gamma - params.phi / 2.0);
    return 0.5 * n2 * (std::exp(-2.0 * r) * c * c + std::exp(2.0 * r) * s * s);
  };
  const double v_plus =
      (1.0 - params.loss) * v_st(lo_phase - params.theta_pn) + params.loss * 0.5;
  const double v_minus =
      (1.0 - params.loss) * v_st(lo_phase + params.theta_pn) + params.loss * 0.5;
  return {v_plus, v_minus};
}

homodyne::QuadratureRecord sample_family_record(const states::StateParams &params,
                                                const homodyne::PhaseSchedule &schedule,
                                                int count, std::uint64_t seed) {
  if (count < 1) {
    throw ContractViolationError("sample count must be >= 1");
  }
  homodyne::QuadratureRecord record;
  record.phase.resize(count);
  record.value.resize(count);

  // Same stream layout as homodyne::sample: stream 1 for random phases,
  // stream 0 for the draws.
  switch (schedule.kind) {
    case homodyne::PhaseSchedule::Kind::kLinearScan:
      for (int i = 0; i < count; ++i) {
        record.phase[i] = schedule.lo + (schedule.hi - schedule.lo) * i / count;
      }
      break;
    case homodyne::PhaseSchedule::Kind::kFixedSet:
      for (int i = 0; i < count; ++i) {
        record.phase[i] = schedule.fixed[i % schedule.fixed.size()];
      }
      break;
    case homodyne::PhaseSchedule::Kind::kRandomUniform: {
      auto rng = make_rng(seed, 1);
      for (int i = 0; i < count; ++i) {
        record.phase[i] = uniform(rng, schedule.lo, schedule.hi);
      }
      break;
    }
  }
  for (double &p : record.phase) {
    p = std::fmod(p, 2.0 * M_PI);
    if (p < 0.0) p += 2.0 * M_PI;
  }

  auto rng = make_rng(seed, 0);
  for (int i = 0; i < count; ++i) {
    const auto [v_plus, v_minus] = family_variances(params, record.phase[i]);
    const double branch = uniform01(rng);
    const double sigma = std::sqrt(branch < 0.5 ? v_plus : v_minus);
    record.value[i] = sigma * normal01(rng);
  }
  return record;
}

CorpusIndex generate(const CorpusConfig &config, const std::string &dir) {
  if (config.count < 1) {
    throw ContractViolationError("corpus count must be >= 1");
  }
  fs::create_directories(dir);

  // One working dimension for the whole family, sized for its hardest corner.
  const double r_max = states::squeeze_factor_from_db(config.family.max_db);
  const int work = states::working_dim(r_max, config.family.nbar_max, config.dim,
                                       config.tail_tol);

  CorpusIndex index;
  index.config = config;
  index.entries.resize(config.count);

  const int threads = thread_count();
  std::vector<std::string> failures(config.count);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads) if (threads > 1)
  for (int i = 0; i < config.count; ++i) {
    try {
      const std::uint64_t sample_seed = config.base_seed + static_cast<std::uint64_t>(i);
      auto rng = make_rng(sample_seed, 0x706172616d);  // parameter stream
      const states::StateParams params = states::sample_params(config.family, rng);

      const fock::DensityMatrix truth =
          synth_state(params, config.dim, config.tail_tol, work);
      const homodyne::QuadratureRecord record = sample_family_record(
          params, homodyne::PhaseSchedule::linear_scan(), config.record_len,
          sample_seed);

      char name[64];
      std::snprintf(name, sizeof(name), "sample_%06d", i);
      CorpusEntry entry;
      entry.record_file =
          std::string(name) + (config.binary_records ? ".rec" : ".csv");
      entry.dm_file = std::string(name) + ".dm";
      entry.seed = sample_seed;
      entry.params = params;

      if (config.binary_records) {
        io::write_record_binary(record, (fs::path(dir) / entry.record_file).string());
      } else {
        io::write_record_csv(record, (fs::path(dir) / entry.record_file).string());
      }
      io::write_density_matrix(truth, (fs::path(dir) / entry.dm_file).string());
      index.entries[i] = std::move(entry);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  }
  for (int i = 0; i < config.count; ++i) {
    if (!failures[i].empty()) {
      throw Error("corpus sample " + std::to_string(i) + " failed: " + failures[i]);
    }
  }

  nlohmann::json entries_json = nlohmann::json::array();
  for (const CorpusEntry &e : index.entries) {
    entries_json.push_back({{"record", e.record_file},
                            {"dm", e.dm_file},
                            {"seed", e.seed},
                            {"params", params_to_json(e.params)}});
  }
  const nlohmann::json index_json = {
      {"version", 1},
      {"count", config.count},
      {"dim", config.dim},
      {"record_len", config.record_len},
      {"base_seed", config.base_seed},
      {"tail_tol", config.tail_tol},
      {"binary_records", config.binary_records},
      {"family",
       {{"max_db", config.family.max_db},
        {"nbar_min", config.family.nbar_min},
        {"nbar_max", config.family.nbar_max},
        {"loss_max", config.family.loss_max},
        {"theta_max", config.family.theta_max}}},
      {"entries", entries_json}};
  io::write_file_text((fs::path(dir) / "index.json").string(), index_json.dump(1));
  return index;
}

CorpusIndex read_index(const std::string &dir) {
  const std::string text = io::read_file_text((fs::path(dir) / "index.json").string());
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw MalformedFileError(dir + "/index.json: invalid JSON");
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw VersionMismatchError(dir + "/index.json: unsupported version");
    }
    CorpusIndex index;
    index.config.count = j.at("count").get<int>();
    index.config.dim = j.at("dim").get<int>();
    index.config.record_len = j.at("record_len").get<int>();
    index.config.base_seed = j.at("base_seed").get<std::uint64_t>();
    index.config.tail_tol = j.at("tail_tol").get<double>();
    index.config.binary_records = j.at("binary_records").get<bool>();
    const auto &f = j.at("family");
    index.config.family.max_db = f.at("max_db").get<double>();
    index.config.family.nbar_min = f.at("nbar_min").get<double>();
    index.config.family.nbar_max = f.at("nbar_max").get<double>();
    index.config.family.loss_max = f.at("loss_max").get<double>();
    index.config.family.theta_max = f.at("theta_max").get<double>();
    for (const auto &e : j.at("entries")) {
      CorpusEntry entry;
      entry.record_file = e.at("record").get<std::string>();
      entry.dm_file = e.at("dm").get<std::string>();
      entry.seed = e.at("seed").get<std::uint64_t>();
      entry.params = params_from_json(e.at("params"));
      index.entries.push_back(std::move(entry));
    }
    if (static_cast<int>(index.entries.size()) != index.config.count) {
      throw MalformedFileError(dir + "/index.json: entry count mismatch");
    }
    return index;
  } catch (const nlohmann::json::exception &e) {
    throw MalformedFileError(dir + "/index.json: " + e.what());
  }
}

nn::TrainingSet load_training_set(const std::string &dir,
                                  const nn::NetArchitecture &arch, int limit,
                                  int skip) {
  const CorpusIndex index = read_index(dir);
  const int total = static_cast<int>(index.entries.size());
  if (skip < 0 || skip > total) {
    throw ContractViolationError("corpus skip out of range");
  }
  int n = total - skip;
  if (limit > 0) n = std::min(n, limit);

  nn::TrainingSet set;
  set.inputs.resize(n);
  set.targets.reserve(n);
  set.params.resize(n);

  // Deserialize targets first (sequentially; DensityMatrix has no default
  // construction), then encode inputs in parallel.
  std::vector<std::string> record_paths(n);
  for (int i = 0; i < n; ++i) {
    const CorpusEntry &e = index.entries[skip + i];
    set.targets.push_back(
        io::read_density_matrix((fs::path(dir) / e.dm_file).string()));
    set.params[i] = e.params;
    record_paths[i] = (fs::path(dir) / e.record_file).string();
  }
  if (set.targets.size() != static_cast<std::size_t>(n)) {
    throw MalformedFileError(dir + ": incomplete corpus");
  }

  const int threads = thread_count();
  std::vector<std::string> failures(n);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads) if (threads > 1)
  for (int i = 0; i < n; ++i) {
    try {
      const homodyne::QuadratureRecord record = io::read_record_auto(record_paths[i]);
      set.inputs[i] = nn::encode_record(arch, record);
    } catch (const std::exception &e) {
      failures[i] = e.what();
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!failures[i].empty()) {
      throw MalformedFileError(record_paths[i] + ": " + failures[i]);
    }
  }
  return set;
}

}  // namespace sqzt::corpus
