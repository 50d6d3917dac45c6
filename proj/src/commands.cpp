/* Copyright 2026 The Examiner Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "examiner/commands.hpp"

#include <iostream>
#include <sstream>

#include "examiner/curriculum.hpp"
#include "examiner/errors.hpp"
#include "examiner/examination.hpp"
#include "examiner/json_io.hpp"
#include "examiner/metrics.hpp"
#include "examiner/run_config.hpp"
#include "examiner/run_directory.hpp"

namespace examiner {

namespace {

namespace fs = std::filesystem;

fs::path require_out(const CommandOptions& opts, const fs::path& fallback = {}) {
  if (opts.out) return *opts.out;
  if (!fallback.empty()) return fallback;
  throw ConfigError("no output directory: pass --out or set 'output' in the config");
}

RunConfig load_run_config(const CommandOptions& opts) {
  if (!opts.config) throw ConfigError("--config is required");
  RunConfig cfg = RunConfig::load(*opts.config);
  if (opts.seed) cfg.master_seed = *opts.seed;
  return cfg;
}

// Loads the stored config of an existing run directory.
struct StoredRun {
  RunConfig config;
  std::string fingerprint;
};

StoredRun load_stored_run(const RunDirectory& dir) {
  if (!fs::exists(dir.path(RunDirectory::kConfig))) {
    throw IncompleteError("no run in " + dir.root().string() + " (config.json missing)");
  }
  const auto stored = dir.read_json(RunDirectory::kConfig);
  return {RunConfig::from_json(stored.at("config"), dir.root()),
          stored.at("fingerprint").get<std::string>()};
}

nlohmann::json provenance(const std::string& fingerprint, std::uint64_t master_seed) {
  return {{"fingerprint", fingerprint}, {"master_seed", master_seed}};
}

std::vector<AdversarialSeed> load_seeds(const RunDirectory& dir) {
  const auto j = dir.read_json(RunDirectory::kPhase1Seeds);
  std::vector<AdversarialSeed> seeds;
  for (const auto& s : j.at("seeds")) {
    seeds.push_back(AdversarialSeed::from_json(s));
  }
  return seeds;
}

std::vector<FailureMode> load_modes(const RunDirectory& dir) {
  const auto j = dir.read_json(RunDirectory::kFailureModes);
  std::vector<FailureMode> modes;
  for (const auto& m : j.at("modes")) {
    modes.push_back(FailureMode::from_json(m));
  }
  return modes;
}

RunStatus require_phase2(const RunDirectory& dir) {
  const auto status = dir.read_status();
  if (!status || !status->phase1_done) throw IncompleteError("phase1 incomplete");
  if (!status->phase2_done) throw IncompleteError("phase2 incomplete");
  return *status;
}

void write_phase1(const RunDirectory& dir, const Phase1Result& r, const nlohmann::json& prov) {
  std::vector<nlohmann::json> lines;
  lines.reserve(r.log.size());
  for (const auto& rec : r.log) lines.push_back(rec.to_json());
  dir.write_jsonl(RunDirectory::kPhase1Log, prov, lines);
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : r.seeds) seeds.push_back(s.to_json());
  nlohmann::json j = prov;
  j["seeds"] = seeds;
  dir.write_json(RunDirectory::kPhase1Seeds, j);
}

void write_phase2(const RunDirectory& dir, const Phase2Result& r, const nlohmann::json& prov) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : r.modes) modes.push_back(m.to_json());
  nlohmann::json errors = nlohmann::json::array();
  for (const auto& [agent, msg] : r.errors) errors.push_back({{"agent_id", agent}, {"error", msg}});
  nlohmann::json j = prov;
  j["modes"] = modes;
  j["errors"] = errors;
  dir.write_json(RunDirectory::kFailureModes, j);
  std::vector<nlohmann::json> lines;
  lines.reserve(r.log.size());
  for (const auto& rec : r.log) lines.push_back(rec.to_json());
  dir.write_jsonl(RunDirectory::kPhase2Log, prov, lines);
}

void write_report(const RunDirectory& dir, const RobustnessReport& report,
                  const nlohmann::json& prov) {
  dir.write_jsonl(RunDirectory::kMetricsSamples, prov, report.sample_lines());
  dir.write_json(RunDirectory::kReport, report.to_json());
}

std::string base_set_fingerprint(const std::vector<Pose>& poses) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : poses) j.push_back(p.angles);
  return sha256_hex(canonical_dump(j));
}

std::string csv_number(const nlohmann::json& v) { return v.is_null() ? "" : v.dump(); }

}  // namespace

void cmd_search(const CommandOptions& opts) {
  const RunConfig cfg = load_run_config(opts);
  const RunDirectory dir(require_out(opts, cfg.output_dir));

  SutPool pool = SutPool::create(make_sut_factory(cfg.sut), opts.workers);
  const std::string fp = cfg.fingerprint(pool.name());
  const auto prov = provenance(fp, cfg.master_seed);

  RunStatus status;
  if (auto existing = dir.read_status(); existing && !opts.restart) {
    if (existing->fingerprint != fp) {
      throw ConfigError("run directory " + dir.root().string() +
                        " holds a run with a different configuration (use --restart)");
    }
    status = *existing;
  }
  status.fingerprint = fp;
  status.master_seed = cfg.master_seed;
  dir.write_json(RunDirectory::kConfig, {{"fingerprint", fp},
                                         {"master_seed", cfg.master_seed},
                                         {"sut_name", pool.name()},
                                         {"config", cfg.to_json()}});

  const SearchContext ctx{cfg.decoder, cfg.tree, {}};
  std::vector<AdversarialSeed> seeds;
  if (status.phase1_done) {
    seeds = load_seeds(dir);
  } else {
    status.phase2_done = false;
    status.metrics_done = false;
    const auto r = run_phase1(cfg.phase1, ctx, pool, cfg.master_seed, opts.workers);
    write_phase1(dir, r, prov);
    seeds = r.seeds;
    status.phase1_done = true;
    dir.write_status(status);
  }
  if (opts.stop_after && *opts.stop_after == "phase1") return;

  if (!status.phase2_done) {
    const auto r =
        seed_to_mode_pipeline(seeds, pool, cfg.tree, {}, cfg.phase2, cfg.master_seed, opts.workers);
    write_phase2(dir, r, prov);
    status.phase2_done = true;
    status.metrics_done = false;
    dir.write_status(status);
  }
}

void cmd_metrics(const CommandOptions& opts) {
  const RunDirectory dir(require_out(opts));
  RunStatus status = require_phase2(dir);
  const auto stored = load_stored_run(dir);
  const auto seeds = load_seeds(dir);
  const auto modes = load_modes(dir);

  SutPool pool = SutPool::create(make_sut_factory(stored.config.sut), opts.workers);
  ReportSettings settings;
  settings.samples_per_mode = opts.samples.value_or(stored.config.metrics_samples);
  if (settings.samples_per_mode == 0) throw ConfigError("--samples must be >= 1");
  settings.adversarial_threshold = stored.config.phase2.adversarial_threshold;
  settings.master_seed = status.master_seed;
  settings.fingerprint = status.fingerprint;
  settings.workers = opts.workers;
  const auto report = robustness_report(seeds, modes, pool, stored.config.tree, {}, settings);
  write_report(dir, report, provenance(status.fingerprint, status.master_seed));
  status.metrics_done = true;
  dir.write_status(status);
}

void cmd_sample(const CommandOptions& opts) {
  const RunDirectory dir(require_out(opts));
  const RunStatus status = require_phase2(dir);
  const auto stored = load_stored_run(dir);
  const auto modes = load_modes(dir);
  if (modes.empty()) throw MetricError("no failure modes to sample from");
  if (opts.count == 0) throw ConfigError("--count must be >= 1");

  SutPool pool = SutPool::create(make_sut_factory(stored.config.sut), opts.workers);
  const auto records = build_adversary_set(modes, opts.count, pool, stored.config.tree, {},
                                           status.master_seed, opts.workers);
  std::vector<nlohmann::json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(r.to_json());
  const fs::path target = opts.file.value_or(dir.path(RunDirectory::kAdversarySet));
  const RunDirectory target_dir(target.parent_path().empty() ? fs::path(".") : target.parent_path());
  target_dir.write_jsonl(target.filename().c_str(), provenance(status.fingerprint, status.master_seed),
                         lines);
}

void cmd_curriculum(const CommandOptions& opts) {
  if (!opts.config) throw ConfigError("--config is required");
  const auto cj = read_json_file(*opts.config);
  const fs::path base_dir =
      opts.config->parent_path().empty() ? fs::path(".") : opts.config->parent_path();
  if (!cj.contains("run")) throw ConfigError("curriculum config needs a 'run' entry");

  RunConfig run = [&] {
    const auto& r = cj.at("run");
    if (r.is_string()) {
      fs::path p(r.get<std::string>());
      if (p.is_relative()) p = base_dir / p;
      return RunConfig::load(p);
    }
    return RunConfig::from_json(r, base_dir);
  }();
  if (opts.seed) run.master_seed = *opts.seed;
  const CurriculumConfig cc = CurriculumConfig::from_json(cj);

  std::vector<Pose> base_set;
  if (cj.contains("base_set")) {
    fs::path p(cj.at("base_set").get<std::string>());
    if (p.is_relative()) p = base_dir / p;
    for (const auto& line : read_jsonl_file(p)) {
      if (line.is_object() && line.value("type", "") == "header") continue;
      const auto& pose = line.is_object() ? line.at("pose") : line;
      base_set.push_back(Pose{json_to_vector(pose, "base set pose")});
      if (base_set.back().size() != run.tree.pose_dims()) {
        throw ConfigError("base set pose has the wrong number of dims");
      }
    }
  }

  if (!cj.contains("base_set")) {
    // Uniform poses within the joint limits stand in for a training set.
    const std::size_t n = json_value_or<std::size_t>(cj, "base_set_size", cc.batch_size);
    const SearchSpace limits(run.tree.limits_low(), run.tree.limits_high(), "joint limits");
    RngStream rng(run.master_seed, StreamPurpose::kUser, 0);
    for (std::size_t i = 0; i < n; ++i) base_set.push_back(Pose{sample_uniform(limits, rng).values});
  }

  fs::path out_dir = opts.out ? *opts.out : run.output_dir;
  if (out_dir.empty()) throw ConfigError("no output directory: pass --out");
  const RunDirectory dir(out_dir);

  SutPool pool = SutPool::create(make_sut_factory(run.sut), opts.workers);
  const std::string run_fp = run.fingerprint(pool.name());
  const std::string fp = sha256_hex(canonical_dump({{"run", run_fp}, {"curriculum", cc.to_json()},
                                                    {"base_set", base_set_fingerprint(base_set)}}));
  const auto prov = provenance(fp, run.master_seed);

  ExaminerSetup setup{run.decoder, run.tree, {}, run.phase1, run.phase2, run.metrics_samples,
                      opts.workers, fp};

  auto observer = [&](const LoopArtifacts& a) {
    const std::string name = "loop_" + std::to_string(a.report.loop);
    const RunDirectory loop_dir(dir.root() / name);
    const auto loop_prov = provenance(fp, a.report.seed);
    if (a.report.pre) {
      write_phase1(loop_dir, a.examination.phase1, loop_prov);
      write_phase2(loop_dir, a.examination.phase2, loop_prov);
      write_report(loop_dir, *a.report.pre, loop_prov);
    }
    if (a.report.post) {
      loop_dir.write_json("report_post_train.json", a.report.post->to_json());
    }
  };
  const auto report = run_curriculum(cc, setup, pool, base_set, run.master_seed, observer);

  std::vector<nlohmann::json> lines;
  for (const auto& r : report.adversary_set.records()) lines.push_back(r.to_json());
  dir.write_jsonl(RunDirectory::kAdversarySet, prov, lines);
  nlohmann::json rj = report.to_json();
  rj["fingerprint"] = fp;
  rj["master_seed"] = run.master_seed;
  rj["config"] = cc.to_json();
  dir.write_json(RunDirectory::kCurriculumReport, rj);
  if (report.stop_reason == "error") {
    throw SutError("curriculum stopped at loop " + std::to_string(report.loops.back().loop) + ": " +
                   report.loops.back().error.value_or("unknown error"));
  }
}

int cmd_sut_serve(const CommandOptions& opts, std::istream& in, std::ostream& out,
                  std::ostream& log) {
  if (!opts.landscape) throw ConfigError("--landscape is required");
  return serve_stdio(SyntheticLandscape::load(*opts.landscape), in, out, log);
}

void cmd_export_csv(const CommandOptions& opts) {
  const RunDirectory dir(require_out(opts));
  const auto status = dir.read_status();
  if (!status || !status->metrics_done || !fs::exists(dir.path(RunDirectory::kReport))) {
    throw IncompleteError("metrics incomplete");
  }
  const auto report = dir.read_json(RunDirectory::kReport);
  const std::string fp = report.at("fingerprint").get<std::string>();
  const std::string seed = std::to_string(report.at("master_seed").get<std::uint64_t>());

  std::ostringstream csv;
  csv << "fingerprint,master_seed,mode,pnae,min_mpjpe,mean_mpjpe,max_mpjpe,median_mpjpe,"
         "samples_used,success_rate,region_size\n";
  auto row = [&](const std::string& mode, const nlohmann::json& stats) {
    csv << fp << ',' << seed << ',' << mode;
    for (const char* k : {"pnae", "min_mpjpe", "mean_mpjpe", "max_mpjpe", "median_mpjpe", "samples_used"}) {
      csv << ',' << (stats.is_null() ? "" : csv_number(stats.at(k)));
    }
    csv << ',' << csv_number(report.at("success_rate")) << ',' << csv_number(report.at("region_size"))
        << '\n';
  };
  for (const auto& m : report.at("modes")) row(std::to_string(m.at("mode_id").get<std::size_t>()), m.at("stats"));
  row("aggregate", report.at("aggregate"));
  write_file_atomic(dir.path(RunDirectory::kReportCsv), csv.str());

  std::ostringstream p1;
  p1 << "fingerprint,master_seed,agent,iter,mean_err2d,mean_err3d,mean_reward,baseline\n";
  for (const auto& l : read_jsonl_file(dir.path(RunDirectory::kPhase1Log))) {
    if (l.value("type", "") == "header") continue;
    p1 << fp << ',' << seed << ',' << l.at("agent") << ',' << l.at("iter") << ','
       << csv_number(l.at("mean_err2d")) << ',' << csv_number(l.at("mean_err3d")) << ','
       << csv_number(l.at("mean_reward")) << ',' << csv_number(l.at("baseline")) << '\n';
  }
  write_file_atomic(dir.path(RunDirectory::kPhase1Trace), p1.str());

  std::ostringstream p2;
  p2 << "fingerprint,master_seed,agent,iter,joint,side,delta,slab_min_err,accepted,outcome\n";
  for (const auto& l : read_jsonl_file(dir.path(RunDirectory::kPhase2Log))) {
    if (l.value("type", "") == "header") continue;
    p2 << fp << ',' << seed << ',' << l.at("agent") << ',' << l.at("iter") << ',' << l.at("joint")
       << ',' << l.at("side").get<std::string>() << ',' << csv_number(l.at("delta")) << ','
       << csv_number(l.at("slab_min_err")) << ',' << (l.at("accepted").get<bool>() ? 1 : 0) << ','
       << l.at("outcome").get<std::string>() << '\n';
  }
  write_file_atomic(dir.path(RunDirectory::kPhase2Trace), p2.str());
}

int run_command(const std::string& name, const CommandOptions& opts, std::istream& in,
                std::ostream& out, std::ostream& err) {
  try {
    if (name == "search") {
      cmd_search(opts);
    } else if (name == "metrics") {
      cmd_metrics(opts);
    } else if (name == "sample") {
      cmd_sample(opts);
    } else if (name == "curriculum") {
      cmd_curriculum(opts);
    } else if (name == "sut-serve") {
      return cmd_sut_serve(opts, in, out, err);
    } else if (name == "export-csv") {
      cmd_export_csv(opts);
    } else {
      throw ConfigError("unknown command '" + name + "'");
    }
    return static_cast<int>(ExitCode::kOk);
  } catch (const ExaminerError& e) {
    const int code = static_cast<int>(e.exit_code());
    err << nlohmann::json{{"error", e.what()}, {"exit_code", code}}.dump() << '\n';
    return code;
  } catch (const nlohmann::json::exception& e) {
    const int code = static_cast<int>(ExitCode::kConfig);
    err << nlohmann::json{{"error", e.what()}, {"exit_code", code}}.dump() << '\n';
    return code;
  } catch (const std::exception& e) {
    const int code = static_cast<int>(ExitCode::kGeneric);
    err << nlohmann::json{{"error", e.what()}, {"exit_code", code}}.dump() << '\n';
    return code;
  }
}

}  // namespace examiner
