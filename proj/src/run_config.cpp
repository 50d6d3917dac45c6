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

#include "examiner/run_config.hpp"

#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"

namespace examiner {

namespace {

// A value that is either inline JSON or a path to a JSON file.
nlohmann::json inline_or_file(const nlohmann::json& v, const std::filesystem::path& base_dir,
                              const char* what) {
  if (v.is_string()) {
    std::filesystem::path p(v.get<std::string>());
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError(std::string(what) + " file not found: " + p.string());
    }
    return read_json_file(p);
  }
  if (!v.is_object()) throw ConfigError(std::string(what) + " must be an object or a file path");
  return v;
}

}  // namespace

nlohmann::json SutSpec::to_json() const {
  nlohmann::json j;
  if (landscape) {
    j["landscape"] = landscape->to_json();
  } else {
    j["external"] = external;
    j["timeout"] = timeout_seconds;
  }
  return j;
}

SutSpec SutSpec::from_json(const nlohmann::json& j, const nlohmann::json& nuisance,
                           const std::filesystem::path& base_dir) {
  SutSpec spec;
  spec.nuisance = nuisance.is_null() ? nlohmann::json::object() : nuisance;
  if (!spec.nuisance.is_object()) throw ConfigError("nuisance must be an object");
  if (j.contains("landscape")) {
    spec.landscape = SyntheticLandscape::from_json(inline_or_file(j.at("landscape"), base_dir, "landscape"));
  } else if (j.contains("external")) {
    spec.external = j.at("external").get<std::vector<std::string>>();
    if (spec.external.empty()) throw ConfigError("sut.external must be a non-empty argv list");
    spec.timeout_seconds = json_value_or(j, "timeout", spec.timeout_seconds);
    if (!(spec.timeout_seconds > 0)) throw ConfigError("sut.timeout must be > 0");
  } else {
    throw ConfigError("sut needs either 'landscape' or 'external'");
  }
  return spec;
}

SutFactory make_sut_factory(const SutSpec& spec) {
  if (spec.landscape) {
    return [landscape = *spec.landscape, nuisance = spec.nuisance]() -> std::unique_ptr<Sut> {
      return std::make_unique<InProcessSut>(landscape, nuisance);
    };
  }
  return [spec]() -> std::unique_ptr<Sut> {
    return spawn_external(spec.external, spec.nuisance,
                          std::chrono::duration<double>(spec.timeout_seconds));
  };
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  try {
    auto tree = KinematicTree::from_json(inline_or_file(j.at("tree"), base_dir, "tree"));
    auto decoder = Decoder::from_json(inline_or_file(j.at("decoder"), base_dir, "decoder"));
    if (decoder.output_dims() != tree.pose_dims()) {
      throw ConfigError("decoder produces " + std::to_string(decoder.output_dims()) +
                        " dims but the tree has " + std::to_string(tree.pose_dims()));
    }
    auto sut = SutSpec::from_json(j.at("sut"), j.value("nuisance", nlohmann::json::object()),
                                  base_dir);
    if (sut.landscape && sut.landscape->dims() != 0 && sut.landscape->dims() != tree.pose_dims()) {
      throw ConfigError("landscape has " + std::to_string(sut.landscape->dims()) +
                        " dims but the tree has " + std::to_string(tree.pose_dims()));
    }
    auto phase1 = Phase1Config::from_json(j.value("phase1", nlohmann::json()), decoder.input_dims());
    auto phase2 = Phase2Config::from_json(j.value("phase2", nlohmann::json()));
    std::size_t samples = 200;
    if (j.contains("metrics")) samples = json_value_or(j.at("metrics"), "samples", samples);
    if (samples == 0) throw ConfigError("metrics.samples must be >= 1");
    std::filesystem::path out;
    if (j.contains("output")) {
      out = j.at("output").get<std::string>();
      if (out.is_relative()) out = base_dir / out;
    }
    return RunConfig{j.value("master_seed", std::uint64_t{0}),
                     std::move(tree),
                     std::move(decoder),
                     std::move(sut),
                     std::move(phase1),
                     std::move(phase2),
                     samples,
                     std::move(out)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  return from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

nlohmann::json RunConfig::to_json() const {
  return {{"master_seed", master_seed},
          {"tree", tree.to_json()},
          {"decoder", decoder.to_json()},
          {"sut", sut.to_json()},
          {"nuisance", sut.nuisance},
          {"phase1", phase1.to_json()},
          {"phase2", phase2.to_json()},
          {"metrics", {{"samples", metrics_samples}}}};
}

std::string RunConfig::fingerprint(const std::string& sut_name) const {
  nlohmann::json j = to_json();
  j["sut"] = {{"name", sut_name}};
  return sha256_hex(canonical_dump(j));
}

}  // namespace examiner
