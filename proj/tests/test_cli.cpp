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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "examiner/commands.hpp"
#include "examiner/json_io.hpp"

using namespace examiner;
namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "master_seed": 3,
  "tree": {
    "joints": [{"name": "root", "parent": null, "dims": [0, 1, 2]}],
    "limits_low": [-3.0, -3.0, -3.0],
    "limits_high": [3.0, 3.0, 3.0]
  },
  "decoder": {"kind": "affine", "matrix": [[1, 0], [0, 1], [0, 0]]},
  "sut": {"landscape": {"baseline": 20.0, "bumps": [
    {"center": [0.8, 0.8, 0], "amplitude": 280.0, "width": 0.3},
    {"center": [-0.8, -0.8, 0], "amplitude": 280.0, "width": 0.3}]}},
  "phase1": {"num_agents": 4, "policy_bounds": 2.0},
  "metrics": {"samples": 50}
})";

struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("examiner_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
    write("run.json", kConfig);
  }
  ~Scratch() { fs::remove_all(root); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(root / name) << text;
    return root / name;
  }
  CommandOptions opts(const std::string& out) const {
    CommandOptions o;
    o.config = root / "run.json";
    o.out = root / out;
    return o;
  }
};

struct Outcome {
  int code;
  std::string err;
};

Outcome run(const std::string& cmd, const CommandOptions& o) {
  std::istringstream in;
  std::ostringstream out, err;
  const int code = run_command(cmd, o, in, out, err);
  return {code, err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kArtifacts[] = {"phase1_log.jsonl", "phase1_seeds.json", "failure_modes.json",
                            "phase2_log.jsonl", "metrics_samples.jsonl", "report.json"};

}  // namespace

TEST_CASE("search and metrics are deterministic") {
  Scratch s("determinism");
  for (const char* out : {"a", "b"}) {
    REQUIRE(run("search", s.opts(out)).code == 0);
    REQUIRE(run("metrics", s.opts(out)).code == 0);
  }
  for (const char* name : kArtifacts) CHECK(slurp(s.root / "a" / name) == slurp(s.root / "b" / name));
}

TEST_CASE("metrics before phase 2 reports an incomplete run") {
  Scratch s("incomplete");
  auto o = s.opts("r");
  o.stop_after = "phase1";
  REQUIRE(run("search", o).code == 0);
  const auto r = run("metrics", s.opts("r"));
  CHECK(r.code == 4);
  CHECK(r.err.find("phase2 incomplete") != std::string::npos);
  CHECK(run("export-csv", s.opts("r")).code == 4);
  CHECK(run("metrics", s.opts("missing")).code == 4);
}

TEST_CASE("resuming after phase 1 matches an uninterrupted run") {
  Scratch s("resume");
  auto o = s.opts("split");
  o.stop_after = "phase1";
  REQUIRE(run("search", o).code == 0);
  CHECK_FALSE(fs::exists(s.root / "split" / "failure_modes.json"));
  REQUIRE(run("search", s.opts("split")).code == 0);
  REQUIRE(run("search", s.opts("whole")).code == 0);
  for (const char* name : {"phase1_log.jsonl", "phase1_seeds.json", "failure_modes.json", "phase2_log.jsonl"}) {
    CHECK(slurp(s.root / "split" / name) == slurp(s.root / "whole" / name));
  }
}

TEST_CASE("a changed config against an existing run is rejected") {
  Scratch s("mismatch");
  REQUIRE(run("search", s.opts("r")).code == 0);
  auto o = s.opts("r");
  o.seed = 99;
  CHECK(run("search", o).code == 2);
  o.restart = true;
  CHECK(run("search", o).code == 0);
  CHECK(read_json_file(s.root / "r" / "status.json").at("master_seed") == 99);
}

TEST_CASE("every artifact carries the fingerprint and master seed") {
  Scratch s("provenance");
  REQUIRE(run("search", s.opts("r")).code == 0);
  REQUIRE(run("metrics", s.opts("r")).code == 0);
  REQUIRE(run("export-csv", s.opts("r")).code == 0);
  const auto fp = read_json_file(s.root / "r" / "config.json").at("fingerprint").get<std::string>();
  CHECK(fp.size() == 64);
  for (const char* name : kArtifacts) {
    const fs::path p = s.root / "r" / name;
    nlohmann::json head;
    if (p.extension() == ".jsonl") {
      std::ifstream f(p);
      std::string line;
      std::getline(f, line);
      head = nlohmann::json::parse(line);
      CHECK(head.at("type") == "header");
    } else {
      head = read_json_file(p);
    }
    CHECK_MESSAGE(head.at("fingerprint") == fp, name);
    CHECK_MESSAGE(head.at("master_seed") == 3, name);
  }
  const std::string csv = slurp(s.root / "r" / "report.csv");
  CHECK(csv.rfind("fingerprint,master_seed,mode,", 0) == 0);
  CHECK(csv.find(fp + ",3,") != std::string::npos);
}

TEST_CASE("sample writes the requested count per mode") {
  Scratch s("sample");
  REQUIRE(run("search", s.opts("r")).code == 0);
  auto o = s.opts("r");
  o.count = 20;
  REQUIRE(run("sample", o).code == 0);
  const std::size_t modes = read_json_file(s.root / "r" / "failure_modes.json").at("modes").size();
  std::ifstream f(s.root / "r" / "adversary_set.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(f, line);) ++lines;
  CHECK(lines == 1 + 20 * modes);
}

TEST_CASE("configuration errors exit with code 2") {
  Scratch s("config");
  CommandOptions none;
  CHECK(run("search", none).code == 2);
  auto o = s.opts("r");
  o.config = s.write("bad.json", R"({"tree": 1})");
  CHECK(run("search", o).code == 2);
  o.config = s.write("broken.json", "{not json");
  CHECK(run("search", o).code == 2);
  o.config = s.root / "absent.json";
  CHECK(run("search", o).code == 2);
  CHECK(run("frobnicate", s.opts("r")).code == 2);
}

TEST_CASE("the executable maps errors to exit codes") {
  Scratch s("binary");
  const std::string bin = EXAMINER_BIN;
  auto status = [&](const std::string& args) {
    const int rc = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const std::string cfg = (s.root / "run.json").string();
  const std::string out = (s.root / "r").string();
  CHECK(status("--bogus") == 2);
  CHECK(status("") == 2);
  CHECK(status("--config " + cfg + " --out " + out + " metrics") == 4);
  CHECK(status("--config " + cfg + " --out " + out + " --workers 2 search") == 0);
  CHECK(status("--config " + cfg + " --out " + out + " metrics") == 0);
  CHECK(status("--config " + cfg + " --out " + out + " export-csv") == 0);
}
