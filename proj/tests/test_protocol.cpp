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

#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "examiner/errors.hpp"
#include "examiner/json_io.hpp"
#include "examiner/sut.hpp"

using namespace examiner;
namespace fs = std::filesystem;

namespace {

SyntheticLandscape landscape(bool trainable = false) {
  return SyntheticLandscape(20.0, {Bump{{0.5, 0.0, -0.5}, 280.0, 0.4}}, 0.6, trainable);
}

std::vector<nlohmann::json> serve(const std::string& input, int* status = nullptr) {
  std::istringstream in(input);
  std::ostringstream out, log;
  const int rc = serve_stdio(landscape(), in, out, log);
  if (status) *status = rc;
  std::vector<nlohmann::json> replies;
  std::istringstream lines(out.str());
  for (std::string l; std::getline(lines, l);) replies.push_back(nlohmann::json::parse(l));
  return replies;
}

fs::path landscape_file() {
  const fs::path p = fs::temp_directory_path() / "examiner_protocol_landscape.json";
  write_file_atomic(p, landscape(true).to_json().dump());
  return p;
}

std::vector<std::string> server_command() {
  return {EXAMINER_BIN, "sut-serve", "--landscape", landscape_file().string()};
}

}  // namespace

TEST_CASE("server: hello, eval, bye") {
  int status = -1;
  const auto r = serve(
      "{\"type\":\"hello\",\"version\":1}\n"
      "{\"type\":\"eval\",\"id\":4,\"poses\":[[0,0,0],[0.5,0,-0.5],[1,1,1]]}\n"
      "{\"type\":\"bye\"}\n"
      "{\"type\":\"eval\",\"id\":5,\"poses\":[[0,0,0]]}\n",
      &status);
  CHECK(status == 0);
  REQUIRE(r.size() == 2);
  CHECK(r[0].at("type") == "ready");
  CHECK(r[0].at("version") == 1);
  CHECK(r[0].at("name") == InProcessSut(landscape()).name());
  CHECK(r[1].at("type") == "result");
  CHECK(r[1].at("id") == 4);
  CHECK(r[1].at("err3d").size() == 3);
  CHECK(r[1].at("err2d").size() == 3);
  CHECK(r[1].at("err3d")[1].get<double>() == 300.0);
}

TEST_CASE("server: malformed and unknown requests") {
  const auto r = serve(
      "not json at all\n"
      "{\"type\":\"eval\",\"id\":9,\"poses\":[[0,0]]}\n"
      "{\"type\":\"dance\",\"id\":10}\n"
      "{\"type\":\"bye\"}\n");
  REQUIRE(r.size() == 2);
  CHECK(r[0].at("type") == "error");
  CHECK(r[0].at("id") == 9);
  CHECK(r[1].at("type") == "unsupported");
  CHECK(r[1].at("id") == 10);
}

TEST_CASE("external: self-hosted round trip matches in-process") {
  auto ext = spawn_external(server_command(), {{"background", "studio"}});
  InProcessSut local(landscape(true));
  CHECK(ext->name() == local.name());
  CHECK(ext->nuisance().at("background") == "studio");
  const std::vector<Pose> poses{Pose{{0.1, 0.2, 0.3}}, Pose{{0.5, 0.0, -0.5}}, Pose{{-1, 2, 0.25}}};
  for (int batch = 0; batch < 3; ++batch) CHECK(ext->evaluate(poses) == local.evaluate(poses));
  CHECK(ext->train(poses, 0.05) == TrainOutcome::kTrained);
  local.train(poses, 0.05);
  CHECK(ext->evaluate(poses) == local.evaluate(poses));
  CHECK_THROWS_AS(ext->evaluate({}), EvaluationError);
}

TEST_CASE("external: malformed pose surfaces as an evaluation error") {
  auto ext = spawn_external(server_command(), {});
  const std::vector<Pose> bad{Pose{{0.1, 0.2}}};
  CHECK_THROWS_AS(ext->evaluate(bad), EvaluationError);
  // The handle stays usable.
  const std::vector<Pose> good{Pose{{0, 0, 0}}};
  CHECK(ext->evaluate(good).size() == 1);
}

TEST_CASE("external: command that exits immediately") {
  CHECK_THROWS_AS(spawn_external({"sh", "-c", "exit 0"}, {}, std::chrono::seconds(5)), SutError);
}

TEST_CASE("external: missing executable") {
  CHECK_THROWS_AS(spawn_external({"/nonexistent/examiner-sut"}, {}), SutError);
}

TEST_CASE("external: version mismatch") {
  const std::vector<std::string> cmd{
      "sh", "-c", "read line; echo '{\"type\":\"ready\",\"name\":\"old\",\"version\":999}'; read line"};
  try {
    spawn_external(cmd, {}, std::chrono::seconds(5));
    FAIL("expected a version mismatch");
  } catch (const SutError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
}

TEST_CASE("external: silent server times out") {
  const std::vector<std::string> cmd{"sh", "-c", "sleep 5"};
  CHECK_THROWS_AS(spawn_external(cmd, {}, std::chrono::milliseconds(200)), SutError);
}

TEST_CASE("external: mismatched reply id") {
  const std::vector<std::string> cmd{
      "sh", "-c",
      "read l; echo '{\"type\":\"ready\",\"name\":\"x\",\"version\":1}'; read l; "
      "echo '{\"type\":\"result\",\"id\":77,\"err2d\":[1],\"err3d\":[1]}'; read l"};
  auto ext = spawn_external(cmd, {}, std::chrono::seconds(5));
  const std::vector<Pose> poses{Pose{{0, 0, 0}}};
  CHECK_THROWS_AS(ext->evaluate(poses), EvaluationError);
}
