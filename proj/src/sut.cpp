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

#include "examiner/sut.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "examiner/errors.hpp"

namespace examiner {

InProcessSut::InProcessSut(SyntheticLandscape landscape, NuisanceConfig nuisance)
    : landscape_(std::move(landscape)),
      nuisance_(std::move(nuisance)),
      name_(landscape_.identity()) {}

std::vector<EvalResult> InProcessSut::evaluate(std::span<const Pose> poses) {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  if (poses.empty()) throw EvaluationError(id, "empty batch");
  std::vector<EvalResult> out;
  out.reserve(poses.size());
  try {
    for (const auto& p : poses) out.push_back(landscape_.evaluate(p));
  } catch (const ConfigError& e) {
    throw EvaluationError(id, e.what());
  }
  return out;
}

TrainOutcome InProcessSut::train(std::span<const Pose> samples, double /*lr_discount*/) {
  std::lock_guard lock(mutex_);
  ++next_id_;
  if (!landscape_.trainable()) return TrainOutcome::kUnsupported;
  landscape_.damp(samples);
  return TrainOutcome::kTrained;
}

SutPool::SutPool(std::vector<std::unique_ptr<Sut>> handles) : handles_(std::move(handles)) {
  if (handles_.empty()) throw ConfigError("SUT pool needs at least one handle");
}

SutPool SutPool::create(const SutFactory& factory, std::size_t count) {
  std::vector<std::unique_ptr<Sut>> handles;
  for (std::size_t i = 0; i < std::max<std::size_t>(count, 1); ++i) handles.push_back(factory());
  return SutPool(std::move(handles));
}

TrainOutcome SutPool::train(std::span<const Pose> samples, double lr_discount) {
  TrainOutcome outcome = TrainOutcome::kTrained;
  for (auto& h : handles_) {
    if (h->train(samples, lr_discount) == TrainOutcome::kUnsupported) {
      outcome = TrainOutcome::kUnsupported;
    }
  }
  return outcome;
}

std::vector<EvalResult> evaluate(Sut& sut, std::span<const Pose> poses) {
  return sut.evaluate(poses);
}

TrainOutcome train_hint(Sut& sut, std::span<const Pose> samples, double lr_discount) {
  return sut.train(samples, lr_discount);
}

namespace {

std::vector<Pose> poses_from_json(const nlohmann::json& arr) {
  std::vector<Pose> poses;
  poses.reserve(arr.size());
  for (const auto& p : arr) poses.push_back(Pose{p.get<std::vector<double>>()});
  return poses;
}

void reply(std::ostream& out, const nlohmann::json& msg) {
  out << msg.dump() << '\n';
  out.flush();
}

}  // namespace

int serve_stdio(SyntheticLandscape landscape, std::istream& in, std::ostream& out,
                std::ostream& log) {
  InProcessSut sut(std::move(landscape));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json msg;
    try {
      msg = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      log << "sut-serve: skipping malformed line: " << e.what() << '\n';
      continue;
    }
    const nlohmann::json id = msg.is_object() && msg.contains("id") ? msg["id"] : nlohmann::json();
    try {
      const auto type = msg.at("type").get<std::string>();
      if (type == "hello") {
        const int version = msg.value("version", 0);
        if (version != kProtocolVersion) {
          log << "sut-serve: engine speaks version " << version << '\n';
        }
        reply(out, {{"type", "ready"}, {"name", sut.name()}, {"version", kProtocolVersion}});
      } else if (type == "eval") {
        const auto poses = poses_from_json(msg.at("poses"));
        const auto results = sut.evaluate(poses);
        std::vector<double> e2, e3;
        for (const auto& r : results) {
          e2.push_back(r.err_2d);
          e3.push_back(r.err_3d);
        }
        reply(out, {{"type", "result"}, {"id", id}, {"err2d", e2}, {"err3d", e3}});
      } else if (type == "train") {
        const auto samples = poses_from_json(msg.at("samples"));
        const auto outcome = sut.train(samples, msg.value("lr_discount", 1.0));
        reply(out, {{"type", outcome == TrainOutcome::kTrained ? "trained" : "unsupported"},
                    {"id", id}});
      } else if (type == "bye") {
        return 0;
      } else {
        reply(out, {{"type", "unsupported"}, {"id", id}});
      }
    } catch (const std::exception& e) {
      log << "sut-serve: request failed: " << e.what() << '\n';
      nlohmann::json err = {{"type", "error"}, {"message", e.what()}};
      if (!id.is_null()) err["id"] = id;
      reply(out, err);
    }
  }
  return 0;
}

}  // namespace examiner
