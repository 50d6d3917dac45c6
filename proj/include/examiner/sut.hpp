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

#pragma once

// System-under-test handles: a black box mapping poses to 2D/3D errors.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "examiner/landscape.hpp"
#include "examiner/param_space.hpp"
#include "json.hpp"

namespace examiner {

inline constexpr int kProtocolVersion = 1;

// Fixed per-run settings (background, clothing, lighting, global rotation
// limits, ...). Forwarded verbatim to the SUT in the hello message.
using NuisanceConfig = nlohmann::json;

enum class TrainOutcome { kTrained, kUnsupported };

class Sut {
 public:
  virtual ~Sut() = default;

  // One result per pose, in order. Throws EvaluationError.
  virtual std::vector<EvalResult> evaluate(std::span<const Pose> poses) = 0;
  virtual TrainOutcome train(std::span<const Pose> samples, double lr_discount) = 0;

  virtual const std::string& name() const = 0;
  virtual const NuisanceConfig& nuisance() const = 0;
};

// Evaluates a landscape owned by this handle. Training mutates only this
// handle's copy, matching one external process per handle.
class InProcessSut final : public Sut {
 public:
  explicit InProcessSut(SyntheticLandscape landscape, NuisanceConfig nuisance = nlohmann::json::object());

  std::vector<EvalResult> evaluate(std::span<const Pose> poses) override;
  TrainOutcome train(std::span<const Pose> samples, double lr_discount) override;
  const std::string& name() const override { return name_; }
  const NuisanceConfig& nuisance() const override { return nuisance_; }

  const SyntheticLandscape& landscape() const { return landscape_; }

 private:
  SyntheticLandscape landscape_;
  NuisanceConfig nuisance_;
  std::string name_;
  std::uint64_t next_id_ = 1;
  std::mutex mutex_;
};

// Child process speaking the JSON-lines protocol on stdin/stdout.
class ExternalSut final : public Sut {
 public:
  ~ExternalSut() override;
  ExternalSut(const ExternalSut&) = delete;
  ExternalSut& operator=(const ExternalSut&) = delete;

  std::vector<EvalResult> evaluate(std::span<const Pose> poses) override;
  TrainOutcome train(std::span<const Pose> samples, double lr_discount) override;
  const std::string& name() const override { return name_; }
  const NuisanceConfig& nuisance() const override { return nuisance_; }

  int pid() const { return pid_; }

 private:
  friend std::unique_ptr<ExternalSut> spawn_external(const std::vector<std::string>&,
                                                     const NuisanceConfig&,
                                                     std::chrono::duration<double>);
  ExternalSut() = default;

  void send_line(const std::string& line, std::uint64_t id);
  nlohmann::json read_message(std::uint64_t id);
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::duration<double> timeout_{30.0};
  std::string name_;
  NuisanceConfig nuisance_;
  std::uint64_t next_id_ = 1;
  std::mutex mutex_;
};

// Starts `command`, sends hello and waits for a matching ready. Throws
// SutError on spawn failure, handshake timeout, early exit, or version mismatch.
std::unique_ptr<ExternalSut> spawn_external(
    const std::vector<std::string>& command, const NuisanceConfig& nuisance,
    std::chrono::duration<double> timeout = std::chrono::seconds(30));

// Serves the protocol for `landscape` until bye or end of input. Returns the
// process exit status (0 on bye).
int serve_stdio(SyntheticLandscape landscape, std::istream& in, std::ostream& out,
                std::ostream& log);

using SutFactory = std::function<std::unique_ptr<Sut>()>;

// One handle per worker. Evaluation goes to the worker's own handle; training
// is broadcast so every handle sees the same model.
class SutPool {
 public:
  explicit SutPool(std::vector<std::unique_ptr<Sut>> handles);
  static SutPool create(const SutFactory& factory, std::size_t count);

  std::size_t size() const { return handles_.size(); }
  Sut& at(std::size_t worker) { return *handles_.at(worker % handles_.size()); }
  const std::string& name() const { return handles_.front()->name(); }

  TrainOutcome train(std::span<const Pose> samples, double lr_discount);

 private:
  std::vector<std::unique_ptr<Sut>> handles_;
};

std::vector<EvalResult> evaluate(Sut& sut, std::span<const Pose> poses);
TrainOutcome train_hint(Sut& sut, std::span<const Pose> samples, double lr_discount);

}  // namespace examiner
