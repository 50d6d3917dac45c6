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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "examiner/errors.hpp"
#include "examiner/sut.hpp"

extern char** environ;

namespace examiner {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

nlohmann::json poses_to_json(std::span<const Pose> poses) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : poses) arr.push_back(p.angles);
  return arr;
}

}  // namespace

std::unique_ptr<ExternalSut> spawn_external(const std::vector<std::string>& command,
                                            const NuisanceConfig& nuisance,
                                            std::chrono::duration<double> timeout) {
  if (command.empty()) throw SutError("external SUT: empty command");
  ignore_sigpipe();

  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0) throw SutError(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(from_child, O_CLOEXEC) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw SutError(std::string("pipe: ") + std::strerror(errno));
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

  std::vector<char*> argv;
  for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  pid_t pid = -1;
  const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(to_child[0]);
  ::close(from_child[1]);
  if (rc != 0) {
    ::close(to_child[1]);
    ::close(from_child[0]);
    throw SutError("cannot spawn '" + command.front() + "': " + std::strerror(rc));
  }

  std::unique_ptr<ExternalSut> sut(new ExternalSut());
  sut->pid_ = pid;
  sut->to_child_ = to_child[1];
  sut->from_child_ = from_child[0];
  sut->timeout_ = timeout;
  sut->nuisance_ = nuisance.is_null() ? nlohmann::json::object() : nuisance;

  nlohmann::json hello = {{"type", "hello"}, {"version", kProtocolVersion}, {"nuisance", sut->nuisance_}};
  nlohmann::json ready;
  try {
    sut->send_line(hello.dump(), 0);
    ready = sut->read_message(0);
  } catch (const EvaluationError& e) {
    throw SutError(std::string("handshake failed: ") + e.what());
  }
  if (ready.value("type", "") != "ready") {
    throw SutError("handshake failed: expected ready, got " + ready.dump());
  }
  const int version = ready.value("version", -1);
  if (version != kProtocolVersion) {
    throw SutError("protocol version mismatch: SUT speaks " + std::to_string(version) +
                   ", engine speaks " + std::to_string(kProtocolVersion));
  }
  sut->name_ = ready.value("name", std::string("external"));
  return sut;
}

ExternalSut::~ExternalSut() { shutdown(); }

void ExternalSut::shutdown() {
  if (pid_ < 0) return;
  if (to_child_ >= 0) {
    const std::string bye = "{\"type\":\"bye\"}\n";
    [[maybe_unused]] auto n = ::write(to_child_, bye.data(), bye.size());
    ::close(to_child_);
    to_child_ = -1;
  }
  const auto deadline = Clock::now() + std::chrono::seconds(5);
  int status = 0;
  while (::waitpid(pid_, &status, WNOHANG) == 0) {
    if (Clock::now() > deadline) {
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (from_child_ >= 0) ::close(from_child_);
  from_child_ = -1;
  pid_ = -1;
}

void ExternalSut::send_line(const std::string& line, std::uint64_t id) {
  std::string data = line;
  data.push_back('\n');
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EvaluationError(id, std::string("SUT process exited (write: ") + std::strerror(errno) + ")");
    }
    off += static_cast<std::size_t>(n);
  }
}

nlohmann::json ExternalSut::read_message(std::uint64_t id) {
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(timeout_);
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        return nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception&) {
        throw EvaluationError(id, "malformed response: " + line.substr(0, 200));
      }
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) throw EvaluationError(id, "protocol timeout");
    pollfd pfd{from_child_, POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (pr < 0) {
      if (errno == EINTR) continue;
      throw EvaluationError(id, std::string("poll: ") + std::strerror(errno));
    }
    if (pr == 0) throw EvaluationError(id, "protocol timeout");
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw EvaluationError(id, std::string("read: ") + std::strerror(errno));
    }
    if (n == 0) throw EvaluationError(id, "SUT process exited");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<EvalResult> ExternalSut::evaluate(std::span<const Pose> poses) {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  if (poses.empty()) throw EvaluationError(id, "empty batch");
  send_line(nlohmann::json{{"type", "eval"}, {"id", id}, {"poses", poses_to_json(poses)}}.dump(), id);
  const auto msg = read_message(id);
  try {
    if (msg.value("id", std::uint64_t{0}) != id) throw EvaluationError(id, "response id mismatch");
    const auto type = msg.at("type").get<std::string>();
    if (type == "error") throw EvaluationError(id, "SUT error: " + msg.value("message", ""));
    if (type != "result") throw EvaluationError(id, "unexpected response type '" + type + "'");
    const auto e2 = msg.at("err2d").get<std::vector<double>>();
    const auto e3 = msg.at("err3d").get<std::vector<double>>();
    if (e2.size() != poses.size() || e3.size() != poses.size()) {
      throw EvaluationError(id, "result length does not match batch");
    }
    std::vector<EvalResult> out(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
      if (!std::isfinite(e2[i]) || !std::isfinite(e3[i]) || e2[i] < 0 || e3[i] < 0) {
        throw EvaluationError(id, "non-finite or negative error in result");
      }
      out[i] = {e2[i], e3[i]};
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(id, std::string("malformed response: ") + e.what());
  }
}

TrainOutcome ExternalSut::train(std::span<const Pose> samples, double lr_discount) {
  std::lock_guard lock(mutex_);
  const std::uint64_t id = next_id_++;
  send_line(nlohmann::json{{"type", "train"},
                           {"id", id},
                           {"lr_discount", lr_discount},
                           {"samples", poses_to_json(samples)}}
                .dump(),
            id);
  const auto msg = read_message(id);
  if (msg.value("id", std::uint64_t{0}) != id) throw EvaluationError(id, "response id mismatch");
  const auto type = msg.value("type", "");
  if (type == "trained") return TrainOutcome::kTrained;
  if (type == "unsupported") return TrainOutcome::kUnsupported;
  throw EvaluationError(id, "unexpected response to train: " + msg.dump());
}

}  // namespace examiner
