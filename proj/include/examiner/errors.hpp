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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace examiner {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kGeneric = 1,
  kConfig = 2,
  kSut = 3,
  kIncomplete = 4,
};

class ExaminerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const { return ExitCode::kGeneric; }
};

// Invalid configuration, malformed input file, dimension mismatch.
class ConfigError : public ExaminerError {
 public:
  using ExaminerError::ExaminerError;
  ExitCode exit_code() const override { return ExitCode::kConfig; }
};

// Spawn failure, handshake failure, version mismatch.
class SutError : public ExaminerError {
 public:
  using ExaminerError::ExaminerError;
  ExitCode exit_code() const override { return ExitCode::kSut; }
};

// A failed evaluation or train request; carries the request id it belonged to.
class EvaluationError : public SutError {
 public:
  EvaluationError(std::uint64_t batch_id, const std::string& what)
      : SutError("batch " + std::to_string(batch_id) + ": " + what),
        batch_id_(batch_id) {}
  std::uint64_t batch_id() const { return batch_id_; }

 private:
  std::uint64_t batch_id_;
};

// A prerequisite phase has not completed in a run directory.
class IncompleteError : public ExaminerError {
 public:
  using ExaminerError::ExaminerError;
  ExitCode exit_code() const override { return ExitCode::kIncomplete; }
};

// A metric was requested on inputs for which it is undefined.
class MetricError : public ExaminerError {
 public:
  using ExaminerError::ExaminerError;
};

// Rejection sampling ran out of attempts.
class SamplingError : public ExaminerError {
 public:
  using ExaminerError::ExaminerError;
};

}  // namespace examiner
