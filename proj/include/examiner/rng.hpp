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
#include <optional>

namespace examiner {

// Stream purposes. Each (master seed, purpose, index) triple names an
// independent stream, so agents and modes never share random state.
enum class StreamPurpose : std::uint64_t {
  kPhase1Init = 1,
  kPhase1 = 2,
  kPhase2 = 3,
  kMetrics = 4,
  kAdversarySet = 5,
  kMix = 6,
  kCurriculumLoop = 7,
  kDecoder = 8,
  kUser = 9,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: output k is a bijective mix of (key, k). Copying a
// stream copies its position, which is what the determinism tests rely on.
// Distributions are implemented here rather than with <random> so sequences
// are identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}
  RngStream(std::uint64_t master_seed, StreamPurpose purpose, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal (Box-Muller, second variate cached).
  double normal();
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> cached_normal_;
};

// Seed derivation for nested runs (e.g. one examiner run per curriculum loop).
std::uint64_t derive_seed(std::uint64_t master_seed, StreamPurpose purpose,
                          std::uint64_t index);

}  // namespace examiner
