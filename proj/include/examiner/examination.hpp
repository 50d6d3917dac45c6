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

// One full examination: worst-case search, boundary expansion, metrics.

#include <cstdint>
#include <string>

#include "examiner/decoder.hpp"
#include "examiner/metrics.hpp"
#include "examiner/phase1.hpp"
#include "examiner/phase2.hpp"

namespace examiner {

struct ExaminerSetup {
  const Decoder& decoder;
  const KinematicTree& tree;
  ValidityHook hook;
  Phase1Config phase1;
  Phase2Config phase2;
  std::size_t metrics_samples = 200;
  std::size_t workers = 1;
  std::string fingerprint;
};

struct Examination {
  Phase1Result phase1;
  Phase2Result phase2;
  RobustnessReport report;
};

Examination run_examination(const ExaminerSetup& setup, SutPool& pool, std::uint64_t master_seed);

}  // namespace examiner
