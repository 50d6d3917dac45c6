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

#include "examiner/examination.hpp"

namespace examiner {

Examination run_examination(const ExaminerSetup& setup, SutPool& pool, std::uint64_t master_seed) {
  Examination ex;
  const SearchContext ctx{setup.decoder, setup.tree, setup.hook};
  ex.phase1 = run_phase1(setup.phase1, ctx, pool, master_seed, setup.workers);
  ex.phase2 = seed_to_mode_pipeline(ex.phase1.seeds, pool, setup.tree, setup.hook, setup.phase2,
                                    master_seed, setup.workers);
  ReportSettings settings;
  settings.samples_per_mode = setup.metrics_samples;
  settings.adversarial_threshold = setup.phase2.adversarial_threshold;
  settings.master_seed = master_seed;
  settings.fingerprint = setup.fingerprint;
  settings.workers = setup.workers;
  ex.report = robustness_report(ex.phase1.seeds, ex.phase2.modes, pool, setup.tree, setup.hook,
                                settings);
  return ex;
}

}  // namespace examiner
