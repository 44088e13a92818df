// Copyright 2026 The rdqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs every acceptance criterion and prints one PASS/FAIL line each.

#include <iostream>

#include "rdqc/selftest.hpp"

int main() {
  bool all = true;
  for (const auto &c : rdqc::acceptance_criteria()) {
    const rdqc::CriterionResult r = rdqc::run_criterion(c, rdqc::SelftestOptions{});
    all = all && r.passed;
    std::cout << rdqc::format_result(r) << std::endl;
  }
  std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}
