/*
 * Copyright 2026 The MulCom Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "mulcom/cli/config.hpp"
#include "mulcom/gradcheck.hpp"

namespace mulcom::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ComponentCheck {
  std::string component;
  GradCheckResult result;
  double seconds = 0.0;
};

// Finite-difference check of every parameterized component on small random
// instances, ending with a full three-trope model.
std::vector<ComponentCheck> gradcheck_suite(std::uint64_t seed, double epsilon);

// Each command writes its artifacts under config.out and returns an exit
// code; runtime failures surface as exceptions.
int cmd_synth(const RunConfig& config);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config);
int cmd_stats(const RunConfig& config);
int cmd_cooccur(const RunConfig& config);
int cmd_gradcheck(const RunConfig& config);

// Parses argv, dispatches, and maps errors to exit codes: usage or config
// problems give 2, runtime failures 1.
int run(int argc, char** argv);

}  // namespace mulcom::cli
