// Copyright 2026 The qkdlab Authors
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

#ifndef QKDLAB_CLI_H
#define QKDLAB_CLI_H

#include <ostream>
#include <string>
#include <vector>

namespace qkdlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftestFailed = 1;
inline constexpr int kExitDetected = 2;
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitAborted = 4;

/// Entry point behind the qkdlab binary. `args` excludes the program name.
///
///   qkdlab run --protocol mid --attack none --rounds 1000 --seed 7
///   qkdlab oracle
///   qkdlab selftest
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace qkdlab::cli

#endif
