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

#ifndef QKDLAB_SELFTEST_H
#define QKDLAB_SELFTEST_H

#include <ostream>

namespace qkdlab::selftest {

/// Runs the built-in invariant checks, printing one PASS/FAIL line each.
/// Returns true when all pass.
bool run_invariant_suite(std::ostream &out);

}  // namespace qkdlab::selftest

#endif
