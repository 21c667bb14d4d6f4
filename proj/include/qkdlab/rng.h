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

#ifndef QKDLAB_RNG_H
#define QKDLAB_RNG_H

#include <cstdint>
#include <random>

namespace qkdlab {

/// Seeded deterministic generator owned by a single session.
///
/// Every draw is derived from the raw 64-bit output of mt19937_64 with
/// explicit arithmetic, so sequences are identical across standard library
/// implementations (std::uniform_*_distribution is not portable).
class Rng {
   public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) : engine_(mix(seed, stream)) {
    }

    uint64_t next() {
        return engine_();
    }

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    int bit() {
        return static_cast<int>(engine_() >> 63);
    }

    /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    uint64_t index(uint64_t n) {
        if (n <= 1) {
            return 0;
        }
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

   private:
    static uint64_t mix(uint64_t seed, uint64_t stream) {
        // splitmix64 finalizer, so nearby seeds and streams decorrelate.
        uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

}  // namespace qkdlab

#endif
