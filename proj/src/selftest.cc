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

#include "qkdlab/selftest.h"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qkdlab/channel.h"
#include "qkdlab/harness.h"
#include "qkdlab/oracle.h"
#include "qkdlab/protocols.h"
#include "qkdlab/qsim.h"

namespace qkdlab::selftest {

namespace {

using qsim::StateVector;

constexpr double kTol = qsim::kInvariantTolerance;
constexpr uint64_t kSeed = 20260101;

bool normalization() {
    Rng rng(kSeed);
    for (int trial = 0; trial < 50; trial++) {
        int n = 1 + static_cast<int>(rng.index(4));
        StateVector s = qsim::random_state(n, rng);
        StateVector t = qsim::random_state(1 + static_cast<int>(rng.index(4)), rng);
        std::vector<StateVector> outputs = {
            qsim::tensor(s, t),
            qsim::permute_qubits(s, qsim::QubitPermutation::swap(n, 0, n - 1)),
            qsim::rotate_45(s, 0, qsim::Rotation::Forward),
            qsim::measure_polarization(s, 0, qsim::Basis::Diag, rng).state,
        };
        if (n >= 2) {
            outputs.push_back(qsim::bell_measure(s, 0, 1, rng).state);
        }
        for (const auto &o : outputs) {
            if (std::abs(o.norm() - 1.0) > kTol) {
                return false;
            }
        }
    }
    return true;
}

bool unitarity() {
    Rng rng(kSeed + 1);
    std::vector<StateVector> states;
    for (int i = 0; i < 8; i++) {
        states.push_back(qsim::random_state(3, rng));
    }
    qsim::QubitPermutation cycle({1, 2, 0});
    for (const auto &a : states) {
        for (const auto &b : states) {
            auto before = qsim::inner_product(a, b);
            auto permuted = qsim::inner_product(qsim::permute_qubits(a, cycle), qsim::permute_qubits(b, cycle));
            auto rotated = qsim::inner_product(qsim::rotate_45(a, 1, qsim::Rotation::Forward),
                                               qsim::rotate_45(b, 1, qsim::Rotation::Forward));
            if (std::abs(before - permuted) > kTol || std::abs(before - rotated) > kTol) {
                return false;
            }
        }
    }
    return true;
}

bool overlap_fixtures() {
    auto reference = oracle::bell_pair_overlaps();
    auto swap = qsim::QubitPermutation::swap(4, 1, 2);
    for (auto a : qsim::kAllBellLabels) {
        for (auto b : qsim::kAllBellLabels) {
            auto carrier = qsim::tensor(qsim::make_bell(a), qsim::make_bell(b));
            auto overlap = qsim::inner_product(carrier, qsim::permute_qubits(carrier, swap));
            if (std::abs(overlap - reference[static_cast<int>(a)][static_cast<int>(b)]) > 1e-12 ||
                std::abs(std::abs(overlap) - 0.5) > 1e-12) {
                return false;
            }
        }
    }
    return true;
}

bool bell_completeness() {
    Rng rng(kSeed + 2);
    for (int trial = 0; trial < 50; trial++) {
        auto probs = qsim::bell_probabilities(qsim::random_state(2, rng), 0, 1);
        if (std::abs(probs[0] + probs[1] + probs[2] + probs[3] - 1.0) > kTol) {
            return false;
        }
    }
    return true;
}

bool partial_trace_consistency() {
    Rng rng(kSeed + 3);
    for (int trial = 0; trial < 20; trial++) {
        StateVector a = qsim::random_state(1, rng);
        StateVector b = qsim::random_state(2, rng);
        StateVector joint = qsim::tensor(a, b);
        const std::vector<int> keep_a = {0};
        const std::vector<int> keep_b = {1, 2};
        auto ra = qsim::partial_trace(joint, keep_a);
        auto rb = qsim::partial_trace(joint, keep_b);
        if (std::abs(ra.trace() - 1.0) > kTol || std::abs(rb.trace() - 1.0) > kTol) {
            return false;
        }
        if (ra.max_abs_difference(qsim::DensityMatrix::from_state(a)) > kTol ||
            rb.max_abs_difference(qsim::DensityMatrix::from_state(b)) > kTol) {
            return false;
        }
    }
    return true;
}

bool seeded_determinism() {
    auto sequence = [](uint64_t seed) {
        Rng rng(seed);
        Rng state_rng(7);
        std::vector<int> out;
        StateVector s = qsim::random_state(3, state_rng);
        for (int i = 0; i < 64; i++) {
            out.push_back(qsim::measure_polarization(s, i % 3, qsim::Basis::Diag, rng).bit);
            out.push_back(static_cast<int>(qsim::bell_measure(s, 0, 2, rng).label));
        }
        return out;
    };
    return sequence(99) == sequence(99);
}

bool honest_sessions() {
    for (ProtocolId p : kAllProtocols) {
        harness::SessionConfig config;
        config.protocol = p;
        config.rounds = 200;
        config.seed = kSeed;
        auto result = harness::run_session(config);
        if (result.stats.qber_check != 0.0 || result.stats.agreement != 1.0 || result.stats.detected) {
            return false;
        }
    }
    return true;
}

bool exclusivity() {
    for (ProtocolId p : kAllProtocols) {
        Rng rng(kSeed);
        channel::RoundSchedule schedule;
        protocols::SplitParts parts = p == ProtocolId::Mid          ? protocols::mid_split(protocols::mid_alice_prepare(rng))
                                      : p == ProtocolId::TwoStepEpr ? protocols::two_step_split(protocols::two_step_alice_prepare(rng))
                                                                    : protocols::bb84_split(protocols::bb84_prepare_and_split(rng));
        int qubits = p == ProtocolId::Mid ? 4 : p == ProtocolId::TwoStepEpr ? 2 : 1;
        schedule.begin_round(StateVector::basis_state(qubits, 0), parts.first, parts.second);
        for (int step = 0; step < 4; step++) {
            try {
                schedule.adversary_access({1, 2});
                return false;
            } catch (const channel::SimultaneousAccessViolation &) {
            }
            if (step < 3) {
                schedule.advance();
            }
        }
    }
    return true;
}

bool encoding_bijection() {
    for (int high = 0; high < 2; high++) {
        for (int low = 0; low < 2; low++) {
            auto bits = protocols::decode_bell_to_bits(protocols::encode_bits_to_bell(high, low));
            if (bits[0] != high || bits[1] != low) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

bool run_invariant_suite(std::ostream &out) {
    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"normalization", normalization},
        {"unitarity", unitarity},
        {"bell-pair overlaps match oracle", overlap_fixtures},
        {"bell completeness", bell_completeness},
        {"partial trace consistency", partial_trace_consistency},
        {"seeded measurement determinism", seeded_determinism},
        {"honest sessions", honest_sessions},
        {"channel exclusivity", exclusivity},
        {"encoding bijection", encoding_bijection},
    };
    bool all = true;
    for (const auto &[name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception &e) {
            out << "[FAIL] " << name << ": " << e.what() << "\n";
            all = false;
            continue;
        }
        out << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        all = all && ok;
    }
    return all;
}

}  // namespace qkdlab::selftest
