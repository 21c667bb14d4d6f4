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

#include "qkdlab/channel.h"

#include <gtest/gtest.h>

#include "qkdlab/protocols.h"

using namespace qkdlab;
using namespace qkdlab::channel;

namespace {

RoundSchedule mid_round() {
    RoundSchedule s;
    auto state = protocols::mid_prepare(qsim::BellLabel::PhiPlus, qsim::BellLabel::PhiPlus, 0);
    auto parts = protocols::mid_split(state);
    s.begin_round(state.carrier, parts.first, parts.second);
    return s;
}

RoundSchedule two_step_round() {
    RoundSchedule s;
    s.begin_round(qsim::make_bell(qsim::BellLabel::PsiMinus), QuantumPart{{0}}, QuantumPart{{1}});
    return s;
}

}  // namespace

TEST(channel, begin_round_exposes_part1) {
    auto s = mid_round();
    EXPECT_EQ(s.phase(), Phase::Phase1InFlight);
    auto handle = s.adversary_access({1});
    EXPECT_TRUE(handle.is_quantum());
    EXPECT_EQ(handle.positions(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(channel, two_quantum_parts_are_a_valid_schedule) {
    auto s = two_step_round();
    EXPECT_EQ(s.phase(), Phase::Phase1InFlight);
    EXPECT_EQ(s.adversary_access({1}).positions(), std::vector<int>{0});
}

TEST(channel, begin_round_twice_fails) {
    auto s = mid_round();
    EXPECT_THROW(s.begin_round(qsim::make_bell(qsim::BellLabel::PhiPlus), QuantumPart{{0}}, QuantumPart{{1}}),
                 ChannelError);
}

TEST(channel, begin_round_validates_parts) {
    auto bell = qsim::make_bell(qsim::BellLabel::PhiPlus);
    RoundSchedule a;
    EXPECT_THROW(a.begin_round(bell, QuantumPart{{0, 1}}, QuantumPart{{1}}), ChannelError);
    RoundSchedule b;
    EXPECT_THROW(b.begin_round(bell, QuantumPart{{2}}, ClassicalPart{0}), ChannelError);
    RoundSchedule c;
    EXPECT_THROW(c.begin_round(bell, QuantumPart{{0}}, ClassicalPart{2}), ChannelError);
    RoundSchedule d;
    EXPECT_THROW(d.begin_round(bell, QuantumPart{{}}, ClassicalPart{0}), ChannelError);
}

TEST(channel, both_parts_requested_always_violates) {
    auto s = mid_round();
    for (int step = 0; step < 4; step++) {
        EXPECT_THROW(s.adversary_access({1, 2}), SimultaneousAccessViolation) << to_string(s.phase());
        EXPECT_THROW(s.adversary_access({2, 1}), SimultaneousAccessViolation);
        if (step < 3) {
            s.advance();
        }
    }
    EXPECT_TRUE(s.access_log().empty());
}

TEST(channel, part_not_in_flight_violates) {
    auto s = mid_round();
    EXPECT_THROW(s.adversary_access({2}), SimultaneousAccessViolation);
    s.advance();
    EXPECT_THROW(s.adversary_access({1}), SimultaneousAccessViolation);
    EXPECT_THROW(s.adversary_access({2}), SimultaneousAccessViolation);
    s.advance();
    EXPECT_THROW(s.adversary_access({1}), SimultaneousAccessViolation);
    EXPECT_NO_THROW(s.adversary_access({2}));
    s.advance();
    EXPECT_THROW(s.adversary_access({2}), SimultaneousAccessViolation);
}

TEST(channel, bad_part_indices) {
    auto s = mid_round();
    EXPECT_THROW(s.adversary_access(std::span<const int>{}), ChannelError);
    EXPECT_THROW(s.adversary_access({3}), ChannelError);
}

TEST(channel, phases_advance_in_order) {
    auto s = mid_round();
    s.advance();
    EXPECT_EQ(s.phase(), Phase::Phase1Stored);
    s.advance();
    EXPECT_EQ(s.phase(), Phase::Phase2InFlight);
    s.advance();
    EXPECT_EQ(s.phase(), Phase::Delivered);
    EXPECT_THROW(s.advance(), ChannelError);
    EXPECT_EQ(s.phase_history(), (std::vector<Phase>{Phase::Idle, Phase::Phase1InFlight, Phase::Phase1Stored,
                                                     Phase::Phase2InFlight, Phase::Delivered}));
}

TEST(channel, advance_on_idle_fails) {
    RoundSchedule s;
    EXPECT_THROW(s.advance(), ChannelError);
}

TEST(channel, receiver_visibility) {
    auto s = mid_round();
    EXPECT_FALSE(s.receiver_can_read(1));
    EXPECT_FALSE(s.receiver_can_read(2));
    EXPECT_THROW(s.receiver_register(), ChannelError);
    s.advance();
    EXPECT_TRUE(s.receiver_can_read(1));
    EXPECT_FALSE(s.receiver_can_read(2));
    EXPECT_THROW(s.receiver_part(2), ChannelError);
    s.advance();
    EXPECT_FALSE(s.receiver_can_read(2));
    s.advance();
    EXPECT_TRUE(s.receiver_can_read(1));
    EXPECT_TRUE(s.receiver_can_read(2));
    EXPECT_EQ(std::get<ClassicalPart>(s.receiver_part(2)).bit, 0);
    EXPECT_EQ(s.receiver_register().num_qubits(), 4);
}

TEST(channel, access_log_records_grants_only) {
    auto s = mid_round();
    s.adversary_access({1});
    s.advance();
    s.advance();
    s.adversary_access({2});
    s.advance();
    ASSERT_EQ(s.access_log().size(), 2u);
    EXPECT_EQ(s.access_log()[0], (AccessLogEntry{Phase::Phase1InFlight, Accessor::Adversary, 1}));
    EXPECT_EQ(s.access_log()[1], (AccessLogEntry{Phase::Phase2InFlight, Accessor::Adversary, 2}));
}

TEST(channel, access_log_never_mixes_parts_within_a_phase) {
    auto s = mid_round();
    s.adversary_access({1});
    s.adversary_access({1});
    EXPECT_THROW(s.adversary_access({2}), SimultaneousAccessViolation);
    for (const auto &entry : s.access_log()) {
        EXPECT_EQ(entry.part, 1);
    }
}

TEST(channel, stale_handle_is_rejected) {
    auto s = mid_round();
    Rng rng(1);
    auto handle = s.adversary_access({1});
    s.advance();
    EXPECT_THROW(handle.measure_polarization(0, qsim::Basis::Rect, rng), ChannelError);
}

TEST(channel, classical_part_is_read_only_and_quantum_ops_refused) {
    auto s = mid_round();
    s.advance();
    s.advance();
    Rng rng(2);
    auto handle = s.adversary_access({2});
    EXPECT_FALSE(handle.is_quantum());
    EXPECT_EQ(handle.read_classical(), 0);
    EXPECT_TRUE(handle.positions().empty());
    // Part 1 now sits in Bob's ring.
    EXPECT_THROW(handle.measure_polarization(0, qsim::Basis::Rect, rng), SimultaneousAccessViolation);
}

TEST(channel, quantum_handle_has_no_classical_value) {
    auto s = mid_round();
    auto handle = s.adversary_access({1});
    EXPECT_THROW(handle.read_classical(), ChannelError);
}

TEST(channel, adversary_cannot_touch_the_stored_particle_in_two_step) {
    auto s = two_step_round();
    Rng rng(3);
    auto handle = s.adversary_access({1});
    EXPECT_THROW(handle.measure_polarization(1, qsim::Basis::Rect, rng), SimultaneousAccessViolation);
    EXPECT_THROW(handle.bell_measure(0, 1, rng), SimultaneousAccessViolation);
    EXPECT_NO_THROW(handle.measure_polarization(0, qsim::Basis::Rect, rng));
}

TEST(channel, attached_memory_stays_reachable_across_phases) {
    auto s = two_step_round();
    Rng rng(4);
    auto h1 = s.adversary_access({1});
    int memory = h1.attach(qsim::StateVector::basis_state(1, 1));
    EXPECT_EQ(memory, 2);
    h1.exchange(0, memory);
    EXPECT_THROW(h1.exchange(1, memory), SimultaneousAccessViolation);
    EXPECT_THROW(h1.exchange(0, 1), ChannelError);
    s.advance();
    s.advance();
    auto h2 = s.adversary_access({2});
    EXPECT_NO_THROW(h2.bell_measure(memory, 1, rng));
    s.advance();
    // The substitute |1> now sits at Bob's position 0.
    EXPECT_NEAR(qsim::polarization_probabilities(s.receiver_register(), 0, qsim::Basis::Rect)[1], 1.0, 1e-12);
}

TEST(channel, replaying_a_transcript_reproduces_phases) {
    auto run = [] {
        auto s = mid_round();
        s.advance();
        s.advance();
        s.advance();
        return s.phase_history();
    };
    EXPECT_EQ(run(), run());
}
