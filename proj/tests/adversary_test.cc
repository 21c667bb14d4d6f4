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

#include "qkdlab/adversary.h"

#include <gtest/gtest.h>

#include "qkdlab/harness.h"
#include "qkdlab/oracle.h"

using namespace qkdlab;
using namespace qkdlab::adversary;
using qsim::Basis;
using qsim::BellLabel;

namespace {

channel::RoundSchedule bb84_schedule(int bit, int flag) {
    auto state = protocols::bb84_prepare(bit, flag);
    auto parts = protocols::bb84_split(state);
    channel::RoundSchedule s;
    s.begin_round(state.photon, parts.first, parts.second);
    return s;
}

channel::RoundSchedule mid_schedule(BellLabel l1, BellLabel l2, int flag) {
    auto state = protocols::mid_prepare(l1, l2, flag);
    auto parts = protocols::mid_split(state);
    channel::RoundSchedule s;
    s.begin_round(state.carrier, parts.first, parts.second);
    return s;
}

harness::SessionResult session(ProtocolId p, const std::string &attack, long rounds, uint64_t seed) {
    harness::SessionConfig c;
    c.protocol = p;
    c.attack = attack;
    c.rounds = rounds;
    c.seed = seed;
    return harness::run_session(c);
}

}  // namespace

TEST(adversary, intercept_resend_in_matching_basis_is_silent) {
    Rng rng(1);
    for (int bit = 0; bit < 2; bit++) {
        for (int flag = 0; flag < 2; flag++) {
            auto s = bb84_schedule(bit, flag);
            auto handle = s.adversary_access({1});
            auto record = intercept_resend_tap(handle, flag ? BasisPolicy::Diag : BasisPolicy::Rect, rng);
            EXPECT_EQ(record.inferred_bits, protocols::KeyBits{bit});
            EXPECT_FALSE(record.disturbance_applied);
            s.advance();
            s.advance();
            s.advance();
            auto undone = flag ? qsim::rotate_45(s.receiver_register(), 0, qsim::Rotation::Inverse)
                               : s.receiver_register();
            EXPECT_NEAR(qsim::polarization_probabilities(undone, 0, Basis::Rect)[bit], 1.0, 1e-12);
        }
    }
}

TEST(adversary, intercept_resend_in_wrong_basis_disturbs) {
    Rng rng(2);
    auto s = bb84_schedule(0, 1);
    auto handle = s.adversary_access({1});
    auto record = intercept_resend_tap(handle, BasisPolicy::Rect, rng);
    EXPECT_TRUE(record.disturbance_applied);
    s.advance();
    s.advance();
    s.advance();
    auto undone = qsim::rotate_45(s.receiver_register(), 0, qsim::Rotation::Inverse);
    EXPECT_NEAR(qsim::polarization_probabilities(undone, 0, Basis::Rect)[1], 0.5, 1e-12);
}

TEST(adversary, intercept_resend_statistics_match_oracle) {
    auto expected = oracle::intercept_resend();
    auto r = session(ProtocolId::Bb84Delayed, "intercept-resend", 10000, 31);
    EXPECT_NEAR(r.stats.qber_check, expected.qber, 0.02);
    EXPECT_NEAR(*r.stats.adversary_bit_accuracy, expected.eve_bit_accuracy, 0.02);
}

TEST(adversary, bell_pairing_with_right_guess_learns_everything) {
    Rng rng(3);
    for (auto l1 : qsim::kAllBellLabels) {
        for (auto l2 : qsim::kAllBellLabels) {
            for (int flag = 0; flag < 2; flag++) {
                auto s = mid_schedule(l1, l2, flag);
                auto handle = s.adversary_access({1});
                auto record = bell_pairing_tap(handle, flag ? PairingPolicy::Swapped : PairingPolicy::AsSent, rng);
                EXPECT_FALSE(record.disturbance_applied);
                EXPECT_EQ(record.inferred_bits, protocols::mid_prepare(l1, l2, flag).alice_bits());
                s.advance();
                s.advance();
                s.advance();
                auto recombined = protocols::mid_bob_recombine(s.receiver_register(), flag);
                EXPECT_NEAR(qsim::bell_probabilities(recombined, 0, 1)[static_cast<int>(l1)], 1.0, 1e-12);
            }
        }
    }
}

TEST(adversary, bell_pairing_wrong_guess_gives_uniform_outcomes) {
    // Carrier sent as prepared (flag 0), measured under the rearranged pairing.
    auto carrier = protocols::mid_prepare(BellLabel::PhiPlus, BellLabel::PhiPlus, 0).carrier;
    auto first = qsim::bell_probabilities(carrier, 0, 2);
    double second[4] = {};
    for (auto e1 : qsim::kAllBellLabels) {
        double p = first[static_cast<int>(e1)];
        EXPECT_NEAR(p, 0.25, 1e-12);
        auto p2 = qsim::bell_probabilities(qsim::bell_collapse(carrier, 0, 2, e1), 1, 3);
        for (int k = 0; k < 4; k++) {
            second[k] += p * p2[k];
        }
    }
    for (double p : second) {
        EXPECT_NEAR(p, 0.25, 1e-12);
    }
}

TEST(adversary, bell_pairing_statistics_match_oracle) {
    auto expected = oracle::bell_pairing();
    auto r = session(ProtocolId::Mid, "bell-pairing", 10000, 32);
    EXPECT_NEAR(r.stats.qber_check, expected.qber, 0.02);
    EXPECT_NEAR(*r.stats.adversary_bit_accuracy, expected.eve_bit_accuracy, 0.02);
    EXPECT_NEAR(*r.stats.adversary_unit_accuracy, expected.eve_unit_accuracy, 0.02);
}

TEST(adversary, bell_pairing_rejects_single_photon_part) {
    Rng rng(4);
    auto s = bb84_schedule(0, 0);
    auto handle = s.adversary_access({1});
    EXPECT_THROW(bell_pairing_tap(handle, PairingPolicy::Uniform, rng), channel::ChannelError);
}

TEST(adversary, first_part_outcomes_do_not_depend_on_label) {
    for (auto basis : {Basis::Rect, Basis::Diag}) {
        for (auto label : qsim::kAllBellLabels) {
            auto probs = qsim::polarization_probabilities(qsim::make_bell(label), 0, basis);
            EXPECT_NEAR(probs[0], 0.5, 1e-10);
            EXPECT_NEAR(probs[1], 0.5, 1e-10);
        }
    }
}

TEST(adversary, first_part_statistics_match_oracle) {
    auto expected_rect = oracle::first_part(Basis::Rect);
    auto expected_diag = oracle::first_part(Basis::Diag);
    double expected_qber = 0.5 * (expected_rect.qber + expected_diag.qber);
    auto r = session(ProtocolId::TwoStepEpr, "first-part", 10000, 33);
    EXPECT_NEAR(r.stats.qber_check, expected_qber, 0.02);
    EXPECT_NEAR(*r.stats.adversary_unit_accuracy, 0.25, 0.02);
    EXPECT_LT(*r.stats.adversary_mutual_information, 0.005);
}

TEST(adversary, fake_injection_learns_everything_and_is_detected) {
    for (auto p : kAllProtocols) {
        auto expected = oracle::fake_injection(p);
        auto r = session(p, "fake-injection", 10000, 34);
        EXPECT_NEAR(*r.stats.adversary_bit_accuracy, 1.0, 1e-12) << to_string(p);
        EXPECT_NEAR(r.stats.qber_check, expected.qber, 0.02) << to_string(p);
        EXPECT_TRUE(r.stats.detected);
    }
}

TEST(adversary, fake_injection_detection_rate_matches_closed_form) {
    // 8 rounds at f = 0.25 leaves two checked bits per session.
    const int sessions = 2000;
    int detected = 0;
    for (int i = 0; i < sessions; i++) {
        detected += session(ProtocolId::Bb84Delayed, "fake-injection", 8, 1000 + i).stats.detected;
    }
    double q = oracle::fake_injection(ProtocolId::Bb84Delayed).qber;
    double expected = oracle::detection_probability(q, 0.25, 8, 1);
    EXPECT_NEAR(expected, 0.75, 1e-12);
    EXPECT_NEAR(detected / double(sessions), expected, 0.03);
}

TEST(adversary, informative_strategies_always_cost_errors) {
    struct Case {
        const char *name;
        oracle::AttackValues values;
        double chance;
    };
    const std::vector<Case> cases = {
        {"intercept-resend", oracle::intercept_resend(), 0.5},
        {"bell-pairing", oracle::bell_pairing(), 0.5},
        {"first-part", oracle::first_part(Basis::Rect), 0.5},
        {"fake-injection", oracle::fake_injection(ProtocolId::Mid), 0.5},
    };
    for (const auto &c : cases) {
        if (c.values.eve_bit_accuracy > c.chance + 1e-12) {
            EXPECT_GT(c.values.qber, 0.0) << c.name;
        }
    }
    EXPECT_GT(oracle::fake_injection(ProtocolId::TwoStepEpr).qber, 0.0);
}

namespace {

/// Greedy test adversary that always asks for both parts.
class GrabBoth final : public Strategy {
   public:
    int attempts = 0;
    int violations = 0;

    std::string_view id() const override {
        return "grab-both";
    }
    bool supports(ProtocolId) const override {
        return true;
    }
    void on_phase1(ProtocolId, channel::RoundSchedule &s, Rng &) override {
        attempt(s);
    }
    void on_phase2(ProtocolId, channel::RoundSchedule &s, Rng &) override {
        attempt(s);
    }

   private:
    void attempt(channel::RoundSchedule &s) {
        attempts++;
        try {
            s.adversary_access({1, 2});
        } catch (const channel::SimultaneousAccessViolation &) {
            violations++;
        }
    }
};

}  // namespace

TEST(adversary, requesting_both_parts_is_always_refused) {
    for (auto p : kAllProtocols) {
        GrabBoth grab;
        harness::SessionConfig c;
        c.protocol = p;
        c.rounds = 250;
        c.seed = 5;
        auto r = harness::run_session(c, &grab);
        EXPECT_EQ(grab.attempts, 500);
        EXPECT_EQ(grab.violations, grab.attempts);
        EXPECT_EQ(r.stats.qber_check, 0.0);
    }
}

TEST(adversary, strategy_registry) {
    EXPECT_EQ(make_strategy("none"), nullptr);
    EXPECT_THROW(make_strategy("cloner"), std::invalid_argument);
    EXPECT_TRUE(strategy_supports("none", ProtocolId::Mid));
    EXPECT_TRUE(strategy_supports("intercept-resend", ProtocolId::Bb84Original));
    EXPECT_FALSE(strategy_supports("intercept-resend", ProtocolId::Mid));
    EXPECT_TRUE(strategy_supports("bell-pairing", ProtocolId::Mid));
    EXPECT_FALSE(strategy_supports("bell-pairing", ProtocolId::TwoStepEpr));
    EXPECT_TRUE(strategy_supports("first-part", ProtocolId::TwoStepEpr));
    for (auto p : kAllProtocols) {
        EXPECT_TRUE(strategy_supports("fake-injection", p));
    }
    for (auto id : kStrategyIds) {
        EXPECT_TRUE(is_known_strategy(id));
    }
}

TEST(adversary, empirical_mutual_information) {
    std::vector<std::pair<int, int>> same, independent;
    for (int x = 0; x < 2; x++) {
        for (int y = 0; y < 2; y++) {
            independent.emplace_back(x, y);
        }
        same.emplace_back(x, x);
    }
    EXPECT_NEAR(empirical_mutual_information(same), 1.0, 1e-12);
    EXPECT_NEAR(empirical_mutual_information(independent), 0.0, 1e-12);
    EXPECT_EQ(empirical_mutual_information({}), 0.0);
}
