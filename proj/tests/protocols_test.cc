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

#include "qkdlab/protocols.h"

#include <set>

#include <gtest/gtest.h>

using namespace qkdlab;
using namespace qkdlab::protocols;
using qsim::Basis;
using qsim::BellLabel;

namespace {

qsim::StateVector sent_carrier() {
    return qsim::tensor(qsim::make_bell(BellLabel::PhiPlus), qsim::make_bell(BellLabel::PhiPlus));
}

}  // namespace

TEST(protocols, encoding_table) {
    EXPECT_EQ(encode_bits_to_bell(0, 0), BellLabel::PhiPlus);
    EXPECT_EQ(encode_bits_to_bell(0, 1), BellLabel::PhiMinus);
    EXPECT_EQ(encode_bits_to_bell(1, 0), BellLabel::PsiPlus);
    EXPECT_EQ(encode_bits_to_bell(1, 1), BellLabel::PsiMinus);
    EXPECT_EQ(decode_bell_to_bits(BellLabel::PhiMinus), (std::array<int, 2>{0, 1}));
    EXPECT_EQ(decode_bell_to_bits(BellLabel::PsiPlus), (std::array<int, 2>{1, 0}));
    EXPECT_THROW(encode_bits_to_bell(2, 0), std::invalid_argument);
}

TEST(protocols, encoding_is_a_bijection) {
    for (auto label : qsim::kAllBellLabels) {
        auto bits = decode_bell_to_bits(label);
        EXPECT_EQ(encode_bits_to_bell(bits[0], bits[1]), label);
    }
}

TEST(protocols, mid_prepare_builds_both_carrier_orderings) {
    auto plain = mid_prepare(BellLabel::PhiPlus, BellLabel::PhiPlus, 0);
    EXPECT_TRUE(plain.carrier.approx_equal(sent_carrier(), 1e-12));
    auto rearranged = mid_prepare(BellLabel::PhiPlus, BellLabel::PhiPlus, 1);
    EXPECT_EQ(rearranged.carrier.str(), "0.5|0000> + 0.5|0101> + 0.5|1010> + 0.5|1111>");
    EXPECT_EQ(plain.alice_bits(), (KeyBits{0, 0, 0, 0}));
}

TEST(protocols, mid_alice_prepare_is_uniform) {
    Rng rng(2024);
    const int n = 10000;
    int label_counts[2][4] = {};
    int flags = 0;
    for (int i = 0; i < n; i++) {
        auto s = mid_alice_prepare(rng);
        label_counts[0][static_cast<int>(s.alice_labels[0])]++;
        label_counts[1][static_cast<int>(s.alice_labels[1])]++;
        flags += s.rearrange_flag;
    }
    for (const auto &slot : label_counts) {
        for (int c : slot) {
            EXPECT_NEAR(c / double(n), 0.25, 0.02);
        }
    }
    EXPECT_NEAR(flags / double(n), 0.5, 0.02);
}

TEST(protocols, mid_split_parts) {
    for (int flag = 0; flag < 2; flag++) {
        auto parts = mid_split(mid_prepare(BellLabel::PsiPlus, BellLabel::PhiMinus, flag));
        EXPECT_EQ(std::get<channel::QuantumPart>(parts.first).positions, (std::vector<int>{0, 1, 2, 3}));
        EXPECT_EQ(std::get<channel::ClassicalPart>(parts.second).bit, flag);
    }
}

TEST(protocols, mid_recombine) {
    auto rearranged = mid_prepare(BellLabel::PhiPlus, BellLabel::PhiPlus, 1).carrier;
    EXPECT_TRUE(mid_bob_recombine(rearranged, 1).approx_equal(sent_carrier(), 1e-12));
    EXPECT_TRUE(mid_bob_recombine(rearranged, 0).approx_equal(rearranged, 0));
    EXPECT_THROW(mid_bob_recombine(qsim::make_bell(BellLabel::PhiPlus), 1), qsim::DimensionError);
}

TEST(protocols, recombine_restores_alice_tensor_in_all_32_cases) {
    for (auto l1 : qsim::kAllBellLabels) {
        for (auto l2 : qsim::kAllBellLabels) {
            auto expected = qsim::tensor(qsim::make_bell(l1), qsim::make_bell(l2));
            for (int flag = 0; flag < 2; flag++) {
                auto state = mid_prepare(l1, l2, flag);
                int bit = std::get<channel::ClassicalPart>(mid_split(state).second).bit;
                EXPECT_TRUE(mid_bob_recombine(state.carrier, bit).approx_equal(expected, 1e-12));
            }
        }
    }
}

TEST(protocols, honest_mid_measurement_is_certain_by_enumeration) {
    for (auto l1 : qsim::kAllBellLabels) {
        for (auto l2 : qsim::kAllBellLabels) {
            for (int flag = 0; flag < 2; flag++) {
                auto recombined = mid_bob_recombine(mid_prepare(l1, l2, flag).carrier, flag);
                auto p1 = qsim::bell_probabilities(recombined, 0, 1);
                EXPECT_NEAR(p1[static_cast<int>(l1)], 1.0, 1e-12);
                auto p2 = qsim::bell_probabilities(qsim::bell_collapse(recombined, 0, 1, l1), 2, 3);
                EXPECT_NEAR(p2[static_cast<int>(l2)], 1.0, 1e-12);
            }
        }
    }
}

TEST(protocols, mid_bob_measure_samples) {
    Rng rng(3);
    auto state = mid_prepare(BellLabel::PsiPlus, BellLabel::PhiMinus, 1);
    for (int i = 0; i < 20; i++) {
        auto labels = mid_bob_measure(mid_bob_recombine(state.carrier, 1), rng);
        EXPECT_EQ(labels[0], BellLabel::PsiPlus);
        EXPECT_EQ(labels[1], BellLabel::PhiMinus);
    }
    auto labels = mid_bob_measure(sent_carrier(), rng);
    EXPECT_EQ(labels[0], BellLabel::PhiPlus);
    EXPECT_EQ(labels[1], BellLabel::PhiPlus);
}

TEST(protocols, bb84_states) {
    EXPECT_TRUE(bb84_prepare(0, 0).photon.approx_equal(qsim::polarization_state(0), 1e-12));
    EXPECT_TRUE(bb84_prepare(0, 1).photon.approx_equal(qsim::polarization_state(45), 1e-12));
    EXPECT_TRUE(bb84_prepare(1, 0).photon.approx_equal(qsim::polarization_state(90), 1e-12));
    EXPECT_TRUE(bb84_prepare(1, 1).photon.approx_equal(qsim::polarization_state(135), 1e-12));
    auto parts = bb84_split(bb84_prepare(1, 1));
    EXPECT_EQ(std::get<channel::QuantumPart>(parts.first).positions, std::vector<int>{0});
    EXPECT_EQ(std::get<channel::ClassicalPart>(parts.second).bit, 1);
}

TEST(protocols, bb84_reachable_states_are_the_four_directions) {
    Rng rng(4);
    std::set<int> seen;
    for (int i = 0; i < 200; i++) {
        auto s = bb84_prepare_and_split(rng);
        for (int deg : {0, 45, 90, 135}) {
            if (s.photon.approx_equal(qsim::polarization_state(deg), 1e-12)) {
                seen.insert(deg);
            }
        }
    }
    EXPECT_EQ(seen, (std::set<int>{0, 45, 90, 135}));
}

TEST(protocols, delayed_recovery_is_exact) {
    for (int bit = 0; bit < 2; bit++) {
        for (int flag = 0; flag < 2; flag++) {
            auto photon = bb84_prepare(bit, flag).photon;
            auto undone = flag ? qsim::rotate_45(photon, 0, qsim::Rotation::Inverse) : photon;
            EXPECT_NEAR(qsim::polarization_probabilities(undone, 0, Basis::Rect)[bit], 1.0, 1e-12);
        }
    }
    Rng rng(5);
    EXPECT_EQ(bb84_delayed_recover(qsim::polarization_state(45), 1, rng), 0);
}

TEST(protocols, misdelivered_flag_randomizes_bit) {
    auto probs = qsim::polarization_probabilities(qsim::polarization_state(45), 0, Basis::Rect);
    EXPECT_NEAR(probs[0], 0.5, 1e-12);
    EXPECT_NEAR(probs[1], 0.5, 1e-12);
}

TEST(protocols, original_bb84_sifting) {
    Rng rng(6);
    const int n = 10000;
    int retained = 0;
    for (int i = 0; i < n; i++) {
        auto r = bb84_original_round(rng);
        if (r.retained) {
            retained++;
            EXPECT_EQ(r.bob_bit, r.alice_bit);
        }
    }
    EXPECT_NEAR(retained / double(n), 0.5, 0.02);
}

TEST(protocols, original_bb84_wrong_guess_gives_uniform_bit) {
    for (int bit = 0; bit < 2; bit++) {
        auto photon = bb84_prepare(bit, 1).photon;
        auto probs = qsim::polarization_probabilities(photon, 0, Basis::Rect);
        EXPECT_NEAR(probs[0], 0.5, 1e-12);
        auto straight = qsim::polarization_probabilities(bb84_prepare(bit, 0).photon, 0, Basis::Diag);
        EXPECT_NEAR(straight[0], 0.5, 1e-12);
    }
}

TEST(protocols, two_step_honest_rounds) {
    Rng rng(7);
    for (int i = 0; i < 200; i++) {
        auto r = two_step_epr_round(rng);
        EXPECT_EQ(r.alice_bits, r.bob_bits);
    }
}

TEST(protocols, two_step_in_flight_particles_are_maximally_mixed) {
    auto mixed = qsim::DensityMatrix::maximally_mixed(1);
    for (auto label : qsim::kAllBellLabels) {
        auto state = two_step_prepare(label);
        auto parts = two_step_split(state);
        for (const auto &part : {parts.first, parts.second}) {
            const auto &positions = std::get<channel::QuantumPart>(part).positions;
            EXPECT_LT(qsim::partial_trace(state.pair, positions).max_abs_difference(mixed), 1e-10);
        }
    }
}

TEST(protocols, every_round_uses_two_parts_and_the_full_schedule) {
    Rng rng(8);
    const std::vector<channel::Phase> full = {channel::Phase::Idle, channel::Phase::Phase1InFlight,
                                              channel::Phase::Phase1Stored, channel::Phase::Phase2InFlight,
                                              channel::Phase::Delivered};
    for (auto p : kAllProtocols) {
        auto out = run_round(p, rng, nullptr);
        EXPECT_EQ(out.phases, full) << to_string(p);
        EXPECT_EQ(static_cast<int>(out.alice_bits.size()), bits_per_round(p));
        EXPECT_EQ(out.bob_bits.size(), out.alice_bits.size());
    }
}

TEST(protocols, honest_rounds_agree_for_every_protocol) {
    Rng rng(9);
    for (auto p : kAllProtocols) {
        for (int i = 0; i < 300; i++) {
            auto out = run_round(p, rng, nullptr);
            if (out.retained) {
                EXPECT_EQ(out.alice_bits, out.bob_bits) << to_string(p);
            }
        }
    }
}
