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

#include <string>

namespace qkdlab::protocols {

using channel::ClassicalPart;
using channel::Phase;
using channel::QuantumPart;
using channel::RoundSchedule;
using qsim::StateVector;

BellLabel encode_bits_to_bell(int high, int low) {
    if ((high != 0 && high != 1) || (low != 0 && low != 1)) {
        throw std::invalid_argument("key bits must be 0 or 1");
    }
    return static_cast<BellLabel>(high * 2 + low);
}

std::array<int, 2> decode_bell_to_bits(BellLabel label) {
    int v = static_cast<int>(label);
    return {v >> 1, v & 1};
}

// ------------------------------------------------------------------ mid

KeyBits MidRoundState::alice_bits() const {
    auto a = decode_bell_to_bits(alice_labels[0]);
    auto b = decode_bell_to_bits(alice_labels[1]);
    return {a[0], a[1], b[0], b[1]};
}

MidRoundState mid_prepare(BellLabel first, BellLabel second, int rearrange_flag) {
    if (rearrange_flag != 0 && rearrange_flag != 1) {
        throw std::invalid_argument("rearrange flag must be 0 or 1");
    }
    StateVector carrier = qsim::tensor(qsim::make_bell(first), qsim::make_bell(second));
    if (rearrange_flag == 1) {
        carrier = qsim::permute_qubits(carrier, qsim::QubitPermutation::swap(4, 1, 2));
    }
    return MidRoundState{{first, second}, rearrange_flag, std::move(carrier), std::nullopt};
}

MidRoundState mid_alice_prepare(Rng &rng) {
    int b0 = rng.bit();
    int b1 = rng.bit();
    int b2 = rng.bit();
    int b3 = rng.bit();
    int flag = rng.bit();
    return mid_prepare(encode_bits_to_bell(b0, b1), encode_bits_to_bell(b2, b3), flag);
}

SplitParts mid_split(const MidRoundState &state) {
    return {QuantumPart{{0, 1, 2, 3}}, ClassicalPart{state.rearrange_flag}};
}

StateVector mid_bob_recombine(const StateVector &carrier, int classical_bit) {
    if (carrier.num_qubits() < 4) {
        throw qsim::DimensionError("mid-protocol carrier needs four qubits");
    }
    if (classical_bit == 0) {
        return carrier;
    }
    return qsim::permute_qubits(carrier, qsim::QubitPermutation::swap(carrier.num_qubits(), 1, 2));
}

std::array<BellLabel, 2> mid_bob_measure(const StateVector &recombined, Rng &rng) {
    if (recombined.num_qubits() < 4) {
        throw qsim::DimensionError("mid-protocol carrier needs four qubits");
    }
    auto first = qsim::bell_measure(recombined, 0, 1, rng);
    auto second = qsim::bell_measure(first.state, 2, 3, rng);
    return {first.label, second.label};
}

// ------------------------------------------------------------------ BB84

BB84RoundState bb84_prepare(int alice_bit, int split_flag) {
    if ((alice_bit != 0 && alice_bit != 1) || (split_flag != 0 && split_flag != 1)) {
        throw std::invalid_argument("BB84 bit and flag must be 0 or 1");
    }
    StateVector photon = qsim::StateVector::basis_state(1, static_cast<uint64_t>(alice_bit));
    if (split_flag == 1) {
        photon = qsim::rotate_45(photon, 0, qsim::Rotation::Forward);
    }
    return BB84RoundState{alice_bit, split_flag, std::move(photon), std::nullopt, std::nullopt, true};
}

BB84RoundState bb84_prepare_and_split(Rng &rng) {
    int bit = rng.bit();
    int flag = rng.bit();
    return bb84_prepare(bit, flag);
}

SplitParts bb84_split(const BB84RoundState &state) {
    return {QuantumPart{{0}}, ClassicalPart{state.split_flag}};
}

int bb84_delayed_recover(const StateVector &photon, int split_flag, Rng &rng, int position) {
    StateVector s = split_flag == 1 ? qsim::rotate_45(photon, position, qsim::Rotation::Inverse) : photon;
    return qsim::measure_polarization(s, position, qsim::Basis::Rect, rng).bit;
}

int bb84_guess_measure(const StateVector &photon, qsim::Basis guess, Rng &rng, int position) {
    return bb84_delayed_recover(photon, guess == qsim::Basis::Diag ? 1 : 0, rng, position);
}

OriginalOutcome bb84_original_round(Rng &rng) {
    auto outcome = run_round(ProtocolId::Bb84Original, rng, nullptr);
    return {outcome.alice_bits[0], outcome.bob_bits[0], outcome.retained};
}

// ------------------------------------------------------------ two-step EPR

TwoStepRoundState two_step_prepare(BellLabel label) {
    return {label, qsim::make_bell(label)};
}

TwoStepRoundState two_step_alice_prepare(Rng &rng) {
    int high = rng.bit();
    int low = rng.bit();
    return two_step_prepare(encode_bits_to_bell(high, low));
}

SplitParts two_step_split(const TwoStepRoundState &) {
    return {QuantumPart{{0}}, QuantumPart{{1}}};
}

TwoStepOutcome two_step_epr_round(Rng &rng) {
    auto outcome = run_round(ProtocolId::TwoStepEpr, rng, nullptr);
    return {{outcome.alice_bits[0], outcome.alice_bits[1]}, {outcome.bob_bits[0], outcome.bob_bits[1]}};
}

// ------------------------------------------------------- generic round driver

namespace {

std::string bit_text(int bit) {
    return bit ? "1" : "0";
}

/// Carries both parts through the schedule, pausing for the observer while
/// each one is in flight. `on_stored` runs while part 1 sits in Bob's ring.
template <typename OnStored>
void transmit(ProtocolId protocol, RoundSchedule &schedule, StateVector carrier, SplitParts parts, Rng &rng,
              PhaseObserver *observer, OnStored on_stored) {
    schedule.begin_round(std::move(carrier), std::move(parts.first), std::move(parts.second));
    if (observer != nullptr) {
        observer->on_phase1(protocol, schedule, rng);
    }
    schedule.advance();
    on_stored(schedule);
    schedule.advance();
    if (observer != nullptr) {
        observer->on_phase2(protocol, schedule, rng);
    }
    schedule.advance();
}

std::optional<int> delivered_classical_bit(const RoundSchedule &schedule) {
    const auto *c = std::get_if<ClassicalPart>(&schedule.receiver_part(2));
    if (c == nullptr || (c->bit != 0 && c->bit != 1)) {
        return std::nullopt;
    }
    return c->bit;
}

}  // namespace

RoundOutcome run_round(ProtocolId protocol, Rng &rng, PhaseObserver *observer) {
    RoundOutcome out;
    out.protocol = protocol;
    RoundSchedule schedule;
    auto nothing = [](RoundSchedule &) {};

    switch (protocol) {
        case ProtocolId::Mid: {
            auto state = mid_alice_prepare(rng);
            out.alice_bits = state.alice_bits();
            out.details = {{"labels", std::string(qsim::to_string(state.alice_labels[0])) + "," +
                                          std::string(qsim::to_string(state.alice_labels[1]))},
                           {"flag", bit_text(state.rearrange_flag)}};
            transmit(protocol, schedule, state.carrier, mid_split(state), rng, observer, nothing);
            auto bit = delivered_classical_bit(schedule);
            if (!bit) {
                out.discarded = true;
                break;
            }
            auto labels = mid_bob_measure(mid_bob_recombine(schedule.receiver_register(), *bit), rng);
            auto a = decode_bell_to_bits(labels[0]);
            auto b = decode_bell_to_bits(labels[1]);
            out.bob_bits = {a[0], a[1], b[0], b[1]};
            break;
        }
        case ProtocolId::Bb84Delayed:
        case ProtocolId::Bb84Original: {
            auto state = bb84_prepare_and_split(rng);
            out.alice_bits = {state.alice_bit};
            out.details = {{"flag", bit_text(state.split_flag)}};
            std::optional<int> early_bit;
            qsim::Basis guess = qsim::Basis::Rect;
            auto bob_guesses = [&](RoundSchedule &s) {
                if (protocol != ProtocolId::Bb84Original) {
                    return;
                }
                guess = rng.bit() ? qsim::Basis::Diag : qsim::Basis::Rect;
                StateVector reg = s.receiver_register();
                StateVector measured = guess == qsim::Basis::Diag
                                           ? qsim::rotate_45(reg, 0, qsim::Rotation::Inverse)
                                           : reg;
                auto m = qsim::measure_polarization(measured, 0, qsim::Basis::Rect, rng);
                early_bit = m.bit;
                s.receiver_update(m.state);
            };
            transmit(protocol, schedule, state.photon, bb84_split(state), rng, observer, bob_guesses);
            auto bit = delivered_classical_bit(schedule);
            if (!bit) {
                out.discarded = true;
                break;
            }
            if (protocol == ProtocolId::Bb84Original) {
                out.bob_bits = {*early_bit};
                out.retained = (guess == qsim::Basis::Diag ? 1 : 0) == *bit;
                out.details.emplace_back("bob_basis", std::string(qsim::to_string(guess)));
            } else {
                out.bob_bits = {bb84_delayed_recover(schedule.receiver_register(), *bit, rng)};
            }
            break;
        }
        case ProtocolId::TwoStepEpr: {
            auto state = two_step_alice_prepare(rng);
            auto bits = decode_bell_to_bits(state.label);
            out.alice_bits = {bits[0], bits[1]};
            out.details = {{"labels", std::string(qsim::to_string(state.label))}};
            transmit(protocol, schedule, state.pair, two_step_split(state), rng, observer, nothing);
            auto label = qsim::bell_measure(schedule.receiver_register(), 0, 1, rng).label;
            auto bob = decode_bell_to_bits(label);
            out.bob_bits = {bob[0], bob[1]};
            break;
        }
    }
    out.phases = schedule.phase_history();
    return out;
}

}  // namespace qkdlab::protocols
