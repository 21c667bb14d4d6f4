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

#ifndef QKDLAB_PROTOCOLS_H
#define QKDLAB_PROTOCOLS_H

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkdlab/channel.h"
#include "qkdlab/ids.h"
#include "qkdlab/qsim.h"

namespace qkdlab::protocols {

using qsim::BellLabel;
using KeyBits = std::vector<int>;

/// 00 -> PhiPlus, 01 -> PhiMinus, 10 -> PsiPlus, 11 -> PsiMinus.
BellLabel encode_bits_to_bell(int high, int low);
std::array<int, 2> decode_bell_to_bits(BellLabel label);

/// The quantum part travels first, the second part follows.
struct SplitParts {
    channel::Part first;
    channel::Part second;
};

// ------------------------------------------------------------------ mid

struct MidRoundState {
    std::array<BellLabel, 2> alice_labels;
    int rearrange_flag;
    /// [a1, b1, a2, b2], or [a1, a2, b1, b2] when the flag is 1.
    qsim::StateVector carrier;
    std::optional<std::array<BellLabel, 2>> bob_labels;

    KeyBits alice_bits() const;
};

MidRoundState mid_prepare(BellLabel first, BellLabel second, int rearrange_flag);
MidRoundState mid_alice_prepare(Rng &rng);
SplitParts mid_split(const MidRoundState &state);

/// Swaps positions 1 and 2 when classical_bit is 1. Works on any register
/// of at least four qubits; positions 0..3 are the carrier.
qsim::StateVector mid_bob_recombine(const qsim::StateVector &carrier, int classical_bit);

/// Bell measurements on (0,1) then (2,3).
std::array<BellLabel, 2> mid_bob_measure(const qsim::StateVector &recombined, Rng &rng);

// ------------------------------------------------------------------ BB84

struct BB84RoundState {
    int alice_bit;
    /// 1 means the photon was rotated into the diagonal basis.
    int split_flag;
    qsim::StateVector photon;
    std::optional<qsim::Basis> bob_basis;
    std::optional<int> bob_bit;
    bool retained = true;
};

BB84RoundState bb84_prepare(int alice_bit, int split_flag);
BB84RoundState bb84_prepare_and_split(Rng &rng);
SplitParts bb84_split(const BB84RoundState &state);

/// Undoes the rotation iff split_flag is 1, then measures rectilinearly.
int bb84_delayed_recover(const qsim::StateVector &photon, int split_flag, Rng &rng, int position = 0);

/// Bob's early measurement in original BB84: he guesses the split flag
/// (Diag = 1) before it arrives and runs the delayed procedure on the guess.
int bb84_guess_measure(const qsim::StateVector &photon, qsim::Basis guess, Rng &rng, int position = 0);

struct OriginalOutcome {
    int alice_bit;
    int bob_bit;
    bool retained;
};

/// One honest original-BB84 round through the channel.
OriginalOutcome bb84_original_round(Rng &rng);

// ------------------------------------------------------------ two-step EPR

struct TwoStepRoundState {
    BellLabel label;
    qsim::StateVector pair;
};

TwoStepRoundState two_step_prepare(BellLabel label);
TwoStepRoundState two_step_alice_prepare(Rng &rng);
/// Particle 0 in phase 1, particle 1 in phase 2.
SplitParts two_step_split(const TwoStepRoundState &state);

struct TwoStepOutcome {
    std::array<int, 2> alice_bits;
    std::array<int, 2> bob_bits;
};

/// One honest two-step EPR round through the channel.
TwoStepOutcome two_step_epr_round(Rng &rng);

// ------------------------------------------------------- generic round driver

/// Hook points an adversary uses while a part is in flight.
class PhaseObserver {
   public:
    virtual ~PhaseObserver() = default;
    virtual void on_phase1(ProtocolId protocol, channel::RoundSchedule &schedule, Rng &rng) = 0;
    virtual void on_phase2(ProtocolId protocol, channel::RoundSchedule &schedule, Rng &rng) = 0;
};

struct RoundOutcome {
    ProtocolId protocol;
    KeyBits alice_bits;
    /// Empty when the round was discarded.
    KeyBits bob_bits;
    /// Original BB84 sifting; always true elsewhere.
    bool retained = true;
    /// Set when the classical part arrived malformed; the round is dropped.
    bool discarded = false;
    /// Flat key/value description of Alice's and Bob's choices.
    std::vector<std::pair<std::string, std::string>> details;
    std::vector<channel::Phase> phases;
};

/// Runs one round of `protocol` through a fresh RoundSchedule. `observer`
/// may be null for an honest round.
RoundOutcome run_round(ProtocolId protocol, Rng &rng, PhaseObserver *observer);

}  // namespace qkdlab::protocols

#endif
