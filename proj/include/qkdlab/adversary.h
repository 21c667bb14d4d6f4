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

#ifndef QKDLAB_ADVERSARY_H
#define QKDLAB_ADVERSARY_H

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdlab/channel.h"
#include "qkdlab/ids.h"
#include "qkdlab/protocols.h"

/// Eavesdropping strategies. Each one touches the round only through
/// RoundSchedule::adversary_access.
namespace qkdlab::adversary {

struct AttackRecord {
    std::string strategy;
    /// Flat key/value notes: Eve's guesses and measurement outcomes.
    std::vector<std::pair<std::string, std::string>> observations;
    /// Eve's estimate of Alice's key bits for the round.
    protocols::KeyBits inferred_bits;
    /// Eve's raw measurement result, packed as an integer (-1 if none).
    int raw_observation = -1;
    /// True when any of Eve's operations could have changed the state.
    bool disturbance_applied = false;
};

enum class BasisPolicy : uint8_t { Uniform, Rect, Diag };
enum class PairingPolicy : uint8_t { Uniform, AsSent, Swapped };

/// Measures the in-flight photon in a basis drawn from `policy` and lets
/// the collapsed photon continue.
AttackRecord intercept_resend_tap(channel::AccessHandle &photon, BasisPolicy policy, Rng &rng);

/// Bell-measures the four in-flight particles under a guessed pairing:
/// (0,1),(2,3) if she guesses the order was left alone, (0,2),(1,3) if she
/// guesses it was rearranged.
AttackRecord bell_pairing_tap(channel::AccessHandle &carrier, PairingPolicy policy, Rng &rng);

/// Measures the lone phase-1 particle of a two-step round. Eve's label
/// guess is (outcome, fair coin).
AttackRecord first_part_measure_tap(channel::AccessHandle &particle, BasisPolicy policy, Rng &rng);

/// Keeps the genuine first part in Eve's memory and forwards a uniformly
/// random substitute; on the second part she finishes Bob's procedure on
/// the genuine copy.
class FakeInjection {
   public:
    AttackRecord tap_first(ProtocolId protocol, channel::AccessHandle &part, Rng &rng);
    void tap_second(ProtocolId protocol, channel::AccessHandle &part, Rng &rng, AttackRecord &record);

   private:
    int memory_ = -1;
};

/// A pluggable adversary driven by the round's phase hooks.
class Strategy : public protocols::PhaseObserver {
   public:
    virtual std::string_view id() const = 0;
    virtual bool supports(ProtocolId protocol) const = 0;

    /// The record of the round just completed, if the strategy tapped it.
    std::optional<AttackRecord> take_record() {
        return std::exchange(record_, std::nullopt);
    }

   protected:
    std::optional<AttackRecord> record_;
};

inline constexpr std::array<std::string_view, 5> kStrategyIds = {
    "none", "intercept-resend", "bell-pairing", "first-part", "fake-injection"};

bool is_known_strategy(std::string_view id);

/// Null for "none"; throws std::invalid_argument for unknown ids.
std::unique_ptr<Strategy> make_strategy(std::string_view id);

/// Whether `id` can attack `protocol` ("none" attacks everything).
bool strategy_supports(std::string_view id, ProtocolId protocol);

/// Plug-in estimate, in bits, of I(X;Y) from paired samples.
double empirical_mutual_information(std::span<const std::pair<int, int>> samples);

}  // namespace qkdlab::adversary

#endif
