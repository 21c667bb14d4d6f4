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

#ifndef QKDLAB_CHANNEL_H
#define QKDLAB_CHANNEL_H

#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "qkdlab/qsim.h"

/// Two-part, two-phase transmission through storage rings.
///
/// Part 1 crosses the insecure channel while part 2 waits in Alice's ring;
/// then part 1 waits in Bob's ring while part 2 crosses. The adversary can
/// only ever touch the part that is currently in flight.
namespace qkdlab::channel {

enum class Phase : uint8_t { Idle, Phase1InFlight, Phase1Stored, Phase2InFlight, Delivered };

std::string_view to_string(Phase phase);

struct QuantumPart {
    /// Positions in the round's register that travel together.
    std::vector<int> positions;
};

struct ClassicalPart {
    int bit;
};

using Part = std::variant<QuantumPart, ClassicalPart>;

struct ChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised whenever a request names a part that is not in flight, which
/// includes every request for both parts at once.
struct SimultaneousAccessViolation : ChannelError {
    using ChannelError::ChannelError;
};

enum class Accessor : uint8_t { Adversary };

struct AccessLogEntry {
    Phase phase;
    Accessor accessor;
    int part;

    bool operator==(const AccessLogEntry &) const = default;
};

class RoundSchedule;

/// Read/transform rights over exactly the in-flight part, plus whatever
/// qubits the adversary has attached as her own memory. Only valid during
/// the phase it was granted in.
class AccessHandle {
   public:
    int part_index() const {
        return part_;
    }
    bool is_quantum() const;
    const std::vector<int> &positions() const;
    int read_classical() const;

    qsim::BellOutcome bell_measure(int first, int second, Rng &rng);
    qsim::BitOutcome measure_polarization(int position, qsim::Basis basis, Rng &rng);
    void rotate_45(int position, qsim::Rotation direction);

    /// Appends `ancilla` to the register as adversary-held memory; returns
    /// the position of its first qubit.
    int attach(const qsim::StateVector &ancilla);

    /// Swaps an in-flight qubit with one of the adversary's memory qubits.
    void exchange(int in_flight_position, int memory_position);

    /// Number of qubits currently in the round's register.
    int register_size() const;

   private:
    friend class RoundSchedule;
    AccessHandle(RoundSchedule &schedule, int part, Phase granted) : schedule_(&schedule), part_(part), granted_(granted) {
    }

    void check_live() const;
    void check_reachable(int position) const;

    RoundSchedule *schedule_;
    int part_;
    Phase granted_;
};

class RoundSchedule {
   public:
    RoundSchedule() = default;

    /// Loads a round: `carrier` is the quantum register the quantum parts
    /// refer to. Requires phase Idle; leaves the schedule in Phase1InFlight.
    void begin_round(qsim::StateVector carrier, Part part1, Part part2);

    /// Moves to the next phase. Throws ChannelError past Delivered.
    void advance();

    /// Throws SimultaneousAccessViolation unless `requested` is exactly the
    /// index of the in-flight part.
    AccessHandle adversary_access(std::span<const int> requested);
    AccessHandle adversary_access(std::initializer_list<int> requested) {
        return adversary_access(std::span<const int>(requested.begin(), requested.size()));
    }

    Phase phase() const {
        return phase_;
    }
    const std::vector<AccessLogEntry> &access_log() const {
        return log_;
    }
    const std::vector<Phase> &phase_history() const {
        return history_;
    }

    /// Receiver-side reads. Part 1 is readable once stored in Bob's ring,
    /// part 2 only after delivery.
    bool receiver_can_read(int part) const;
    const Part &receiver_part(int part) const;

    /// Register as seen by the receiver; needs part 1 to have arrived.
    const qsim::StateVector &receiver_register() const;
    void receiver_update(qsim::StateVector state);

    /// Positions the adversary has attached as her own memory.
    const std::vector<int> &adversary_memory() const {
        return memory_;
    }

   private:
    friend class AccessHandle;

    const Part &part(int index) const {
        return index == 1 ? *part1_ : *part2_;
    }
    std::optional<int> in_flight_part() const;

    Phase phase_ = Phase::Idle;
    std::optional<qsim::StateVector> register_;
    std::optional<Part> part1_;
    std::optional<Part> part2_;
    std::vector<int> memory_;
    std::vector<AccessLogEntry> log_;
    std::vector<Phase> history_ = {Phase::Idle};
};

}  // namespace qkdlab::channel

#endif
