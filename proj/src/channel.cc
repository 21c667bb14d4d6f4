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

#include <algorithm>
#include <string>

namespace qkdlab::channel {

namespace {

void validate_part(const Part &part, int register_size, std::vector<bool> &used) {
    if (const auto *q = std::get_if<QuantumPart>(&part)) {
        if (q->positions.empty()) {
            throw ChannelError("quantum part carries no qubits");
        }
        for (int p : q->positions) {
            if (p < 0 || p >= register_size) {
                throw ChannelError("quantum part position " + std::to_string(p) + " outside the register");
            }
            if (used[p]) {
                throw ChannelError("qubit " + std::to_string(p) + " assigned to a part twice");
            }
            used[p] = true;
        }
    } else {
        int bit = std::get<ClassicalPart>(part).bit;
        if (bit != 0 && bit != 1) {
            throw ChannelError("classical part must be a single bit");
        }
    }
}

const std::vector<int> kNoPositions;

}  // namespace

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Idle:
            return "idle";
        case Phase::Phase1InFlight:
            return "phase1-in-flight";
        case Phase::Phase1Stored:
            return "phase1-stored";
        case Phase::Phase2InFlight:
            return "phase2-in-flight";
        case Phase::Delivered:
            return "delivered";
    }
    return "?";
}

// ---------------------------------------------------------------- RoundSchedule

void RoundSchedule::begin_round(qsim::StateVector carrier, Part part1, Part part2) {
    if (phase_ != Phase::Idle) {
        throw ChannelError("begin_round requires an idle schedule, found " + std::string(to_string(phase_)));
    }
    std::vector<bool> used(carrier.num_qubits(), false);
    validate_part(part1, carrier.num_qubits(), used);
    validate_part(part2, carrier.num_qubits(), used);
    register_ = std::move(carrier);
    part1_ = std::move(part1);
    part2_ = std::move(part2);
    phase_ = Phase::Phase1InFlight;
    history_.push_back(phase_);
}

void RoundSchedule::advance() {
    switch (phase_) {
        case Phase::Idle:
            throw ChannelError("advance on an idle schedule; call begin_round first");
        case Phase::Phase1InFlight:
            phase_ = Phase::Phase1Stored;
            break;
        case Phase::Phase1Stored:
            phase_ = Phase::Phase2InFlight;
            break;
        case Phase::Phase2InFlight:
            phase_ = Phase::Delivered;
            break;
        case Phase::Delivered:
            throw ChannelError("advance past Delivered");
    }
    history_.push_back(phase_);
}

std::optional<int> RoundSchedule::in_flight_part() const {
    if (phase_ == Phase::Phase1InFlight) {
        return 1;
    }
    if (phase_ == Phase::Phase2InFlight) {
        return 2;
    }
    return std::nullopt;
}

AccessHandle RoundSchedule::adversary_access(std::span<const int> requested) {
    if (requested.empty()) {
        throw ChannelError("adversary_access needs at least one part index");
    }
    for (int part : requested) {
        if (part != 1 && part != 2) {
            throw ChannelError("part index must be 1 or 2");
        }
    }
    bool both = std::find(requested.begin(), requested.end(), 1) != requested.end() &&
                std::find(requested.begin(), requested.end(), 2) != requested.end();
    if (both) {
        throw SimultaneousAccessViolation("both parts requested in " + std::string(to_string(phase_)));
    }
    auto flying = in_flight_part();
    if (!flying || requested.front() != *flying) {
        throw SimultaneousAccessViolation(
            "part " + std::to_string(requested.front()) + " is not in flight during " + std::string(to_string(phase_)));
    }
    log_.push_back({phase_, Accessor::Adversary, *flying});
    return AccessHandle(*this, *flying, phase_);
}

bool RoundSchedule::receiver_can_read(int part) const {
    if (part == 1) {
        return phase_ == Phase::Phase1Stored || phase_ == Phase::Phase2InFlight || phase_ == Phase::Delivered;
    }
    if (part == 2) {
        return phase_ == Phase::Delivered;
    }
    return false;
}

const Part &RoundSchedule::receiver_part(int index) const {
    if (!receiver_can_read(index)) {
        throw ChannelError(
            "part " + std::to_string(index) + " has not reached the receiver during " + std::string(to_string(phase_)));
    }
    return part(index);
}

const qsim::StateVector &RoundSchedule::receiver_register() const {
    if (!receiver_can_read(1)) {
        throw ChannelError("receiver has no quantum register before part 1 arrives");
    }
    return *register_;
}

void RoundSchedule::receiver_update(qsim::StateVector state) {
    if (!receiver_can_read(1)) {
        throw ChannelError("receiver cannot act before part 1 arrives");
    }
    if (state.num_qubits() != register_->num_qubits()) {
        throw ChannelError("receiver update changed the register size");
    }
    register_ = std::move(state);
}

// ---------------------------------------------------------------- AccessHandle

void AccessHandle::check_live() const {
    if (schedule_->phase_ != granted_) {
        throw ChannelError("access handle used outside the phase it was granted in");
    }
}

bool AccessHandle::is_quantum() const {
    return std::holds_alternative<QuantumPart>(schedule_->part(part_));
}

const std::vector<int> &AccessHandle::positions() const {
    if (const auto *q = std::get_if<QuantumPart>(&schedule_->part(part_))) {
        return q->positions;
    }
    return kNoPositions;
}

int AccessHandle::read_classical() const {
    check_live();
    const auto *c = std::get_if<ClassicalPart>(&schedule_->part(part_));
    if (c == nullptr) {
        throw ChannelError("in-flight part is quantum; it has no classical value to read");
    }
    return c->bit;
}

void AccessHandle::check_reachable(int position) const {
    check_live();
    const auto &flying = positions();
    const auto &memory = schedule_->memory_;
    if (std::find(flying.begin(), flying.end(), position) == flying.end() &&
        std::find(memory.begin(), memory.end(), position) == memory.end()) {
        throw SimultaneousAccessViolation("qubit " + std::to_string(position) + " is not in the adversary's reach");
    }
}

qsim::BellOutcome AccessHandle::bell_measure(int first, int second, Rng &rng) {
    check_reachable(first);
    check_reachable(second);
    auto outcome = qsim::bell_measure(*schedule_->register_, first, second, rng);
    schedule_->register_ = outcome.state;
    return outcome;
}

qsim::BitOutcome AccessHandle::measure_polarization(int position, qsim::Basis basis, Rng &rng) {
    check_reachable(position);
    auto outcome = qsim::measure_polarization(*schedule_->register_, position, basis, rng);
    schedule_->register_ = outcome.state;
    return outcome;
}

void AccessHandle::rotate_45(int position, qsim::Rotation direction) {
    check_reachable(position);
    schedule_->register_ = qsim::rotate_45(*schedule_->register_, position, direction);
}

int AccessHandle::attach(const qsim::StateVector &ancilla) {
    check_live();
    int first = schedule_->register_->num_qubits();
    schedule_->register_ = qsim::tensor(*schedule_->register_, ancilla);
    for (int k = 0; k < ancilla.num_qubits(); k++) {
        schedule_->memory_.push_back(first + k);
    }
    return first;
}

void AccessHandle::exchange(int in_flight_position, int memory_position) {
    check_live();
    const auto &flying = positions();
    const auto &memory = schedule_->memory_;
    if (std::find(flying.begin(), flying.end(), in_flight_position) == flying.end()) {
        throw SimultaneousAccessViolation("qubit " + std::to_string(in_flight_position) + " is not in flight");
    }
    if (std::find(memory.begin(), memory.end(), memory_position) == memory.end()) {
        throw ChannelError("qubit " + std::to_string(memory_position) + " is not adversary memory");
    }
    auto swap = qsim::QubitPermutation::swap(schedule_->register_->num_qubits(), in_flight_position, memory_position);
    schedule_->register_ = qsim::permute_qubits(*schedule_->register_, swap);
}

int AccessHandle::register_size() const {
    return schedule_->register_->num_qubits();
}

}  // namespace qkdlab::channel
