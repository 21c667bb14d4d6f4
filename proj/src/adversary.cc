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

#include <cmath>
#include <map>
#include <stdexcept>

namespace qkdlab::adversary {

using channel::AccessHandle;
using qsim::Basis;

namespace {

constexpr double kCertain = 1.0 - 1e-12;

Basis pick_basis(BasisPolicy policy, Rng &rng) {
    switch (policy) {
        case BasisPolicy::Rect:
            return Basis::Rect;
        case BasisPolicy::Diag:
            return Basis::Diag;
        case BasisPolicy::Uniform:
            break;
    }
    return rng.bit() ? Basis::Diag : Basis::Rect;
}

int pick_pairing(PairingPolicy policy, Rng &rng) {
    switch (policy) {
        case PairingPolicy::AsSent:
            return 0;
        case PairingPolicy::Swapped:
            return 1;
        case PairingPolicy::Uniform:
            break;
    }
    return rng.bit();
}

void require_positions(const AccessHandle &part, size_t count, std::string_view strategy) {
    if (!part.is_quantum() || part.positions().size() != count) {
        throw channel::ChannelError(std::string(strategy) + " needs an in-flight quantum part of " +
                                    std::to_string(count) + " qubit(s)");
    }
}

qsim::StateVector random_bell_pair(Rng &rng) {
    int high = rng.bit();
    int low = rng.bit();
    return qsim::make_bell(protocols::encode_bits_to_bell(high, low));
}

qsim::StateVector random_photon(Rng &rng) {
    static constexpr int kAngles[4] = {0, 45, 90, 135};
    return qsim::polarization_state(kAngles[rng.index(4)]);
}

class InterceptResend final : public Strategy {
   public:
    std::string_view id() const override {
        return "intercept-resend";
    }
    bool supports(ProtocolId p) const override {
        return p == ProtocolId::Bb84Delayed || p == ProtocolId::Bb84Original;
    }
    void on_phase1(ProtocolId, channel::RoundSchedule &schedule, Rng &rng) override {
        auto handle = schedule.adversary_access({1});
        record_ = intercept_resend_tap(handle, BasisPolicy::Uniform, rng);
    }
    void on_phase2(ProtocolId, channel::RoundSchedule &, Rng &) override {
    }
};

class BellPairing final : public Strategy {
   public:
    std::string_view id() const override {
        return "bell-pairing";
    }
    bool supports(ProtocolId p) const override {
        return p == ProtocolId::Mid;
    }
    void on_phase1(ProtocolId, channel::RoundSchedule &schedule, Rng &rng) override {
        auto handle = schedule.adversary_access({1});
        record_ = bell_pairing_tap(handle, PairingPolicy::Uniform, rng);
    }
    void on_phase2(ProtocolId, channel::RoundSchedule &, Rng &) override {
    }
};

class FirstPart final : public Strategy {
   public:
    std::string_view id() const override {
        return "first-part";
    }
    bool supports(ProtocolId p) const override {
        return p == ProtocolId::TwoStepEpr;
    }
    void on_phase1(ProtocolId, channel::RoundSchedule &schedule, Rng &rng) override {
        auto handle = schedule.adversary_access({1});
        record_ = first_part_measure_tap(handle, BasisPolicy::Uniform, rng);
    }
    void on_phase2(ProtocolId, channel::RoundSchedule &, Rng &) override {
    }
};

class FakeInjectionStrategy final : public Strategy {
   public:
    std::string_view id() const override {
        return "fake-injection";
    }
    bool supports(ProtocolId) const override {
        return true;
    }
    void on_phase1(ProtocolId protocol, channel::RoundSchedule &schedule, Rng &rng) override {
        auto handle = schedule.adversary_access({1});
        record_ = attack_.tap_first(protocol, handle, rng);
    }
    void on_phase2(ProtocolId protocol, channel::RoundSchedule &schedule, Rng &rng) override {
        auto handle = schedule.adversary_access({2});
        attack_.tap_second(protocol, handle, rng, *record_);
    }

   private:
    FakeInjection attack_;
};

}  // namespace

AttackRecord intercept_resend_tap(AccessHandle &photon, BasisPolicy policy, Rng &rng) {
    require_positions(photon, 1, "intercept-resend");
    Basis basis = pick_basis(policy, rng);
    auto outcome = photon.measure_polarization(photon.positions()[0], basis, rng);
    AttackRecord record;
    record.strategy = "intercept-resend";
    record.observations = {{"eve_basis", std::string(qsim::to_string(basis))},
                           {"eve_outcome", std::to_string(outcome.bit)}};
    record.inferred_bits = {outcome.bit};
    record.raw_observation = outcome.bit;
    record.disturbance_applied = outcome.probability < kCertain;
    return record;
}

AttackRecord bell_pairing_tap(AccessHandle &carrier, PairingPolicy policy, Rng &rng) {
    require_positions(carrier, 4, "bell-pairing");
    int guess = pick_pairing(policy, rng);
    const auto &p = carrier.positions();
    // Under a rearranged order [a1, a2, b1, b2] the pairs sit at (0,2), (1,3).
    auto first = guess ? carrier.bell_measure(p[0], p[2], rng) : carrier.bell_measure(p[0], p[1], rng);
    auto second = guess ? carrier.bell_measure(p[1], p[3], rng) : carrier.bell_measure(p[2], p[3], rng);
    auto a = protocols::decode_bell_to_bits(first.label);
    auto b = protocols::decode_bell_to_bits(second.label);
    AttackRecord record;
    record.strategy = "bell-pairing";
    record.observations = {{"eve_pairing", std::to_string(guess)},
                           {"eve_labels", std::string(qsim::to_string(first.label)) + "," +
                                              std::string(qsim::to_string(second.label))}};
    record.inferred_bits = {a[0], a[1], b[0], b[1]};
    record.raw_observation = static_cast<int>(first.label) * 4 + static_cast<int>(second.label);
    record.disturbance_applied = first.probability < kCertain || second.probability < kCertain;
    return record;
}

AttackRecord first_part_measure_tap(AccessHandle &particle, BasisPolicy policy, Rng &rng) {
    require_positions(particle, 1, "first-part");
    Basis basis = pick_basis(policy, rng);
    auto outcome = particle.measure_polarization(particle.positions()[0], basis, rng);
    int coin = rng.bit();
    AttackRecord record;
    record.strategy = "first-part";
    record.observations = {{"eve_basis", std::string(qsim::to_string(basis))},
                           {"eve_outcome", std::to_string(outcome.bit)}};
    record.inferred_bits = {outcome.bit, coin};
    record.raw_observation = outcome.bit;
    record.disturbance_applied = outcome.probability < kCertain;
    return record;
}

AttackRecord FakeInjection::tap_first(ProtocolId protocol, AccessHandle &part, Rng &rng) {
    AttackRecord record;
    record.strategy = "fake-injection";
    record.disturbance_applied = true;
    switch (protocol) {
        case ProtocolId::Mid: {
            require_positions(part, 4, "fake-injection");
            auto substitute = qsim::tensor(random_bell_pair(rng), random_bell_pair(rng));
            memory_ = part.attach(substitute);
            for (int k = 0; k < 4; k++) {
                part.exchange(part.positions()[k], memory_ + k);
            }
            break;
        }
        case ProtocolId::Bb84Delayed:
        case ProtocolId::Bb84Original: {
            require_positions(part, 1, "fake-injection");
            memory_ = part.attach(random_photon(rng));
            part.exchange(part.positions()[0], memory_);
            break;
        }
        case ProtocolId::TwoStepEpr: {
            require_positions(part, 1, "fake-injection");
            // The substitute pair's first particle goes on to Bob now; its
            // partner is swapped in for the genuine second particle later.
            memory_ = part.attach(random_bell_pair(rng));
            part.exchange(part.positions()[0], memory_);
            break;
        }
    }
    return record;
}

void FakeInjection::tap_second(ProtocolId protocol, AccessHandle &part, Rng &rng, AttackRecord &record) {
    if (memory_ < 0) {
        throw channel::ChannelError("fake-injection second tap without a stored first part");
    }
    switch (protocol) {
        case ProtocolId::Mid: {
            int flag = part.read_classical();
            auto first = flag ? part.bell_measure(memory_, memory_ + 2, rng) : part.bell_measure(memory_, memory_ + 1, rng);
            auto second =
                flag ? part.bell_measure(memory_ + 1, memory_ + 3, rng) : part.bell_measure(memory_ + 2, memory_ + 3, rng);
            auto a = protocols::decode_bell_to_bits(first.label);
            auto b = protocols::decode_bell_to_bits(second.label);
            record.inferred_bits = {a[0], a[1], b[0], b[1]};
            record.raw_observation = static_cast<int>(first.label) * 4 + static_cast<int>(second.label);
            record.observations.emplace_back("eve_flag", std::to_string(flag));
            break;
        }
        case ProtocolId::Bb84Delayed:
        case ProtocolId::Bb84Original: {
            int flag = part.read_classical();
            if (flag) {
                part.rotate_45(memory_, qsim::Rotation::Inverse);
            }
            auto outcome = part.measure_polarization(memory_, Basis::Rect, rng);
            record.inferred_bits = {outcome.bit};
            record.raw_observation = outcome.bit;
            record.observations.emplace_back("eve_flag", std::to_string(flag));
            break;
        }
        case ProtocolId::TwoStepEpr: {
            require_positions(part, 1, "fake-injection");
            part.exchange(part.positions()[0], memory_ + 1);
            auto outcome = part.bell_measure(memory_, memory_ + 1, rng);
            auto bits = protocols::decode_bell_to_bits(outcome.label);
            record.inferred_bits = {bits[0], bits[1]};
            record.raw_observation = static_cast<int>(outcome.label);
            break;
        }
    }
    record.observations.emplace_back(
        "eve_bits", [&] {
            std::string s;
            for (int b : record.inferred_bits) {
                s += b ? '1' : '0';
            }
            return s;
        }());
    memory_ = -1;
}

bool is_known_strategy(std::string_view id) {
    for (auto known : kStrategyIds) {
        if (known == id) {
            return true;
        }
    }
    return false;
}

std::unique_ptr<Strategy> make_strategy(std::string_view id) {
    if (id == "none") {
        return nullptr;
    }
    if (id == "intercept-resend") {
        return std::make_unique<InterceptResend>();
    }
    if (id == "bell-pairing") {
        return std::make_unique<BellPairing>();
    }
    if (id == "first-part") {
        return std::make_unique<FirstPart>();
    }
    if (id == "fake-injection") {
        return std::make_unique<FakeInjectionStrategy>();
    }
    throw std::invalid_argument("unknown attack strategy '" + std::string(id) + "'");
}

bool strategy_supports(std::string_view id, ProtocolId protocol) {
    auto strategy = make_strategy(id);
    return strategy == nullptr || strategy->supports(protocol);
}

double empirical_mutual_information(std::span<const std::pair<int, int>> samples) {
    if (samples.empty()) {
        return 0.0;
    }
    std::map<int, double> px, py;
    std::map<std::pair<int, int>, double> pxy;
    double n = static_cast<double>(samples.size());
    for (const auto &[x, y] : samples) {
        px[x] += 1.0 / n;
        py[y] += 1.0 / n;
        pxy[{x, y}] += 1.0 / n;
    }
    double info = 0;
    for (const auto &[xy, p] : pxy) {
        info += p * std::log2(p / (px[xy.first] * py[xy.second]));
    }
    return std::max(info, 0.0);
}

}  // namespace qkdlab::adversary
