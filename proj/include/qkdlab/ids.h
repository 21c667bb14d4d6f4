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

#ifndef QKDLAB_IDS_H
#define QKDLAB_IDS_H

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace qkdlab {

enum class ProtocolId : uint8_t { Mid, Bb84Delayed, Bb84Original, TwoStepEpr };

inline constexpr std::array<ProtocolId, 4> kAllProtocols = {
    ProtocolId::Mid, ProtocolId::Bb84Delayed, ProtocolId::Bb84Original, ProtocolId::TwoStepEpr};

constexpr std::string_view to_string(ProtocolId id) {
    switch (id) {
        case ProtocolId::Mid:
            return "mid";
        case ProtocolId::Bb84Delayed:
            return "bb84-delayed";
        case ProtocolId::Bb84Original:
            return "bb84-original";
        case ProtocolId::TwoStepEpr:
            return "two-step-epr";
    }
    return "?";
}

constexpr std::optional<ProtocolId> parse_protocol(std::string_view text) {
    for (ProtocolId id : kAllProtocols) {
        if (to_string(id) == text) {
            return id;
        }
    }
    return std::nullopt;
}

/// Key bits contributed by one round before sifting.
constexpr int bits_per_round(ProtocolId id) {
    switch (id) {
        case ProtocolId::Mid:
            return 4;
        case ProtocolId::TwoStepEpr:
            return 2;
        default:
            return 1;
    }
}

}  // namespace qkdlab

#endif
