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

#ifndef QKDLAB_HARNESS_H
#define QKDLAB_HARNESS_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qkdlab/adversary.h"
#include "qkdlab/ids.h"
#include "qkdlab/protocols.h"

/// Multi-round sessions: sifting, check-subsequence comparison, detection,
/// and line-oriented transcripts.
namespace qkdlab::harness {

inline constexpr double kDefaultCheckFraction = 0.25;
inline constexpr double kDefaultThreshold = 0.0;

struct SessionConfig {
    ProtocolId protocol = ProtocolId::Mid;
    std::string attack = "none";
    long rounds = 1000;
    double check_fraction = kDefaultCheckFraction;
    double threshold = kDefaultThreshold;
    uint64_t seed = 0;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// check_fraction * sifted bits rounds down to zero.
struct EmptyCheckSetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A strategy broke the channel's access rules; the session stops.
struct SessionAborted : std::runtime_error {
    SessionAborted(long round, const std::string &what)
        : std::runtime_error("session aborted in round " + std::to_string(round) + ": " + what), round(round) {
    }
    long round;
};

struct RoundRecord {
    long index = 0;
    ProtocolId protocol = ProtocolId::Mid;
    protocols::KeyBits alice_bits;
    std::vector<std::pair<std::string, std::string>> details;
    std::optional<adversary::AttackRecord> attack;
    protocols::KeyBits bob_bits;
    bool retained = true;
    bool discarded = false;
    /// One flag per key bit of the round; set for bits sacrificed to the check.
    std::vector<bool> check;

    bool sifted() const {
        return retained && !discarded;
    }
};

struct SessionStats {
    long rounds = 0;
    long sifted_bits = 0;
    long check_bits = 0;
    long check_errors = 0;
    long key_bits = 0;
    long discarded_rounds = 0;
    double qber_check = 0;
    bool detected = false;
    /// Fraction of non-check sifted bits on which Alice and Bob agree.
    double agreement = 1;
    std::optional<double> adversary_bit_accuracy;
    std::optional<double> adversary_unit_accuracy;
    std::optional<double> adversary_mutual_information;
};

struct SessionResult {
    SessionConfig config;
    SessionStats stats;
    std::vector<RoundRecord> records;
    protocols::KeyBits alice_key;
    protocols::KeyBits bob_key;
};

/// Throws ConfigError for out-of-range numbers, unknown attacks, or an
/// attack that does not apply to the protocol.
void validate(const SessionConfig &config);

/// Runs config.rounds rounds. `strategy` overrides config.attack when given.
SessionResult run_session(const SessionConfig &config, adversary::Strategy *strategy = nullptr);

struct BitRef {
    size_t record;
    int bit;

    bool operator==(const BitRef &) const = default;
};

/// Every key bit of the sifted rounds, in round order.
std::vector<BitRef> sifted_bits(const std::vector<RoundRecord> &records);

/// floor(check_fraction * |sifted|) bits drawn uniformly without
/// replacement from a stream derived from `seed`, in ascending order.
std::vector<BitRef> select_check_bits(const std::vector<RoundRecord> &records, double check_fraction, uint64_t seed);

/// Mismatch fraction over the selected check bits.
double estimate_qber(const std::vector<RoundRecord> &records, double check_fraction, uint64_t seed);

/// Strictly greater: a zero threshold tolerates no error at all.
bool decide_detection(double qber, double threshold);

/// Error correction and privacy amplification are not modeled; this is an
/// identity pass kept as an explicit stage of the pipeline.
protocols::KeyBits postprocess_stub(protocols::KeyBits key);

enum class OutputFormat { Text, Csv };

void write_transcript(std::ostream &out, const SessionResult &result);
void write_stats(std::ostream &out, const SessionStats &stats, OutputFormat format);

}  // namespace qkdlab::harness

#endif
