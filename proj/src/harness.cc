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

#include "qkdlab/harness.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace qkdlab::harness {

namespace {

constexpr uint64_t kSessionStream = 0;
constexpr uint64_t kCheckStream = 1;

std::string bits_text(const protocols::KeyBits &bits) {
    std::string s;
    for (int b : bits) {
        s += b ? '1' : '0';
    }
    return s;
}

std::string fraction_text(double value) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6) << value;
    return out.str();
}

std::string optional_fraction(const std::optional<double> &value) {
    return value ? fraction_text(*value) : "na";
}

int pack_bits(const protocols::KeyBits &bits) {
    int v = 0;
    for (int b : bits) {
        v = v * 2 + b;
    }
    return v;
}

}  // namespace

void validate(const SessionConfig &config) {
    if (config.rounds < 1) {
        throw ConfigError("rounds must be at least 1");
    }
    if (!(config.check_fraction > 0.0 && config.check_fraction < 1.0)) {
        throw ConfigError("check fraction must lie strictly between 0 and 1");
    }
    if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
        throw ConfigError("threshold must lie in [0, 1]");
    }
    if (!adversary::is_known_strategy(config.attack)) {
        throw ConfigError("unknown attack '" + config.attack + "'");
    }
    if (!adversary::strategy_supports(config.attack, config.protocol)) {
        throw ConfigError("attack '" + config.attack + "' does not apply to protocol '" +
                          std::string(to_string(config.protocol)) + "'");
    }
}

std::vector<BitRef> sifted_bits(const std::vector<RoundRecord> &records) {
    std::vector<BitRef> out;
    for (size_t r = 0; r < records.size(); r++) {
        if (!records[r].sifted()) {
            continue;
        }
        for (int b = 0; b < static_cast<int>(records[r].alice_bits.size()); b++) {
            out.push_back({r, b});
        }
    }
    return out;
}

std::vector<BitRef> select_check_bits(const std::vector<RoundRecord> &records, double check_fraction, uint64_t seed) {
    auto pool = sifted_bits(records);
    auto count = static_cast<size_t>(std::floor(check_fraction * static_cast<double>(pool.size()) + 1e-9));
    if (count == 0) {
        throw EmptyCheckSetError("check fraction " + fraction_text(check_fraction) + " of " +
                                 std::to_string(pool.size()) + " sifted bits selects nothing");
    }
    // Partial Fisher-Yates: the first `count` slots become the sample.
    Rng rng(seed, kCheckStream);
    for (size_t i = 0; i < count; i++) {
        size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end(), [](const BitRef &a, const BitRef &b) {
        return a.record != b.record ? a.record < b.record : a.bit < b.bit;
    });
    return pool;
}

double estimate_qber(const std::vector<RoundRecord> &records, double check_fraction, uint64_t seed) {
    auto checks = select_check_bits(records, check_fraction, seed);
    long errors = 0;
    for (const auto &ref : checks) {
        const auto &rec = records[ref.record];
        errors += rec.alice_bits[ref.bit] != rec.bob_bits[ref.bit];
    }
    return static_cast<double>(errors) / static_cast<double>(checks.size());
}

bool decide_detection(double qber, double threshold) {
    return qber > threshold;
}

protocols::KeyBits postprocess_stub(protocols::KeyBits key) {
    return key;
}

SessionResult run_session(const SessionConfig &config, adversary::Strategy *strategy) {
    std::unique_ptr<adversary::Strategy> owned;
    if (strategy == nullptr) {
        validate(config);
        owned = adversary::make_strategy(config.attack);
        strategy = owned.get();
    } else {
        SessionConfig checked = config;
        checked.attack = "none";
        validate(checked);
        if (!strategy->supports(config.protocol)) {
            throw ConfigError("strategy '" + std::string(strategy->id()) + "' does not apply to protocol '" +
                              std::string(to_string(config.protocol)) + "'");
        }
    }

    SessionResult result;
    result.config = config;
    if (strategy != nullptr && owned == nullptr) {
        result.config.attack = std::string(strategy->id());
    }
    Rng rng(config.seed, kSessionStream);
    result.records.reserve(static_cast<size_t>(config.rounds));

    for (long i = 0; i < config.rounds; i++) {
        protocols::RoundOutcome outcome;
        try {
            outcome = protocols::run_round(config.protocol, rng, strategy);
        } catch (const channel::SimultaneousAccessViolation &e) {
            throw SessionAborted(i, e.what());
        }
        RoundRecord rec;
        rec.index = i;
        rec.protocol = config.protocol;
        rec.alice_bits = std::move(outcome.alice_bits);
        rec.bob_bits = std::move(outcome.bob_bits);
        rec.details = std::move(outcome.details);
        rec.retained = outcome.retained;
        rec.discarded = outcome.discarded;
        rec.check.assign(rec.alice_bits.size(), false);
        if (strategy != nullptr) {
            rec.attack = strategy->take_record();
        }
        result.records.push_back(std::move(rec));
    }

    SessionStats &stats = result.stats;
    stats.rounds = config.rounds;
    auto sifted = sifted_bits(result.records);
    stats.sifted_bits = static_cast<long>(sifted.size());
    for (const auto &rec : result.records) {
        stats.discarded_rounds += rec.discarded;
    }

    auto checks = select_check_bits(result.records, config.check_fraction, config.seed);
    for (const auto &ref : checks) {
        auto &rec = result.records[ref.record];
        rec.check[ref.bit] = true;
        stats.check_errors += rec.alice_bits[ref.bit] != rec.bob_bits[ref.bit];
    }
    stats.check_bits = static_cast<long>(checks.size());
    stats.qber_check = static_cast<double>(stats.check_errors) / static_cast<double>(stats.check_bits);
    stats.detected = decide_detection(stats.qber_check, config.threshold);

    long agree = 0;
    for (const auto &ref : sifted) {
        const auto &rec = result.records[ref.record];
        if (rec.check[ref.bit]) {
            continue;
        }
        result.alice_key.push_back(rec.alice_bits[ref.bit]);
        result.bob_key.push_back(rec.bob_bits[ref.bit]);
        agree += rec.alice_bits[ref.bit] == rec.bob_bits[ref.bit];
    }
    stats.key_bits = static_cast<long>(result.alice_key.size());
    stats.agreement = stats.key_bits == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(stats.key_bits);
    result.alice_key = postprocess_stub(std::move(result.alice_key));
    result.bob_key = postprocess_stub(std::move(result.bob_key));

    // Eve's figures cover every tapped round, sifted or not.
    long eve_bits = 0, eve_right = 0, eve_rounds = 0, eve_rounds_right = 0;
    std::vector<std::pair<int, int>> observations;
    for (const auto &rec : result.records) {
        if (!rec.attack || rec.discarded || rec.attack->inferred_bits.size() != rec.alice_bits.size()) {
            continue;
        }
        long right = 0;
        for (size_t b = 0; b < rec.alice_bits.size(); b++) {
            right += rec.attack->inferred_bits[b] == rec.alice_bits[b];
        }
        eve_bits += static_cast<long>(rec.alice_bits.size());
        eve_right += right;
        eve_rounds++;
        eve_rounds_right += right == static_cast<long>(rec.alice_bits.size());
        observations.emplace_back(rec.attack->raw_observation, pack_bits(rec.alice_bits));
    }
    if (eve_rounds > 0) {
        stats.adversary_bit_accuracy = static_cast<double>(eve_right) / static_cast<double>(eve_bits);
        stats.adversary_unit_accuracy = static_cast<double>(eve_rounds_right) / static_cast<double>(eve_rounds);
        stats.adversary_mutual_information = adversary::empirical_mutual_information(observations);
    }
    return result;
}

void write_transcript(std::ostream &out, const SessionResult &result) {
    const auto &c = result.config;
    out << "# qkdlab transcript v1\n";
    out << "config protocol=" << to_string(c.protocol) << " attack=" << c.attack << " rounds=" << c.rounds
        << " check_fraction=" << fraction_text(c.check_fraction) << " threshold=" << fraction_text(c.threshold)
        << " seed=" << c.seed << " check_sampling=per-bit postprocessing=identity-stub\n";
    for (const auto &rec : result.records) {
        out << "round index=" << rec.index << " alice=" << bits_text(rec.alice_bits);
        for (const auto &[key, value] : rec.details) {
            out << " " << key << "=" << value;
        }
        out << " bob=" << (rec.bob_bits.empty() ? "none" : bits_text(rec.bob_bits))
            << " retained=" << rec.retained << " discarded=" << rec.discarded << " check=";
        for (bool flag : rec.check) {
            out << (flag ? '1' : '0');
        }
        if (rec.attack) {
            out << " attack=" << rec.attack->strategy;
            for (const auto &[key, value] : rec.attack->observations) {
                out << " " << key << "=" << value;
            }
            out << " eve_inferred=" << bits_text(rec.attack->inferred_bits)
                << " disturbed=" << rec.attack->disturbance_applied;
        }
        out << "\n";
    }
    out << "stats ";
    write_stats(out, result.stats, OutputFormat::Text);
}

void write_stats(std::ostream &out, const SessionStats &s, OutputFormat format) {
    const std::vector<std::pair<std::string, std::string>> fields = {
        {"rounds", std::to_string(s.rounds)},
        {"sifted_bits", std::to_string(s.sifted_bits)},
        {"check_bits", std::to_string(s.check_bits)},
        {"check_errors", std::to_string(s.check_errors)},
        {"key_bits", std::to_string(s.key_bits)},
        {"discarded_rounds", std::to_string(s.discarded_rounds)},
        {"qber_check", fraction_text(s.qber_check)},
        {"detected", s.detected ? "1" : "0"},
        {"agreement", fraction_text(s.agreement)},
        {"adversary_bit_accuracy", optional_fraction(s.adversary_bit_accuracy)},
        {"adversary_unit_accuracy", optional_fraction(s.adversary_unit_accuracy)},
        {"adversary_mutual_information", optional_fraction(s.adversary_mutual_information)},
    };
    if (format == OutputFormat::Csv) {
        for (size_t i = 0; i < fields.size(); i++) {
            out << (i ? "," : "") << fields[i].first;
        }
        out << "\n";
        for (size_t i = 0; i < fields.size(); i++) {
            out << (i ? "," : "") << fields[i].second;
        }
        out << "\n";
        return;
    }
    for (size_t i = 0; i < fields.size(); i++) {
        out << (i ? " " : "") << fields[i].first << "=" << fields[i].second;
    }
    out << "\n";
}

}  // namespace qkdlab::harness
