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

#include "qkdlab/cli.h"

#include <fstream>
#include <future>
#include <sstream>

#include "CLI11.hpp"
#include "qkdlab/adversary.h"
#include "qkdlab/harness.h"
#include "qkdlab/oracle.h"
#include "qkdlab/selftest.h"

namespace qkdlab::cli {

namespace {

struct RunOptions {
    std::string protocol = "mid";
    std::string attack = "none";
    long rounds = 1000;
    double check_fraction = harness::kDefaultCheckFraction;
    double threshold = harness::kDefaultThreshold;
    uint64_t seed = 0;
    std::string output = "text";
    std::string transcript;
    bool fail_on_detect = false;
    int repeat = 1;
};

std::vector<std::string> protocol_names() {
    std::vector<std::string> names;
    for (auto p : kAllProtocols) {
        names.emplace_back(to_string(p));
    }
    return names;
}

std::vector<std::string> attack_names() {
    return {adversary::kStrategyIds.begin(), adversary::kStrategyIds.end()};
}

std::string transcript_path(const std::string &base, int index, int repeat) {
    return repeat == 1 ? base : base + "." + std::to_string(index);
}

int run_sessions(const RunOptions &opts, std::ostream &out, std::ostream &err) {
    harness::SessionConfig config;
    config.protocol = *parse_protocol(opts.protocol);
    config.attack = opts.attack;
    config.rounds = opts.rounds;
    config.check_fraction = opts.check_fraction;
    config.threshold = opts.threshold;
    config.seed = opts.seed;
    try {
        harness::validate(config);
    } catch (const harness::ConfigError &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    // Independent sessions fan out; seeds are seed, seed+1, ...
    std::vector<std::future<harness::SessionResult>> pending;
    for (int i = 0; i < opts.repeat; i++) {
        harness::SessionConfig c = config;
        c.seed = config.seed + static_cast<uint64_t>(i);
        pending.push_back(std::async(opts.repeat > 1 ? std::launch::async : std::launch::deferred,
                                     [c] { return harness::run_session(c); }));
    }

    auto format = opts.output == "csv" ? harness::OutputFormat::Csv : harness::OutputFormat::Text;
    bool detected = false;
    for (int i = 0; i < opts.repeat; i++) {
        harness::SessionResult result;
        try {
            result = pending[i].get();
        } catch (const harness::EmptyCheckSetError &e) {
            err << "error: " << e.what() << "\n";
            return kExitConfigError;
        } catch (const harness::SessionAborted &e) {
            err << "aborted: " << e.what() << "\n";
            return kExitAborted;
        }
        detected = detected || result.stats.detected;

        std::ostringstream stats;
        harness::write_stats(stats, result.stats, format);
        if (format == harness::OutputFormat::Csv) {
            std::string text = stats.str();
            std::string header = text.substr(0, text.find('\n') + 1);
            std::string row = text.substr(header.size());
            if (i == 0) {
                out << "protocol,attack,seed," << header;
            }
            out << opts.protocol << "," << opts.attack << "," << result.config.seed << "," << row;
        } else {
            out << "protocol=" << opts.protocol << " attack=" << opts.attack << " seed=" << result.config.seed
                << " " << stats.str();
        }

        if (!opts.transcript.empty()) {
            std::string path = transcript_path(opts.transcript, i, opts.repeat);
            std::ofstream file(path, std::ios::binary);
            if (!file) {
                err << "error: cannot write transcript to " << path << "\n";
                return kExitConfigError;
            }
            harness::write_transcript(file, result);
        }
    }
    return detected && opts.fail_on_detect ? kExitDetected : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"qkdlab: exact simulator for information-splitting QKD protocols"};
    app.require_subcommand(1);

    RunOptions opts;
    auto *run = app.add_subcommand("run", "run a multi-round session and print statistics");
    run->add_option("--protocol", opts.protocol, "protocol id")
        ->check(CLI::IsMember(protocol_names()))
        ->capture_default_str();
    run->add_option("--attack", opts.attack, "adversary strategy id")
        ->check(CLI::IsMember(attack_names()))
        ->capture_default_str();
    run->add_option("--rounds", opts.rounds, "number of rounds")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--check-fraction", opts.check_fraction, "fraction of sifted bits compared publicly")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run->add_option("--threshold", opts.threshold, "detection fires when the check QBER exceeds this")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    run->add_option("--seed", opts.seed, "session seed")->envname("QKDLAB_SEED")->capture_default_str();
    run->add_option("--output", opts.output, "statistics format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    run->add_option("--transcript", opts.transcript, "write the round transcript to this path");
    run->add_flag("--fail-on-detect", opts.fail_on_detect, "exit 2 when eavesdropping is detected");
    run->add_option("--repeat", opts.repeat, "independent sessions with consecutive seeds")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();

    auto *oracle_cmd = app.add_subcommand("oracle", "print exact reference values");
    auto *selftest_cmd = app.add_subcommand("selftest", "run the invariant suite");

    std::vector<std::string> argv_storage;
    argv_storage.emplace_back("qkdlab");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : argv_storage) {
        argv.push_back(a.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfigError;
    }

    if (run->parsed()) {
        return run_sessions(opts, out, err);
    }
    if (oracle_cmd->parsed()) {
        oracle::write_report(out);
        return kExitOk;
    }
    if (selftest_cmd->parsed()) {
        return selftest::run_invariant_suite(out) ? kExitOk : kExitSelftestFailed;
    }
    return kExitConfigError;
}

}  // namespace qkdlab::cli
