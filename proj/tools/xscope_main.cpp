/*
   Copyright 2026 The Xscope Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xscope/monitor.hpp"
#include "xscope/properties.hpp"
#include "xscope/report.hpp"
#include "xscope/simulator.hpp"
#include "xscope/version.hpp"
#include "xscope/wire.hpp"

namespace {

using namespace xscope;

constexpr int kExitClean = 0;
constexpr int kExitViolations = 1;
constexpr int kExitInputError = 2;

struct AnalyzeArgs {
    std::vector<std::string> trace_files;
    std::vector<std::string> action_logs;
    std::string config_path;
    std::string matching;
    std::string format = "table";
    std::string bug;
    std::string sort = "block";
    std::string address;
    std::string tx;
    std::optional<std::uint64_t> from_block;
    std::optional<std::uint64_t> to_block;
    std::uint64_t cluster_gap = kDefaultClusterGap;
    bool lenient = false;
};

int run_analyze(const AnalyzeArgs& args) {
    BridgeConfig cfg;
    std::vector<RawRecord> records;
    const Strictness strictness = args.lenient ? Strictness::kLenient : Strictness::kStrict;
    std::vector<std::string> warnings;
    try {
        cfg = load_config(args.config_path);
        if (!args.matching.empty()) {
            cfg.matching_mode = parse_matching_mode(args.matching);
        }
        for (const std::string& path : args.trace_files) {
            std::vector<RawRecord> batch = read_trace_file(path, strictness, &warnings);
            for (RawRecord& rec : batch) records.push_back(std::move(rec));
        }
        for (const std::string& path : args.action_logs) {
            std::vector<RawRecord> batch = adaptor_pull(path, strictness, &warnings);
            for (RawRecord& rec : batch) records.push_back(std::move(rec));
        }
        records = validate_native_symbols(std::move(records), cfg, strictness, &warnings);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    for (const std::string& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }

    try {
        FilterResult filtered = apply_address_filters(std::move(records), cfg);
        if (filtered.dropped > 0) {
            std::cerr << "filtered " << filtered.dropped << " record(s) by address filter" << '\n';
        }
        canonicalize_records(filtered.records);
        const std::string digest = records_digest(filtered.records);
        const Dataset dataset = make_dataset(filtered.records, cfg);
        const std::vector<Violation> violations = check_all(dataset, cfg, cfg.matching_mode);

        RenderOptions options;
        options.sort = parse_sort_key(args.sort);
        options.format = parse_report_format(args.format);
        options.cluster_gap = args.cluster_gap;
        if (!args.bug.empty()) options.bug = parse_bug(args.bug);
        if (!args.address.empty()) options.address = args.address;
        if (!args.tx.empty()) options.tx = args.tx;
        options.from_block = args.from_block;
        options.to_block = args.to_block;

        const Report full = build_report(violations, digest, args.cluster_gap);
        const Report view = report_filter_sort(full, options);
        std::cout << render_report(view, options.format);
        return violations.empty() ? kExitClean : kExitViolations;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

// One monitor request: v1 record lines, optionally preceded by "#id <tag>",
// terminated by a blank line (or end of stream).
std::optional<MonitorRequest> read_request(std::istream& in) {
    MonitorRequest request;
    std::string line;
    bool saw_any = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            if (saw_any) return request;
            continue;
        }
        if (line.rfind("#id ", 0) == 0) {
            request.id = line.substr(4);
            saw_any = true;
            continue;
        }
        if (line[0] == '#') continue;
        saw_any = true;
        RawRecord rec = decode_record(line);
        rec.ordinal = request.records.size();
        request.records.push_back(std::move(rec));
    }
    return saw_any ? std::optional<MonitorRequest>{request} : std::nullopt;
}

int run_monitor(const std::string& config_path, const std::string& matching, const std::string& log_path,
                const std::string& replay_path) {
    BridgeConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!matching.empty()) cfg.matching_mode = parse_matching_mode(matching);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    if (!replay_path.empty()) {
        // Verify that re-screening the logged requests reproduces every
        // logged decision bit-exactly.
        std::ifstream in{replay_path};
        if (!in) {
            std::cerr << "error: cannot open decision log " << replay_path << '\n';
            return kExitInputError;
        }
        Monitor monitor{cfg, cfg.matching_mode};
        std::string line;
        std::size_t line_no = 0;
        std::size_t mismatches = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            nlohmann::json logged;
            try {
                logged = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "error: log line " << line_no << ": " << e.what() << '\n';
                return kExitInputError;
            }
            MonitorRequest request;
            request.id = logged.value("id", std::string{});
            for (const auto& rec_line : logged.at("request")) {
                RawRecord rec = decode_record(rec_line.get<std::string>());
                rec.ordinal = request.records.size();
                request.records.push_back(std::move(rec));
            }
            const LoggedDecision redecided = monitor.handle(request);
            if (logged_decision_to_json(redecided) != logged) {
                ++mismatches;
                std::cerr << "mismatch at log line " << line_no << '\n';
            }
        }
        std::cout << "replayed " << line_no << " decision(s), " << mismatches << " mismatch(es)" << '\n';
        return mismatches == 0 ? kExitClean : kExitViolations;
    }

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path, std::ios::binary | std::ios::trunc);
        if (!log) {
            std::cerr << "error: cannot open decision log " << log_path << '\n';
            return kExitInputError;
        }
    }

    Monitor monitor{cfg, cfg.matching_mode};
    while (true) {
        std::optional<MonitorRequest> request;
        try {
            request = read_request(std::cin);
        } catch (const Error& e) {
            // Unparseable request: fail closed, keep serving.
            nlohmann::json response;
            response["verdict"] = "Abort";
            response["error"] = e.what();
            response["violations"] = nlohmann::json::array();
            std::cout << response.dump() << std::endl;
            continue;
        }
        if (!request) break;
        const LoggedDecision decision = monitor.handle(*request);
        nlohmann::json response = logged_decision_to_json(decision);
        response.erase("request");
        response["latency_us"] = monitor.last_latency().count();
        std::cout << response.dump() << std::endl;
        if (log) {
            log << logged_decision_to_json(decision).dump() << '\n';
            log.flush();
        }
    }
    return kExitClean;
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir) {
    try {
        const ScenarioSpec spec = load_scenario(scenario_path);
        const LabeledDataset dataset = gen_dataset(spec);
        const DatasetFiles files = write_dataset(dataset, out_dir);
        std::map<std::string, std::size_t> per_class;
        for (const auto& [key, label] : dataset.labels) {
            ++per_class[std::string(bug_name(label.bug))];
        }
        std::cout << "sequences: " << dataset.labels.size() + dataset.benign_keys.size() << " ("
                  << dataset.benign_keys.size() << " benign";
        for (const auto& [bug, count] : per_class) {
            std::cout << ", " << count << " " << bug;
        }
        std::cout << ")\nrecords: " << dataset.records.size() << '\n';
        for (const auto& path : files.trace_files) {
            std::cout << "wrote " << path.string() << '\n';
        }
        std::cout << "wrote " << files.action_log.string() << '\n';
        std::cout << "wrote " << files.manifest.string() << '\n';
        std::cout << "wrote " << files.config.string() << '\n';
        return kExitClean;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-chain bridge security analyzer", "xscope"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Offline forensics over trace files");
    analyze->add_option("traces", analyze_args.trace_files, "v1 trace files")->required();
    analyze->add_option("--actions", analyze_args.action_logs, "relayer action logs");
    analyze->add_option("--config", analyze_args.config_path, "bridge config file")
        ->envname(std::string(kConfigEnvVar))
        ->required();
    analyze->add_option("--matching", analyze_args.matching, "matching mode: injective|paper-literal");
    analyze->add_option("--format", analyze_args.format, "output format: table|jsonl");
    analyze->add_option("--bug", analyze_args.bug, "filter: bug class UDE|IEP|UU");
    analyze->add_option("--from-block", analyze_args.from_block, "filter: minimum block");
    analyze->add_option("--to-block", analyze_args.to_block, "filter: maximum block");
    analyze->add_option("--address", analyze_args.address, "filter: participant address");
    analyze->add_option("--tx", analyze_args.tx, "filter: transaction hash");
    analyze->add_option("--sort", analyze_args.sort, "sort key: block|tx|bug");
    analyze->add_option("--cluster-gap", analyze_args.cluster_gap, "cluster gap in blocks");
    analyze->add_flag("--lenient", analyze_args.lenient, "skip malformed lines with warnings");

    std::string monitor_config, monitor_matching, monitor_log, monitor_replay;
    CLI::App* monitor = app.add_subcommand("monitor", "Screen pending unlocks from standard input");
    monitor->add_option("--config", monitor_config, "bridge config file")
        ->envname(std::string(kConfigEnvVar))
        ->required();
    monitor->add_option("--matching", monitor_matching, "matching mode: injective|paper-literal");
    monitor->add_option("--log", monitor_log, "append decisions to this log file");
    monitor->add_option("--replay", monitor_replay, "verify decisions recorded in this log file");

    std::string scenario_path, out_dir;
    CLI::App* simulate = app.add_subcommand("simulate", "Generate a labeled ground-truth dataset");
    simulate->add_option("--scenario", scenario_path, "scenario spec file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitClean : kExitInputError;
    }

    try {
        if (analyze->parsed()) return run_analyze(analyze_args);
        if (monitor->parsed()) {
            return run_monitor(monitor_config, monitor_matching, monitor_log, monitor_replay);
        }
        if (simulate->parsed()) return run_simulate(scenario_path, out_dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
    return kExitClean;
}
