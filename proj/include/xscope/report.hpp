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

#pragma once

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xscope/properties.hpp"
#include "xscope/version.hpp"

// Report assembly and rendering: per-bug summaries, block-range clustering,
// and the filter/sort/search surface behind the CLI flags. Structured
// (jsonl) output is a stability surface: identical inputs and flags render
// byte-identically.

namespace xscope {

/// A maximal run of violations on one chain in which consecutive blocks are
/// at most `gap` apart.
struct ClusterRange {
    ChainId chain;
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::size_t count = 0;

    friend bool operator==(const ClusterRange&, const ClusterRange&) = default;
};

struct Report {
    std::vector<Violation> violations;
    std::map<std::string, std::size_t> summary;  // bug name → count
    std::vector<ClusterRange> clusters;
    std::string input_digest;
    std::string tool_version{kToolVersion};
};

inline constexpr std::uint64_t kDefaultClusterGap = 500;

/// Single-linkage clustering per chain: two violations share a cluster iff
/// they are connected by steps of block distance ≤ gap.
inline std::vector<ClusterRange> cluster_violations(const std::vector<Violation>& violations,
                                                    std::uint64_t gap) {
    std::map<ChainId, std::vector<std::uint64_t>> blocks_by_chain;
    for (const Violation& v : violations) {
        blocks_by_chain[v.chain].push_back(v.first_seen);
    }
    std::vector<ClusterRange> clusters;
    for (auto& [chain, blocks] : blocks_by_chain) {
        std::sort(blocks.begin(), blocks.end());
        ClusterRange current{chain, blocks.front(), blocks.front(), 1};
        for (std::size_t i = 1; i < blocks.size(); ++i) {
            if (blocks[i] - current.to_block <= gap) {
                current.to_block = blocks[i];
                ++current.count;
            } else {
                clusters.push_back(current);
                current = ClusterRange{chain, blocks[i], blocks[i], 1};
            }
        }
        clusters.push_back(current);
    }
    return clusters;
}

inline Report build_report(std::vector<Violation> violations, std::string input_digest,
                           std::uint64_t cluster_gap = kDefaultClusterGap) {
    Report report;
    report.violations = std::move(violations);
    report.input_digest = std::move(input_digest);
    for (const Violation& v : report.violations) {
        ++report.summary[std::string(bug_name(v.bug))];
    }
    report.clusters = cluster_violations(report.violations, cluster_gap);
    return report;
}

// ---------------------------------------------------------------------------
// Filtering, sorting, rendering

enum class SortKey { kBlock, kTx, kBug };
enum class ReportFormat { kTable, kJsonl };

struct RenderOptions {
    std::optional<BugClass> bug;
    std::optional<std::uint64_t> from_block;
    std::optional<std::uint64_t> to_block;
    std::optional<std::string> address;  // "chain:0x…" exact, or bare "0x…" on any chain
    std::optional<std::string> tx;       // 0x-hex, exact
    SortKey sort = SortKey::kBlock;
    ReportFormat format = ReportFormat::kTable;
    std::uint64_t cluster_gap = kDefaultClusterGap;
};

inline SortKey parse_sort_key(std::string_view text) {
    if (text == "block") return SortKey::kBlock;
    if (text == "tx") return SortKey::kTx;
    if (text == "bug") return SortKey::kBug;
    throw_error(Errc::kBadFlag, "unknown sort key \"" + std::string(text) + "\"");
}

inline ReportFormat parse_report_format(std::string_view text) {
    if (text == "table") return ReportFormat::kTable;
    if (text == "jsonl") return ReportFormat::kJsonl;
    throw_error(Errc::kBadFlag, "unknown format \"" + std::string(text) + "\"");
}

namespace detail {

inline std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline bool matches_address(const Violation& v, const std::string& needle) {
    const std::string want = lowercase(needle);
    for (const std::string& addr : v.addresses) {
        if (addr == want) return true;
        const auto colon = addr.find(':');
        if (colon != std::string::npos && addr.substr(colon + 1) == want) return true;
    }
    return false;
}

}  // namespace detail

/// Applies the conjunctive filters and the selected order, then rebuilds the
/// summary and clusters over the surviving rows.
inline Report report_filter_sort(const Report& report, const RenderOptions& options) {
    if (options.from_block && options.to_block && *options.from_block > *options.to_block) {
        throw_error(Errc::kBadFlag, "--from-block exceeds --to-block");
    }
    std::vector<Violation> kept;
    for (const Violation& v : report.violations) {
        if (options.bug && v.bug != *options.bug) continue;
        if (options.from_block && v.first_seen < *options.from_block) continue;
        if (options.to_block && v.first_seen > *options.to_block) continue;
        if (options.address && !detail::matches_address(v, *options.address)) continue;
        if (options.tx && v.tx_hash != detail::lowercase(*options.tx)) continue;
        kept.push_back(v);
    }
    switch (options.sort) {
        case SortKey::kBlock:
            std::stable_sort(kept.begin(), kept.end(), [](const Violation& a, const Violation& b) {
                return std::tuple(a.first_seen, a.tx_hash) < std::tuple(b.first_seen, b.tx_hash);
            });
            break;
        case SortKey::kTx:
            std::stable_sort(kept.begin(), kept.end(),
                             [](const Violation& a, const Violation& b) { return a.tx_hash < b.tx_hash; });
            break;
        case SortKey::kBug:
            std::stable_sort(kept.begin(), kept.end(), [](const Violation& a, const Violation& b) {
                return std::tuple(bug_name(a.bug), a.first_seen, a.tx_hash) <
                       std::tuple(bug_name(b.bug), b.first_seen, b.tx_hash);
            });
            break;
    }
    Report out = build_report(std::move(kept), report.input_digest, options.cluster_gap);
    out.tool_version = report.tool_version;
    return out;
}

inline nlohmann::json report_summary_json(const Report& report) {
    nlohmann::json doc;
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [bug, count] : report.summary) summary[bug] = count;
    doc["summary"] = summary;
    nlohmann::json clusters = nlohmann::json::array();
    for (const ClusterRange& c : report.clusters) {
        nlohmann::json entry;
        entry["chain"] = c.chain.value();
        entry["from_block"] = c.from_block;
        entry["to_block"] = c.to_block;
        entry["count"] = c.count;
        clusters.push_back(entry);
    }
    doc["clusters"] = clusters;
    doc["input_digest"] = report.input_digest;
    doc["tool_version"] = report.tool_version;
    doc["total"] = report.violations.size();
    return doc;
}

inline std::string render_report(const Report& report, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::kJsonl) {
        for (const Violation& v : report.violations) {
            out << violation_to_json(v).dump() << '\n';
        }
        out << report_summary_json(report).dump() << '\n';
        return out.str();
    }

    out << std::left << std::setw(10) << "BLOCK" << std::setw(8) << "CHAIN" << std::setw(6) << "BUG"
        << std::setw(6) << "PROP" << std::setw(12) << "SEVERITY" << std::setw(18) << "CONJUNCT"
        << "SEQUENCE" << '\n';
    for (const Violation& v : report.violations) {
        out << std::left << std::setw(10) << v.first_seen << std::setw(8) << v.chain.value()
            << std::setw(6) << bug_name(v.bug) << std::setw(6) << property_name(v.property)
            << std::setw(12) << severity_name(v.severity) << std::setw(18)
            << v.verdict.failed_conjunct.value_or("") << v.sequence << '\n';
    }
    out << "--\n";
    out << "total: " << report.violations.size();
    for (const auto& [bug, count] : report.summary) {
        out << "  " << bug << ": " << count;
    }
    out << '\n';
    for (const ClusterRange& c : report.clusters) {
        out << "cluster: " << c.chain.value() << " blocks " << c.from_block << "-" << c.to_block << " ("
            << c.count << " violations)" << '\n';
    }
    out << "input: " << report.input_digest << "  version: " << report.tool_version << '\n';
    return out.str();
}

}  // namespace xscope
