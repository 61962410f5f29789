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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xscope/builder.hpp"
#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/facts.hpp"

// The three security patterns applied over a population of sequences.
// Every failed pattern yields a Violation with the fixed property→bug
// mapping: RD→UDE, CP→IEP, AU→UU. A sequence violating several properties
// is reported once per property; forensics wants every failed check.

namespace xscope {

enum class Property { kRestrictedDeposit, kConsistentParsing, kAuthorizedUnlock };
enum class BugClass { kUde, kIep, kUu };
enum class Severity { kConfirmed, kSuspicious };

inline std::string_view property_name(Property p) {
    switch (p) {
        case Property::kRestrictedDeposit: return "RD";
        case Property::kConsistentParsing: return "CP";
        case Property::kAuthorizedUnlock: return "AU";
    }
    return "?";
}

inline std::string_view bug_name(BugClass b) {
    switch (b) {
        case BugClass::kUde: return "UDE";
        case BugClass::kIep: return "IEP";
        case BugClass::kUu: return "UU";
    }
    return "?";
}

inline BugClass parse_bug(std::string_view text) {
    if (text == "UDE") return BugClass::kUde;
    if (text == "IEP") return BugClass::kIep;
    if (text == "UU") return BugClass::kUu;
    throw_error(Errc::kBadFlag, "unknown bug class \"" + std::string(text) + "\"");
}

inline BugClass bug_for_property(Property p) {
    switch (p) {
        case Property::kRestrictedDeposit: return BugClass::kUde;
        case Property::kConsistentParsing: return BugClass::kIep;
        case Property::kAuthorizedUnlock: return BugClass::kUu;
    }
    return BugClass::kUde;
}

inline std::string_view severity_name(Severity s) {
    return s == Severity::kConfirmed ? "Confirmed" : "Suspicious";
}

/// One failed security pattern, anchored to its execution sequence.
struct Violation {
    Property property;
    BugClass bug;
    std::string sequence;
    FactVerdict verdict;
    Severity severity = Severity::kSuspicious;
    std::uint64_t first_seen = 0;
    ChainId chain;
    std::string tx_hash;                  // 0x-hex of the anchoring transaction
    std::vector<std::string> addresses;   // sorted "chain:0xaddr" participants

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline nlohmann::json violation_to_json(const Violation& v) {
    nlohmann::json doc;
    doc["property"] = std::string(property_name(v.property));
    doc["bug"] = std::string(bug_name(v.bug));
    doc["sequence"] = v.sequence;
    doc["fact"] = std::string(fact_name(v.verdict.fact));
    doc["conjunct"] = v.verdict.failed_conjunct.value_or("");
    doc["witnesses"] = v.verdict.witnesses;
    doc["severity"] = std::string(severity_name(v.severity));
    doc["block"] = v.first_seen;
    doc["chain"] = v.chain.value();
    doc["tx"] = v.tx_hash;
    doc["addresses"] = v.addresses;
    return doc;
}

// ---------------------------------------------------------------------------
// Participants and severity

namespace detail {

inline void add_participant(std::set<std::string>& out, const Address& a) {
    out.insert(a.chain().value() + ":" + a.hex());
}

inline void add_asset_participant(std::set<std::string>& out, const AssetId& a) {
    if (!a.is_native()) add_participant(out, *a.contract());
}

inline void collect_participants(std::set<std::string>& out, const ChainEvent& event) {
    std::visit(
        [&](const auto& e) {
            using T = std::decay_t<decltype(e)>;
            add_participant(out, e.sc());
            if constexpr (std::is_same_v<T, DepositEvent>) {
                add_participant(out, e.to_dst());
                add_asset_participant(out, e.asset_src());
                add_asset_participant(out, e.asset_dst());
            } else {
                add_participant(out, e.to());
                add_asset_participant(out, e.asset());
            }
        },
        event);
}

inline void collect_participants(std::set<std::string>& out, const Trace& trace) {
    for (const ChainEvent& e : trace.events()) collect_participants(out, e);
}

inline void collect_participants(std::set<std::string>& out, const LockAction& a) {
    add_participant(out, a.to_dst());
    add_asset_participant(out, a.asset_src());
    add_asset_participant(out, a.asset_dst());
}

inline void collect_participants(std::set<std::string>& out, const UnlockAction& a) {
    add_participant(out, a.to_dst());
    add_asset_participant(out, a.asset_dst());
}

inline void collect_participants(std::set<std::string>& out, const UnlockEvent& e) {
    add_participant(out, e.sc());
    add_participant(out, e.to());
    add_asset_participant(out, e.asset());
}

inline Severity severity_for(const std::set<std::string>& participants, const BridgeConfig& cfg) {
    for (const Address& a : cfg.blacklist) {
        if (participants.count(a.chain().value() + ":" + a.hex()) > 0) {
            return Severity::kConfirmed;
        }
    }
    return Severity::kSuspicious;
}

inline std::vector<std::string> to_sorted_vector(const std::set<std::string>& s) {
    return {s.begin(), s.end()};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Per-pattern checks

/// RD — restricted deposit: the source transaction's deposits are all backed
/// by locks. Fails → UDE.
inline std::optional<Violation> check_rd(const Trace& trace, const BridgeConfig& cfg, MatchingMode mode) {
    FactVerdict verdict = v_source_tx(trace, cfg, mode);
    if (verdict.holds) return std::nullopt;
    std::set<std::string> participants;
    detail::collect_participants(participants, trace);
    Violation v{Property::kRestrictedDeposit,
                BugClass::kUde,
                source_sequence_key(trace.tx().chain(), trace.tx().hash()),
                std::move(verdict),
                detail::severity_for(participants, cfg),
                trace.min_block(),
                trace.tx().chain(),
                trace.tx().hash_hex(),
                detail::to_sorted_vector(participants)};
    return v;
}

/// CP — consistent parsing: the relayer's action reproduces a valid deposit
/// from a valid transaction. Fails → IEP.
inline std::optional<Violation> check_cp(const LockAction& a, const Trace& trace, const BridgeConfig& cfg,
                                         MatchingMode mode, const std::string& sequence_key = "") {
    FactVerdict verdict = v_lock_action(a, trace, cfg, mode);
    if (verdict.holds) return std::nullopt;
    std::set<std::string> participants;
    detail::collect_participants(participants, trace);
    detail::collect_participants(participants, a);
    Violation v{Property::kConsistentParsing,
                BugClass::kIep,
                sequence_key.empty() ? source_sequence_key(a.tx().chain(), a.tx().hash()) : sequence_key,
                std::move(verdict),
                detail::severity_for(participants, cfg),
                trace.events().empty() ? a.block() : trace.min_block(),
                a.tx().chain(),
                a.tx().hash_hex(),
                detail::to_sorted_vector(participants)};
    return v;
}

/// AU — authorized unlock: the unlock event is backed by an authorized
/// action rooted in a valid lock. Fails → UU.
inline std::optional<Violation> check_au(const UnlockEvent& e, const StatePool& pool,
                                         const BridgeConfig& cfg, MatchingMode mode,
                                         const std::string& sequence_key = "") {
    FactVerdict verdict = v_unlock_event(e, pool, cfg, mode);
    if (verdict.holds) return std::nullopt;
    std::set<std::string> participants;
    detail::collect_participants(participants, e);
    Violation v{Property::kAuthorizedUnlock,
                BugClass::kUu,
                sequence_key.empty() ? unlock_sequence_key(e) : sequence_key,
                std::move(verdict),
                detail::severity_for(participants, cfg),
                e.block(),
                e.tx().chain(),
                e.tx().hash_hex(),
                detail::to_sorted_vector(participants)};
    return v;
}

// ---------------------------------------------------------------------------
// Whole-dataset check

/// Runs all three patterns over the dataset: RD per trace, CP per lock
/// action, AU per unlock event against the full state pool. Violations are
/// deduplicated per (property, sequence), keyed to the correlated execution
/// sequences, and returned sorted by first-seen block then tx hash.
inline std::vector<Violation> check_all(const Dataset& dataset, const BridgeConfig& cfg,
                                        MatchingMode mode) {
    const StatePool pool = dataset.pool();
    const std::vector<ExecutionSequence> sequences =
        correlate(dataset.traces, dataset.lock_actions, dataset.unlock_actions, dataset.unlock_events);

    // Where each action/unlock event landed, plus full-sequence participant
    // sets for severity.
    std::map<std::string, std::string> action_sequence;   // A_lk / A_unlk key → sequence key
    std::map<std::string, std::string> unlock_sequence;   // E_unlk key → sequence key
    std::map<std::string, std::set<std::string>> sequence_participants;
    for (const ExecutionSequence& seq : sequences) {
        std::set<std::string>& participants = sequence_participants[seq.key];
        if (seq.source_trace) detail::collect_participants(participants, *seq.source_trace);
        if (seq.lock_action) {
            action_sequence[state_key(*seq.lock_action)] = seq.key;
            detail::collect_participants(participants, *seq.lock_action);
        }
        if (seq.unlock_action) {
            action_sequence[state_key(*seq.unlock_action)] = seq.key;
            detail::collect_participants(participants, *seq.unlock_action);
        }
        if (seq.unlock_event) {
            unlock_sequence[state_key(*seq.unlock_event)] = seq.key;
            detail::collect_participants(participants, *seq.unlock_event);
        }
    }

    std::vector<Violation> violations;
    auto push = [&](std::optional<Violation> v) {
        if (!v) return;
        // Severity over the whole correlated sequence, not just the states
        // the failing fact saw.
        auto it = sequence_participants.find(v->sequence);
        if (it != sequence_participants.end()) {
            std::set<std::string> merged = it->second;
            for (const std::string& a : v->addresses) merged.insert(a);
            v->addresses = detail::to_sorted_vector(merged);
            v->severity = detail::severity_for(merged, cfg);
        }
        violations.push_back(std::move(*v));
    };

    for (const Trace& trace : dataset.traces) {
        push(check_rd(trace, cfg, mode));
    }
    for (const LockAction& a : dataset.lock_actions) {
        const Trace trace = pool.trace_for_or_empty(a.tx());
        auto it = action_sequence.find(state_key(a));
        push(check_cp(a, trace, cfg, mode, it == action_sequence.end() ? "" : it->second));
    }
    for (const UnlockEvent& e : dataset.unlock_events) {
        auto it = unlock_sequence.find(state_key(e));
        push(check_au(e, pool, cfg, mode, it == unlock_sequence.end() ? "" : it->second));
    }

    // Dedup per (property, sequence), keeping the first occurrence.
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<Violation> unique;
    for (Violation& v : violations) {
        if (seen.emplace(std::string(property_name(v.property)), v.sequence).second) {
            unique.push_back(std::move(v));
        }
    }
    std::sort(unique.begin(), unique.end(), [](const Violation& a, const Violation& b) {
        return std::tuple(a.first_seen, a.tx_hash, a.sequence, property_name(a.property)) <
               std::tuple(b.first_seen, b.tx_hash, b.sequence, property_name(b.property));
    });
    return unique;
}

}  // namespace xscope
