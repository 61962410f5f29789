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

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xscope/builder.hpp"
#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/properties.hpp"
#include "xscope/wire.hpp"

// Runtime monitoring: the relayer hands over a pending unlock together with
// its pre-executed predicted effects before submitting; the monitor answers
// Allow or Abort. The policy is fail-closed: anything the monitor cannot
// screen cleanly is aborted, because an unscreened unlock is exactly the
// loss this tool exists to prevent.

namespace xscope {

/// A complete pending transfer: the unlock the relayer wants to submit, the
/// predicted destination events from pre-execution, and the source-side
/// states it is based on. Monitoring, unlike offline analysis, sees the
/// whole sequence.
struct PendingUnlock {
    UnlockAction action;
    std::vector<UnlockEvent> predicted_events;
    Trace source_trace;
    LockAction lock_action;
};

inline void validate_pending(const PendingUnlock& p) {
    if (p.predicted_events.empty()) {
        throw_error(Errc::kIncompleteSequence, "pending unlock has no predicted events");
    }
    for (const UnlockEvent& e : p.predicted_events) {
        if (e.tx().chain() != p.action.dest_chain()) {
            throw_error(Errc::kInvalidState, "predicted event on " + e.tx().chain().value() +
                                                 " but action targets " + p.action.dest_chain().value());
        }
    }
    if (!same_tx(p.lock_action.tx(), p.source_trace.tx())) {
        throw_error(Errc::kTraceMismatch, "lock action tx " + tx_key(p.lock_action.tx()) +
                                              " does not match source trace " + tx_key(p.source_trace.tx()));
    }
    if (!same_tx(p.action.src_tx(), p.source_trace.tx())) {
        throw_error(Errc::kTraceMismatch, "unlock action source tx " + tx_key(p.action.src_tx()) +
                                              " does not match source trace " +
                                              tx_key(p.source_trace.tx()));
    }
}

enum class MonitorVerdict { kAllow, kAbort };

inline std::string_view monitor_verdict_name(MonitorVerdict v) {
    return v == MonitorVerdict::kAllow ? "Allow" : "Abort";
}

/// screen()'s answer. For screened requests, Abort iff violations nonempty;
/// requests that could not be screened at all surface as error aborts at the
/// request-handling layer with the error detail instead of violations.
struct MonitorDecision {
    MonitorVerdict verdict = MonitorVerdict::kAbort;
    std::vector<Violation> violations;
    std::chrono::microseconds latency{0};
};

/// The identity under which an unlock action is consumed: one Allow per
/// (source tx, destination chain, asset, receiver, amount).
inline std::string consume_key(const UnlockAction& a) {
    return tx_key(a.src_tx()) + "|" + a.dest_chain().value() + "|" + asset_key(a.asset_dst()) + "|" +
           a.to_dst().hex() + "|" + amount_to_string(a.amount_dst());
}

/// One handled request as persisted in the decision log. Latency is not
/// logged; replays must reproduce the decision bit-exactly and wall time is
/// not part of the decision.
struct LoggedDecision {
    std::string id;
    std::vector<std::string> request_lines;  // canonical wire encoding
    std::string verdict;
    std::vector<Violation> violations;
    std::string error;        // nonempty only for fail-closed error aborts
    std::string consumed;     // consume key, set when the verdict is Allow
};

inline nlohmann::json logged_decision_to_json(const LoggedDecision& d) {
    nlohmann::json doc;
    doc["id"] = d.id;
    doc["request"] = d.request_lines;
    doc["verdict"] = d.verdict;
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& v : d.violations) violations.push_back(violation_to_json(v));
    doc["violations"] = violations;
    doc["error"] = d.error;
    doc["consumed"] = d.consumed;
    return doc;
}

/// Rejects a pending unlock whose consume key was already spent by an Allow
/// decision in the history. Distinct actions (any field differs) pass.
inline bool replay_guard(const std::vector<LoggedDecision>& history, const PendingUnlock& p) {
    const std::string key = consume_key(p.action);
    for (const LoggedDecision& d : history) {
        if (d.verdict == "Allow" && d.consumed == key) {
            return false;
        }
    }
    return true;
}

/// A monitor request: wire records plus an optional caller-supplied id
/// (echoed back so callers can pair decisions with requests).
struct MonitorRequest {
    std::string id;
    std::vector<RawRecord> records;
};

/// Assembles a request's records into a PendingUnlock. Source events are
/// grouped into the single source trace; exactly one lock action, one unlock
/// action, and at least one predicted unlock must be present.
inline PendingUnlock assemble_pending(const std::vector<RawRecord>& records, const BridgeConfig& cfg) {
    std::vector<RawRecord> event_records;
    std::optional<LockAction> lock_action;
    std::optional<UnlockAction> unlock_action;
    std::vector<UnlockEvent> predicted;
    for (const RawRecord& rec : records) {
        switch (rec.kind()) {
            case RecordKind::kLockAction:
                if (lock_action) throw_error(Errc::kRecordParse, "request has more than one lock action");
                lock_action = std::get<LockAction>(rec.payload).with_ordinal(rec.ordinal);
                break;
            case RecordKind::kUnlockAction:
                if (unlock_action) throw_error(Errc::kRecordParse, "request has more than one unlock action");
                unlock_action = std::get<UnlockAction>(rec.payload).with_ordinal(rec.ordinal);
                break;
            case RecordKind::kPredictedUnlock:
                predicted.push_back(std::get<UnlockEvent>(rec.payload));
                break;
            case RecordKind::kUnlockEvent:
                throw_error(Errc::kRecordParse,
                            "request must carry predicted_unlock records, not observed unlock events");
            default:
                event_records.push_back(rec);
                break;
        }
    }
    if (!unlock_action) throw_error(Errc::kIncompleteSequence, "request is missing the unlock action");
    if (!lock_action) throw_error(Errc::kIncompleteSequence, "request is missing the lock action");
    if (predicted.empty()) throw_error(Errc::kIncompleteSequence, "request has no predicted events");
    std::vector<Trace> traces = build_traces(event_records, cfg);
    if (traces.size() != 1) {
        throw_error(Errc::kIncompleteSequence, "request must carry exactly one source transaction, got " +
                                                   std::to_string(traces.size()));
    }
    PendingUnlock p{std::move(*unlock_action), std::move(predicted), std::move(traces.front()),
                    std::move(*lock_action)};
    validate_pending(p);
    return p;
}

/// Screens pending unlocks in request order, accumulating the states of
/// allowed transfers so later unlocks are judged against everything the
/// relayer has already committed to. Decisions are appended to an in-memory
/// log that reproduces them bit-exactly on replay.
class Monitor {
  public:
    Monitor(BridgeConfig cfg, MatchingMode mode) : cfg_(std::move(cfg)), mode_(mode) {}

    /// Evaluates RD on the source trace, CP on the lock action, and AU on
    /// every predicted event against the committed pool plus this request's
    /// own states. Allow iff no violation.
    MonitorDecision screen(const PendingUnlock& p) const {
        const auto start = std::chrono::steady_clock::now();
        validate_pending(p);

        StatePool pool = committed_;
        if (!pool.trace_for(p.source_trace.tx())) {
            pool.add_trace(p.source_trace);
        }
        pool.add_lock_action(p.lock_action);
        pool.add_unlock_action(p.action);

        // All three checks anchor to the pending transfer's source sequence,
        // matching how offline analysis keys a complete sequence.
        const std::string key =
            source_sequence_key(p.source_trace.tx().chain(), p.source_trace.tx().hash());
        std::vector<Violation> violations;
        if (auto v = check_rd(p.source_trace, cfg_, mode_)) violations.push_back(std::move(*v));
        if (auto v = check_cp(p.lock_action, p.source_trace, cfg_, mode_, key)) {
            violations.push_back(std::move(*v));
        }
        for (const UnlockEvent& e : p.predicted_events) {
            if (auto v = check_au(e, pool, cfg_, mode_, key)) violations.push_back(std::move(*v));
        }

        MonitorDecision decision;
        decision.verdict = violations.empty() ? MonitorVerdict::kAllow : MonitorVerdict::kAbort;
        decision.violations = std::move(violations);
        decision.latency =
            std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
        return decision;
    }

    /// Fail-closed request handler: guard against replays, assemble, screen.
    /// Any error becomes an Abort with the error detail; the decision (either
    /// way) is appended to the log, and allowed states are committed.
    LoggedDecision handle(const MonitorRequest& request) {
        LoggedDecision logged;
        logged.id = request.id;
        for (const RawRecord& rec : request.records) {
            logged.request_lines.push_back(encode_record(rec));
        }
        try {
            const PendingUnlock p = assemble_pending(request.records, cfg_);
            if (!replay_guard(log_, p)) {
                logged.verdict = "Abort";
                logged.error = "duplicate unlock request: " + consume_key(p.action);
            } else {
                const MonitorDecision decision = screen(p);
                last_latency_ = decision.latency;
                logged.verdict = std::string(monitor_verdict_name(decision.verdict));
                logged.violations = decision.violations;
                if (decision.verdict == MonitorVerdict::kAllow) {
                    logged.consumed = consume_key(p.action);
                    commit(p);
                }
            }
        } catch (const Error& e) {
            logged.verdict = "Abort";
            logged.error = e.what();
        } catch (const std::exception& e) {
            logged.verdict = "Abort";
            logged.error = std::string("internal: ") + e.what();
        }
        log_.push_back(logged);
        return logged;
    }

    const std::vector<LoggedDecision>& log() const noexcept { return log_; }
    std::chrono::microseconds last_latency() const noexcept { return last_latency_; }

  private:
    void commit(const PendingUnlock& p) {
        if (!committed_.trace_for(p.source_trace.tx())) {
            committed_.add_trace(p.source_trace);
        }
        committed_.add_lock_action(p.lock_action);
        committed_.add_unlock_action(p.action);
    }

    BridgeConfig cfg_;
    MatchingMode mode_;
    StatePool committed_;
    std::vector<LoggedDecision> log_;
    std::chrono::microseconds last_latency_{0};
};

/// Re-runs every logged request through a fresh monitor and reports whether
/// all decisions came out identical.
struct ReplayMismatch {
    std::size_t index;
    std::string field;
};

inline std::optional<ReplayMismatch> replay_log(const std::vector<LoggedDecision>& log,
                                                const BridgeConfig& cfg, MatchingMode mode) {
    Monitor monitor{cfg, mode};
    for (std::size_t i = 0; i < log.size(); ++i) {
        MonitorRequest request;
        request.id = log[i].id;
        for (const std::string& line : log[i].request_lines) {
            RawRecord rec = decode_record(line);
            rec.ordinal = request.records.size();
            request.records.push_back(std::move(rec));
        }
        const LoggedDecision redecided = monitor.handle(request);
        if (redecided.verdict != log[i].verdict) return ReplayMismatch{i, "verdict"};
        if (redecided.error != log[i].error) return ReplayMismatch{i, "error"};
        if (redecided.consumed != log[i].consumed) return ReplayMismatch{i, "consumed"};
        if (redecided.violations.size() != log[i].violations.size()) return ReplayMismatch{i, "violations"};
        for (std::size_t k = 0; k < redecided.violations.size(); ++k) {
            if (violation_to_json(redecided.violations[k]) != violation_to_json(log[i].violations[k])) {
                return ReplayMismatch{i, "violations"};
            }
        }
    }
    return std::nullopt;
}

}  // namespace xscope
