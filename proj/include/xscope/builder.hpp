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
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/errors.hpp"
#include "xscope/facts.hpp"

// Assembles raw record streams into per-transaction traces and five-stage
// execution sequences. Native value transfers have no token-contract event,
// so the builder synthesizes lock/unlock events for them here; only this
// path can mark an event as synthesized, which keeps the native validity
// convention unforgeable through the wire.

namespace xscope {

/// A plain value transfer of the chain's native coin, observed on-chain.
class NativeTransfer {
  public:
    NativeTransfer(TxRef tx, Address from, Amount value, Address to, std::uint64_t block,
                   std::string symbol = "")
        : tx_(std::move(tx)),
          from_(std::move(from)),
          value_(std::move(value)),
          to_(std::move(to)),
          block_(block),
          symbol_(std::move(symbol)) {
        if (tx_.chain() != from_.chain() || tx_.chain() != to_.chain()) {
            throw_error(Errc::kInvalidState, "native transfer chains disagree in tx " + tx_.hash_hex());
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const Address& from() const noexcept { return from_; }
    const Amount& value() const noexcept { return value_; }
    const Address& to() const noexcept { return to_; }
    std::uint64_t block() const noexcept { return block_; }
    const std::string& symbol() const noexcept { return symbol_; }

    friend bool operator==(const NativeTransfer&, const NativeTransfer&) = default;

  private:
    TxRef tx_;
    Address from_;
    Amount value_;
    Address to_;
    std::uint64_t block_;
    std::string symbol_;
};

enum class RecordKind {
    kLockEvent,
    kDepositEvent,
    kUnlockEvent,
    kLockAction,
    kUnlockAction,
    kNativeTransfer,
    kPredictedUnlock,
};

inline std::string_view record_kind_name(RecordKind kind) {
    switch (kind) {
        case RecordKind::kLockEvent: return "lock_event";
        case RecordKind::kDepositEvent: return "deposit_event";
        case RecordKind::kUnlockEvent: return "unlock_event";
        case RecordKind::kLockAction: return "lock_action";
        case RecordKind::kUnlockAction: return "unlock_action";
        case RecordKind::kNativeTransfer: return "native_transfer";
        case RecordKind::kPredictedUnlock: return "predicted_unlock";
    }
    return "?";
}

/// One ingested record. The payload is the state itself; the ordinal is the
/// record's position in its input stream. Predicted unlocks reuse the
/// UnlockEvent payload and are distinguished by `predicted`.
struct RawRecord {
    std::variant<LockEvent, DepositEvent, UnlockEvent, LockAction, UnlockAction, NativeTransfer> payload;
    std::uint64_t ordinal = 0;
    bool predicted = false;

    RecordKind kind() const {
        if (predicted) return RecordKind::kPredictedUnlock;
        switch (payload.index()) {
            case 0: return RecordKind::kLockEvent;
            case 1: return RecordKind::kDepositEvent;
            case 2: return RecordKind::kUnlockEvent;
            case 3: return RecordKind::kLockAction;
            case 4: return RecordKind::kUnlockAction;
            default: return RecordKind::kNativeTransfer;
        }
    }

    std::uint64_t block() const {
        return std::visit([](const auto& p) { return p.block(); }, payload);
    }

    friend bool operator==(const RawRecord& a, const RawRecord& b) {
        return a.payload == b.payload && a.predicted == b.predicted;
    }
};

// ---------------------------------------------------------------------------
// Trace building

/// Groups chain events by (chain, tx hash) into traces ordered by log index.
/// Native transfers are synthesized into lock events (or, when the sender is
/// a configured router, unlock events); action records pass through
/// untouched. Two events sharing (chain, hash, index) are an error.
inline std::vector<Trace> build_traces(const std::vector<RawRecord>& records, const BridgeConfig& cfg) {
    std::map<std::pair<ChainId, std::array<std::uint8_t, TxRef::kHashSize>>, std::vector<ChainEvent>>
        groups;

    auto place = [&](ChainEvent event) {
        const TxRef& tx = event_tx(event);
        groups[{tx.chain(), tx.hash()}].push_back(std::move(event));
    };

    for (const RawRecord& rec : records) {
        switch (rec.kind()) {
            case RecordKind::kLockEvent:
                place(std::get<LockEvent>(rec.payload));
                break;
            case RecordKind::kDepositEvent:
                place(std::get<DepositEvent>(rec.payload));
                break;
            case RecordKind::kUnlockEvent:
                place(std::get<UnlockEvent>(rec.payload));
                break;
            case RecordKind::kNativeTransfer: {
                const NativeTransfer& nt = std::get<NativeTransfer>(rec.payload);
                const ChainId& chain = nt.tx().chain();
                const AssetId native = AssetId::native(chain, nt.symbol().empty()
                                                                  ? cfg.native_symbol(chain)
                                                                  : nt.symbol());
                // Outflows from a router are unlock footprints; everything
                // else is a (possible) lock footprint checked by V(E_lk).
                if (cfg.is_router(nt.from())) {
                    place(UnlockEvent{nt.tx(), nt.from(), native, nt.value(), nt.to(), nt.block(),
                                      /*synthesized_native=*/true});
                } else {
                    place(LockEvent{nt.tx(), nt.from(), native, nt.value(), nt.to(), nt.block(),
                                    /*synthesized_native=*/true});
                }
                break;
            }
            case RecordKind::kLockAction:
            case RecordKind::kUnlockAction:
            case RecordKind::kPredictedUnlock:
                break;
        }
    }

    std::vector<Trace> traces;
    traces.reserve(groups.size());
    for (auto& [key, events] : groups) {
        std::stable_sort(events.begin(), events.end(), [](const ChainEvent& a, const ChainEvent& b) {
            return event_tx(a).index() < event_tx(b).index();
        });
        for (std::size_t i = 1; i < events.size(); ++i) {
            if (event_tx(events[i]).index() == event_tx(events[i - 1]).index()) {
                throw_error(Errc::kDuplicateEvent,
                            "two events share " + key.first.value() + ":" + to_hex(key.second) + "#" +
                                std::to_string(event_tx(events[i]).index()));
            }
        }
        traces.emplace_back(key.first, key.second, std::move(events));
    }
    return traces;
}

// ---------------------------------------------------------------------------
// Correlation

namespace detail {

inline std::string unlock_join_key(const ChainId& chain, const AssetId& asset, const Address& to,
                                   const Amount& amount) {
    return chain.value() + "|" + asset_key(asset) + "|" + to.hex() + "|" + amount_to_string(amount);
}

}  // namespace detail

/// Joins traces, relayer actions, and destination unlock events into
/// execution sequences. Lock actions join their trace by (chain, tx hash);
/// unlock actions join by source tx; unlock events claim the best-candidate
/// unlock action by (dest chain, asset, receiver, amount), lowest ordinal
/// first, each action consumed at most once. Unmatched states become partial
/// sequences rather than being dropped.
inline std::vector<ExecutionSequence> correlate(const std::vector<Trace>& traces,
                                                const std::vector<LockAction>& lock_actions,
                                                const std::vector<UnlockAction>& unlock_actions,
                                                const std::vector<UnlockEvent>& unlock_events) {
    std::vector<ExecutionSequence> sequences;
    // tx key → indices of sequences rooted at that source tx, in creation order.
    std::map<std::string, std::vector<std::size_t>> by_source_tx;

    auto root_key = [](const TxRef& tx) { return tx_key(tx); };

    // Source-side roots: one sequence per trace that has lock or deposit events.
    std::vector<const Trace*> sorted_traces;
    for (const Trace& t : traces) sorted_traces.push_back(&t);
    std::sort(sorted_traces.begin(), sorted_traces.end(),
              [&](const Trace* a, const Trace* b) { return root_key(a->tx()) < root_key(b->tx()); });
    for (const Trace* t : sorted_traces) {
        const auto locks = t->lock_events();
        const auto deps = t->deposit_events();
        if (locks.empty() && deps.empty()) continue;
        ExecutionSequence seq;
        seq.key = source_sequence_key(t->tx().chain(), t->tx().hash());
        seq.source_trace = *t;
        for (const LockEvent* lk : locks) seq.lock_events.push_back(*lk);
        if (!deps.empty()) seq.deposit_event = *deps.front();
        by_source_tx[root_key(t->tx())].push_back(sequences.size());
        sequences.push_back(std::move(seq));
    }

    // Lock actions, lowest ordinal first. The first action for a tx occupies
    // the root sequence; further ones clone it under a suffixed key.
    std::vector<const LockAction*> sorted_lock_actions;
    for (const LockAction& a : lock_actions) sorted_lock_actions.push_back(&a);
    std::sort(sorted_lock_actions.begin(), sorted_lock_actions.end(),
              [](const LockAction* a, const LockAction* b) { return a->ordinal() < b->ordinal(); });
    for (const LockAction* a : sorted_lock_actions) {
        const std::string key = root_key(a->tx());
        auto& slots = by_source_tx[key];
        bool placed = false;
        for (std::size_t idx : slots) {
            if (!sequences[idx].lock_action) {
                sequences[idx].lock_action = *a;
                placed = true;
                break;
            }
        }
        if (!placed) {
            ExecutionSequence seq;
            seq.key = source_sequence_key(a->tx().chain(), a->tx().hash());
            if (!slots.empty()) {
                seq.key += "~a" + std::to_string(slots.size());
                // Share the observed source side with the extra action.
                seq.source_trace = sequences[slots.front()].source_trace;
                seq.lock_events = sequences[slots.front()].lock_events;
                seq.deposit_event = sequences[slots.front()].deposit_event;
            }
            seq.lock_action = *a;
            slots.push_back(sequences.size());
            sequences.push_back(std::move(seq));
        }
    }

    // Unlock actions join by source tx, lowest ordinal first.
    std::vector<const UnlockAction*> sorted_unlock_actions;
    for (const UnlockAction& a : unlock_actions) sorted_unlock_actions.push_back(&a);
    std::sort(sorted_unlock_actions.begin(), sorted_unlock_actions.end(),
              [](const UnlockAction* a, const UnlockAction* b) { return a->ordinal() < b->ordinal(); });
    for (const UnlockAction* a : sorted_unlock_actions) {
        const std::string key = root_key(a->src_tx());
        auto& slots = by_source_tx[key];
        bool placed = false;
        for (std::size_t idx : slots) {
            if (!sequences[idx].unlock_action) {
                sequences[idx].unlock_action = *a;
                placed = true;
                break;
            }
        }
        if (!placed) {
            ExecutionSequence seq;
            seq.key = source_sequence_key(a->src_tx().chain(), a->src_tx().hash());
            if (!slots.empty()) seq.key += "~u" + std::to_string(slots.size());
            seq.unlock_action = *a;
            slots.push_back(sequences.size());
            sequences.push_back(std::move(seq));
        }
    }

    // Unlock events claim the lowest-ordinal matching unlock action that has
    // not been consumed yet; the runner-up stays an open authorization.
    std::vector<const UnlockEvent*> sorted_unlock_events;
    for (const UnlockEvent& e : unlock_events) sorted_unlock_events.push_back(&e);
    std::sort(sorted_unlock_events.begin(), sorted_unlock_events.end(),
              [](const UnlockEvent* a, const UnlockEvent* b) {
                  return std::tuple(a->tx().chain(), a->tx().hash(), a->tx().index()) <
                         std::tuple(b->tx().chain(), b->tx().hash(), b->tx().index());
              });
    for (const UnlockEvent* e : sorted_unlock_events) {
        const std::string join =
            detail::unlock_join_key(e->tx().chain(), e->asset(), e->to(), e->amount());
        std::optional<std::size_t> winner;
        std::uint64_t winner_ordinal = 0;
        for (std::size_t idx = 0; idx < sequences.size(); ++idx) {
            const ExecutionSequence& seq = sequences[idx];
            if (!seq.unlock_action || seq.unlock_event) continue;
            const UnlockAction& a = *seq.unlock_action;
            if (detail::unlock_join_key(a.dest_chain(), a.asset_dst(), a.to_dst(), a.amount_dst()) != join) {
                continue;
            }
            if (!winner || a.ordinal() < winner_ordinal) {
                winner = idx;
                winner_ordinal = a.ordinal();
            }
        }
        if (winner) {
            sequences[*winner].unlock_event = *e;
        } else {
            ExecutionSequence seq;
            seq.key = unlock_sequence_key(*e);
            seq.unlock_event = *e;
            sequences.push_back(std::move(seq));
        }
    }

    for (const ExecutionSequence& seq : sequences) {
        validate_sequence(seq);
    }
    std::sort(sequences.begin(), sequences.end(),
              [](const ExecutionSequence& a, const ExecutionSequence& b) { return a.key < b.key; });
    return sequences;
}

// ---------------------------------------------------------------------------
// Dataset assembly

/// The analyzer's working set, split by state kind. Unlock events are the
/// destination-side events extracted from the built traces.
struct Dataset {
    std::vector<Trace> traces;
    std::vector<LockAction> lock_actions;
    std::vector<UnlockAction> unlock_actions;
    std::vector<UnlockEvent> unlock_events;

    StatePool pool() const {
        StatePool p;
        for (const Trace& t : traces) p.add_trace(t);
        for (const LockAction& a : lock_actions) p.add_lock_action(a);
        for (const UnlockAction& a : unlock_actions) p.add_unlock_action(a);
        return p;
    }
};

/// Builds traces and splits actions out of a record stream. Predicted
/// unlocks are a monitor-only kind and are rejected here.
inline Dataset make_dataset(const std::vector<RawRecord>& records, const BridgeConfig& cfg) {
    Dataset ds;
    std::vector<RawRecord> event_records;
    for (const RawRecord& rec : records) {
        switch (rec.kind()) {
            case RecordKind::kLockAction:
                ds.lock_actions.push_back(std::get<LockAction>(rec.payload).with_ordinal(rec.ordinal));
                break;
            case RecordKind::kUnlockAction:
                ds.unlock_actions.push_back(std::get<UnlockAction>(rec.payload).with_ordinal(rec.ordinal));
                break;
            case RecordKind::kPredictedUnlock:
                throw_error(Errc::kRecordParse, "predicted_unlock records are monitor requests, not trace data");
            default:
                event_records.push_back(rec);
                break;
        }
    }
    ds.traces = build_traces(event_records, cfg);
    for (const Trace& t : ds.traces) {
        for (const UnlockEvent* e : t.unlock_events()) {
            ds.unlock_events.push_back(*e);
        }
    }
    return ds;
}

}  // namespace xscope
