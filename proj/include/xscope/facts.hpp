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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/errors.hpp"

// The security-fact engine: nine validity/consistency facts evaluated by
// direct enumeration over finite state sets. Every fact returns a verdict
// carrying the first violated conjunct (for forensics) and the witnesses
// that satisfied existential quantifiers (for audit). Evaluation is pure
// and deterministic: same inputs, same verdict, no iteration-order leaks.

namespace xscope {

enum class Fact {
    kLockEventValid,            // V(E_lk)
    kDepositEventValid,         // V(E_dep)
    kLockDepositConsistent,     // C(E_lk, E_dep)
    kSourceTxValid,             // V(tx^s)
    kActionDepositConsistent,   // C(A_lk, E_dep)
    kLockActionValid,           // V(A_lk)
    kLockUnlockConsistent,      // C(A_lk, A_unlk)
    kUnlockActionEventConsistent,  // C(A_unlk, E_unlk)
    kUnlockEventValid,          // V(E_unlk)
};

inline std::string_view fact_name(Fact fact) {
    switch (fact) {
        case Fact::kLockEventValid: return "V(E_lk)";
        case Fact::kDepositEventValid: return "V(E_dep)";
        case Fact::kLockDepositConsistent: return "C(E_lk,E_dep)";
        case Fact::kSourceTxValid: return "V(tx^s)";
        case Fact::kActionDepositConsistent: return "C(A_lk,E_dep)";
        case Fact::kLockActionValid: return "V(A_lk)";
        case Fact::kLockUnlockConsistent: return "C(A_lk,A_unlk)";
        case Fact::kUnlockActionEventConsistent: return "C(A_unlk,E_unlk)";
        case Fact::kUnlockEventValid: return "V(E_unlk)";
    }
    return "?";
}

/// Outcome of evaluating one security fact over concrete states.
/// When holds is false, failed_conjunct names the first violated conjunct of
/// the deepest-progressing candidate and witnesses reference the states that
/// anchor the failure. When an existential fact holds, witnesses carry the
/// states that satisfied the quantifier.
struct FactVerdict {
    Fact fact;
    bool holds = false;
    std::optional<std::string> failed_conjunct;
    std::vector<std::string> witnesses;

    static FactVerdict pass(Fact fact, std::vector<std::string> witnesses = {}) {
        return FactVerdict{fact, true, std::nullopt, std::move(witnesses)};
    }

    static FactVerdict fail(Fact fact, std::string conjunct, std::vector<std::string> witnesses = {}) {
        return FactVerdict{fact, false, std::move(conjunct), std::move(witnesses)};
    }

    friend bool operator==(const FactVerdict&, const FactVerdict&) = default;
};

// Conjunct labels pinned as part of the verdict contract.
namespace conjunct {
inline constexpr std::string_view kScNotAsset = "sc≠asset";
inline constexpr std::string_view kToNotRouter = "to≠router";
inline constexpr std::string_view kScNotRouter = "sc≠router";
inline constexpr std::string_view kTx = "tx";
inline constexpr std::string_view kAsset = "asset";
inline constexpr std::string_view kAmount = "amount";
inline constexpr std::string_view kNoLock = "no-lock";
inline constexpr std::string_view kLockConsumed = "lock-consumed";
inline constexpr std::string_view kAssetSrc = "asset^s";
inline constexpr std::string_view kAmountSrc = "amount^s";
inline constexpr std::string_view kAssetDst = "asset^d";
inline constexpr std::string_view kToDst = "to^d";
inline constexpr std::string_view kDestChain = "ID^d";
inline constexpr std::string_view kSourceTxValid = "V(tx^s)";
inline constexpr std::string_view kLockActionValid = "V(A_lk)";
inline constexpr std::string_view kNoValidDeposit = "no-valid-deposit";
inline constexpr std::string_view kAssetIsEmitter = "asset=sc";
inline constexpr std::string_view kNoAction = "no-action";
inline constexpr std::string_view kUnauthorized = "unauthorized";
inline constexpr std::string_view kAmountDst = "amount^d";
}  // namespace conjunct

// ---------------------------------------------------------------------------
// Single-state and pairwise facts

/// V(E_lk): the lock event was emitted by the asset contract itself and pays
/// the router. For the native coin there is no token contract; the first
/// conjunct is satisfied exactly by builder-synthesized native transfers.
inline FactVerdict v_lock_event(const LockEvent& e, const BridgeConfig& cfg) {
    const std::set<Address>& routers = cfg.routers_for(e.tx().chain());
    const bool emitter_ok = e.asset().is_native() ? e.synthesized_native() : e.sc() == *e.asset().contract();
    if (!emitter_ok) {
        return FactVerdict::fail(Fact::kLockEventValid, std::string(conjunct::kScNotAsset));
    }
    if (routers.count(e.to()) == 0) {
        return FactVerdict::fail(Fact::kLockEventValid, std::string(conjunct::kToNotRouter));
    }
    return FactVerdict::pass(Fact::kLockEventValid);
}

/// V(E_dep): only router-emitted deposit events count.
inline FactVerdict v_deposit_event(const DepositEvent& e, const BridgeConfig& cfg) {
    const std::set<Address>& routers = cfg.routers_for(e.tx().chain());
    if (routers.count(e.sc()) == 0) {
        return FactVerdict::fail(Fact::kDepositEventValid, std::string(conjunct::kScNotRouter));
    }
    return FactVerdict::pass(Fact::kDepositEventValid);
}

/// C(E_lk, E_dep): same source transaction, same asset, same amount.
inline FactVerdict c_lock_deposit(const LockEvent& lk, const DepositEvent& dep) {
    if (!same_tx(lk.tx(), dep.tx())) {
        return FactVerdict::fail(Fact::kLockDepositConsistent, std::string(conjunct::kTx));
    }
    if (!assets_equal(lk.asset(), dep.asset_src())) {
        return FactVerdict::fail(Fact::kLockDepositConsistent, std::string(conjunct::kAsset));
    }
    if (lk.amount() != dep.amount_src()) {
        return FactVerdict::fail(Fact::kLockDepositConsistent, std::string(conjunct::kAmount));
    }
    return FactVerdict::pass(Fact::kLockDepositConsistent);
}

/// C(A_lk, E_dep): the parsed action reproduces the deposit's source asset,
/// amount, destination asset, and receiver.
inline FactVerdict c_action_deposit(const LockAction& a, const DepositEvent& dep) {
    if (!assets_equal(a.asset_src(), dep.asset_src())) {
        return FactVerdict::fail(Fact::kActionDepositConsistent, std::string(conjunct::kAssetSrc));
    }
    if (a.amount_src() != dep.amount_src()) {
        return FactVerdict::fail(Fact::kActionDepositConsistent, std::string(conjunct::kAmountSrc));
    }
    if (!assets_equal(a.asset_dst(), dep.asset_dst())) {
        return FactVerdict::fail(Fact::kActionDepositConsistent, std::string(conjunct::kAssetDst));
    }
    if (a.to_dst() != dep.to_dst()) {
        return FactVerdict::fail(Fact::kActionDepositConsistent, std::string(conjunct::kToDst));
    }
    return FactVerdict::pass(Fact::kActionDepositConsistent);
}

/// C(A_unlk, E_unlk): the unlock event releases the authorized asset, from
/// the asset contract itself, in the authorized amount, to the authorized
/// address. The printed rule's first conjunct is implemented as the asset
/// equality it evidently intends.
inline FactVerdict c_unlock_action_event(const UnlockAction& a, const UnlockEvent& e) {
    if (!assets_equal(a.asset_dst(), e.asset())) {
        return FactVerdict::fail(Fact::kUnlockActionEventConsistent, std::string(conjunct::kAsset));
    }
    const bool emitter_ok =
        a.asset_dst().is_native() ? e.synthesized_native() : *a.asset_dst().contract() == e.sc();
    if (!emitter_ok) {
        return FactVerdict::fail(Fact::kUnlockActionEventConsistent, std::string(conjunct::kAssetIsEmitter));
    }
    if (a.amount_dst() != e.amount()) {
        return FactVerdict::fail(Fact::kUnlockActionEventConsistent, std::string(conjunct::kAmount));
    }
    if (a.to_dst() != e.to()) {
        return FactVerdict::fail(Fact::kUnlockActionEventConsistent, std::string(conjunct::kToDst));
    }
    return FactVerdict::pass(Fact::kUnlockActionEventConsistent);
}

// ---------------------------------------------------------------------------
// V(tx^s)

namespace detail {

// Conjunct ladder for one (lock, deposit) candidate pair inside V(tx^s):
// how many conjuncts pass before the first failure, and which one failed.
// Order: V(E_lk).sc≠asset, V(E_lk).to≠router, C.tx, C.asset, C.amount.
struct CandidateDepth {
    std::size_t depth = 0;
    std::string_view failed;  // empty when the full ladder passes
};

inline CandidateDepth lock_candidate_depth(const LockEvent& lk, const DepositEvent& dep,
                                           const BridgeConfig& cfg) {
    const std::set<Address>& routers = cfg.routers_for(lk.tx().chain());
    const bool emitter_ok =
        lk.asset().is_native() ? lk.synthesized_native() : lk.sc() == *lk.asset().contract();
    if (!emitter_ok) return {0, conjunct::kScNotAsset};
    if (routers.count(lk.to()) == 0) return {1, conjunct::kToNotRouter};
    if (!same_tx(lk.tx(), dep.tx())) return {2, conjunct::kTx};
    if (!assets_equal(lk.asset(), dep.asset_src())) return {3, conjunct::kAsset};
    if (lk.amount() != dep.amount_src()) return {4, conjunct::kAmount};
    return {5, {}};
}

// Kuhn's augmenting-path bipartite matching over deposit→lock edges.
// Returns the index of the first uncoverable deposit, or nullopt when every
// deposit is matched; match_of_lock then holds the assignment.
inline std::optional<std::size_t> cover_deposits(const std::vector<std::vector<std::size_t>>& adjacency,
                                                 std::size_t lock_count,
                                                 std::vector<std::optional<std::size_t>>& match_of_lock) {
    match_of_lock.assign(lock_count, std::nullopt);
    std::vector<bool> seen;
    auto augment = [&](auto&& self, std::size_t dep) -> bool {
        for (std::size_t lk : adjacency[dep]) {
            if (seen[lk]) continue;
            seen[lk] = true;
            if (!match_of_lock[lk] || self(self, *match_of_lock[lk])) {
                match_of_lock[lk] = dep;
                return true;
            }
        }
        return false;
    };
    for (std::size_t dep = 0; dep < adjacency.size(); ++dep) {
        seen.assign(lock_count, false);
        if (!augment(augment, dep)) {
            return dep;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// V(tx^s): every valid deposit event in the trace is justified by a valid,
/// consistent lock event.
///
/// PaperLiteral matching evaluates the rule's existential as printed (one
/// lock event may justify several deposits). Injective matching additionally
/// requires a one-to-one assignment of lock events to valid deposits.
///
/// On failure, failed_conjunct names the deepest conjunct reached by the
/// unmatched deposit's best lock candidate ("no-lock" when the trace has no
/// lock events, "lock-consumed" when candidates exist but are all claimed by
/// other deposits under injective matching); witnesses reference the
/// unmatched deposit and, when present, that best candidate.
inline FactVerdict v_source_tx(const Trace& trace, const BridgeConfig& cfg, MatchingMode mode) {
    const std::vector<const DepositEvent*> all_deps = trace.deposit_events();
    const std::vector<const LockEvent*> locks = trace.lock_events();

    std::vector<const DepositEvent*> valid_deps;
    for (const DepositEvent* dep : all_deps) {
        if (v_deposit_event(*dep, cfg).holds) {
            valid_deps.push_back(dep);
        }
    }
    if (valid_deps.empty()) {
        return FactVerdict::pass(Fact::kSourceTxValid);
    }

    auto fail_for = [&](const DepositEvent& dep) {
        std::size_t best_depth = 0;
        const LockEvent* best = nullptr;
        std::string_view best_conjunct = conjunct::kNoLock;
        for (const LockEvent* lk : locks) {
            const detail::CandidateDepth cand = detail::lock_candidate_depth(*lk, dep, cfg);
            if (!best || cand.depth > best_depth) {
                best = lk;
                best_depth = cand.depth;
                best_conjunct = cand.failed;
            }
        }
        std::vector<std::string> witnesses{state_key(dep)};
        if (best) {
            witnesses.push_back(state_key(*best));
        }
        return FactVerdict::fail(Fact::kSourceTxValid, std::string(best_conjunct), std::move(witnesses));
    };

    // Edges: deposit i can be justified by lock j.
    std::vector<std::vector<std::size_t>> adjacency(valid_deps.size());
    for (std::size_t i = 0; i < valid_deps.size(); ++i) {
        for (std::size_t j = 0; j < locks.size(); ++j) {
            if (detail::lock_candidate_depth(*locks[j], *valid_deps[i], cfg).failed.empty()) {
                adjacency[i].push_back(j);
            }
        }
    }

    if (mode == MatchingMode::kPaperLiteral) {
        std::vector<std::string> witnesses;
        for (std::size_t i = 0; i < valid_deps.size(); ++i) {
            if (adjacency[i].empty()) {
                return fail_for(*valid_deps[i]);
            }
            witnesses.push_back(state_key(*locks[adjacency[i].front()]));
        }
        return FactVerdict::pass(Fact::kSourceTxValid, std::move(witnesses));
    }

    std::vector<std::optional<std::size_t>> match_of_lock;
    const std::optional<std::size_t> uncovered =
        detail::cover_deposits(adjacency, locks.size(), match_of_lock);
    if (uncovered) {
        const DepositEvent& dep = *valid_deps[*uncovered];
        if (adjacency[*uncovered].empty()) {
            return fail_for(dep);
        }
        return FactVerdict::fail(Fact::kSourceTxValid, std::string(conjunct::kLockConsumed),
                                 {state_key(dep)});
    }
    std::vector<std::string> witnesses(valid_deps.size());
    for (std::size_t j = 0; j < locks.size(); ++j) {
        if (match_of_lock[j]) {
            witnesses[*match_of_lock[j]] = state_key(*locks[j]);
        }
    }
    return FactVerdict::pass(Fact::kSourceTxValid, std::move(witnesses));
}

// ---------------------------------------------------------------------------
// V(A_lk)

/// V(A_lk): the action was parsed from a valid transaction and reproduces a
/// valid deposit event in it. On success witnesses carry that deposit.
inline FactVerdict v_lock_action(const LockAction& a, const Trace& trace, const BridgeConfig& cfg,
                                 MatchingMode mode) {
    if (!same_tx(trace.tx(), a.tx())) {
        throw_error(Errc::kTraceMismatch, "trace " + tx_key(trace.tx()) + " is not the action's tx " +
                                              tx_key(a.tx()));
    }
    if (!v_source_tx(trace, cfg, mode).holds) {
        return FactVerdict::fail(Fact::kLockActionValid, std::string(conjunct::kSourceTxValid));
    }

    std::size_t best_depth = 0;
    bool any_valid = false;
    std::string_view best_conjunct = conjunct::kNoValidDeposit;
    for (const DepositEvent* dep : trace.deposit_events()) {
        if (!v_deposit_event(*dep, cfg).holds) continue;
        any_valid = true;
        const FactVerdict consistency = c_action_deposit(a, *dep);
        if (consistency.holds) {
            return FactVerdict::pass(Fact::kLockActionValid, {state_key(*dep)});
        }
        // Conjunct ladder position of the failure, for attribution.
        static constexpr std::string_view kOrder[] = {conjunct::kAssetSrc, conjunct::kAmountSrc,
                                                      conjunct::kAssetDst, conjunct::kToDst};
        for (std::size_t d = 0; d < 4; ++d) {
            if (kOrder[d] == *consistency.failed_conjunct && d >= best_depth) {
                best_depth = d;
                best_conjunct = kOrder[d];
            }
        }
    }
    return FactVerdict::fail(Fact::kLockActionValid,
                             std::string(any_valid ? best_conjunct : conjunct::kNoValidDeposit));
}

// ---------------------------------------------------------------------------
// C(A_lk, A_unlk)

/// C(A_lk, A_unlk): the unlock instruction is based on a valid lock action
/// and preserves its destination chain, asset, and receiver. The rule
/// deliberately places no constraint on the destination amount; when
/// fee_tolerance_bps is configured, a strict-amount conjunct additionally
/// requires amount_dst within the tolerated deduction of amount_src.
inline FactVerdict c_lock_unlock_actions(const LockAction& alk, const UnlockAction& aun, const Trace& trace,
                                         const BridgeConfig& cfg, MatchingMode mode) {
    if (!v_lock_action(alk, trace, cfg, mode).holds) {
        return FactVerdict::fail(Fact::kLockUnlockConsistent, std::string(conjunct::kLockActionValid));
    }
    if (aun.dest_chain() != alk.dest_chain()) {
        return FactVerdict::fail(Fact::kLockUnlockConsistent, std::string(conjunct::kDestChain));
    }
    if (!assets_equal(aun.asset_dst(), alk.asset_dst())) {
        return FactVerdict::fail(Fact::kLockUnlockConsistent, std::string(conjunct::kAssetDst));
    }
    if (aun.to_dst() != alk.to_dst()) {
        return FactVerdict::fail(Fact::kLockUnlockConsistent, std::string(conjunct::kToDst));
    }
    if (cfg.fee_tolerance_bps) {
        const Amount& src = alk.amount_src();
        const Amount& dst = aun.amount_dst();
        const bool ok = dst <= src && (src - dst) * 10000 <= src * *cfg.fee_tolerance_bps;
        if (!ok) {
            return FactVerdict::fail(Fact::kLockUnlockConsistent, std::string(conjunct::kAmountDst));
        }
    }
    return FactVerdict::pass(Fact::kLockUnlockConsistent);
}

// ---------------------------------------------------------------------------
// State pool

/// All states known to the analyzer, indexed for candidate pruning when
/// evaluating V(E_unlk). Insertion order is preserved; candidate lists are
/// returned in insertion (ordinal) order so evaluation stays deterministic.
/// Reads are safe to share across threads once population is complete.
class StatePool {
  public:
    void add_trace(Trace trace) {
        const std::string key = tx_key(trace.tx());
        auto [it, inserted] = trace_index_.try_emplace(key, traces_.size());
        if (!inserted) {
            throw_error(Errc::kDuplicateEvent, "trace already present for " + key);
        }
        traces_.push_back(std::move(trace));
    }

    void add_lock_action(LockAction action) {
        lock_by_dest_[dest_key(action.dest_chain(), action.asset_dst(), action.to_dst())].push_back(
            lock_actions_.size());
        lock_actions_.push_back(std::move(action));
    }

    void add_unlock_action(UnlockAction action) {
        unlock_by_dest_[dest_key(action.dest_chain(), action.asset_dst(), action.to_dst())].push_back(
            unlock_actions_.size());
        unlock_actions_.push_back(std::move(action));
    }

    const Trace* trace_for(const TxRef& tx) const {
        auto it = trace_index_.find(tx_key(tx));
        return it == trace_index_.end() ? nullptr : &traces_[it->second];
    }

    /// T(tx): the known trace, or an empty trace when nothing was observed.
    Trace trace_for_or_empty(const TxRef& tx) const {
        const Trace* t = trace_for(tx);
        return t ? *t : Trace{tx.chain(), tx.hash(), {}};
    }

    const std::vector<Trace>& traces() const noexcept { return traces_; }
    const std::vector<LockAction>& lock_actions() const noexcept { return lock_actions_; }
    const std::vector<UnlockAction>& unlock_actions() const noexcept { return unlock_actions_; }

    std::vector<std::size_t> unlock_actions_for(const ChainId& chain, const AssetId& asset,
                                                const Address& to) const {
        auto it = unlock_by_dest_.find(dest_key(chain, asset, to));
        return it == unlock_by_dest_.end() ? std::vector<std::size_t>{} : it->second;
    }

    std::vector<std::size_t> lock_actions_for(const ChainId& chain, const AssetId& asset,
                                              const Address& to) const {
        auto it = lock_by_dest_.find(dest_key(chain, asset, to));
        return it == lock_by_dest_.end() ? std::vector<std::size_t>{} : it->second;
    }

  private:
    static std::string dest_key(const ChainId& chain, const AssetId& asset, const Address& to) {
        return chain.value() + "|" + asset_key(asset) + "|" + to.hex();
    }

    std::vector<Trace> traces_;
    std::map<std::string, std::size_t> trace_index_;
    std::vector<LockAction> lock_actions_;
    std::vector<UnlockAction> unlock_actions_;
    std::map<std::string, std::vector<std::size_t>> unlock_by_dest_;
    std::map<std::string, std::vector<std::size_t>> lock_by_dest_;
};

// ---------------------------------------------------------------------------
// V(E_unlk)

/// V(E_unlk): some authorized unlock action consistent with the event is
/// itself based on a valid lock action. Witnesses carry the (A_unlk, A_lk)
/// pair. Unauthorized actions never satisfy the quantifier; when one would
/// otherwise complete the chain, the verdict says so ("unauthorized").
/// Adding states to the pool can only flip this verdict from false to true.
inline FactVerdict v_unlock_event(const UnlockEvent& e, const StatePool& pool, const BridgeConfig& cfg,
                                  MatchingMode mode) {
    auto pair_completes = [&](const UnlockAction& aun) -> const LockAction* {
        if (!c_unlock_action_event(aun, e).holds) return nullptr;
        for (std::size_t j : pool.lock_actions_for(aun.dest_chain(), aun.asset_dst(), aun.to_dst())) {
            const LockAction& alk = pool.lock_actions()[j];
            const Trace trace = pool.trace_for_or_empty(alk.tx());
            if (c_lock_unlock_actions(alk, aun, trace, cfg, mode).holds) {
                return &alk;
            }
        }
        return nullptr;
    };

    const std::vector<std::size_t> candidates = pool.unlock_actions_for(e.tx().chain(), e.asset(), e.to());

    for (std::size_t i : candidates) {
        const UnlockAction& aun = pool.unlock_actions()[i];
        if (!aun.authorized()) continue;
        if (const LockAction* alk = pair_completes(aun)) {
            return FactVerdict::pass(Fact::kUnlockEventValid, {state_key(aun), state_key(*alk)});
        }
    }

    // Attribution. An unauthorized action that would otherwise complete the
    // chain is the most telling failure.
    for (std::size_t i : candidates) {
        const UnlockAction& aun = pool.unlock_actions()[i];
        if (aun.authorized()) continue;
        if (const LockAction* alk = pair_completes(aun)) {
            return FactVerdict::fail(Fact::kUnlockEventValid, std::string(conjunct::kUnauthorized),
                                     {state_key(aun), state_key(*alk)});
        }
    }

    // Deepest conjunct reached by any authorized action correlated with this
    // event. Ladder: C(A_unlk,E_unlk) [asset, asset=sc, amount, to^d] then
    // C(A_lk,A_unlk) [V(A_lk), ID^d, asset^d, to^d] over the best lock action.
    std::size_t best_depth = 0;
    bool any_authorized = false;
    std::string_view best_conjunct = conjunct::kNoAction;
    std::vector<std::string> best_witnesses;
    static constexpr std::string_view kEventOrder[] = {conjunct::kAsset, conjunct::kAssetIsEmitter,
                                                       conjunct::kAmount, conjunct::kToDst};
    static constexpr std::string_view kActionOrder[] = {conjunct::kLockActionValid, conjunct::kDestChain,
                                                        conjunct::kAssetDst, conjunct::kToDst};
    auto consider = [&](std::size_t depth, std::string_view conj, std::vector<std::string> witnesses) {
        if (best_witnesses.empty() || depth > best_depth) {
            best_depth = depth;
            best_conjunct = conj;
            best_witnesses = std::move(witnesses);
        }
    };
    for (std::size_t i : candidates) {
        const UnlockAction& aun = pool.unlock_actions()[i];
        if (!aun.authorized()) continue;
        any_authorized = true;
        const FactVerdict cue = c_unlock_action_event(aun, e);
        if (!cue.holds) {
            for (std::size_t d = 0; d < 4; ++d) {
                if (kEventOrder[d] == *cue.failed_conjunct) {
                    consider(d, kEventOrder[d], {state_key(aun)});
                }
            }
            continue;
        }
        // The event side passes; fault lies with the lock-action linkage.
        consider(4, conjunct::kLockActionValid, {state_key(aun)});
        for (const LockAction& alk : pool.lock_actions()) {
            const Trace trace = pool.trace_for_or_empty(alk.tx());
            const FactVerdict link = c_lock_unlock_actions(alk, aun, trace, cfg, mode);
            if (link.holds) continue;  // unreachable: a holding link returned above
            if (*link.failed_conjunct == conjunct::kAmountDst) {
                consider(8, conjunct::kAmountDst, {state_key(aun), state_key(alk)});
                continue;
            }
            for (std::size_t d = 0; d < 4; ++d) {
                if (kActionOrder[d] == *link.failed_conjunct) {
                    consider(4 + d, kActionOrder[d], {state_key(aun), state_key(alk)});
                }
            }
        }
    }
    if (!any_authorized) {
        return FactVerdict::fail(Fact::kUnlockEventValid, std::string(conjunct::kNoAction));
    }
    return FactVerdict::fail(Fact::kUnlockEventValid, std::string(best_conjunct),
                             std::move(best_witnesses));
}

}  // namespace xscope
