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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xscope/builder.hpp"
#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/properties.hpp"
#include "xscope/wire.hpp"

// Ground-truth dataset generator: benign transfers walking the full
// lock→deposit→parse→authorize→unlock workflow, plus parameterized attack
// injections per bug class. Every generated sequence is labeled; the
// labels are what the acceptance checks measure detection against.
//
// Each injected footprint is crafted to violate exactly the property its
// class maps to. The source-side attacks (UDE, IEP) therefore stop at the
// stage the attack corrupts: once a relayer acts on a bad transaction, the
// validity rules cascade and later stages fail too (the monitor suite
// exercises that cascade by synthesizing the victim relayer's follow-up).

namespace xscope {

/// Deterministic RNG. All draws go through explicit modulo reduction so the
/// byte stream depends only on std::mt19937_64, which is bit-exact across
/// platforms; std::uniform_int_distribution is not.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    std::uint64_t in_range(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    std::array<std::uint8_t, 32> hash32() {
        std::array<std::uint8_t, 32> out{};
        fill(out);
        return out;
    }

    std::array<std::uint8_t, 20> addr20() {
        std::array<std::uint8_t, 20> out{};
        fill(out);
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

  private:
    template <std::size_t N>
    void fill(std::array<std::uint8_t, N>& out) {
        for (std::size_t i = 0; i < N; i += 8) {
            std::uint64_t word = next();
            for (std::size_t k = 0; k < 8 && i + k < N; ++k) {
                out[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
            }
        }
    }

    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Scenario specification

struct InjectionSpec {
    BugClass bug;
    std::string variant;  // concrete variant, or "all" to cycle the class's set
    std::uint32_t count = 0;
};

struct AssetPairSpec {
    AssetId src;
    AssetId dst;
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    std::uint32_t benign_count = 0;
    std::vector<InjectionSpec> injections;
    ChainId src_chain{"src"};
    ChainId dst_chain{"dst"};
    std::uint32_t user_count = 4;
    std::vector<AssetPairSpec> assets;  // empty: default token/native mix
};

inline const std::vector<std::string>& variants_for(BugClass bug) {
    static const std::vector<std::string> ude{"no-lock",    "wrong-amount", "unsafe-transfer",
                                              "spoofed-lock", "wrong-asset",  "replayed-deposit"};
    static const std::vector<std::string> iep{"malicious-emitter", "fake-symbol", "wrong-amount-parse",
                                              "wrong-dest-asset", "wrong-recipient-parse"};
    static const std::vector<std::string> uu{"no-action",         "unauthorized-action", "redirected",
                                             "wrong-chain",       "wrong-asset-unlock",  "overpaid-unlock",
                                             "wrong-emitter-unlock"};
    switch (bug) {
        case BugClass::kUde: return ude;
        case BugClass::kIep: return iep;
        case BugClass::kUu: return uu;
    }
    return ude;
}

/// The failed-conjunct strings each property surfaces across the default
/// variant set. The cross-property strings V(tx^s) and V(A_lk) appear only
/// when an attack's downstream states are present (the monitor-replay path).
inline const std::set<std::string>& covered_conjuncts(Property p) {
    static const std::set<std::string> rd{"no-lock", "sc≠asset", "to≠router",
                                          "asset",   "amount",   "lock-consumed"};
    static const std::set<std::string> cp{"no-valid-deposit", "asset^s", "amount^s", "asset^d", "to^d"};
    static const std::set<std::string> au{"no-action", "unauthorized", "asset=sc", "amount",
                                          "to^d",      "ID^d",         "asset^d"};
    switch (p) {
        case Property::kRestrictedDeposit: return rd;
        case Property::kConsistentParsing: return cp;
        case Property::kAuthorizedUnlock: return au;
    }
    return rd;
}

inline ScenarioSpec parse_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_error(Errc::kSpecParse, e.what());
    }
    ScenarioSpec spec;
    try {
        if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("benign_count")) spec.benign_count = doc.at("benign_count").get<std::uint32_t>();
        if (doc.contains("user_count")) spec.user_count = doc.at("user_count").get<std::uint32_t>();
        if (doc.contains("chains")) {
            const auto& chains = doc.at("chains");
            if (!chains.is_array() || chains.size() != 2) {
                throw_error(Errc::kSpecParse, "chains must list exactly two chain ids");
            }
            spec.src_chain = ChainId{chains.at(0).get<std::string>()};
            spec.dst_chain = ChainId{chains.at(1).get<std::string>()};
        }
        if (doc.contains("injections")) {
            for (const auto& entry : doc.at("injections")) {
                InjectionSpec inj;
                inj.bug = parse_bug(entry.at("class").get<std::string>());
                inj.variant = entry.value("variant", std::string("all"));
                inj.count = entry.at("count").get<std::uint32_t>();
                if (inj.variant != "all") {
                    const auto& known = variants_for(inj.bug);
                    if (std::find(known.begin(), known.end(), inj.variant) == known.end()) {
                        throw_error(Errc::kUnknownVariant, "unknown " + std::string(bug_name(inj.bug)) +
                                                               " variant \"" + inj.variant + "\"");
                    }
                }
                spec.injections.push_back(std::move(inj));
            }
        }
        if (doc.contains("assets")) {
            for (const auto& entry : doc.at("assets")) {
                const std::string src_contract = entry.at("src").get<std::string>();
                const std::string dst_contract = entry.at("dst").get<std::string>();
                const std::string src_symbol = entry.value("src_symbol", std::string{});
                const std::string dst_symbol = entry.value("dst_symbol", std::string{});
                AssetId src = src_contract == "NATIVE"
                                  ? AssetId::native(spec.src_chain, src_symbol)
                                  : AssetId::token(spec.src_chain,
                                                   normalize_address(src_contract, spec.src_chain),
                                                   src_symbol);
                AssetId dst = dst_contract == "NATIVE"
                                  ? AssetId::native(spec.dst_chain, dst_symbol)
                                  : AssetId::token(spec.dst_chain,
                                                   normalize_address(dst_contract, spec.dst_chain),
                                                   dst_symbol);
                spec.assets.push_back(AssetPairSpec{std::move(src), std::move(dst)});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw_error(Errc::kSpecParse, e.what());
    } catch (const Error& e) {
        if (e.code() == Errc::kSpecParse || e.code() == Errc::kUnknownVariant) throw;
        throw_error(Errc::kSpecParse, e.what());
    }
    return spec;
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in{path};
    if (!in) {
        throw_error(Errc::kIo, "cannot open scenario file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

// ---------------------------------------------------------------------------
// Labeled output

struct SequenceLabel {
    BugClass bug;
    std::string variant;
};

/// Everything the generator knows about what it produced: the records, the
/// per-sequence attack labels, the keys certified violation-free, and the
/// bridge config of the generated world. labels and benign_keys partition
/// the generated sequences.
struct LabeledDataset {
    std::vector<RawRecord> records;  // generation order; ordinals assigned
    std::map<std::string, SequenceLabel> labels;
    std::set<std::string> benign_keys;
    std::map<std::string, std::vector<std::size_t>> sequence_records;  // key → record indices
    BridgeConfig config;
    ChainId src_chain{"src"};
    ChainId dst_chain{"dst"};
};

// ---------------------------------------------------------------------------
// Generator

class ScenarioGenerator {
  public:
    explicit ScenarioGenerator(ScenarioSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
        build_world();
    }

    /// Generates the whole dataset: the benign/injection schedule is built,
    /// shuffled (seeded), and emitted with monotone per-chain blocks.
    LabeledDataset gen_dataset() {
        struct Slot {
            bool benign;
            BugClass bug;
            std::string variant;
        };
        std::vector<Slot> plan;
        for (std::uint32_t i = 0; i < spec_.benign_count; ++i) {
            plan.push_back(Slot{true, BugClass::kUde, ""});
        }
        for (const InjectionSpec& inj : spec_.injections) {
            const std::vector<std::string>& known = variants_for(inj.bug);
            for (std::uint32_t i = 0; i < inj.count; ++i) {
                const std::string variant = inj.variant == "all" ? known[i % known.size()] : inj.variant;
                plan.push_back(Slot{false, inj.bug, variant});
            }
        }
        rng_.shuffle(plan);

        dataset_ = LabeledDataset{};
        dataset_.config = cfg_;
        dataset_.src_chain = spec_.src_chain;
        dataset_.dst_chain = spec_.dst_chain;
        for (const Slot& slot : plan) {
            if (slot.benign) {
                gen_benign();
            } else {
                switch (slot.bug) {
                    case BugClass::kUde: inject_ude(slot.variant); break;
                    case BugClass::kIep: inject_iep(slot.variant); break;
                    case BugClass::kUu: inject_uu(slot.variant); break;
                }
            }
        }
        return std::move(dataset_);
    }

    const BridgeConfig& config() const noexcept { return cfg_; }

    /// One benign transfer: the full five-stage sequence, consistent at
    /// every step by construction.
    void gen_benign() {
        const AssetPairSpec& pair = assets_[rng_.below(assets_.size())];
        const Address user_dst = users_dst_[rng_.below(users_dst_.size())];
        const Amount amount = draw_amount();
        const TxRef src_tx = fresh_src_tx();
        begin_sequence(source_sequence_key(src_tx.chain(), src_tx.hash()));

        emit_lock(src_tx, pair.src, amount, *router_src_);
        emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, user_dst);
        emit_lock_action(src_tx, pair.src, amount, pair.dst, user_dst);
        emit_unlock_action(src_tx, pair.dst, amount, user_dst, /*authorized=*/true);
        emit_unlock(pair.dst, amount, user_dst);

        dataset_.benign_keys.insert(current_key_);
    }

    /// Unrestricted deposit emitting: the source transaction carries a valid
    /// deposit that no valid, consistent lock justifies.
    void inject_ude(const std::string& variant) {
        const AssetPairSpec& pair = *token_pair_;
        const Address attacker = fresh_address(spec_.dst_chain);
        const Amount amount = draw_amount();
        const TxRef src_tx = fresh_src_tx();
        begin_sequence(source_sequence_key(src_tx.chain(), src_tx.hash()));
        dataset_.labels.emplace(current_key_, SequenceLabel{BugClass::kUde, variant});

        if (variant == "no-lock") {
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
        } else if (variant == "wrong-amount") {
            emit_lock(src_tx, pair.src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount * 1000, pair.dst, attacker);
        } else if (variant == "unsafe-transfer") {
            emit_lock(src_tx, pair.src, amount, fresh_address(spec_.src_chain));
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
        } else if (variant == "spoofed-lock") {
            emit_event(LockEvent{next_index(src_tx), *evil_contract_, pair.src, amount, *router_src_,
                                 block_src_});
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
        } else if (variant == "wrong-asset") {
            emit_lock(src_tx, second_token_pair_->src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
        } else if (variant == "replayed-deposit") {
            emit_lock(src_tx, pair.src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, attacker);
        } else {
            throw_error(Errc::kUnknownVariant, "UDE variant \"" + variant + "\"");
        }
    }

    /// Inconsistent event parsing: the relayer's lock action does not match
    /// any valid deposit of its transaction.
    void inject_iep(const std::string& variant) {
        const AssetPairSpec& pair = *token_pair_;
        const Address user_dst = fresh_address(spec_.dst_chain);
        const Amount amount = draw_amount();
        const TxRef src_tx = fresh_src_tx();
        begin_sequence(source_sequence_key(src_tx.chain(), src_tx.hash()));
        dataset_.labels.emplace(current_key_, SequenceLabel{BugClass::kIep, variant});

        if (variant == "malicious-emitter") {
            emit_deposit(src_tx, *evil_contract_, pair.src, amount, pair.dst, user_dst);
            emit_lock_action(src_tx, pair.src, amount, pair.dst, user_dst);
        } else if (variant == "fake-symbol") {
            emit_lock(src_tx, *fake_native_token_, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, *fake_native_token_, amount, pair.dst, user_dst);
            emit_lock_action(src_tx, *native_src_, amount, pair.dst, user_dst);
        } else if (variant == "wrong-amount-parse") {
            emit_lock(src_tx, pair.src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, user_dst);
            emit_lock_action(src_tx, pair.src, amount * 100, pair.dst, user_dst);
        } else if (variant == "wrong-dest-asset") {
            emit_lock(src_tx, pair.src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, user_dst);
            emit_lock_action(src_tx, pair.src, amount, *cold_token_dst_, user_dst);
        } else if (variant == "wrong-recipient-parse") {
            emit_lock(src_tx, pair.src, amount, *router_src_);
            emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, user_dst);
            emit_lock_action(src_tx, pair.src, amount, pair.dst, fresh_address(spec_.dst_chain));
        } else {
            throw_error(Errc::kUnknownVariant, "IEP variant \"" + variant + "\"");
        }
    }

    /// Unauthorized unlocking: the destination unlock event has no
    /// authorized action rooted in a valid lock behind it.
    void inject_uu(const std::string& variant) {
        const AssetPairSpec& pair = *token_pair_;
        const Address recipient = fresh_address(spec_.dst_chain);
        const Amount amount = draw_amount();

        if (variant == "no-action") {
            const TxRef dst_tx = fresh_dst_tx();
            begin_sequence("unlk:" + tx_key(dst_tx) + "#0");
            dataset_.labels.emplace(current_key_, SequenceLabel{BugClass::kUu, variant});
            emit_event(UnlockEvent{dst_tx, *pair.dst.contract(), pair.dst, amount, recipient, block_dst_});
            return;
        }

        const TxRef src_tx = fresh_src_tx();
        begin_sequence(source_sequence_key(src_tx.chain(), src_tx.hash()));
        dataset_.labels.emplace(current_key_, SequenceLabel{BugClass::kUu, variant});
        emit_lock(src_tx, pair.src, amount, *router_src_);
        emit_deposit(src_tx, *router_src_, pair.src, amount, pair.dst, recipient);
        emit_lock_action(src_tx, pair.src, amount, pair.dst, recipient);

        if (variant == "unauthorized-action") {
            emit_unlock_action(src_tx, pair.dst, amount, recipient, /*authorized=*/false);
            emit_unlock(pair.dst, amount, recipient);
        } else if (variant == "redirected") {
            const Address attacker = fresh_address(spec_.dst_chain);
            emit_unlock_action(src_tx, pair.dst, amount, attacker, /*authorized=*/true);
            emit_unlock(pair.dst, amount, attacker);
        } else if (variant == "wrong-chain") {
            // The unlock lands back on the source chain.
            const Address attacker = fresh_address(spec_.src_chain);
            emit_unlock_action(src_tx, pair.src, amount, attacker, /*authorized=*/true);
            const TxRef unlock_tx = fresh_src_tx_same_block();
            emit_event(UnlockEvent{unlock_tx, *pair.src.contract(), pair.src, amount, attacker,
                                   block_src_});
        } else if (variant == "wrong-asset-unlock") {
            emit_unlock_action(src_tx, *cold_token_dst_, amount, recipient, /*authorized=*/true);
            emit_unlock(*cold_token_dst_, amount, recipient);
        } else if (variant == "overpaid-unlock") {
            emit_unlock_action(src_tx, pair.dst, amount, recipient, /*authorized=*/true);
            // The residual source-side sequence stays clean; the orphan
            // overpaying unlock event carries the label.
            dataset_.labels.erase(current_key_);
            dataset_.benign_keys.insert(current_key_);
            const TxRef dst_tx = fresh_dst_tx();
            begin_sequence("unlk:" + tx_key(dst_tx) + "#0");
            dataset_.labels.emplace(current_key_, SequenceLabel{BugClass::kUu, variant});
            emit_event(UnlockEvent{dst_tx, *pair.dst.contract(), pair.dst, amount * 10, recipient,
                                   block_dst_});
        } else if (variant == "wrong-emitter-unlock") {
            emit_unlock_action(src_tx, pair.dst, amount, recipient, /*authorized=*/true);
            const TxRef dst_tx = fresh_dst_tx();
            emit_event(UnlockEvent{dst_tx, *evil_contract_dst_, pair.dst, amount, recipient, block_dst_});
        } else {
            throw_error(Errc::kUnknownVariant, "UU variant \"" + variant + "\"");
        }
    }

  private:
    void build_world() {
        const ChainId& src = spec_.src_chain;
        const ChainId& dst = spec_.dst_chain;
        router_src_ = Address{src, rng_.addr20()};
        router_dst_ = Address{dst, rng_.addr20()};
        evil_contract_ = Address{src, rng_.addr20()};
        evil_contract_dst_ = Address{dst, rng_.addr20()};

        cfg_ = BridgeConfig{};
        cfg_.routers[src].insert(*router_src_);
        cfg_.routers[dst].insert(*router_dst_);
        cfg_.native_symbols[src] = "ETH";
        cfg_.native_symbols[dst] = "BNB";

        native_src_ = AssetId::native(src, "ETH");
        fake_native_token_ = AssetId::token(src, Address{src, rng_.addr20()}, "ETH");
        cold_token_dst_ = AssetId::token(dst, Address{dst, rng_.addr20()}, "WCOLD");

        if (spec_.assets.empty()) {
            assets_.push_back(AssetPairSpec{AssetId::token(src, Address{src, rng_.addr20()}, "TKA"),
                                            AssetId::token(dst, Address{dst, rng_.addr20()}, "WTKA")});
            assets_.push_back(AssetPairSpec{*native_src_, AssetId::token(dst, Address{dst, rng_.addr20()},
                                                                         "WETH")});
            assets_.push_back(AssetPairSpec{AssetId::token(src, Address{src, rng_.addr20()}, "TKB"),
                                            AssetId::native(dst, "BNB")});
        } else {
            assets_ = spec_.assets;
        }
        // Injection footprints need a token→token pair and a second,
        // distinct source token.
        token_pair_ = assets_.front();
        for (const AssetPairSpec& p : assets_) {
            if (!p.src.is_native() && !p.dst.is_native()) {
                token_pair_ = p;
                break;
            }
        }
        second_token_pair_ = token_pair_;
        for (const AssetPairSpec& p : assets_) {
            if (!p.src.is_native() && !assets_equal(p.src, token_pair_->src)) {
                second_token_pair_ = p;
                break;
            }
        }
        if (assets_equal(second_token_pair_->src, token_pair_->src)) {
            second_token_pair_ =
                AssetPairSpec{AssetId::token(src, Address{src, rng_.addr20()}, "TKX"), token_pair_->dst};
        }

        for (std::uint32_t i = 0; i < std::max<std::uint32_t>(spec_.user_count, 1); ++i) {
            users_src_.push_back(Address{src, rng_.addr20()});
            users_dst_.push_back(Address{dst, rng_.addr20()});
        }
    }

    // -- emission helpers -------------------------------------------------

    void begin_sequence(std::string key) {
        current_key_ = std::move(key);
        block_src_ += rng_.in_range(1, 3);
        block_dst_ += rng_.in_range(1, 3);
        index_in_tx_.clear();
    }

    TxRef fresh_src_tx() { return TxRef{spec_.src_chain, rng_.hash32(), 0}; }
    TxRef fresh_src_tx_same_block() { return TxRef{spec_.src_chain, rng_.hash32(), 0}; }
    TxRef fresh_dst_tx() { return TxRef{spec_.dst_chain, rng_.hash32(), 0}; }

    std::uint32_t bump_index(const TxRef& tx) {
        return index_in_tx_[tx_key(tx)]++;
    }

    TxRef next_index(const TxRef& tx) { return tx.with_index(bump_index(tx)); }

    Amount draw_amount() {
        // Smallest-unit amounts across several magnitudes, including values
        // beyond 64 bits.
        const std::uint64_t mantissa = rng_.in_range(1, 999'999);
        const std::uint64_t scale = rng_.below(4);
        Amount amount{mantissa};
        for (std::uint64_t i = 0; i < scale; ++i) amount *= 1'000'000;
        if (scale == 3) amount *= Amount{1'000'000};  // up to ~1e30
        return amount;
    }

    Address fresh_address(const ChainId& chain) { return Address{chain, rng_.addr20()}; }

    void push_record(RawRecord rec) {
        rec.ordinal = dataset_.records.size();
        dataset_.sequence_records[current_key_].push_back(dataset_.records.size());
        dataset_.records.push_back(std::move(rec));
    }

    void emit_event(LockEvent e) { push_record(RawRecord{std::move(e), 0, false}); }
    void emit_event(DepositEvent e) { push_record(RawRecord{std::move(e), 0, false}); }
    void emit_event(UnlockEvent e) { push_record(RawRecord{std::move(e), 0, false}); }

    /// Lock stage: a token lock event, or the native value transfer the
    /// builder will synthesize into one.
    void emit_lock(const TxRef& tx, const AssetId& asset, const Amount& amount, const Address& to) {
        const TxRef at = next_index(tx);
        if (asset.is_native()) {
            const Address from = users_src_[rng_.below(users_src_.size())];
            push_record(RawRecord{NativeTransfer{at, from, amount, to, block_src_, asset.symbol()}, 0,
                                  false});
        } else {
            emit_event(LockEvent{at, *asset.contract(), asset, amount, to, block_src_});
        }
    }

    void emit_deposit(const TxRef& tx, const Address& emitter, const AssetId& asset_src,
                      const Amount& amount, const AssetId& asset_dst, const Address& to_dst) {
        emit_event(DepositEvent{next_index(tx), emitter, asset_src, amount, asset_dst.chain(),
                                asset_dst.without_symbol(), to_dst, block_src_});
    }

    void emit_lock_action(const TxRef& tx, const AssetId& asset_src, const Amount& amount,
                          const AssetId& asset_dst, const Address& to_dst) {
        push_record(RawRecord{LockAction{tx.with_index(0), tx.chain(), asset_dst.chain(), asset_src,
                                         amount, asset_dst.without_symbol(), to_dst, block_src_},
                              0, false});
    }

    void emit_unlock_action(const TxRef& src_tx, const AssetId& asset_dst, const Amount& amount,
                            const Address& to_dst, bool authorized) {
        push_record(RawRecord{UnlockAction{src_tx.with_index(0), asset_dst.chain(),
                                           asset_dst.without_symbol(), amount, to_dst, authorized,
                                           block_dst_},
                              0, false});
    }

    /// Unlock stage on the destination chain: a token unlock event, or the
    /// native value transfer out of the router.
    void emit_unlock(const AssetId& asset_dst, const Amount& amount, const Address& to) {
        const TxRef tx = next_index(asset_dst.chain() == spec_.dst_chain ? fresh_dst_tx()
                                                                         : fresh_src_tx_same_block());
        const std::uint64_t block = asset_dst.chain() == spec_.dst_chain ? block_dst_ : block_src_;
        if (asset_dst.is_native()) {
            const Address router = asset_dst.chain() == spec_.dst_chain ? *router_dst_ : *router_src_;
            push_record(
                RawRecord{NativeTransfer{tx, router, amount, to, block, asset_dst.symbol()}, 0, false});
        } else {
            emit_event(UnlockEvent{tx, *asset_dst.contract(), asset_dst, amount, to, block});
        }
    }

    ScenarioSpec spec_;
    Rng rng_;
    BridgeConfig cfg_;
    std::optional<Address> router_src_;
    std::optional<Address> router_dst_;
    std::optional<Address> evil_contract_;
    std::optional<Address> evil_contract_dst_;
    std::optional<AssetId> native_src_;
    std::optional<AssetId> fake_native_token_;
    std::optional<AssetId> cold_token_dst_;
    std::optional<AssetPairSpec> token_pair_;
    std::optional<AssetPairSpec> second_token_pair_;
    std::vector<AssetPairSpec> assets_;
    std::vector<Address> users_src_;
    std::vector<Address> users_dst_;
    std::uint64_t block_src_ = 1000;
    std::uint64_t block_dst_ = 5000;
    std::map<std::string, std::uint32_t> index_in_tx_;
    std::string current_key_;
    LabeledDataset dataset_;
};

inline LabeledDataset gen_dataset(const ScenarioSpec& spec) {
    ScenarioGenerator generator{spec};
    return generator.gen_dataset();
}

// ---------------------------------------------------------------------------
// Dataset files

inline constexpr std::string_view kManifestHeader = "#xscope-labels v1";

/// Writes per-chain trace files, the relayer action log, the label
/// manifest, and the world config into `dir`. Files are canonical (sorted
/// records) and written atomically.
struct DatasetFiles {
    std::vector<std::filesystem::path> trace_files;
    std::filesystem::path action_log;
    std::filesystem::path manifest;
    std::filesystem::path config;
};

inline DatasetFiles write_dataset(const LabeledDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::map<std::string, std::vector<RawRecord>> per_chain;
    std::vector<RawRecord> actions;
    for (const RawRecord& rec : ds.records) {
        if (rec.kind() == RecordKind::kLockAction) {
            actions.push_back(rec);
        } else if (rec.kind() == RecordKind::kUnlockAction) {
            actions.push_back(rec);
        } else {
            const TxRef& tx = std::visit(
                [](const auto& p) -> const TxRef& {
                    using T = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<T, UnlockAction>) {
                        return p.src_tx();
                    } else {
                        return p.tx();
                    }
                },
                rec.payload);
            per_chain[tx.chain().value()].push_back(rec);
        }
    }

    DatasetFiles files;
    for (auto& [chain, records] : per_chain) {
        canonicalize_records(records);
        const std::filesystem::path path = dir / (chain + ".trace");
        write_trace_file(path, records);
        files.trace_files.push_back(path);
    }
    canonicalize_records(actions);
    files.action_log = dir / "relayer.actions";
    write_trace_file(files.action_log, actions);

    std::string manifest{kManifestHeader};
    manifest += '\n';
    std::map<std::string, std::string> lines;
    for (const auto& [key, label] : ds.labels) {
        lines[key] = key + "," + std::string(bug_name(label.bug)) + "," + label.variant;
    }
    for (const std::string& key : ds.benign_keys) {
        lines[key] = key + ",benign,";
    }
    for (const auto& [key, line] : lines) {
        manifest += line;
        manifest += '\n';
    }
    files.manifest = dir / "labels.manifest";
    {
        const std::filesystem::path tmp = files.manifest.string() + ".tmp";
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out) throw_error(Errc::kIo, "cannot write " + tmp.string());
        out << manifest;
        out.close();
        std::filesystem::rename(tmp, files.manifest);
    }

    files.config = dir / "config.json";
    {
        const std::filesystem::path tmp = files.config.string() + ".tmp";
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out) throw_error(Errc::kIo, "cannot write " + tmp.string());
        out << config_to_json(ds.config);
        out.close();
        std::filesystem::rename(tmp, files.config);
    }
    return files;
}

}  // namespace xscope
