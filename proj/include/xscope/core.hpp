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
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "xscope/errors.hpp"

// Domain state types shared by every other module: chain/address/asset
// identifiers, the on-chain events, the off-chain relayer actions, per-tx
// traces, and the five-stage execution sequence. Everything here is a value
// type, immutable after construction, and validates its own invariants.

namespace xscope {

// ---------------------------------------------------------------------------
// Hex helpers

namespace detail {

inline int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

inline char nibble_hex(unsigned v) {
    return static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10));
}

}  // namespace detail

template <std::size_t N>
std::string to_hex(const std::array<std::uint8_t, N>& bytes) {
    std::string out;
    out.reserve(2 + 2 * N);
    out += "0x";
    for (std::uint8_t b : bytes) {
        out += detail::nibble_hex(b >> 4);
        out += detail::nibble_hex(b & 0x0f);
    }
    return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> parse_hex_bytes(std::string_view raw, Errc on_error) {
    if (raw.size() != 2 + 2 * N || raw[0] != '0' || (raw[1] != 'x' && raw[1] != 'X')) {
        throw_error(on_error, "expected 0x-prefixed hex of " + std::to_string(2 * N) +
                                  " digits, got \"" + std::string(raw) + "\"");
    }
    std::array<std::uint8_t, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        const int hi = detail::hex_nibble(raw[2 + 2 * i]);
        const int lo = detail::hex_nibble(raw[3 + 2 * i]);
        if (hi < 0 || lo < 0) {
            throw_error(on_error, "non-hex character in \"" + std::string(raw) + "\"");
        }
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Identifiers

/// Identifies one blockchain ("src", "dst", "eth", ...). Compared by exact
/// string equality.
class ChainId {
  public:
    explicit ChainId(std::string value) : value_(std::move(value)) {
        if (value_.empty()) {
            throw_error(Errc::kInvalidState, "chain id must be nonempty");
        }
        for (char c : value_) {
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                            (c >= '0' && c <= '9') || c == '_' || c == '-';
            if (!ok) {
                throw_error(Errc::kInvalidState, "chain id has invalid character: \"" + value_ + "\"");
            }
        }
    }

    const std::string& value() const noexcept { return value_; }

    friend auto operator<=>(const ChainId&, const ChainId&) = default;

  private:
    std::string value_;
};

/// A 20-byte account/contract address bound to its chain. Equality is byte
/// equality plus chain equality; rendering is lowercase 0x-hex.
class Address {
  public:
    static constexpr std::size_t kSize = 20;

    Address(ChainId chain, std::array<std::uint8_t, kSize> bytes)
        : chain_(std::move(chain)), bytes_(bytes) {}

    const ChainId& chain() const noexcept { return chain_; }
    const std::array<std::uint8_t, kSize>& bytes() const noexcept { return bytes_; }
    std::string hex() const { return to_hex(bytes_); }

    bool is_zero() const noexcept {
        return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
    }

    friend auto operator<=>(const Address&, const Address&) = default;

  private:
    ChainId chain_;
    std::array<std::uint8_t, kSize> bytes_;
};

/// Parses a 0x-prefixed 40-hex-digit address (mixed case allowed) into its
/// canonical lowercase byte form.
inline Address normalize_address(std::string_view raw, const ChainId& chain) {
    return Address{chain, parse_hex_bytes<Address::kSize>(raw, Errc::kMalformedAddress)};
}

/// Transaction reference: (chain, 32-byte hash) identifies the transaction,
/// index orders events inside it.
class TxRef {
  public:
    static constexpr std::size_t kHashSize = 32;

    TxRef(ChainId chain, std::array<std::uint8_t, kHashSize> hash, std::uint32_t index)
        : chain_(std::move(chain)), hash_(hash), index_(index) {}

    const ChainId& chain() const noexcept { return chain_; }
    const std::array<std::uint8_t, kHashSize>& hash() const noexcept { return hash_; }
    std::uint32_t index() const noexcept { return index_; }
    std::string hash_hex() const { return to_hex(hash_); }

    TxRef with_index(std::uint32_t index) const { return TxRef{chain_, hash_, index}; }

    friend auto operator<=>(const TxRef&, const TxRef&) = default;

  private:
    ChainId chain_;
    std::array<std::uint8_t, kHashSize> hash_;
    std::uint32_t index_;
};

/// True when two references point into the same transaction (index ignored).
inline bool same_tx(const TxRef& a, const TxRef& b) {
    return a.chain() == b.chain() && a.hash() == b.hash();
}

inline TxRef parse_tx_ref(const ChainId& chain, std::string_view hash_hex, std::uint32_t index) {
    return TxRef{chain, parse_hex_bytes<TxRef::kHashSize>(hash_hex, Errc::kMalformedHash), index};
}

// ---------------------------------------------------------------------------
// Assets and amounts

/// Token amounts in the asset's smallest unit. 256-bit checked arithmetic:
/// overflow and negative results throw instead of wrapping.
using Amount = boost::multiprecision::checked_uint256_t;

inline Amount parse_amount(std::string_view text) {
    if (text.empty()) {
        throw_error(Errc::kMalformedAmount, "empty amount");
    }
    for (char c : text) {
        if (c < '0' || c > '9') {
            throw_error(Errc::kMalformedAmount, "non-digit in amount \"" + std::string(text) + "\"");
        }
    }
    return Amount{std::string(text)};
}

inline std::string amount_to_string(const Amount& value) {
    return value.str();
}

/// An asset on one chain: either the chain's native coin (no contract) or a
/// token contract. The display symbol never participates in equality; the
/// semantic identity is (chain, contract). operator== is full structural
/// equality (symbol included) for serialization round-trips; rules must use
/// assets_equal().
class AssetId {
  public:
    static AssetId token(ChainId chain, Address contract, std::string symbol = "") {
        if (contract.chain() != chain) {
            throw_error(Errc::kInvalidState, "asset contract chain " + contract.chain().value() +
                                                 " does not match asset chain " + chain.value());
        }
        return AssetId{std::move(chain), std::move(contract), std::move(symbol)};
    }

    static AssetId native(ChainId chain, std::string symbol = "") {
        return AssetId{std::move(chain), std::nullopt, std::move(symbol)};
    }

    const ChainId& chain() const noexcept { return chain_; }
    bool is_native() const noexcept { return !contract_.has_value(); }
    const std::optional<Address>& contract() const noexcept { return contract_; }
    const std::string& symbol() const noexcept { return symbol_; }

    /// The same asset identity without its display symbol. States whose
    /// wire encoding has no symbol column for this position hold this form.
    AssetId without_symbol() const { return AssetId{chain_, contract_, ""}; }

    friend bool operator==(const AssetId&, const AssetId&) = default;

  private:
    AssetId(ChainId chain, std::optional<Address> contract, std::string symbol)
        : chain_(std::move(chain)), contract_(std::move(contract)), symbol_(std::move(symbol)) {}

    ChainId chain_;
    std::optional<Address> contract_;
    std::string symbol_;
};

/// Semantic asset identity: same chain and same contract (or both native).
/// Symbols are deliberately ignored; a token whose symbol mimics the native
/// coin is still a different asset.
inline bool assets_equal(const AssetId& a, const AssetId& b) {
    return a.chain() == b.chain() && a.contract() == b.contract();
}

/// Stable string identity used by pool indexes and correlation keys.
inline std::string asset_key(const AssetId& a) {
    return a.chain().value() + "|" + (a.is_native() ? std::string("NATIVE") : a.contract()->hex());
}

// ---------------------------------------------------------------------------
// On-chain events

/// Token-contract (or synthesized native-transfer) event recording assets
/// moved on the source chain. `synthesized_native` is set only by the trace
/// builder for native value transfers; it cannot arrive on the wire, which is
/// what makes the native validity convention spoof-resistant.
class LockEvent {
  public:
    LockEvent(TxRef tx, Address sc, AssetId asset, Amount amount, Address to, std::uint64_t block,
              bool synthesized_native = false)
        : tx_(std::move(tx)),
          sc_(std::move(sc)),
          asset_(std::move(asset)),
          amount_(std::move(amount)),
          to_(std::move(to)),
          block_(block),
          synthesized_native_(synthesized_native) {
        if (tx_.chain() != sc_.chain() || tx_.chain() != asset_.chain() || tx_.chain() != to_.chain()) {
            throw_error(Errc::kInvalidState, "lock event chains disagree in tx " + tx_.hash_hex());
        }
        if (synthesized_native_ && !asset_.is_native()) {
            throw_error(Errc::kInvalidState, "synthesized lock event must carry the native asset");
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const Address& sc() const noexcept { return sc_; }
    const AssetId& asset() const noexcept { return asset_; }
    const Amount& amount() const noexcept { return amount_; }
    const Address& to() const noexcept { return to_; }
    std::uint64_t block() const noexcept { return block_; }
    bool synthesized_native() const noexcept { return synthesized_native_; }

    friend bool operator==(const LockEvent&, const LockEvent&) = default;

  private:
    TxRef tx_;
    Address sc_;
    AssetId asset_;
    Amount amount_;
    Address to_;
    std::uint64_t block_;
    bool synthesized_native_;
};

/// Router-emitted event on the source chain advertising a lock to the
/// relayer: what was locked and what should be released where.
class DepositEvent {
  public:
    DepositEvent(TxRef tx, Address sc, AssetId asset_src, Amount amount_src, ChainId dest_chain,
                 AssetId asset_dst, Address to_dst, std::uint64_t block)
        : tx_(std::move(tx)),
          sc_(std::move(sc)),
          asset_src_(std::move(asset_src)),
          amount_src_(std::move(amount_src)),
          dest_chain_(std::move(dest_chain)),
          asset_dst_(std::move(asset_dst)),
          to_dst_(std::move(to_dst)),
          block_(block) {
        if (tx_.chain() != sc_.chain() || tx_.chain() != asset_src_.chain()) {
            throw_error(Errc::kInvalidState, "deposit event source chains disagree in tx " + tx_.hash_hex());
        }
        if (asset_dst_.chain() != dest_chain_ || to_dst_.chain() != dest_chain_) {
            throw_error(Errc::kInvalidState, "deposit event destination chains disagree in tx " + tx_.hash_hex());
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const Address& sc() const noexcept { return sc_; }
    const AssetId& asset_src() const noexcept { return asset_src_; }
    const Amount& amount_src() const noexcept { return amount_src_; }
    const ChainId& dest_chain() const noexcept { return dest_chain_; }
    const AssetId& asset_dst() const noexcept { return asset_dst_; }
    const Address& to_dst() const noexcept { return to_dst_; }
    std::uint64_t block() const noexcept { return block_; }

    friend bool operator==(const DepositEvent&, const DepositEvent&) = default;

  private:
    TxRef tx_;
    Address sc_;
    AssetId asset_src_;
    Amount amount_src_;
    ChainId dest_chain_;
    AssetId asset_dst_;
    Address to_dst_;
    std::uint64_t block_;
};

/// Destination-chain event recording assets released to a user.
class UnlockEvent {
  public:
    UnlockEvent(TxRef tx, Address sc, AssetId asset, Amount amount, Address to, std::uint64_t block,
                bool synthesized_native = false)
        : tx_(std::move(tx)),
          sc_(std::move(sc)),
          asset_(std::move(asset)),
          amount_(std::move(amount)),
          to_(std::move(to)),
          block_(block),
          synthesized_native_(synthesized_native) {
        if (tx_.chain() != sc_.chain() || tx_.chain() != asset_.chain() || tx_.chain() != to_.chain()) {
            throw_error(Errc::kInvalidState, "unlock event chains disagree in tx " + tx_.hash_hex());
        }
        if (synthesized_native_ && !asset_.is_native()) {
            throw_error(Errc::kInvalidState, "synthesized unlock event must carry the native asset");
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const Address& sc() const noexcept { return sc_; }
    const AssetId& asset() const noexcept { return asset_; }
    const Amount& amount() const noexcept { return amount_; }
    const Address& to() const noexcept { return to_; }
    std::uint64_t block() const noexcept { return block_; }
    bool synthesized_native() const noexcept { return synthesized_native_; }

    friend bool operator==(const UnlockEvent&, const UnlockEvent&) = default;

  private:
    TxRef tx_;
    Address sc_;
    AssetId asset_;
    Amount amount_;
    Address to_;
    std::uint64_t block_;
    bool synthesized_native_;
};

using ChainEvent = std::variant<LockEvent, DepositEvent, UnlockEvent>;

inline const TxRef& event_tx(const ChainEvent& e) {
    return std::visit([](const auto& ev) -> const TxRef& { return ev.tx(); }, e);
}

inline std::uint64_t event_block(const ChainEvent& e) {
    return std::visit([](const auto& ev) { return ev.block(); }, e);
}

// ---------------------------------------------------------------------------
// Off-chain relayer actions

/// The relayer's parse of one deposit: which source lock it believes
/// happened and what it will release on the destination chain. `ordinal` is
/// ingestion metadata (stable tie-break identity), not part of the state.
class LockAction {
  public:
    LockAction(TxRef tx, ChainId src_chain, ChainId dest_chain, AssetId asset_src, Amount amount_src,
               AssetId asset_dst, Address to_dst, std::uint64_t block, std::uint64_t ordinal = 0)
        : tx_(std::move(tx)),
          src_chain_(std::move(src_chain)),
          dest_chain_(std::move(dest_chain)),
          asset_src_(std::move(asset_src)),
          amount_src_(std::move(amount_src)),
          asset_dst_(std::move(asset_dst)),
          to_dst_(std::move(to_dst)),
          block_(block),
          ordinal_(ordinal) {
        if (asset_src_.chain() != src_chain_ || tx_.chain() != src_chain_) {
            throw_error(Errc::kInvalidState, "lock action source chains disagree in tx " + tx_.hash_hex());
        }
        if (asset_dst_.chain() != dest_chain_ || to_dst_.chain() != dest_chain_) {
            throw_error(Errc::kInvalidState, "lock action destination chains disagree in tx " + tx_.hash_hex());
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const ChainId& src_chain() const noexcept { return src_chain_; }
    const ChainId& dest_chain() const noexcept { return dest_chain_; }
    const AssetId& asset_src() const noexcept { return asset_src_; }
    const Amount& amount_src() const noexcept { return amount_src_; }
    const AssetId& asset_dst() const noexcept { return asset_dst_; }
    const Address& to_dst() const noexcept { return to_dst_; }
    std::uint64_t block() const noexcept { return block_; }
    std::uint64_t ordinal() const noexcept { return ordinal_; }

    LockAction with_ordinal(std::uint64_t ordinal) const {
        LockAction copy = *this;
        copy.ordinal_ = ordinal;
        return copy;
    }

    friend bool operator==(const LockAction& a, const LockAction& b) {
        return a.tx_ == b.tx_ && a.src_chain_ == b.src_chain_ && a.dest_chain_ == b.dest_chain_ &&
               a.asset_src_ == b.asset_src_ && a.amount_src_ == b.amount_src_ &&
               a.asset_dst_ == b.asset_dst_ && a.to_dst_ == b.to_dst_ && a.block_ == b.block_;
    }

  private:
    TxRef tx_;
    ChainId src_chain_;
    ChainId dest_chain_;
    AssetId asset_src_;
    Amount amount_src_;
    AssetId asset_dst_;
    Address to_dst_;
    std::uint64_t block_;
    std::uint64_t ordinal_;
};

/// A relayer-signed release instruction for the destination chain. The
/// `authorized` flag stands in for the relayer's signature checks; an
/// unauthorized action never validates an unlock.
class UnlockAction {
  public:
    UnlockAction(TxRef src_tx, ChainId dest_chain, AssetId asset_dst, Amount amount_dst, Address to_dst,
                 bool authorized, std::uint64_t block, std::uint64_t ordinal = 0)
        : src_tx_(std::move(src_tx)),
          dest_chain_(std::move(dest_chain)),
          asset_dst_(std::move(asset_dst)),
          amount_dst_(std::move(amount_dst)),
          to_dst_(std::move(to_dst)),
          authorized_(authorized),
          block_(block),
          ordinal_(ordinal) {
        if (asset_dst_.chain() != dest_chain_ || to_dst_.chain() != dest_chain_) {
            throw_error(Errc::kInvalidState,
                        "unlock action destination chains disagree for source tx " + src_tx_.hash_hex());
        }
    }

    const TxRef& src_tx() const noexcept { return src_tx_; }
    const ChainId& dest_chain() const noexcept { return dest_chain_; }
    const AssetId& asset_dst() const noexcept { return asset_dst_; }
    const Amount& amount_dst() const noexcept { return amount_dst_; }
    const Address& to_dst() const noexcept { return to_dst_; }
    bool authorized() const noexcept { return authorized_; }
    std::uint64_t block() const noexcept { return block_; }
    std::uint64_t ordinal() const noexcept { return ordinal_; }

    UnlockAction with_ordinal(std::uint64_t ordinal) const {
        UnlockAction copy = *this;
        copy.ordinal_ = ordinal;
        return copy;
    }

    friend bool operator==(const UnlockAction& a, const UnlockAction& b) {
        return a.src_tx_ == b.src_tx_ && a.dest_chain_ == b.dest_chain_ && a.asset_dst_ == b.asset_dst_ &&
               a.amount_dst_ == b.amount_dst_ && a.to_dst_ == b.to_dst_ && a.authorized_ == b.authorized_ &&
               a.block_ == b.block_;
    }

  private:
    TxRef src_tx_;
    ChainId dest_chain_;
    AssetId asset_dst_;
    Amount amount_dst_;
    Address to_dst_;
    bool authorized_;
    std::uint64_t block_;
    std::uint64_t ordinal_;
};

// ---------------------------------------------------------------------------
// Traces

/// All events observed in one transaction, ordered by log index. The tx
/// reference identifies (chain, hash); its index is fixed at zero.
class Trace {
  public:
    Trace(ChainId chain, std::array<std::uint8_t, TxRef::kHashSize> hash, std::vector<ChainEvent> events)
        : tx_(std::move(chain), hash, 0), events_(std::move(events)) {
        std::optional<std::uint32_t> last_index;
        for (const ChainEvent& e : events_) {
            const TxRef& etx = event_tx(e);
            if (!same_tx(etx, tx_)) {
                throw_error(Errc::kInvalidState, "trace " + tx_.hash_hex() + " contains event from tx " +
                                                     etx.hash_hex());
            }
            if (last_index && etx.index() <= *last_index) {
                throw_error(etx.index() == *last_index ? Errc::kDuplicateEvent : Errc::kInvalidState,
                            "trace " + tx_.hash_hex() + " event indices not strictly increasing");
            }
            last_index = etx.index();
        }
    }

    const TxRef& tx() const noexcept { return tx_; }
    const std::vector<ChainEvent>& events() const noexcept { return events_; }

    std::vector<const LockEvent*> lock_events() const { return collect<LockEvent>(); }
    std::vector<const DepositEvent*> deposit_events() const { return collect<DepositEvent>(); }
    std::vector<const UnlockEvent*> unlock_events() const { return collect<UnlockEvent>(); }

    std::uint64_t min_block() const {
        std::uint64_t best = 0;
        bool first = true;
        for (const ChainEvent& e : events_) {
            const std::uint64_t b = event_block(e);
            if (first || b < best) {
                best = b;
                first = false;
            }
        }
        return best;
    }

    friend bool operator==(const Trace&, const Trace&) = default;

  private:
    template <typename T>
    std::vector<const T*> collect() const {
        std::vector<const T*> out;
        for (const ChainEvent& e : events_) {
            if (const T* ev = std::get_if<T>(&e)) {
                out.push_back(ev);
            }
        }
        return out;
    }

    TxRef tx_;
    std::vector<ChainEvent> events_;
};

// ---------------------------------------------------------------------------
// State keys (stable references used in verdicts, reports, and labels)

inline std::string tx_key(const TxRef& tx) {
    return tx.chain().value() + ":" + tx.hash_hex();
}

inline std::string state_key(const LockEvent& e) {
    return "E_lk@" + tx_key(e.tx()) + "#" + std::to_string(e.tx().index());
}

inline std::string state_key(const DepositEvent& e) {
    return "E_dep@" + tx_key(e.tx()) + "#" + std::to_string(e.tx().index());
}

inline std::string state_key(const UnlockEvent& e) {
    return "E_unlk@" + tx_key(e.tx()) + "#" + std::to_string(e.tx().index());
}

inline std::string state_key(const LockAction& a) {
    return "A_lk@" + tx_key(a.tx()) + "~" + std::to_string(a.ordinal());
}

inline std::string state_key(const UnlockAction& a) {
    return "A_unlk@" + tx_key(a.src_tx()) + "~" + std::to_string(a.ordinal());
}

inline std::string state_key(const ChainEvent& e) {
    return std::visit([](const auto& ev) { return state_key(ev); }, e);
}

// ---------------------------------------------------------------------------
// Execution sequences

/// One candidate cross-chain transfer. Offline data may populate any subset
/// of the stages; absent optionals are the flagged gaps.
struct ExecutionSequence {
    std::string key;
    std::optional<Trace> source_trace;
    std::vector<LockEvent> lock_events;
    std::optional<DepositEvent> deposit_event;
    std::optional<LockAction> lock_action;
    std::optional<UnlockAction> unlock_action;
    std::optional<UnlockEvent> unlock_event;

    std::vector<std::string> gaps() const {
        std::vector<std::string> out;
        if (!source_trace) out.push_back("source_trace");
        if (!deposit_event) out.push_back("deposit_event");
        if (!lock_action) out.push_back("lock_action");
        if (!unlock_action) out.push_back("unlock_action");
        if (!unlock_event) out.push_back("unlock_event");
        return out;
    }
};

/// Checks that every populated stage carrying a source tx reference agrees
/// on (chain, hash).
inline void validate_sequence(const ExecutionSequence& seq) {
    std::optional<TxRef> src;
    auto check = [&](const TxRef& tx) {
        if (!src) {
            src = tx;
        } else if (!same_tx(*src, tx)) {
            throw_error(Errc::kInvalidState, "sequence " + seq.key + " mixes source transactions " +
                                                 src->hash_hex() + " and " + tx.hash_hex());
        }
    };
    if (seq.source_trace) check(seq.source_trace->tx());
    for (const LockEvent& e : seq.lock_events) check(e.tx());
    if (seq.deposit_event) check(seq.deposit_event->tx());
    if (seq.lock_action) check(seq.lock_action->tx());
    if (seq.unlock_action) check(seq.unlock_action->src_tx());
}

inline std::string source_sequence_key(const ChainId& chain, const std::array<std::uint8_t, 32>& hash) {
    return "src:" + chain.value() + ":" + to_hex(hash);
}

inline std::string unlock_sequence_key(const UnlockEvent& e) {
    return "unlk:" + tx_key(e.tx()) + "#" + std::to_string(e.tx().index());
}

// ---------------------------------------------------------------------------

/// How existential lock/deposit matching is resolved in V(tx^s): the
/// paper-literal per-deposit existence check, or the stricter one-to-one
/// assignment of lock events to valid deposits.
enum class MatchingMode {
    kPaperLiteral,
    kInjective,
};

inline std::string_view matching_mode_name(MatchingMode mode) {
    return mode == MatchingMode::kPaperLiteral ? "paper-literal" : "injective";
}

inline MatchingMode parse_matching_mode(std::string_view text) {
    if (text == "paper-literal") return MatchingMode::kPaperLiteral;
    if (text == "injective") return MatchingMode::kInjective;
    throw_error(Errc::kBadFlag, "unknown matching mode \"" + std::string(text) + "\"");
}

}  // namespace xscope
