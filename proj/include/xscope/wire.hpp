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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "xscope/builder.hpp"
#include "xscope/config.hpp"
#include "xscope/core.hpp"
#include "xscope/errors.hpp"

// The v1 trace wire format and its file-backed readers/writers. One record
// per line, comma-separated, fixed field order, empty fields where a kind
// has no use for them:
//
//   kind,chain,tx,index,block,sc,asset,symbol,amount,to,
//       dest_chain,dest_asset,dest_to,authorized
//
// Files open with the version header line. Canonical files (the only ones
// the simulator emits) round-trip byte-identically through read + write.

namespace xscope {

inline constexpr std::string_view kTraceFileHeader = "#xscope-trace v1";

enum class Strictness {
    kStrict,   // malformed line aborts the read
    kLenient,  // malformed line is reported and skipped
};

namespace wire_detail {

inline constexpr std::size_t kFieldCount = 14;

struct Fields {
    std::string_view kind, chain, tx, index, block, sc, asset, symbol, amount, to, dest_chain, dest_asset,
        dest_to, authorized;
};

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

inline std::uint64_t parse_u64(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw_error(Errc::kRecordParse, std::string(what) + " is not a number: \"" + std::string(text) + "\"");
    }
    return value;
}

inline void require_empty(std::string_view field, std::string_view name, std::string_view kind) {
    if (!field.empty()) {
        throw_error(Errc::kRecordParse,
                    std::string(kind) + " record must leave " + std::string(name) + " empty");
    }
}

inline void validate_symbol(std::string_view symbol) {
    for (char c : symbol) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '_' || c == '-';
        if (!ok) {
            throw_error(Errc::kRecordParse, "symbol has invalid character: \"" + std::string(symbol) + "\"");
        }
    }
}

inline AssetId parse_asset(const ChainId& chain, std::string_view contract, std::string_view symbol) {
    validate_symbol(symbol);
    if (contract == "NATIVE") {
        return AssetId::native(chain, std::string(symbol));
    }
    return AssetId::token(chain, normalize_address(contract, chain), std::string(symbol));
}

inline std::string render_asset_contract(const AssetId& asset) {
    return asset.is_native() ? std::string("NATIVE") : asset.contract()->hex();
}

}  // namespace wire_detail

// ---------------------------------------------------------------------------
// Decode

inline RawRecord decode_record(std::string_view line) {
    const std::vector<std::string_view> parts = wire_detail::split_line(line);
    if (parts.size() != wire_detail::kFieldCount) {
        throw_error(Errc::kRecordParse, "expected " + std::to_string(wire_detail::kFieldCount) +
                                            " fields, got " + std::to_string(parts.size()));
    }
    const wire_detail::Fields f{parts[0], parts[1],  parts[2],  parts[3], parts[4],  parts[5],  parts[6],
                                parts[7], parts[8],  parts[9],  parts[10], parts[11], parts[12], parts[13]};

    ChainId chain{std::string(f.chain)};
    const std::uint64_t block = wire_detail::parse_u64(f.block, "block");

    auto event_index = [&]() -> std::uint32_t {
        return static_cast<std::uint32_t>(wire_detail::parse_u64(f.index, "index"));
    };
    auto require_action_shape = [&](std::string_view kind) {
        wire_detail::require_empty(f.index, "index", kind);
        wire_detail::require_empty(f.sc, "sc", kind);
        wire_detail::require_empty(f.to, "to", kind);
    };

    if (f.kind == "lock_event" || f.kind == "unlock_event" || f.kind == "predicted_unlock") {
        wire_detail::require_empty(f.dest_chain, "dest_chain", f.kind);
        wire_detail::require_empty(f.dest_asset, "dest_asset", f.kind);
        wire_detail::require_empty(f.dest_to, "dest_to", f.kind);
        wire_detail::require_empty(f.authorized, "authorized", f.kind);
        const TxRef tx = parse_tx_ref(chain, f.tx, event_index());
        const AssetId asset = wire_detail::parse_asset(chain, f.asset, f.symbol);
        const Amount amount = parse_amount(f.amount);
        const Address to = normalize_address(f.to, chain);
        if (f.kind == "lock_event") {
            return RawRecord{LockEvent{tx, normalize_address(f.sc, chain), asset, amount, to, block}, 0,
                             false};
        }
        // Predicted unlocks come from pre-execution, which reports native
        // releases as value transfers; mark them synthesized so the native
        // convention applies.
        const bool predicted = f.kind == "predicted_unlock";
        const bool synthesized = predicted && asset.is_native();
        const Address sc =
            f.sc.empty() && synthesized ? Address{chain, {}} : normalize_address(f.sc, chain);
        return RawRecord{UnlockEvent{tx, sc, asset, amount, to, block, synthesized}, 0, predicted};
    }
    if (f.kind == "deposit_event") {
        wire_detail::require_empty(f.to, "to", f.kind);
        wire_detail::require_empty(f.authorized, "authorized", f.kind);
        const TxRef tx = parse_tx_ref(chain, f.tx, event_index());
        ChainId dest{std::string(f.dest_chain)};
        return RawRecord{DepositEvent{tx, normalize_address(f.sc, chain),
                                      wire_detail::parse_asset(chain, f.asset, f.symbol),
                                      parse_amount(f.amount), dest,
                                      wire_detail::parse_asset(dest, f.dest_asset, ""),
                                      normalize_address(f.dest_to, dest), block},
                         0, false};
    }
    if (f.kind == "native_transfer") {
        wire_detail::require_empty(f.dest_chain, "dest_chain", f.kind);
        wire_detail::require_empty(f.dest_asset, "dest_asset", f.kind);
        wire_detail::require_empty(f.dest_to, "dest_to", f.kind);
        wire_detail::require_empty(f.authorized, "authorized", f.kind);
        if (f.asset != "NATIVE") {
            throw_error(Errc::kRecordParse, "native_transfer asset field must be NATIVE");
        }
        wire_detail::validate_symbol(f.symbol);
        return RawRecord{NativeTransfer{parse_tx_ref(chain, f.tx, event_index()),
                                        normalize_address(f.sc, chain), parse_amount(f.amount),
                                        normalize_address(f.to, chain), block, std::string(f.symbol)},
                         0, false};
    }
    if (f.kind == "lock_action") {
        require_action_shape(f.kind);
        wire_detail::require_empty(f.authorized, "authorized", f.kind);
        const TxRef tx = parse_tx_ref(chain, f.tx, 0);
        ChainId dest{std::string(f.dest_chain)};
        return RawRecord{LockAction{tx, chain, dest, wire_detail::parse_asset(chain, f.asset, f.symbol),
                                    parse_amount(f.amount), wire_detail::parse_asset(dest, f.dest_asset, ""),
                                    normalize_address(f.dest_to, dest), block},
                         0, false};
    }
    if (f.kind == "unlock_action") {
        require_action_shape(f.kind);
        wire_detail::require_empty(f.asset, "asset", f.kind);
        wire_detail::require_empty(f.symbol, "symbol", f.kind);
        bool authorized = false;
        if (f.authorized == "true") {
            authorized = true;
        } else if (f.authorized != "false") {
            throw_error(Errc::kRecordParse, "authorized must be true or false, got \"" +
                                                std::string(f.authorized) + "\"");
        }
        const TxRef tx = parse_tx_ref(chain, f.tx, 0);
        ChainId dest{std::string(f.dest_chain)};
        return RawRecord{UnlockAction{tx, dest, wire_detail::parse_asset(dest, f.dest_asset, ""),
                                      parse_amount(f.amount), normalize_address(f.dest_to, dest),
                                      authorized, block},
                         0, false};
    }
    throw_error(Errc::kRecordParse, "unknown record kind \"" + std::string(f.kind) + "\"");
}

// ---------------------------------------------------------------------------
// Encode

inline std::string encode_record(const RawRecord& rec) {
    std::string kind{record_kind_name(rec.kind())};
    std::string chain, tx, index, block, sc, asset, symbol, amount, to, dest_chain, dest_asset, dest_to,
        authorized;

    const auto fill_event = [&](const auto& e) {
        chain = e.tx().chain().value();
        tx = e.tx().hash_hex();
        index = std::to_string(e.tx().index());
        block = std::to_string(e.block());
    };

    switch (rec.kind()) {
        case RecordKind::kLockEvent: {
            const LockEvent& e = std::get<LockEvent>(rec.payload);
            fill_event(e);
            sc = e.sc().hex();
            asset = wire_detail::render_asset_contract(e.asset());
            symbol = e.asset().symbol();
            amount = amount_to_string(e.amount());
            to = e.to().hex();
            break;
        }
        case RecordKind::kUnlockEvent:
        case RecordKind::kPredictedUnlock: {
            const UnlockEvent& e = std::get<UnlockEvent>(rec.payload);
            fill_event(e);
            sc = e.synthesized_native() && rec.predicted ? std::string{} : e.sc().hex();
            asset = wire_detail::render_asset_contract(e.asset());
            symbol = e.asset().symbol();
            amount = amount_to_string(e.amount());
            to = e.to().hex();
            break;
        }
        case RecordKind::kDepositEvent: {
            const DepositEvent& e = std::get<DepositEvent>(rec.payload);
            fill_event(e);
            sc = e.sc().hex();
            asset = wire_detail::render_asset_contract(e.asset_src());
            symbol = e.asset_src().symbol();
            amount = amount_to_string(e.amount_src());
            dest_chain = e.dest_chain().value();
            dest_asset = wire_detail::render_asset_contract(e.asset_dst());
            dest_to = e.to_dst().hex();
            break;
        }
        case RecordKind::kNativeTransfer: {
            const NativeTransfer& e = std::get<NativeTransfer>(rec.payload);
            fill_event(e);
            sc = e.from().hex();
            asset = "NATIVE";
            symbol = e.symbol();
            amount = amount_to_string(e.value());
            to = e.to().hex();
            break;
        }
        case RecordKind::kLockAction: {
            const LockAction& a = std::get<LockAction>(rec.payload);
            chain = a.tx().chain().value();
            tx = a.tx().hash_hex();
            block = std::to_string(a.block());
            asset = wire_detail::render_asset_contract(a.asset_src());
            symbol = a.asset_src().symbol();
            amount = amount_to_string(a.amount_src());
            dest_chain = a.dest_chain().value();
            dest_asset = wire_detail::render_asset_contract(a.asset_dst());
            dest_to = a.to_dst().hex();
            break;
        }
        case RecordKind::kUnlockAction: {
            const UnlockAction& a = std::get<UnlockAction>(rec.payload);
            chain = a.src_tx().chain().value();
            tx = a.src_tx().hash_hex();
            block = std::to_string(a.block());
            amount = amount_to_string(a.amount_dst());
            dest_chain = a.dest_chain().value();
            dest_asset = wire_detail::render_asset_contract(a.asset_dst());
            dest_to = a.to_dst().hex();
            authorized = a.authorized() ? "true" : "false";
            break;
        }
    }

    std::string out;
    for (const std::string* field :
         {&kind, &chain, &tx, &index, &block, &sc, &asset, &symbol, &amount, &to, &dest_chain, &dest_asset,
          &dest_to, &authorized}) {
        if (!out.empty()) out += ',';
        out += *field;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Streams and files

/// Parses a v1 stream. Records get ordinals in stream order. In lenient mode
/// malformed lines are reported into `warnings` ("line N: why") and skipped.
inline std::vector<RawRecord> read_trace_stream(std::istream& in, Strictness strictness,
                                                std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::vector<RawRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kTraceFileHeader) {
                throw_error(Errc::kRecordParse, "line 1: expected header \"" +
                                                    std::string(kTraceFileHeader) + "\"");
            }
            saw_header = true;
            continue;
        }
        if (line[0] == '#') continue;
        try {
            RawRecord rec = decode_record(line);
            rec.ordinal = records.size();
            records.push_back(std::move(rec));
        } catch (const Error& e) {
            const std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
            if (strictness == Strictness::kStrict) {
                throw_error(Errc::kRecordParse, msg);
            }
            if (warnings) warnings->push_back(msg);
        }
    }
    if (!saw_header && line_no > 0) {
        throw_error(Errc::kRecordParse, "missing \"" + std::string(kTraceFileHeader) + "\" header");
    }
    return records;
}

inline std::vector<RawRecord> read_trace_file(const std::filesystem::path& path, Strictness strictness,
                                              std::vector<std::string>* warnings = nullptr) {
    std::ifstream in{path};
    if (!in) {
        throw_error(Errc::kIo, "cannot open trace file " + path.string());
    }
    try {
        return read_trace_stream(in, strictness, warnings);
    } catch (const Error& e) {
        if (e.code() == Errc::kRecordParse) {
            throw_error(Errc::kRecordParse, path.string() + ": " + e.what());
        }
        throw;
    }
}

inline std::string trace_to_string(const std::vector<RawRecord>& records) {
    std::string out{kTraceFileHeader};
    out += '\n';
    for (const RawRecord& rec : records) {
        out += encode_record(rec);
        out += '\n';
    }
    return out;
}

/// Writes atomically: temp file in the target directory, then rename.
inline void write_trace_file(const std::filesystem::path& path, const std::vector<RawRecord>& records) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        if (!out) {
            throw_error(Errc::kIo, "cannot write " + tmp.string());
        }
        out << trace_to_string(records);
    }
    std::filesystem::rename(tmp, path);
}

/// Relayer adaptor: same wire format, action records only. An event kind in
/// an action stream is a parse error even in lenient mode's warning path.
inline std::vector<RawRecord> adaptor_pull(const std::filesystem::path& path, Strictness strictness,
                                           std::vector<std::string>* warnings = nullptr) {
    std::vector<RawRecord> records = read_trace_file(path, strictness, warnings);
    for (const RawRecord& rec : records) {
        if (rec.kind() != RecordKind::kLockAction && rec.kind() != RecordKind::kUnlockAction) {
            throw_error(Errc::kRecordParse, path.string() + ": action stream contains " +
                                                std::string(record_kind_name(rec.kind())) + " record");
        }
    }
    return records;
}

// ---------------------------------------------------------------------------
// Chain connector

/// One contiguous batch of records pulled from a chain.
struct ConnectorBatch {
    ChainId chain;
    std::uint64_t from_block = 0;
    std::uint64_t to_block = 0;
    std::vector<RawRecord> records;
};

/// Uniform pull interface above heterogeneous chains. The shipping
/// implementation is file-backed; a live RPC connector slots in behind the
/// same interface.
class ChainConnector {
  public:
    virtual ~ChainConnector() = default;
    virtual std::optional<ConnectorBatch> next_batch() = 0;
};

class FileChainConnector final : public ChainConnector {
  public:
    FileChainConnector(ChainId chain, std::filesystem::path path, Strictness strictness)
        : chain_(std::move(chain)), path_(std::move(path)), strictness_(strictness) {}

    std::optional<ConnectorBatch> next_batch() override {
        if (consumed_) return std::nullopt;
        consumed_ = true;
        ConnectorBatch batch{chain_, 0, 0, read_trace_file(path_, strictness_, &warnings_)};
        bool first = true;
        for (const RawRecord& rec : batch.records) {
            const std::uint64_t b = rec.block();
            batch.from_block = first ? b : std::min(batch.from_block, b);
            batch.to_block = first ? b : std::max(batch.to_block, b);
            first = false;
        }
        return batch;
    }

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  private:
    ChainId chain_;
    std::filesystem::path path_;
    Strictness strictness_;
    std::vector<std::string> warnings_;
    bool consumed_ = false;
};

// ---------------------------------------------------------------------------
// Canonical ordering, filtering, digests

/// Content-determined total order: (block, chain, tx, index, kind, encoded
/// line). Reassigning ordinals in this order makes downstream analysis
/// independent of input record permutations.
inline void canonicalize_records(std::vector<RawRecord>& records) {
    auto sort_key = [](const RawRecord& rec) {
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
        return std::tuple(rec.block(), tx.chain().value(), tx.hash(), tx.index(),
                          static_cast<int>(rec.kind()), encode_record(rec));
    };
    std::stable_sort(records.begin(), records.end(),
                     [&](const RawRecord& a, const RawRecord& b) { return sort_key(a) < sort_key(b); });
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].ordinal = i;
    }
}

inline std::vector<Address> record_participants(const RawRecord& rec) {
    std::vector<Address> out;
    auto add_asset = [&](const AssetId& a) {
        if (!a.is_native()) out.push_back(*a.contract());
    };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LockEvent> || std::is_same_v<T, UnlockEvent>) {
                out.push_back(p.sc());
                out.push_back(p.to());
                add_asset(p.asset());
            } else if constexpr (std::is_same_v<T, DepositEvent>) {
                out.push_back(p.sc());
                out.push_back(p.to_dst());
                add_asset(p.asset_src());
                add_asset(p.asset_dst());
            } else if constexpr (std::is_same_v<T, LockAction>) {
                out.push_back(p.to_dst());
                add_asset(p.asset_src());
                add_asset(p.asset_dst());
            } else if constexpr (std::is_same_v<T, UnlockAction>) {
                out.push_back(p.to_dst());
                add_asset(p.asset_dst());
            } else {
                out.push_back(p.from());
                out.push_back(p.to());
            }
        },
        rec.payload);
    return out;
}

struct FilterResult {
    std::vector<RawRecord> records;
    std::size_t dropped = 0;
};

/// Drops records whose participant set intersects the configured address
/// filters. The drop count is reported, never silently swallowed.
inline FilterResult apply_address_filters(std::vector<RawRecord> records, const BridgeConfig& cfg) {
    FilterResult result;
    for (RawRecord& rec : records) {
        bool drop = false;
        for (const Address& a : record_participants(rec)) {
            if (cfg.is_filtered(a)) {
                drop = true;
                break;
            }
        }
        if (drop) {
            ++result.dropped;
        } else {
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

/// Rejects records that carry the NATIVE asset with a symbol that is not the
/// chain's configured native symbol. In lenient mode offenders are skipped
/// with a warning.
inline std::vector<RawRecord> validate_native_symbols(std::vector<RawRecord> records,
                                                      const BridgeConfig& cfg, Strictness strictness,
                                                      std::vector<std::string>* warnings = nullptr) {
    auto symbol_ok = [&](const AssetId& a) {
        return !a.is_native() || a.symbol().empty() || a.symbol() == cfg.native_symbol(a.chain());
    };
    std::vector<RawRecord> kept;
    for (RawRecord& rec : records) {
        bool ok = true;
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, LockEvent> || std::is_same_v<T, UnlockEvent>) {
                    ok = symbol_ok(p.asset());
                } else if constexpr (std::is_same_v<T, DepositEvent>) {
                    ok = symbol_ok(p.asset_src()) && symbol_ok(p.asset_dst());
                } else if constexpr (std::is_same_v<T, LockAction>) {
                    ok = symbol_ok(p.asset_src()) && symbol_ok(p.asset_dst());
                } else if constexpr (std::is_same_v<T, UnlockAction>) {
                    ok = symbol_ok(p.asset_dst());
                } else {
                    ok = p.symbol().empty() || p.symbol() == cfg.native_symbol(p.tx().chain());
                }
            },
            rec.payload);
        if (ok) {
            kept.push_back(std::move(rec));
            continue;
        }
        const std::string msg = "record " + encode_record(rec) + ": native symbol does not match config";
        if (strictness == Strictness::kStrict) {
            throw_error(Errc::kRecordParse, msg);
        }
        if (warnings) warnings->push_back(msg);
    }
    return kept;
}

/// FNV-1a over the canonical serialization; the analyze report's input
/// digest (stability surface, not a security primitive).
inline std::string fnv1a_hex(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = "0123456789abcdef"[hash & 0xf];
        hash >>= 4;
    }
    return out;
}

inline std::string records_digest(const std::vector<RawRecord>& canonical_records) {
    return fnv1a_hex(trace_to_string(canonical_records));
}

}  // namespace xscope
