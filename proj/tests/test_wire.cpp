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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "xscope/config.hpp"
#include "xscope/simulator.hpp"
#include "xscope/wire.hpp"

using namespace xscope;
using test_support::addr;
using test_support::tx;
using test_support::World;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("xscope_wire_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in{path, std::ios::binary};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("records round-trip through the wire bit-exactly") {
    // A generated dataset covers every record kind, native assets, and
    // >64-bit amounts.
    ScenarioSpec spec;
    spec.seed = 11;
    spec.benign_count = 40;
    spec.injections = {{BugClass::kUde, "all", 6}, {BugClass::kIep, "all", 5}, {BugClass::kUu, "all", 7}};
    const LabeledDataset ds = gen_dataset(spec);
    REQUIRE(ds.records.size() > 100);

    for (const RawRecord& rec : ds.records) {
        const std::string line = encode_record(rec);
        const RawRecord back = decode_record(line);
        CHECK(back == rec);
        CHECK(encode_record(back) == line);
    }
}

TEST_CASE("canonical trace files survive read→write byte-identically") {
    ScenarioSpec spec;
    spec.seed = 12;
    spec.benign_count = 15;
    const LabeledDataset ds = gen_dataset(spec);
    const auto dir = std::filesystem::temp_directory_path() / "xscope_wire_roundtrip";
    const DatasetFiles files = write_dataset(ds, dir);

    for (const auto& path : files.trace_files) {
        const std::string original = read_text(path);
        const std::vector<RawRecord> records = read_trace_file(path, Strictness::kStrict);
        CHECK(trace_to_string(records) == original);
    }
    const std::string actions_text = read_text(files.action_log);
    CHECK(trace_to_string(read_trace_file(files.action_log, Strictness::kStrict)) == actions_text);
}

TEST_CASE("read_trace_file assigns stream-order ordinals, stable across reads") {
    const World w;
    std::string text{kTraceFileHeader};
    text += "\n";
    for (int i = 0; i < 5; ++i) {
        const auto b = w.benign(static_cast<std::uint8_t>(30 + i), Amount{100});
        text += encode_record(RawRecord{b.lock, 0, false}) + "\n";
    }
    const auto path = temp_file("ordinals.trace");
    write_text(path, text);

    const std::vector<RawRecord> first = read_trace_file(path, Strictness::kStrict);
    REQUIRE(first.size() == 5);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].ordinal == i);
    }
    const std::vector<RawRecord> second = read_trace_file(path, Strictness::kStrict);
    for (std::size_t i = 0; i < second.size(); ++i) {
        CHECK(second[i].ordinal == first[i].ordinal);
        CHECK(second[i] == first[i]);
    }
}

TEST_CASE("empty files and malformed lines behave per strictness") {
    const auto empty_path = temp_file("empty.trace");
    write_text(empty_path, "");
    CHECK(read_trace_file(empty_path, Strictness::kStrict).empty());

    const World w;
    const auto b = w.benign(41, Amount{10});
    std::string text{kTraceFileHeader};
    text += "\n";
    text += encode_record(RawRecord{b.lock, 0, false}) + "\n";
    text += "this,is,not,a,record\n";
    text += encode_record(RawRecord{b.deposit, 0, false}) + "\n";

    const auto path = temp_file("mixed.trace");
    write_text(path, text);

    // Strict: fatal with the line number.
    try {
        read_trace_file(path, Strictness::kStrict);
        FAIL("expected RecordParse");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kRecordParse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    // Lenient: skip with a warning.
    std::vector<std::string> warnings;
    const std::vector<RawRecord> records = read_trace_file(path, Strictness::kLenient, &warnings);
    CHECK(records.size() == 2);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings.front().find("line 3") != std::string::npos);

    // Missing header is fatal either way.
    const auto headerless = temp_file("headerless.trace");
    write_text(headerless, encode_record(RawRecord{b.lock, 0, false}) + "\n");
    CHECK_THROWS_AS(read_trace_file(headerless, Strictness::kLenient), Error);
}

TEST_CASE("adaptor_pull accepts only action records and keeps the authorized flag") {
    const World w;
    const auto b = w.benign(42, Amount{10});
    const UnlockAction unauthorized{b.lock.tx(), w.dst, w.wtka, Amount{10}, w.user_dst, false, 3};

    std::string text{kTraceFileHeader};
    text += "\n";
    text += encode_record(RawRecord{b.lock_action, 0, false}) + "\n";
    text += encode_record(RawRecord{b.unlock_action, 0, false}) + "\n";
    text += encode_record(RawRecord{unauthorized, 0, false}) + "\n";
    const auto path = temp_file("actions.log");
    write_text(path, text);

    const std::vector<RawRecord> records = adaptor_pull(path, Strictness::kStrict);
    REQUIRE(records.size() == 3);
    CHECK(std::get<UnlockAction>(records[1].payload).authorized());
    CHECK_FALSE(std::get<UnlockAction>(records[2].payload).authorized());

    // An event kind in an action stream is a parse error.
    text += encode_record(RawRecord{b.lock, 0, false}) + "\n";
    write_text(path, text);
    CHECK_THROWS_AS(adaptor_pull(path, Strictness::kStrict), Error);
}

TEST_CASE("config loads, validates, and reports field-level problems") {
    const auto path = temp_file("config.json");
    write_text(path, R"({
        "routers": {"src": ["0x00000000000000000000000000000000000000aa"],
                     "dst": ["0x00000000000000000000000000000000000000bb",
                             "0x00000000000000000000000000000000000000bc"]},
        "native_symbols": {"src": "ETH", "dst": "BNB"},
        "blacklist": ["src:0x00000000000000000000000000000000000000ee"],
        "address_filters": ["src:0x00000000000000000000000000000000000000ff"],
        "matching_mode": "paper-literal",
        "fee_tolerance_bps": 25
    })");
    const BridgeConfig cfg = load_config(path);
    CHECK(cfg.routers.at(ChainId{"dst"}).size() == 2);  // sets of routers per chain
    CHECK(cfg.matching_mode == MatchingMode::kPaperLiteral);
    CHECK(cfg.fee_tolerance_bps == 25u);
    CHECK(cfg.native_symbol(ChainId{"src"}) == "ETH");

    // Minimal config.
    write_text(path, R"({"routers": {"src": ["0x00000000000000000000000000000000000000aa"]}})");
    const BridgeConfig minimal = load_config(path);
    CHECK(minimal.matching_mode == MatchingMode::kInjective);
    // A chain without routers is a deferred MissingRouterConfig at analysis.
    CHECK_THROWS_AS(minimal.routers_for(ChainId{"dst"}), Error);

    // Overlapping blacklist/filter entry.
    write_text(path, R"({
        "routers": {"src": ["0x00000000000000000000000000000000000000aa"]},
        "blacklist": ["src:0x00000000000000000000000000000000000000ee"],
        "address_filters": ["src:0x00000000000000000000000000000000000000ee"]
    })");
    try {
        load_config(path);
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kConfigInvalid);
    }

    // Parse errors are ConfigParse.
    write_text(path, "{not json");
    try {
        load_config(path);
        FAIL("expected ConfigParse");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kConfigParse);
    }
}

TEST_CASE("address filters drop records before analysis and count the drops") {
    const World w;
    const auto b1 = w.benign(50, Amount{10});
    const auto b2 = w.benign(51, Amount{11});
    std::vector<RawRecord> records;
    records.push_back(RawRecord{b1.lock, 0, false});
    records.push_back(RawRecord{b2.lock, 1, false});
    records.push_back(RawRecord{b2.deposit, 2, false});

    BridgeConfig cfg = w.cfg;
    cfg.address_filters.insert(b2.deposit.to_dst());  // filters the recipient

    const FilterResult result = apply_address_filters(records, cfg);
    CHECK(result.dropped == 1);
    REQUIRE(result.records.size() == 2);
    for (const RawRecord& rec : result.records) {
        for (const Address& a : record_participants(rec)) {
            CHECK_FALSE(cfg.is_filtered(a));
        }
    }
}

TEST_CASE("native symbol validation rejects mislabeled native assets") {
    const World w;
    const TxRef t = tx(w.src, 52, 0);
    std::vector<RawRecord> records;
    records.push_back(RawRecord{NativeTransfer{t, w.user_src, Amount{5}, w.router_src, 1, "ETH"}, 0, false});
    records.push_back(RawRecord{
        NativeTransfer{tx(w.src, 53, 0), w.user_src, Amount{5}, w.router_src, 1, "NOTETH"}, 1, false});

    std::vector<std::string> warnings;
    const std::vector<RawRecord> kept =
        validate_native_symbols(records, w.cfg, Strictness::kLenient, &warnings);
    CHECK(kept.size() == 1);
    CHECK(warnings.size() == 1);
    CHECK_THROWS_AS(validate_native_symbols(records, w.cfg, Strictness::kStrict), Error);

    // The fake-"ETH" token is a token, not the native asset; it passes.
    std::vector<RawRecord> fake;
    fake.push_back(RawRecord{
        LockEvent{tx(w.src, 54, 0), *w.fake_eth.contract(), w.fake_eth, Amount{5}, w.router_src, 1}, 0,
        false});
    CHECK(validate_native_symbols(fake, w.cfg, Strictness::kStrict).size() == 1);
}

TEST_CASE("canonical ordering is content-determined") {
    ScenarioSpec spec;
    spec.seed = 13;
    spec.benign_count = 25;
    spec.injections = {{BugClass::kUde, "all", 3}};
    const LabeledDataset ds = gen_dataset(spec);

    std::vector<RawRecord> records = ds.records;
    canonicalize_records(records);
    const std::string baseline = trace_to_string(records);
    const std::string digest = records_digest(records);

    Rng rng{99};
    std::vector<RawRecord> shuffled = ds.records;
    rng.shuffle(shuffled);
    canonicalize_records(shuffled);
    CHECK(trace_to_string(shuffled) == baseline);
    CHECK(records_digest(shuffled) == digest);
}

TEST_CASE("file connector yields one contiguous batch with block bounds") {
    ScenarioSpec spec;
    spec.seed = 14;
    spec.benign_count = 8;
    const LabeledDataset ds = gen_dataset(spec);
    const auto dir = std::filesystem::temp_directory_path() / "xscope_wire_connector";
    const DatasetFiles files = write_dataset(ds, dir);

    FileChainConnector connector{ds.src_chain, files.trace_files.front(), Strictness::kStrict};
    const auto batch = connector.next_batch();
    REQUIRE(batch.has_value());
    CHECK_FALSE(batch->records.empty());
    CHECK(batch->from_block <= batch->to_block);
    for (const RawRecord& rec : batch->records) {
        CHECK(rec.block() >= batch->from_block);
        CHECK(rec.block() <= batch->to_block);
    }
    CHECK_FALSE(connector.next_batch().has_value());
}
