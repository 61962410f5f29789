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

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "xscope/core.hpp"
#include "xscope/simulator.hpp"

using namespace xscope;
using test_support::addr;
using test_support::tx;

TEST_CASE("normalize_address lowers mixed-case input") {
    const ChainId src{"src"};
    const Address a = normalize_address("0xAbCdEf0123456789aBcDeF0123456789ABCDEF01", src);
    CHECK(a.hex() == "0xabcdef0123456789abcdef0123456789abcdef01");
    CHECK(a.chain() == src);
    CHECK(a == normalize_address("0xabcdef0123456789abcdef0123456789abcdef01", src));
}

TEST_CASE("normalize_address accepts the zero address") {
    const Address zero = normalize_address("0x0000000000000000000000000000000000000000", ChainId{"src"});
    CHECK(zero.is_zero());
    CHECK(zero.hex() == "0x0000000000000000000000000000000000000000");
}

TEST_CASE("normalize_address rejects malformed input") {
    const ChainId src{"src"};
    auto code = [](auto fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::kInvalidState;
    };
    CHECK(code([&] { normalize_address("0x123", src); }) == Errc::kMalformedAddress);
    CHECK(code([&] { normalize_address("abcdef0123456789abcdef0123456789abcdef01", src); }) ==
          Errc::kMalformedAddress);
    CHECK(code([&] { normalize_address("0xzzcdef0123456789abcdef0123456789abcdef01", src); }) ==
          Errc::kMalformedAddress);
    CHECK(code([&] { normalize_address("0xabcdef0123456789abcdef0123456789abcdef0123", src); }) ==
          Errc::kMalformedAddress);
}

TEST_CASE("assets_equal is contract identity, never symbol") {
    const ChainId src{"src"};
    const ChainId dst{"dst"};
    const AssetId native_eth = AssetId::native(src, "ETH");
    const AssetId native_eth2 = AssetId::native(src, "ETH");
    CHECK(assets_equal(native_eth, native_eth2));

    // A token that calls itself "ETH" is not native ETH.
    const AssetId fake = AssetId::token(src, addr(src, 0xfe), "ETH");
    CHECK_FALSE(assets_equal(fake, native_eth));
    CHECK_FALSE(assets_equal(native_eth, fake));

    // Same contract bytes on different chains are different assets.
    const AssetId on_src = AssetId::token(src, addr(src, 0xaa), "X");
    const AssetId on_dst = AssetId::token(dst, addr(dst, 0xaa), "X");
    CHECK_FALSE(assets_equal(on_src, on_dst));

    // Symbols do not participate at all.
    const AssetId renamed = AssetId::token(src, addr(src, 0xaa), "RENAMED");
    CHECK(assets_equal(on_src, renamed));
}

TEST_CASE("assets_equal is an equivalence relation") {
    Rng rng{7};
    const ChainId chains[] = {ChainId{"src"}, ChainId{"dst"}};
    std::vector<AssetId> assets;
    for (int i = 0; i < 24; ++i) {
        const ChainId& c = chains[rng.below(2)];
        if (rng.below(3) == 0) {
            assets.push_back(AssetId::native(c, rng.below(2) == 0 ? "N" : ""));
        } else {
            assets.push_back(AssetId::token(c, addr(c, static_cast<std::uint8_t>(rng.below(3))),
                                            rng.below(2) == 0 ? "A" : "B"));
        }
    }
    for (const AssetId& a : assets) {
        CHECK(assets_equal(a, a));
        for (const AssetId& b : assets) {
            CHECK(assets_equal(a, b) == assets_equal(b, a));
            for (const AssetId& c : assets) {
                if (assets_equal(a, b) && assets_equal(b, c)) {
                    CHECK(assets_equal(a, c));
                }
            }
        }
    }
}

TEST_CASE("chain-consistency invariants reject mixed construction") {
    test_support::World w;
    const TxRef src_tx = tx(w.src, 1, 0);

    // Lock event whose recipient lives on the wrong chain.
    CHECK_THROWS_AS(LockEvent(src_tx, w.router_src, w.tka, Amount{1}, w.user_dst, 1), Error);
    // Deposit whose destination recipient is not on the destination chain.
    CHECK_THROWS_AS(DepositEvent(src_tx, w.router_src, w.tka, Amount{1}, w.dst, w.wtka, w.user_src, 1),
                    Error);
    // Lock action whose source asset is on another chain.
    CHECK_THROWS_AS(LockAction(src_tx, w.src, w.dst, w.wtka, Amount{1}, w.wtka, w.user_dst, 1), Error);
    // Unlock action whose asset/receiver disagree with the destination chain.
    CHECK_THROWS_AS(UnlockAction(src_tx, w.dst, w.tka, Amount{1}, w.user_dst, true, 1), Error);
    // Token asset bound to the wrong chain.
    CHECK_THROWS_AS(AssetId::token(w.src, w.router_dst, "X"), Error);
    // Synthesized flag is native-only.
    CHECK_THROWS_AS(LockEvent(src_tx, w.router_src, w.tka, Amount{1}, w.router_src, 1, true), Error);
}

TEST_CASE("trace construction enforces membership and event order") {
    test_support::World w;
    const TxRef t1 = tx(w.src, 1, 0);
    const LockEvent lk{t1, *w.tka.contract(), w.tka, Amount{5}, w.router_src, 1};
    const DepositEvent dep{t1.with_index(1), w.router_src, w.tka, Amount{5}, w.dst, w.wtka, w.user_dst, 1};

    const Trace trace = w.make_trace(t1, {lk, dep});
    CHECK(trace.events().size() == 2);
    CHECK(trace.lock_events().size() == 1);
    CHECK(trace.deposit_events().size() == 1);

    // Event from another transaction.
    const LockEvent foreign{tx(w.src, 2, 0), *w.tka.contract(), w.tka, Amount{5}, w.router_src, 1};
    CHECK_THROWS_AS(w.make_trace(t1, {lk, foreign}), Error);

    // Two events sharing an index.
    const LockEvent dup{t1, *w.tka.contract(), w.tka, Amount{6}, w.router_src, 1};
    try {
        w.make_trace(t1, {lk, dup});
        FAIL("expected DuplicateEvent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kDuplicateEvent);
    }
}

TEST_CASE("amounts parse, render, and refuse overflow") {
    CHECK(amount_to_string(parse_amount("0")) == "0");
    CHECK(amount_to_string(parse_amount("340282366920938463463374607431768211456")) ==
          "340282366920938463463374607431768211456");  // 2^128, beyond u64
    CHECK_THROWS_AS(parse_amount(""), Error);
    CHECK_THROWS_AS(parse_amount("12x"), Error);
    CHECK_THROWS_AS(parse_amount("-1"), Error);

    // 2^256 - 1 is the ceiling; stepping past it is a detected error, and so
    // is going below zero.
    const Amount max = parse_amount(
        "115792089237316195423570985008687907853269984665640564039457584007913129639935");
    CHECK_THROWS_AS(max + 1, std::exception);
    CHECK_THROWS_AS(Amount{1} - 2, std::exception);
}

TEST_CASE("chain ids validate") {
    CHECK(ChainId{"eth-main_net1"}.value() == "eth-main_net1");
    CHECK_THROWS_AS(ChainId{""}, Error);
    CHECK_THROWS_AS(ChainId{"has space"}, Error);
    CHECK_THROWS_AS(ChainId{"has,comma"}, Error);
}

TEST_CASE("execution sequences reject mixed source transactions") {
    test_support::World w;
    const auto b1 = w.benign(1, Amount{10});
    const auto b2 = w.benign(2, Amount{10});
    ExecutionSequence seq;
    seq.key = "src:src:test";
    seq.lock_events = {b1.lock};
    seq.deposit_event = b2.deposit;  // different tx
    CHECK_THROWS_AS(validate_sequence(seq), Error);

    seq.deposit_event = b1.deposit;
    CHECK_NOTHROW(validate_sequence(seq));
}
