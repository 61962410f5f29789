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
#include "xscope/builder.hpp"
#include "xscope/simulator.hpp"
#include "xscope/wire.hpp"

using namespace xscope;
using test_support::addr;
using test_support::tx;
using test_support::World;

TEST_CASE("build_traces groups events by transaction and orders by index") {
    const World w;
    const TxRef t1 = tx(w.src, 1, 0);
    const TxRef t2 = tx(w.src, 2, 0);
    std::vector<RawRecord> records;
    records.push_back(
        RawRecord{DepositEvent{t1.with_index(1), w.router_src, w.tka, Amount{5}, w.dst, w.wtka,
                               w.user_dst, 10},
                  0, false});
    records.push_back(
        RawRecord{LockEvent{t1, *w.tka.contract(), w.tka, Amount{5}, w.router_src, 10}, 1, false});
    records.push_back(
        RawRecord{LockEvent{t2, *w.tka.contract(), w.tka, Amount{9}, w.router_src, 11}, 2, false});

    const std::vector<Trace> traces = build_traces(records, w.cfg);
    REQUIRE(traces.size() == 2);
    std::size_t placed = 0;
    for (const Trace& t : traces) {
        placed += t.events().size();
        std::uint32_t last = 0;
        bool first = true;
        for (const ChainEvent& e : t.events()) {
            if (!first) CHECK(event_tx(e).index() > last);
            last = event_tx(e).index();
            first = false;
        }
    }
    CHECK(placed == records.size());  // conservation: every record lands exactly once
}

TEST_CASE("build_traces synthesizes native transfers into lock events") {
    const World w;
    const TxRef t = tx(w.src, 3, 0);
    std::vector<RawRecord> records;
    records.push_back(RawRecord{NativeTransfer{t, w.user_src, Amount{5}, w.router_src, 7, "ETH"}, 0, false});

    const std::vector<Trace> traces = build_traces(records, w.cfg);
    REQUIRE(traces.size() == 1);
    const auto locks = traces.front().lock_events();
    REQUIRE(locks.size() == 1);
    CHECK(locks.front()->asset().is_native());
    CHECK(locks.front()->amount() == Amount{5});
    CHECK(locks.front()->to() == w.router_src);
    CHECK(locks.front()->synthesized_native());
    // Round-trip check: the synthesized event satisfies the native lock rule.
    CHECK(v_lock_event(*locks.front(), w.cfg).holds);
}

TEST_CASE("build_traces synthesizes router outflows into unlock events") {
    const World w;
    const TxRef t = tx(w.dst, 4, 0);
    std::vector<RawRecord> records;
    records.push_back(RawRecord{NativeTransfer{t, w.router_dst, Amount{8}, w.user_dst, 9, "BNB"}, 0, false});

    const std::vector<Trace> traces = build_traces(records, w.cfg);
    REQUIRE(traces.size() == 1);
    const auto unlocks = traces.front().unlock_events();
    REQUIRE(unlocks.size() == 1);
    CHECK(unlocks.front()->asset().is_native());
    CHECK(unlocks.front()->synthesized_native());
    CHECK(unlocks.front()->to() == w.user_dst);
}

TEST_CASE("build_traces rejects duplicate (chain, hash, index)") {
    const World w;
    const TxRef t = tx(w.src, 5, 0);
    std::vector<RawRecord> records;
    records.push_back(
        RawRecord{LockEvent{t, *w.tka.contract(), w.tka, Amount{5}, w.router_src, 1}, 0, false});
    records.push_back(
        RawRecord{LockEvent{t, *w.tka.contract(), w.tka, Amount{6}, w.router_src, 1}, 1, false});
    try {
        build_traces(records, w.cfg);
        FAIL("expected DuplicateEvent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::kDuplicateEvent);
    }
}

TEST_CASE("correlate joins a benign transfer into one full sequence") {
    const World w;
    const auto b = w.benign(6, Amount{50});
    const Trace trace = w.make_trace(b.lock.tx(), {b.lock, b.deposit});
    const std::vector<ExecutionSequence> sequences =
        correlate({trace}, {b.lock_action}, {b.unlock_action}, {b.unlock});
    REQUIRE(sequences.size() == 1);
    const ExecutionSequence& seq = sequences.front();
    CHECK(seq.key == source_sequence_key(w.src, b.lock.tx().hash()));
    CHECK(seq.source_trace.has_value());
    CHECK(seq.lock_events.size() == 1);
    CHECK(seq.deposit_event.has_value());
    CHECK(seq.lock_action.has_value());
    CHECK(seq.unlock_action.has_value());
    CHECK(seq.unlock_event.has_value());
    CHECK(seq.gaps().empty());
}

TEST_CASE("correlate keeps an orphan unlock event as a partial sequence") {
    const World w;
    const UnlockEvent orphan{tx(w.dst, 7, 0), *w.wtka.contract(), w.wtka, Amount{5}, w.attacker_dst, 3};
    const std::vector<ExecutionSequence> sequences = correlate({}, {}, {}, {orphan});
    REQUIRE(sequences.size() == 1);
    CHECK(sequences.front().key == unlock_sequence_key(orphan));
    CHECK(sequences.front().unlock_event.has_value());
    CHECK_FALSE(sequences.front().source_trace.has_value());
    CHECK(sequences.front().gaps().size() == 4);
}

TEST_CASE("correlate: two identical unlock actions compete, lowest ordinal wins") {
    const World w;
    const auto b = w.benign(8, Amount{70});
    const Trace trace = w.make_trace(b.lock.tx(), {b.lock, b.deposit});
    const UnlockAction first = b.unlock_action.with_ordinal(10);
    const UnlockAction second = b.unlock_action.with_ordinal(20);

    const std::vector<ExecutionSequence> sequences =
        correlate({trace}, {b.lock_action}, {first, second}, {b.unlock});
    REQUIRE(sequences.size() == 2);

    std::size_t consumed = 0;
    for (const ExecutionSequence& seq : sequences) {
        if (seq.unlock_event) {
            ++consumed;
            REQUIRE(seq.unlock_action.has_value());
            CHECK(seq.unlock_action->ordinal() == 10);
        } else if (seq.unlock_action) {
            // The runner-up stays an open authorization.
            CHECK(seq.unlock_action->ordinal() == 20);
        }
    }
    CHECK(consumed == 1);  // each action consumed at most once
}

TEST_CASE("correlate places every action exactly once (conservation)") {
    Rng rng{0xc0de};
    for (int round = 0; round < 30; ++round) {
        test_support::FuzzUniverse u = test_support::make_fuzz_universe(rng);
        std::vector<UnlockEvent> unlocks;
        for (const UnlockEvent* e : u.all_unlocks()) unlocks.push_back(*e);
        std::vector<LockAction> lock_actions = u.lock_actions;
        std::vector<UnlockAction> unlock_actions = u.unlock_actions;
        for (std::size_t i = 0; i < lock_actions.size(); ++i) {
            lock_actions[i] = lock_actions[i].with_ordinal(i);
        }
        for (std::size_t i = 0; i < unlock_actions.size(); ++i) {
            unlock_actions[i] = unlock_actions[i].with_ordinal(100 + i);
        }
        const std::vector<ExecutionSequence> sequences =
            correlate(u.traces, lock_actions, unlock_actions, unlocks);

        std::size_t placed_lock_actions = 0;
        std::size_t placed_unlock_actions = 0;
        std::size_t placed_unlocks = 0;
        for (const ExecutionSequence& seq : sequences) {
            if (seq.lock_action) ++placed_lock_actions;
            if (seq.unlock_action) ++placed_unlock_actions;
            if (seq.unlock_event) ++placed_unlocks;
        }
        CHECK(placed_lock_actions == lock_actions.size());
        CHECK(placed_unlock_actions == unlock_actions.size());
        CHECK(placed_unlocks == unlocks.size());
    }
}

TEST_CASE("correlation is deterministic under input permutation") {
    Rng rng{0xfeed};
    for (int round = 0; round < 20; ++round) {
        test_support::FuzzUniverse u = test_support::make_fuzz_universe(rng);
        std::vector<UnlockEvent> unlocks;
        for (const UnlockEvent* e : u.all_unlocks()) unlocks.push_back(*e);

        auto run = [&](std::vector<Trace> traces, std::vector<LockAction> la,
                       std::vector<UnlockAction> ua, std::vector<UnlockEvent> ue) {
            std::vector<std::string> keys;
            for (const ExecutionSequence& seq : correlate(traces, la, ua, ue)) {
                std::string line = seq.key;
                for (const std::string& gap : seq.gaps()) line += "|" + gap;
                keys.push_back(line);
            }
            return keys;
        };

        const auto baseline = run(u.traces, u.lock_actions, u.unlock_actions, unlocks);

        // Permute every input list (ordinals travel with the records).
        std::vector<Trace> traces = u.traces;
        std::vector<LockAction> la = u.lock_actions;
        std::vector<UnlockAction> ua = u.unlock_actions;
        std::vector<UnlockEvent> ue = unlocks;
        rng.shuffle(traces);
        rng.shuffle(la);
        rng.shuffle(ua);
        rng.shuffle(ue);
        CHECK(run(traces, la, ua, ue) == baseline);
    }
}

TEST_CASE("make_dataset splits actions and extracts unlock events") {
    const World w;
    const auto b = w.benign(9, Amount{40});
    std::vector<RawRecord> records;
    records.push_back(RawRecord{b.lock, 0, false});
    records.push_back(RawRecord{b.deposit, 1, false});
    records.push_back(RawRecord{b.lock_action, 2, false});
    records.push_back(RawRecord{b.unlock_action, 3, false});
    records.push_back(RawRecord{b.unlock, 4, false});

    const Dataset ds = make_dataset(records, w.cfg);
    CHECK(ds.traces.size() == 2);  // source tx and destination tx
    CHECK(ds.lock_actions.size() == 1);
    CHECK(ds.unlock_actions.size() == 1);
    CHECK(ds.unlock_events.size() == 1);
    CHECK(ds.lock_actions.front().ordinal() == 2);

    // Predicted unlocks are monitor-only.
    records.push_back(RawRecord{b.unlock, 5, true});
    CHECK_THROWS_AS(make_dataset(records, w.cfg), Error);
}
