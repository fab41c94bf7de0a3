#include <gtest/gtest.h>

#include <random>

#include <seqmine/oracle.hpp>
#include <seqmine/stream_miner.hpp>

#include "test_util.hpp"

using namespace seqmine;
using namespace seqmine::testing;

namespace {

std::vector<DataSequence> singles(std::string_view items) {
    std::vector<DataSequence> out;
    for (char c : items) out.push_back(seq({"s" + std::to_string(out.size()), {{1, std::string(1, c)}}}));
    return out;
}

StreamState feed(StreamState state, std::vector<DataSequence> batch, const StreamConfig& cfg) {
    return process_batch(std::move(state), std::move(batch), cfg);
}

/// Exact count of p over every sequence in `seen`.
Count true_count(const Pattern& p, std::span<const DataSequence> seen) {
    Count n = 0;
    for (const auto& s : seen) n += contains(p, s, Constraints{}) ? 1 : 0;
    return n;
}

struct VectorSource {
    std::vector<DataSequence> items;
    std::size_t next_index = 0;
    int calls_after_end = 0;

    std::optional<DataSequence> next() {
        if (next_index == items.size()) {
            ++calls_after_end;
            return std::nullopt;
        }
        return items[next_index++];
    }
};

} // namespace

TEST(StreamMiner, FirstBatchCountsExactly) {
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.25, .batch_size = 4, .max_length = 3};
    const auto state = feed({}, singles("aabc"), cfg);
    const auto* a = state.tree.find(pat("a"));
    ASSERT_NE(a, nullptr);
    EXPECT_EQ(a->count, 2u);
    EXPECT_EQ(a->delta, 0u);
    // count 1 + delta 0 <= floor(0.25 * 4)
    EXPECT_EQ(state.tree.find(pat("b")), nullptr);
}

TEST(StreamMiner, PruneArithmetic) {
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.1, .batch_size = 10, .max_length = 2};
    auto state = feed({}, singles("xxyyyzzzzz"), cfg);
    ASSERT_NE(state.tree.find(pat("x")), nullptr);
    ASSERT_NE(state.tree.find(pat("y")), nullptr);

    state = feed(std::move(state), singles("zzzzzzzzzz"), cfg);
    EXPECT_EQ(state.tree.find(pat("x")), nullptr); // 2 <= floor(0.1 * 20)
    ASSERT_NE(state.tree.find(pat("y")), nullptr);

    state = feed(std::move(state), singles("zzzzzzzzzz"), cfg);
    EXPECT_EQ(state.tree.find(pat("y")), nullptr); // 3 <= floor(0.1 * 30)
    EXPECT_EQ(state.tree.find(pat("z"))->count, 25u);
}

TEST(StreamMiner, LateArrivalCarriesDelta) {
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.1, .batch_size = 10, .max_length = 2};
    auto state = feed({}, singles("zzzzzzzzzz"), cfg);
    state = feed(std::move(state), singles("qqqqqzzzzz"), cfg);
    const auto* q = state.tree.find(pat("q"));
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->count, 5u);
    EXPECT_EQ(q->delta, 1u);
    EXPECT_EQ(q->inserted_at_batch, 2u);
}

TEST(StreamMiner, OneBatchPatternIsEventuallyPruned) {
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.1, .batch_size = 10, .max_length = 2};
    auto state = feed({}, singles("wwwwwwwwww"), cfg);
    for (int b = 2; b <= 9; ++b) state = feed(std::move(state), singles("zzzzzzzzzz"), cfg);
    EXPECT_NE(state.tree.find(pat("w")), nullptr);
    state = feed(std::move(state), singles("zzzzzzzzzz"), cfg);
    EXPECT_EQ(state.tree.find(pat("w")), nullptr);
}

TEST(StreamMiner, IdenticalSequences) {
    StreamMiner m({.sigma = 0.5, .epsilon = 0.1, .batch_size = 2, .max_length = 3});
    for (int i = 0; i < 4; ++i) m.push(seq({"x", {{1, "a"}, {2, "b"}}}));
    const auto out = m.finish();
    const std::vector<SupportedPattern> want{{pat("a"), 4, 1.0}, {pat("b"), 4, 1.0}, {pat("a|b"), 4, 1.0}};
    EXPECT_EQ(out, want);
}

TEST(StreamMiner, EmptyStream) {
    StreamMiner m({});
    EXPECT_TRUE(m.query().empty());
    EXPECT_TRUE(m.finish().empty());
    EXPECT_EQ(m.state().sequences_seen, 0u);
}

TEST(StreamMiner, FlushResidual) {
    StreamMiner m({.sigma = 0.5, .epsilon = 0.1, .batch_size = 5, .max_length = 3});
    std::vector<DataSequence> all;
    for (int i = 0; i < 3; ++i) all.push_back(seq({"x", {{1, "ab"}, {3, "c"}}}));
    for (const auto& s : all) EXPECT_FALSE(m.push(s));
    EXPECT_EQ(m.pending(), 3u);
    EXPECT_EQ(m.finish(), oracle::brute_stream(all, 0.5, 3));
    EXPECT_EQ(m.state().sequences_seen, 3u);

    StreamState state;
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.1, .batch_size = 2, .max_length = 3};
    EXPECT_THROW(flush(state, singles("ab"), cfg), Error);
}

TEST(StreamMiner, BatchSizeAndConfigErrors) {
    const StreamConfig cfg{.sigma = 0.5, .epsilon = 0.1, .batch_size = 3, .max_length = 3};
    try {
        feed({}, singles("ab"), cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BadBatchSize);
    }
    auto expect_invalid = [](StreamConfig c) {
        try {
            StreamMiner m(c);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::InvalidConfig);
        }
    };
    expect_invalid({.sigma = 0.5, .epsilon = 0.6});
    expect_invalid({.sigma = 0.5, .epsilon = 0.5});
    expect_invalid({.sigma = 0.0, .epsilon = 0.0});
    expect_invalid({.sigma = 1.5, .epsilon = 0.1});
    expect_invalid({.sigma = 0.5, .epsilon = 0.1, .batch_size = 0});
    expect_invalid({.sigma = 0.5, .epsilon = 0.1, .batch_size = 1, .max_length = 0});
}

TEST(StreamMiner, RunReadsSourceOnce) {
    std::mt19937_64 rng(51);
    VectorSource src;
    for (int i = 0; i < 23; ++i) src.items.push_back(random_sequence(rng, "s" + std::to_string(i), 4, 4));
    StreamMiner m({.sigma = 0.3, .epsilon = 0.1, .batch_size = 5, .max_length = 3});
    int reports = 0;
    const auto out = m.run(src, [&](const StreamMiner& sm) {
        ++reports;
        EXPECT_EQ(sm.state().sequences_seen, static_cast<Count>(5 * reports));
    });
    EXPECT_EQ(reports, 4);
    EXPECT_EQ(src.calls_after_end, 1);
    EXPECT_EQ(m.state().sequences_seen, 23u);
    for (const auto& want : oracle::brute_stream(src.items, 0.3, 3))
        EXPECT_NE(std::find_if(out.begin(), out.end(), [&](const auto& sp) { return sp.pattern == want.pattern; }),
                  out.end());
}

TEST(StreamProperties, CountsBracketTruthAndOutputIsComplete) {
    std::mt19937_64 rng(52);
    for (int round = 0; round < 40; ++round) {
        const StreamConfig cfg{.sigma = std::array{0.2, 0.3, 0.5}[round % 3],
                               .epsilon = std::array{0.05, 0.1}[round % 2],
                               .batch_size = std::uniform_int_distribution<std::size_t>(3, 12)(rng),
                               .max_length = 3};
        const auto total = std::uniform_int_distribution<int>(1, 80)(rng);
        std::vector<DataSequence> seen;
        StreamMiner m(cfg);
        for (int i = 0; i < total; ++i) {
            auto s = random_sequence(rng, "s" + std::to_string(i), 5, 4);
            seen.push_back(s);
            if (!m.push(std::move(s))) continue;

            const auto n = m.state().sequences_seen;
            m.state().tree.visit([&](const Pattern& p, const PatternTree::Node& node) {
                const auto t = true_count(p, seen);
                EXPECT_LE(node.count, t);
                EXPECT_LE(t, node.count + node.delta);
                EXPECT_LE(p.size(), cfg.max_length);
            });
            // anything missing from the tree has true count at most eps * N
            for (const auto& sp : oracle::brute_stream(seen, 0.01, cfg.max_length))
                if (m.state().tree.find(sp.pattern) == nullptr) {
                    EXPECT_LE(static_cast<double>(sp.count), cfg.epsilon * static_cast<double>(n) + 1e-9);
                }

            const auto out = m.query();
            for (const auto& want : oracle::brute_stream(seen, cfg.sigma, cfg.max_length))
                EXPECT_NE(std::find_if(out.begin(), out.end(),
                                       [&](const auto& sp) { return sp.pattern == want.pattern; }),
                          out.end())
                    << "round " << round;
            for (const auto& sp : out)
                EXPECT_GE(static_cast<double>(true_count(sp.pattern, seen)),
                          (cfg.sigma - cfg.epsilon) * static_cast<double>(n) - 1e-9);
        }
    }
}

TEST(StreamProperties, ChildNeverOutcountsParent) {
    std::mt19937_64 rng(53);
    for (int round = 0; round < 30; ++round) {
        StreamMiner m({.sigma = 0.3, .epsilon = 0.05, .batch_size = 7, .max_length = 4});
        for (int i = 0; i < 70; ++i) m.push(random_sequence(rng, "s", 5, 5));
        auto check = [](auto& self, const PatternTree::Node& parent) -> void {
            for (const auto& c : parent.children) {
                EXPECT_LE(c.node.count, parent.count);
                EXPECT_GE(c.node.inserted_at_batch, parent.inserted_at_batch);
                self(self, c.node);
            }
        };
        for (const auto& c : m.state().tree.root().children) check(check, c.node);
    }
}
