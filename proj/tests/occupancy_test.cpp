#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "apcs/error.hpp"
#include "apcs/occupancy.hpp"
#include "apcs/simharness.hpp"
#include "support/oracles.hpp"

namespace apcs {
namespace {

struct Replay {
    DetectorState state;
    OccupancyCounter counter;
    std::vector<CrossingEvent> crossings;
};

Replay feed(const std::vector<SensorEvent>& trace, DetectorConfig cfg = {}, bool clamp = true) {
    Replay r{DetectorState(cfg), OccupancyCounter{0, clamp}, {}};
    for (const auto& ev : trace) {
        auto out = ingest(r.state, ev);
        r.state = out.state;
        if (out.crossing) {
            r.crossings.push_back(*out.crossing);
            r.counter = apply_crossing(r.counter, *out.crossing);
        }
    }
    return r;
}

TEST(Ingest, InPairWithinWindow) {
    const auto r = feed({{0, Sensor::IR1}, {3000, Sensor::IR2}});
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.crossings[0], (CrossingEvent{Direction::In, 3000}));
    EXPECT_EQ(r.state.phase, Phase::Idle);
}

TEST(Ingest, OutPairWithinWindow) {
    const auto r = feed({{0, Sensor::IR2}, {2500, Sensor::IR1}});
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.crossings[0], (CrossingEvent{Direction::Out, 2500}));
}

TEST(Ingest, LateSecondEdgeOpensOppositeWindow) {
    const auto r = feed({{0, Sensor::IR1}, {16000, Sensor::IR2}});
    EXPECT_TRUE(r.crossings.empty());
    EXPECT_EQ(r.state.phase, Phase::AwaitIr1);
    EXPECT_EQ(r.state.deadline_ms, 16000 + 15000);
}

TEST(Ingest, SingleEdgeEmitsNothing) {
    const auto r = feed({{0, Sensor::IR2}});
    EXPECT_TRUE(r.crossings.empty());
    EXPECT_EQ(r.state.phase, Phase::AwaitIr1);
    EXPECT_EQ(r.state.deadline_ms, 15000);
}

TEST(Ingest, DeadlineIsInclusive) {
    const auto at = feed({{0, Sensor::IR1}, {15000, Sensor::IR2}});
    ASSERT_EQ(at.crossings.size(), 1u);
    EXPECT_EQ(at.crossings[0].direction, Direction::In);

    const auto past = feed({{0, Sensor::IR1}, {15001, Sensor::IR2}});
    EXPECT_TRUE(past.crossings.empty());
    EXPECT_EQ(past.state.phase, Phase::AwaitIr1);
}

TEST(Ingest, DebounceDropsChatterOnSameSensor) {
    // IR1 chatters at 100 ms; the chatter must not re-arm anything, and the
    // crossing still completes.
    const auto r = feed({{0, Sensor::IR1}, {100, Sensor::IR1}, {150, Sensor::IR1}, {1200, Sensor::IR2}});
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.crossings[0], (CrossingEvent{Direction::In, 1200}));
    EXPECT_EQ(r.state.last_edge_ms[0], 0);
}

TEST(Ingest, DebouncedEdgeDoesNotStartCrossing) {
    // IR2 at 1000 closes an IN; a bounce on IR2 at 1100 must not open an OUT.
    const auto r = feed({{0, Sensor::IR1}, {1000, Sensor::IR2}, {1100, Sensor::IR2}, {1500, Sensor::IR1}});
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.state.phase, Phase::AwaitIr2);
}

TEST(Ingest, ExpiryThenNewCrossing) {
    // Orphan IR1 at 0 expires; OUT crossing at 20000..21000 then counts.
    const auto r = feed({{0, Sensor::IR1}, {20000, Sensor::IR2}, {21000, Sensor::IR1}}, {}, false);
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.crossings[0], (CrossingEvent{Direction::Out, 21000}));
    EXPECT_EQ(r.counter.count, -1);
}

TEST(Ingest, RepeatOpeningEdgeRearmsWindow) {
    const auto r = feed({{0, Sensor::IR2}, {10000, Sensor::IR2}, {24000, Sensor::IR1}});
    ASSERT_EQ(r.crossings.size(), 1u);
    EXPECT_EQ(r.crossings[0], (CrossingEvent{Direction::Out, 24000}));
}

TEST(Ingest, SimultaneousEdgesResolveInTraceOrder) {
    const auto in = feed({{500, Sensor::IR1}, {500, Sensor::IR2}});
    ASSERT_EQ(in.crossings.size(), 1u);
    EXPECT_EQ(in.crossings[0].direction, Direction::In);
    const auto out = feed({{500, Sensor::IR2}, {500, Sensor::IR1}});
    ASSERT_EQ(out.crossings.size(), 1u);
    EXPECT_EQ(out.crossings[0].direction, Direction::Out);
}

TEST(Ingest, RejectsOutOfOrderEvents) {
    DetectorState s;
    s = ingest(s, {5000, Sensor::IR1}).state;
    try {
        (void)ingest(s, {4999, Sensor::IR2});
        FAIL() << "expected monotonicity error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Monotonicity);
    }
}

TEST(DetectorState, ValidatesConfig) {
    EXPECT_THROW(DetectorState(DetectorConfig{0, 200}), Error);
    EXPECT_THROW(DetectorState(DetectorConfig{15000, -1}), Error);
    EXPECT_NO_THROW(DetectorState(DetectorConfig{1, 0}));
}

TEST(Expire, Examples) {
    DetectorState pending;
    pending.phase = Phase::AwaitIr2;
    pending.deadline_ms = 15000;

    EXPECT_EQ(expire(pending, 15001).phase, Phase::Idle);
    EXPECT_EQ(expire(pending, 14999), pending);
    EXPECT_EQ(expire(pending, 15000), pending);

    const DetectorState idle;
    EXPECT_EQ(expire(idle, 0), idle);
    EXPECT_EQ(expire(idle, 1'000'000'000), idle);
}

TEST(ApplyCrossing, Examples) {
    EXPECT_EQ(apply_crossing({0, true}, {Direction::In, 0}).count, 1);
    EXPECT_EQ(apply_crossing({1, true}, {Direction::Out, 0}).count, 0);
    EXPECT_EQ(apply_crossing({0, true}, {Direction::Out, 0}).count, 0);
    EXPECT_EQ(apply_crossing({0, false}, {Direction::Out, 0}).count, -1);
}

TEST(ApplyCrossing, ClampMatchesRawOracleDivergence) {
    // A lone OUT: the literal loop goes to -1, the clamped counter stays at 0.
    const std::vector<SensorEvent> trace{{0, Sensor::IR2}, {900, Sensor::IR1}};
    EXPECT_EQ(testing::run_pseudocode(trace).count, -1);
    EXPECT_EQ(feed(trace, {}, false).counter.count, -1);
    EXPECT_EQ(feed(trace, {}, true).counter.count, 0);
}

TEST(Ingest, DeterministicOnRepeat) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto trace = gen_trace(testing::random_schedule(rng, {40}), {0.1, 0.5, 250, static_cast<std::uint64_t>(i)});
        const auto a = feed(trace);
        const auto b = feed(trace);
        EXPECT_EQ(a.crossings, b.crossings);
        EXPECT_EQ(a.state, b.state);
    }
}

TEST(OccupancyProperty, WellFormedTracesMatchBruteForceAndLiteralLoop) {
    std::mt19937_64 rng(20181130);
    for (int i = 0; i < 1000; ++i) {
        const auto schedule = testing::random_schedule(rng, {60});
        const auto trace = gen_trace(schedule);
        const auto r = feed(trace);
        ASSERT_EQ(r.crossings.size(), schedule.crossings.size()) << "trace " << i;
        EXPECT_EQ(r.counter.count, testing::brute_force_count(schedule, schedule.duration_ms)) << "trace " << i;
        EXPECT_EQ(r.counter.count, testing::run_pseudocode(trace).count) << "trace " << i;
    }
}

TEST(OccupancyProperty, DroppingOneEdgeLosesExactlyOneCrossing) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        const auto schedule = testing::random_schedule(rng, {30, 15000, 200, 20000});
        const auto trace = gen_trace(schedule);
        const auto full = feed(trace).crossings.size();
        for (std::size_t drop = 0; drop < trace.size(); ++drop) {
            auto damaged = trace;
            damaged.erase(damaged.begin() + static_cast<std::ptrdiff_t>(drop));
            ASSERT_EQ(feed(damaged).crossings.size() + 1, full) << "trace " << i << " drop " << drop;
        }
    }
}

TEST(OccupancyProperty, ClampedCountNeverNegativeUnderNoise) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const auto schedule = testing::random_schedule(rng, {50});
        const auto trace = gen_trace(schedule, {0.2, 2.0, 800, static_cast<std::uint64_t>(i)});
        DetectorState s;
        OccupancyCounter c;
        for (const auto& ev : trace) {
            auto out = ingest(s, ev);
            s = out.state;
            if (out.crossing) {
                c = apply_crossing(c, *out.crossing);
            }
            ASSERT_GE(c.count, 0);
        }
    }
}

} // namespace
} // namespace apcs
