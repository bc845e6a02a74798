#include <gtest/gtest.h>

#include <random>
#include <thread>

#include "apcs/error.hpp"
#include "apcs/json_io.hpp"
#include "apcs/telemetry.hpp"

namespace apcs {
namespace {

constexpr const char* kKey = "WKEY";

Channel make_channel(std::int64_t interval_ms) {
    return Channel(ChannelConfig{7, kKey, {{1, "count"}}, interval_ms, 0});
}

std::vector<std::string> field1_sequence(const Channel& ch) {
    std::vector<std::string> out;
    for (const auto& e : ch.entries()) out.push_back(e.fields.at(1));
    return out;
}

TEST(Rfc3339, FormatsUtcSeconds) {
    EXPECT_EQ(format_rfc3339(0), "1970-01-01T00:00:00Z");
    EXPECT_EQ(format_rfc3339(kDefaultClockOriginUtcMs), "2018-11-30T00:00:00Z");
    EXPECT_EQ(format_rfc3339(kDefaultClockOriginUtcMs + 3'661'999), "2018-11-30T01:01:01Z");
}

TEST(ChannelUpdate, FirstUpdateGetsIdOne) {
    auto ch = make_channel(15000);
    EXPECT_EQ(ch.update(kKey, {{1, "1"}}, 0), 1);
    ASSERT_EQ(ch.entries().size(), 1u);
    EXPECT_EQ(ch.entries()[0].fields.at(1), "1");
}

TEST(ChannelUpdate, RateLimitedReturnsZero) {
    auto ch = make_channel(15000);
    EXPECT_EQ(ch.update(kKey, {{1, "1"}}, 0), 1);
    EXPECT_EQ(ch.update(kKey, {{1, "2"}}, 3000), 0);
    EXPECT_EQ(ch.entries().size(), 1u);
    EXPECT_EQ(ch.rejected_updates(), 1u);
    EXPECT_EQ(ch.next_permitted_ms(), 15000);
    EXPECT_EQ(ch.update(kKey, {{1, "2"}}, 15000), 2);
}

TEST(ChannelUpdate, WrongKeyIsAuthFailure) {
    auto ch = make_channel(0);
    try {
        ch.update("nope", {{1, "1"}}, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadApiKey);
    }
    EXPECT_TRUE(ch.entries().empty());
}

TEST(ChannelUpdate, OlderTimestampIsRejected) {
    auto ch = make_channel(0);
    EXPECT_EQ(ch.update(kKey, {{1, "1"}}, 100), 1);
    EXPECT_EQ(ch.update(kKey, {{1, "2"}}, 50), 0);
}

TEST(Feeds, TailSlice) {
    auto ch = make_channel(0);
    for (int i = 1; i <= 3; ++i) ch.update(kKey, {{1, std::to_string(i)}}, i);
    const auto page = ch.feed(2);
    ASSERT_EQ(page.entries.size(), 2u);
    EXPECT_EQ(page.entries[0].entry_id, 2);
    EXPECT_EQ(page.entries[1].entry_id, 3);
    EXPECT_EQ(ch.feed(0).entries.size(), 3u);
    EXPECT_EQ(ch.feed(50).entries.size(), 3u);
}

TEST(Feeds, EmptyChannelHasMetadata) {
    const auto ch = make_channel(0);
    const auto page = ch.feed(10);
    EXPECT_TRUE(page.entries.empty());
    EXPECT_EQ(page.channel_id, 7);
    EXPECT_EQ(page.field_names.at(1), "count");
}

TEST(Feeds, UnknownChannel) {
    ChannelStore store;
    store.add(ChannelConfig{1, kKey});
    EXPECT_NO_THROW(store.feeds(1, 0));
    try {
        store.feeds(2, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownChannel);
    }
}

TEST(Feeds, WireShapeIsExact) {
    Channel ch(ChannelConfig{3, kKey, {{1, "count"}}, 0, kDefaultClockOriginUtcMs});
    ch.update(kKey, {{1, "1"}}, 3000);
    EXPECT_EQ(to_json(ch.feed(0)).dump(),
              R"({"channel":{"id":3,"field1":"count"},"feeds":[{"created_at":"2018-11-30T00:00:03Z","entry_id":1,"field1":"1"}]})");
}

TEST(Publish, CountsMirrorInOrderWithoutRateLimit) {
    auto ch = make_channel(0);
    PublishQueue q(1024, false);
    std::int64_t t = 0;
    for (int c : {1, 2, 1, 0}) publish_count(q, ch, kKey, c, t += 1000);
    EXPECT_EQ(field1_sequence(ch), (std::vector<std::string>{"1", "2", "1", "0"}));
}

TEST(Publish, CoalescesInsideRateWindow) {
    auto ch = make_channel(15000);
    PublishQueue q(1024, true);
    // A prior accepted entry puts the next two publishes inside the window.
    publish_count(q, ch, kKey, 0, 0);
    auto r1 = publish_count(q, ch, kKey, 1, 1000);
    EXPECT_EQ(r1.retry_at_ms, 15000);
    auto r2 = publish_count(q, ch, kKey, 2, 2000);
    EXPECT_EQ(q.size(), 1u);
    EXPECT_EQ(r2.retry_at_ms, 15000);
    auto r3 = drain(q, ch, kKey, 15000);
    EXPECT_EQ(r3.accepted, 1u);
    EXPECT_FALSE(r3.retry_at_ms);
    EXPECT_EQ(field1_sequence(ch), (std::vector<std::string>{"0", "2"}));
}

TEST(Publish, SingleCountGoesOutImmediately) {
    auto ch = make_channel(0);
    PublishQueue q;
    const auto r = publish_count(q, ch, kKey, 1, 0);
    EXPECT_EQ(r.accepted, 1u);
    EXPECT_EQ(ch.entries().size(), 1u);
    EXPECT_TRUE(q.empty());
}

TEST(Publish, OverflowDropsOldest) {
    PublishQueue q(1024, false);
    for (int i = 0; i < 1025; ++i) q.push(i, i);
    EXPECT_EQ(q.dropped(), 1u);
    EXPECT_EQ(q.size(), 1024u);
    EXPECT_EQ(q.front()->count, 1);
}

TEST(Publish, QueueIsSafeForOneProducerOneConsumer) {
    PublishQueue q(64, false);
    constexpr int kItems = 20000;
    std::int64_t received = 0;
    std::int64_t last = -1;
    bool ordered = true;
    std::thread consumer([&] {
        while (received + static_cast<std::int64_t>(q.dropped()) < kItems) {
            if (auto head = q.front()) {
                ordered = ordered && head->count > last;
                last = head->count;
                q.pop_front();
                ++received;
            }
        }
    });
    for (int i = 0; i < kItems; ++i) q.push(i, i);
    consumer.join();
    EXPECT_TRUE(ordered);
    EXPECT_EQ(received + static_cast<std::int64_t>(q.dropped()), kItems);
}

TEST(TelemetryProperty, GaplessIdsSpacingAndSuffixes) {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::int64_t> step(0, 20000);
    for (int run = 0; run < 100; ++run) {
        auto ch = make_channel(15000);
        std::int64_t t = 0;
        for (int i = 0; i < 200; ++i) {
            t += step(rng);
            ch.update(kKey, {{1, std::to_string(i)}}, t);
        }
        const auto& es = ch.entries();
        for (std::size_t i = 0; i < es.size(); ++i) {
            ASSERT_EQ(es[i].entry_id, static_cast<std::int64_t>(i + 1));
            if (i > 0) ASSERT_GE(es[i].created_at_ms - es[i - 1].created_at_ms, 15000);
        }
        for (std::size_t k = 0; k < es.size(); ++k) {
            const auto a = ch.feed(k + 1).entries;
            const auto b = ch.feed(k + 2).entries;
            ASSERT_TRUE(std::equal(a.begin(), a.end(), b.end() - static_cast<std::ptrdiff_t>(a.size())));
        }
    }
}

} // namespace
} // namespace apcs
