#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace apcs {

// 2018-11-30T00:00:00Z; simulation t=0 maps here unless configured otherwise.
inline constexpr std::int64_t kDefaultClockOriginUtcMs = 1'543'536'000'000;

// "YYYY-MM-DDTHH:MM:SSZ", second resolution.
std::string format_rfc3339(std::int64_t utc_ms);

// Keys are field numbers 1..8.
using FieldMap = std::map<int, std::string>;

struct TelemetryEntry {
    std::int64_t entry_id = 0;
    std::int64_t created_at_ms = 0; // UTC
    FieldMap fields;

    friend bool operator==(const TelemetryEntry&, const TelemetryEntry&) = default;
};

struct FeedPage {
    std::int64_t channel_id = 0;
    FieldMap field_names;
    std::vector<TelemetryEntry> entries;
};

struct ChannelConfig {
    std::int64_t channel_id = 1;
    std::string write_api_key;
    FieldMap field_names{{1, "count"}};
    std::int64_t min_update_interval_ms = 15000;
    std::int64_t clock_origin_utc_ms = kDefaultClockOriginUtcMs;
};

// ThingSpeak-style append-only channel. Single writer; copy it to snapshot.
class Channel {
public:
    explicit Channel(ChannelConfig config);

    // Appends an entry and returns its id. Returns 0 without appending when the
    // update arrives sooner than min_update_interval_ms after the last accepted
    // one. Throws Error(BadApiKey) on key mismatch.
    std::int64_t update(std::string_view api_key, const FieldMap& fields, std::int64_t now_ms);

    // Last `results` entries in chronological order; 0 means all.
    FeedPage feed(std::size_t results) const;

    // Earliest simulation time at which update() would not be rate-limited.
    std::int64_t next_permitted_ms() const noexcept;

    const ChannelConfig& config() const noexcept { return config_; }
    const std::vector<TelemetryEntry>& entries() const noexcept { return entries_; }
    std::uint64_t rejected_updates() const noexcept { return rejected_; }

private:
    ChannelConfig config_;
    std::vector<TelemetryEntry> entries_;
    std::optional<std::int64_t> last_accepted_sim_ms_;
    std::uint64_t rejected_ = 0;
};

class ChannelStore {
public:
    Channel& add(ChannelConfig config);
    Channel& at(std::int64_t channel_id);             // throws Error(UnknownChannel)
    const Channel& at(std::int64_t channel_id) const; // throws Error(UnknownChannel)
    FeedPage feeds(std::int64_t channel_id, std::size_t results) const;

private:
    std::map<std::int64_t, Channel> channels_;
};

struct PendingCount {
    std::int64_t count = 0;
    std::int64_t enqueued_at_ms = 0;
};

// Bounded FIFO between the event loop (producer) and the drain step
// (consumer). With coalescing on, a push onto a non-empty queue replaces the
// newest pending item. When full, the oldest item is dropped and counted.
class PublishQueue {
public:
    explicit PublishQueue(std::size_t capacity = 1024, bool coalesce = true);

    void push(std::int64_t count, std::int64_t now_ms);
    std::optional<PendingCount> front() const;
    void pop_front();

    std::size_t size() const;
    bool empty() const;
    std::size_t capacity() const noexcept { return capacity_; }
    bool coalesce() const noexcept { return coalesce_; }
    std::uint64_t dropped() const;

private:
    mutable std::mutex mu_;
    std::deque<PendingCount> pending_;
    std::size_t capacity_;
    bool coalesce_;
    std::uint64_t dropped_ = 0;
};

struct DrainResult {
    std::size_t accepted = 0;
    std::optional<std::int64_t> retry_at_ms; // set when items remain pending
};

// Submits pending counts as field1 until the queue is empty or the channel
// rate-limits; a rate-limited head stays queued for retry_at_ms.
DrainResult drain(PublishQueue& queue, Channel& channel, std::string_view api_key, std::int64_t now_ms);

// Device-side publish: enqueue then drain.
DrainResult publish_count(PublishQueue& queue, Channel& channel, std::string_view api_key,
                          std::int64_t count, std::int64_t now_ms);

} // namespace apcs
