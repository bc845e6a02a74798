#include "apcs/telemetry.hpp"

#include <algorithm>
#include <ctime>
#include <string>
#include <utility>

#include "apcs/error.hpp"

namespace apcs {

std::string format_rfc3339(std::int64_t utc_ms) {
    std::int64_t secs = utc_ms / 1000;
    if (utc_ms % 1000 < 0) {
        --secs;
    }
    const std::time_t tt = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Channel::Channel(ChannelConfig config) : config_(std::move(config)) {
    if (config_.min_update_interval_ms < 0) {
        throw Error(ErrorCode::InvalidInput, "min_update_interval_ms must be non-negative");
    }
}

std::int64_t Channel::update(std::string_view api_key, const FieldMap& fields, std::int64_t now_ms) {
    if (api_key != config_.write_api_key) {
        throw Error(ErrorCode::BadApiKey, "write API key does not match channel " +
                                              std::to_string(config_.channel_id));
    }
    for (const auto& [field, value] : fields) {
        if (field < 1 || field > 8) {
            throw Error(ErrorCode::InvalidInput, "field index out of range: " + std::to_string(field));
        }
    }
    // A negative difference is also rejected, which keeps created_at sorted.
    if (last_accepted_sim_ms_ && now_ms - *last_accepted_sim_ms_ < config_.min_update_interval_ms) {
        ++rejected_;
        return 0;
    }
    const auto id = static_cast<std::int64_t>(entries_.size()) + 1;
    entries_.push_back({id, config_.clock_origin_utc_ms + now_ms, fields});
    last_accepted_sim_ms_ = now_ms;
    return id;
}

FeedPage Channel::feed(std::size_t results) const {
    FeedPage page{config_.channel_id, config_.field_names, {}};
    const std::size_t n = (results == 0 || results > entries_.size()) ? entries_.size() : results;
    page.entries.assign(entries_.end() - static_cast<std::ptrdiff_t>(n), entries_.end());
    return page;
}

std::int64_t Channel::next_permitted_ms() const noexcept {
    return last_accepted_sim_ms_ ? *last_accepted_sim_ms_ + config_.min_update_interval_ms : 0;
}

Channel& ChannelStore::add(ChannelConfig config) {
    const auto id = config.channel_id;
    auto [it, inserted] = channels_.insert_or_assign(id, Channel(std::move(config)));
    return it->second;
}

Channel& ChannelStore::at(std::int64_t channel_id) {
    auto it = channels_.find(channel_id);
    if (it == channels_.end()) {
        throw Error(ErrorCode::UnknownChannel, "unknown channel " + std::to_string(channel_id));
    }
    return it->second;
}

const Channel& ChannelStore::at(std::int64_t channel_id) const {
    auto it = channels_.find(channel_id);
    if (it == channels_.end()) {
        throw Error(ErrorCode::UnknownChannel, "unknown channel " + std::to_string(channel_id));
    }
    return it->second;
}

FeedPage ChannelStore::feeds(std::int64_t channel_id, std::size_t results) const {
    return at(channel_id).feed(results);
}

PublishQueue::PublishQueue(std::size_t capacity, bool coalesce) : capacity_(capacity), coalesce_(coalesce) {
    if (capacity_ == 0) {
        throw Error(ErrorCode::InvalidInput, "publish queue capacity must be positive");
    }
}

void PublishQueue::push(std::int64_t count, std::int64_t now_ms) {
    std::lock_guard lock(mu_);
    if (coalesce_ && !pending_.empty()) {
        pending_.back() = {count, now_ms};
        return;
    }
    if (pending_.size() == capacity_) {
        pending_.pop_front();
        ++dropped_;
    }
    pending_.push_back({count, now_ms});
}

std::optional<PendingCount> PublishQueue::front() const {
    std::lock_guard lock(mu_);
    if (pending_.empty()) {
        return std::nullopt;
    }
    return pending_.front();
}

void PublishQueue::pop_front() {
    std::lock_guard lock(mu_);
    if (!pending_.empty()) {
        pending_.pop_front();
    }
}

std::size_t PublishQueue::size() const {
    std::lock_guard lock(mu_);
    return pending_.size();
}

bool PublishQueue::empty() const { return size() == 0; }

std::uint64_t PublishQueue::dropped() const {
    std::lock_guard lock(mu_);
    return dropped_;
}

DrainResult drain(PublishQueue& queue, Channel& channel, std::string_view api_key, std::int64_t now_ms) {
    DrainResult result;
    while (auto head = queue.front()) {
        const auto id = channel.update(api_key, {{1, std::to_string(head->count)}}, now_ms);
        if (id == 0) {
            result.retry_at_ms = std::max(channel.next_permitted_ms(), now_ms);
            return result;
        }
        queue.pop_front();
        ++result.accepted;
    }
    return result;
}

DrainResult publish_count(PublishQueue& queue, Channel& channel, std::string_view api_key,
                          std::int64_t count, std::int64_t now_ms) {
    queue.push(count, now_ms);
    return drain(queue, channel, api_key, now_ms);
}

} // namespace apcs
