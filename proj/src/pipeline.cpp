#include "apcs/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <utility>

#include "apcs/error.hpp"

namespace apcs {

Pipeline::Pipeline(SystemConfig config)
    : config_(std::move(config)),
      detector_(config_.detector),
      counter_{0, config_.clamp_at_zero},
      bank_(ApplianceBank::make_default(config_.n_lights, config_.n_fans, config_.initial_mode)),
      queue_(config_.publish_capacity, config_.coalesce) {
    config_.energy.validate();
    channels_.add(ChannelConfig{config_.channel_id, config_.write_api_key, {{1, "count"}},
                                config_.rate_limit_ms, config_.clock_origin_utc_ms});
    bank_ = reconcile(std::move(bank_), counter_.count);
    actuation_log_.push_back({0, bank_});
}

void Pipeline::advance_clock(std::int64_t t) { now_ms_ = std::max(now_ms_, t); }

void Pipeline::set_bank(ApplianceBank next) {
    if (next == bank_) {
        return;
    }
    bank_ = std::move(next);
    if (!actuation_log_.empty() && actuation_log_.back().timestamp_ms == now_ms_) {
        actuation_log_.back().bank = bank_;
    } else {
        actuation_log_.push_back({now_ms_, bank_});
    }
}

void Pipeline::schedule_drain(std::int64_t now_ms) {
    auto& channel = channels_.at(config_.channel_id);
    const auto r = drain(queue_, channel, config_.write_api_key, now_ms);
    metrics_.published += r.accepted;
    retry_at_ms_ = r.retry_at_ms;
}

void Pipeline::on_sensor(const SensorEvent& event) {
    IngestResult r{detector_, std::nullopt};
    try {
        r = ingest(detector_, event);
    } catch (const Error& e) {
        ++metrics_.malformed_events;
        std::cerr << "apcs: skipping malformed sensor event: " << e.what() << '\n';
        return;
    }
    ++metrics_.events;
    detector_ = r.state;
    advance_clock(event.timestamp_ms);
    last_event_at_ms_ = event.timestamp_ms;

    if (!r.crossing) {
        return;
    }
    ++metrics_.crossings;
    crossings_.push_back(*r.crossing);
    counter_ = apply_crossing(counter_, *r.crossing);
    count_history_.push_back({r.crossing->completed_at_ms, counter_.count});
    set_bank(reconcile(bank_, counter_.count));
    queue_.push(counter_.count, now_ms_);
    schedule_drain(now_ms_);
}

void Pipeline::on_tick(std::int64_t now_ms) {
    advance_clock(now_ms);
    detector_ = expire(detector_, now_ms_);
    if (retry_at_ms_ && now_ms_ >= *retry_at_ms_) {
        schedule_drain(now_ms_);
    }
}

StatusSnapshot Pipeline::set_mode(Mode mode, std::int64_t now_ms) {
    advance_clock(now_ms);
    set_bank(apcs::set_mode(bank_, mode, counter_.count));
    return snapshot();
}

StatusSnapshot Pipeline::set_appliance(const ControlCommand& cmd) {
    advance_clock(cmd.issued_at_ms);
    set_bank(manual_set(bank_, cmd));
    return snapshot();
}

std::int64_t Pipeline::telemetry_update(std::string_view api_key, const FieldMap& fields, std::int64_t now_ms) {
    advance_clock(now_ms);
    return channels_.at(config_.channel_id).update(api_key, fields, now_ms_);
}

FeedPage Pipeline::feeds(std::int64_t channel_id, std::size_t results) const {
    return channels_.feeds(channel_id, results);
}

StatusSnapshot Pipeline::snapshot() const {
    StatusSnapshot s;
    s.mode = bank_.mode();
    s.count = counter_.count;
    s.appliances = bank_.appliances();
    s.lights_on = bank_.count_on(ApplianceKind::Light);
    s.fans_on = bank_.count_on(ApplianceKind::Fan);
    s.last_event_at_ms = last_event_at_ms_;
    s.telemetry_entries = channel().entries().size();
    return s;
}

std::optional<std::int64_t> Pipeline::next_wakeup_ms() const {
    std::optional<std::int64_t> next = retry_at_ms_;
    if (detector_.phase != Phase::Idle) {
        const auto expiry = detector_.deadline_ms + 1;
        next = next ? std::min(*next, expiry) : expiry;
    }
    return next;
}

} // namespace apcs
