#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apcs/actuation.hpp"
#include "apcs/energy.hpp"
#include "apcs/occupancy.hpp"
#include "apcs/telemetry.hpp"

namespace apcs {

struct SystemConfig {
    DetectorConfig detector{};
    bool clamp_at_zero = true;
    int n_lights = 4;
    int n_fans = 4;
    Mode initial_mode = Mode::Auto;
    std::int64_t channel_id = 1;
    std::string write_api_key = "APCS-WRITE-KEY";
    std::int64_t rate_limit_ms = 15000;
    std::size_t publish_capacity = 1024;
    bool coalesce = true;
    std::int64_t clock_origin_utc_ms = kDefaultClockOriginUtcMs;
    EnergyModel energy{};
};

struct StatusSnapshot {
    Mode mode = Mode::Auto;
    std::int64_t count = 0;
    std::vector<Appliance> appliances;
    int lights_on = 0;
    int fans_on = 0;
    std::optional<std::int64_t> last_event_at_ms; // simulation time
    std::size_t telemetry_entries = 0;
};

struct PipelineMetrics {
    std::uint64_t events = 0;
    std::uint64_t crossings = 0;
    std::uint64_t malformed_events = 0;
    std::uint64_t published = 0;
};

struct CountSample {
    std::int64_t timestamp_ms = 0;
    std::int64_t count = 0;

    friend bool operator==(const CountSample&, const CountSample&) = default;
};

// The whole device state: detector, counter, relay bank, telemetry channel
// and publish queue. Every mutation goes through one of the on_* / command
// methods; the gateway's event loop is the only caller in a live system, and
// the simulator drives it directly for replays.
class Pipeline {
public:
    explicit Pipeline(SystemConfig config);

    // ingest -> apply_crossing -> reconcile -> publish_count. Malformed
    // (out-of-order) events are counted and skipped.
    void on_sensor(const SensorEvent& event);

    // Timer expiry and publish retries.
    void on_tick(std::int64_t now_ms);

    StatusSnapshot set_mode(Mode mode, std::int64_t now_ms);
    StatusSnapshot set_appliance(const ControlCommand& cmd);

    std::int64_t telemetry_update(std::string_view api_key, const FieldMap& fields, std::int64_t now_ms);
    FeedPage feeds(std::int64_t channel_id, std::size_t results) const;

    StatusSnapshot snapshot() const;

    // Next simulation time at which on_tick has work to do, if any.
    std::optional<std::int64_t> next_wakeup_ms() const;

    const SystemConfig& config() const noexcept { return config_; }
    const DetectorState& detector() const noexcept { return detector_; }
    const OccupancyCounter& counter() const noexcept { return counter_; }
    const ApplianceBank& bank() const noexcept { return bank_; }
    const Channel& channel() const { return channels_.at(config_.channel_id); }
    const PublishQueue& publish_queue() const noexcept { return queue_; }
    const PipelineMetrics& metrics() const noexcept { return metrics_; }
    const std::vector<CrossingEvent>& crossings() const noexcept { return crossings_; }
    const std::vector<CountSample>& count_history() const noexcept { return count_history_; }
    const std::vector<ActuationSample>& actuation_log() const noexcept { return actuation_log_; }
    std::int64_t now_ms() const noexcept { return now_ms_; }

private:
    void advance_clock(std::int64_t t);
    void set_bank(ApplianceBank next);
    void schedule_drain(std::int64_t now_ms);

    SystemConfig config_;
    DetectorState detector_;
    OccupancyCounter counter_;
    ApplianceBank bank_;
    ChannelStore channels_;
    PublishQueue queue_;
    std::optional<std::int64_t> retry_at_ms_;
    std::optional<std::int64_t> last_event_at_ms_;
    std::int64_t now_ms_ = 0;
    PipelineMetrics metrics_;
    std::vector<CrossingEvent> crossings_;
    std::vector<CountSample> count_history_;
    std::vector<ActuationSample> actuation_log_;
};

} // namespace apcs
