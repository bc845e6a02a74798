#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "apcs/energy.hpp"
#include "apcs/occupancy.hpp"
#include "apcs/pipeline.hpp"
#include "apcs/telemetry.hpp"

namespace apcs {

inline constexpr std::int64_t kDefaultInterSensorGapMs = 1200;

struct ScheduledCrossing {
    std::int64_t time_ms = 0; // first edge
    Direction direction = Direction::In;
    std::int64_t gap_ms = kDefaultInterSensorGapMs;

    std::int64_t completed_at_ms() const noexcept { return time_ms + gap_ms; }

    friend bool operator==(const ScheduledCrossing&, const ScheduledCrossing&) = default;
};

struct CrossingSchedule {
    std::vector<ScheduledCrossing> crossings;
    std::int64_t duration_ms = 0;

    // Sorted times, non-negative gaps, a never-negative occupancy prefix, and a
    // duration covering the last completion. Throws Error(InvalidSchedule).
    void validate() const;
};

struct NoiseProfile {
    double drop_edge_prob = 0.0;
    double spurious_edge_rate_per_min = 0.0;
    std::int64_t jitter_ms = 0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

// IN expands to IR1 then IR2 gap_ms later, OUT to IR2 then IR1. Noise is
// applied to the expanded edges; the result is stable-sorted by timestamp.
std::vector<SensorEvent> gen_trace(const CrossingSchedule& schedule, const NoiseProfile& noise = {});

struct OccupancyStep {
    std::int64_t from_ms = 0;
    std::int64_t count = 0;

    friend bool operator==(const OccupancyStep&, const OccupancyStep&) = default;
};

// Right-continuous step function; count_at(t) is the count of the last step
// with from_ms <= t.
class OccupancyTimeline {
public:
    explicit OccupancyTimeline(std::vector<OccupancyStep> steps);

    std::int64_t count_at(std::int64_t t_ms) const noexcept;
    const std::vector<OccupancyStep>& steps() const noexcept { return steps_; }

private:
    std::vector<OccupancyStep> steps_;
};

// Ground truth straight from the schedule: #IN completed by t minus #OUT
// completed by t. No state machine involved.
OccupancyTimeline oracle_occupancy(const CrossingSchedule& schedule);

struct ScenarioResult {
    std::vector<SensorEvent> trace;
    std::vector<CrossingEvent> crossings;
    std::vector<CountSample> count_history;
    std::vector<ActuationSample> actuation_log;
    FeedPage telemetry;
    std::int64_t final_count = 0;
    std::int64_t end_ms = 0;
    EnergyLedger ledger;
    PipelineMetrics metrics;
    std::uint64_t dropped_publishes = 0;
};

// Replays an already generated trace through a fresh pipeline. Publish retries
// are serviced between events and after the last one until the queue drains.
ScenarioResult replay_trace(std::vector<SensorEvent> trace, std::int64_t duration_ms, const SystemConfig& config);

ScenarioResult run_scenario(const CrossingSchedule& schedule, const NoiseProfile& noise, const SystemConfig& config);

struct NegligenceBaseline {
    double negligence_pct = 0.0;
    OccupancyTimeline occupancy{{}};
    std::vector<ActuationSample> actuation_log;
    EnergyLedger ledger;
};

// Manual world: everything ON while occupied; in each vacancy interval of
// length L the appliances stay ON for the first pct/100 * L.
NegligenceBaseline negligence_baseline(const CrossingSchedule& schedule, double negligence_pct,
                                       const EnergyModel& model);

} // namespace apcs
