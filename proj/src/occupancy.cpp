#include "apcs/occupancy.hpp"

#include <string>

#include "apcs/error.hpp"

namespace apcs {

namespace {

std::size_t index_of(Sensor s) { return static_cast<std::size_t>(s); }

} // namespace

DetectorState::DetectorState(DetectorConfig cfg) : config(cfg) {
    if (config.window_ms <= 0) {
        throw Error(ErrorCode::InvalidInput, "detector window_ms must be positive");
    }
    if (config.debounce_ms < 0) {
        throw Error(ErrorCode::InvalidInput, "detector debounce_ms must be non-negative");
    }
}

DetectorState expire(const DetectorState& state, std::int64_t now_ms) {
    DetectorState next = state;
    if (next.phase != Phase::Idle && now_ms > next.deadline_ms) {
        next.phase = Phase::Idle;
        next.deadline_ms = 0;
    }
    return next;
}

IngestResult ingest(const DetectorState& state, const SensorEvent& event) {
    if (event.timestamp_ms < 0) {
        throw Error(ErrorCode::Monotonicity, "negative event timestamp");
    }
    if (state.last_seen_ms && event.timestamp_ms < *state.last_seen_ms) {
        throw Error(ErrorCode::Monotonicity,
                    "event at t=" + std::to_string(event.timestamp_ms) +
                        " ms precedes previously ingested t=" + std::to_string(*state.last_seen_ms));
    }

    IngestResult out{expire(state, event.timestamp_ms), std::nullopt};
    DetectorState& next = out.state;
    next.last_seen_ms = event.timestamp_ms;

    auto& last_edge = next.last_edge_ms[index_of(event.sensor)];
    if (last_edge && event.timestamp_ms - *last_edge < next.config.debounce_ms) {
        return out;
    }
    last_edge = event.timestamp_ms;

    const std::int64_t t = event.timestamp_ms;
    const bool ir1 = event.sensor == Sensor::IR1;
    switch (next.phase) {
    case Phase::Idle:
        next.phase = ir1 ? Phase::AwaitIr2 : Phase::AwaitIr1;
        next.deadline_ms = t + next.config.window_ms;
        break;
    case Phase::AwaitIr2:
        if (ir1) {
            next.deadline_ms = t + next.config.window_ms;
        } else {
            next.phase = Phase::Idle;
            next.deadline_ms = 0;
            out.crossing = CrossingEvent{Direction::In, t};
        }
        break;
    case Phase::AwaitIr1:
        if (!ir1) {
            next.deadline_ms = t + next.config.window_ms;
        } else {
            next.phase = Phase::Idle;
            next.deadline_ms = 0;
            out.crossing = CrossingEvent{Direction::Out, t};
        }
        break;
    }
    return out;
}

OccupancyCounter apply_crossing(OccupancyCounter counter, const CrossingEvent& crossing) {
    if (crossing.direction == Direction::In) {
        ++counter.count;
    } else if (!counter.clamp_at_zero || counter.count > 0) {
        --counter.count;
    }
    return counter;
}

const char* to_string(Sensor sensor) noexcept {
    return sensor == Sensor::IR1 ? "IR1" : "IR2";
}

const char* to_string(Direction direction) noexcept {
    return direction == Direction::In ? "IN" : "OUT";
}

} // namespace apcs
