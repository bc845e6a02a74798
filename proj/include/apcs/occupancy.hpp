#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace apcs {

/*
 * Dual-IR direction detector.
 *
 * Two beams sit across the doorway. A person walking in breaks IR1 then IR2;
 * walking out breaks IR2 then IR1. The detector is a pure transition
 * function over timestamped rising edges:
 *
 *     Idle --IR1--> AwaitIr2 --IR2 (t <= deadline)--> Idle   emits IN
 *     Idle --IR2--> AwaitIr1 --IR1 (t <= deadline)--> Idle   emits OUT
 *
 * deadline = opening edge + window_ms. A pending phase expires only once
 * time is strictly past the deadline, so an edge landing exactly on the
 * deadline still completes the crossing. A repeat edge on the opening
 * sensor re-arms the window from the newer edge.
 */

enum class Sensor : std::uint8_t { IR1 = 0, IR2 = 1 };

struct SensorEvent {
    std::int64_t timestamp_ms = 0;
    Sensor sensor = Sensor::IR1;

    friend bool operator==(const SensorEvent&, const SensorEvent&) = default;
};

enum class Phase : std::uint8_t { Idle, AwaitIr2, AwaitIr1 };

struct DetectorConfig {
    std::int64_t window_ms = 15000;
    std::int64_t debounce_ms = 200;

    friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

struct DetectorState {
    // Throws Error(InvalidInput) unless window_ms > 0 and debounce_ms >= 0.
    explicit DetectorState(DetectorConfig config = {});

    DetectorConfig config;
    Phase phase = Phase::Idle;
    std::int64_t deadline_ms = 0; // meaningful only when phase != Idle
    std::array<std::optional<std::int64_t>, 2> last_edge_ms{};
    std::optional<std::int64_t> last_seen_ms;

    friend bool operator==(const DetectorState&, const DetectorState&) = default;
};

enum class Direction : std::uint8_t { In, Out };

struct CrossingEvent {
    Direction direction = Direction::In;
    std::int64_t completed_at_ms = 0;

    friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

struct IngestResult {
    DetectorState state;
    std::optional<CrossingEvent> crossing;
};

// Throws Error(Monotonicity) if the event is older than one already ingested.
IngestResult ingest(const DetectorState& state, const SensorEvent& event);

DetectorState expire(const DetectorState& state, std::int64_t now_ms);

struct OccupancyCounter {
    std::int64_t count = 0;
    bool clamp_at_zero = true;

    friend bool operator==(const OccupancyCounter&, const OccupancyCounter&) = default;
};

OccupancyCounter apply_crossing(OccupancyCounter counter, const CrossingEvent& crossing);

const char* to_string(Sensor sensor) noexcept;
const char* to_string(Direction direction) noexcept;

} // namespace apcs
