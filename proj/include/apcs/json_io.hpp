#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "apcs/energy.hpp"
#include "apcs/occupancy.hpp"
#include "apcs/pipeline.hpp"
#include "apcs/simharness.hpp"
#include "apcs/telemetry.hpp"

namespace apcs {

using Json = nlohmann::ordered_json;

// Trace files: one {"t_ms": <int>, "sensor": "IR1"|"IR2"} object per line.
// Blank lines are skipped. Errors carry the 1-based line and column.
std::vector<SensorEvent> parse_trace_jsonl(std::istream& in);
void write_trace_jsonl(std::ostream& out, std::span<const SensorEvent> trace);

struct Scenario {
    CrossingSchedule schedule;
    NoiseProfile noise;
    std::optional<double> negligence_pct;
    std::optional<std::int64_t> days;
    std::optional<double> hours_per_day;
};

// {"duration_ms":…, "crossings":[{"t_ms":…, "dir":"IN"|"OUT", "gap_ms":…}], "noise":{…}}
Scenario parse_scenario(std::string_view text);
Json scenario_to_json(const Scenario& scenario);

Json to_json(const FeedPage& page);
Json to_json(const StatusSnapshot& status, std::int64_t clock_origin_utc_ms);
Json to_json(const WastageReport& report);
Json to_json(const SavingsReport& report);
Json to_json(const EnergyLedger& ledger);
Json actuation_log_to_json(std::span<const ActuationSample> log);
Json to_json(const ScenarioResult& result);

Json error_body(std::string_view code, std::string_view message);

} // namespace apcs
