#include "apcs/json_io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "apcs/error.hpp"

namespace apcs {

namespace {

std::string position_of(std::string_view text, std::size_t byte) {
    // nlohmann reports the 1-based byte index of the offending character.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t stop = std::min(byte == 0 ? 0 : byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

Json parse_document(std::string_view text, const std::string& where) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::Parse, where + position_of(text, e.byte) + ": syntax error");
    }
}

template <class T>
T field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw Error(ErrorCode::Parse, where + ": missing \"" + key + "\"");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::Parse, where + ": \"" + key + "\" has the wrong type");
    }
}

template <class T>
std::optional<T> optional_field(const Json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) {
        return std::nullopt;
    }
    return field<T>(obj, key, where);
}

Sensor parse_sensor(const std::string& s, const std::string& where) {
    if (s == "IR1") return Sensor::IR1;
    if (s == "IR2") return Sensor::IR2;
    throw Error(ErrorCode::Parse, where + ": sensor must be \"IR1\" or \"IR2\"");
}

Json appliance_json(const Appliance& a) {
    return Json{{"id", a.id}, {"kind", to_string(a.kind)}, {"state", to_string(a.state)}, {"watts", a.watts}};
}

} // namespace

std::vector<SensorEvent> parse_trace_jsonl(std::istream& in) {
    std::vector<SensorEvent> trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = "trace line " + std::to_string(lineno);
        Json obj;
        try {
            obj = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::Parse, "trace: line " + std::to_string(lineno) + ", column " +
                                              std::to_string(e.byte) + ": syntax error");
        }
        SensorEvent ev;
        ev.timestamp_ms = field<std::int64_t>(obj, "t_ms", where);
        ev.sensor = parse_sensor(field<std::string>(obj, "sensor", where), where);
        trace.push_back(ev);
    }
    return trace;
}

void write_trace_jsonl(std::ostream& out, std::span<const SensorEvent> trace) {
    for (const auto& ev : trace) {
        out << Json{{"t_ms", ev.timestamp_ms}, {"sensor", to_string(ev.sensor)}}.dump() << '\n';
    }
}

Scenario parse_scenario(std::string_view text) {
    const Json doc = parse_document(text, "scenario: ");
    Scenario s;
    s.schedule.duration_ms = field<std::int64_t>(doc, "duration_ms", "scenario");
    if (doc.contains("crossings")) {
        const auto& list = doc.at("crossings");
        if (!list.is_array()) {
            throw Error(ErrorCode::Parse, "scenario: \"crossings\" must be an array");
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string where = "scenario crossings[" + std::to_string(i) + "]";
            ScheduledCrossing c;
            c.time_ms = field<std::int64_t>(list[i], "t_ms", where);
            const auto dir = field<std::string>(list[i], "dir", where);
            if (dir == "IN") {
                c.direction = Direction::In;
            } else if (dir == "OUT") {
                c.direction = Direction::Out;
            } else {
                throw Error(ErrorCode::Parse, where + ": dir must be \"IN\" or \"OUT\"");
            }
            c.gap_ms = optional_field<std::int64_t>(list[i], "gap_ms", where).value_or(kDefaultInterSensorGapMs);
            s.schedule.crossings.push_back(c);
        }
    }
    if (doc.contains("noise")) {
        const auto& n = doc.at("noise");
        const std::string where = "scenario noise";
        s.noise.drop_edge_prob = optional_field<double>(n, "drop_edge_prob", where).value_or(0.0);
        s.noise.spurious_edge_rate_per_min =
            optional_field<double>(n, "spurious_edge_rate_per_min", where).value_or(0.0);
        s.noise.jitter_ms = optional_field<std::int64_t>(n, "jitter_ms", where).value_or(0);
        s.noise.rng_seed = optional_field<std::uint64_t>(n, "rng_seed", where).value_or(0);
    }
    s.negligence_pct = optional_field<double>(doc, "negligence_pct", "scenario");
    s.days = optional_field<std::int64_t>(doc, "days", "scenario");
    s.hours_per_day = optional_field<double>(doc, "hours_per_day", "scenario");
    return s;
}

Json scenario_to_json(const Scenario& scenario) {
    Json doc;
    doc["duration_ms"] = scenario.schedule.duration_ms;
    if (scenario.days) doc["days"] = *scenario.days;
    if (scenario.hours_per_day) doc["hours_per_day"] = *scenario.hours_per_day;
    if (scenario.negligence_pct) doc["negligence_pct"] = *scenario.negligence_pct;
    doc["crossings"] = Json::array();
    for (const auto& c : scenario.schedule.crossings) {
        doc["crossings"].push_back({{"t_ms", c.time_ms}, {"dir", to_string(c.direction)}, {"gap_ms", c.gap_ms}});
    }
    doc["noise"] = {{"drop_edge_prob", scenario.noise.drop_edge_prob},
                    {"spurious_edge_rate_per_min", scenario.noise.spurious_edge_rate_per_min},
                    {"jitter_ms", scenario.noise.jitter_ms},
                    {"rng_seed", scenario.noise.rng_seed}};
    return doc;
}

Json to_json(const FeedPage& page) {
    Json channel{{"id", page.channel_id}};
    for (const auto& [idx, name] : page.field_names) {
        channel["field" + std::to_string(idx)] = name;
    }
    Json feeds = Json::array();
    for (const auto& e : page.entries) {
        Json row{{"created_at", format_rfc3339(e.created_at_ms)}, {"entry_id", e.entry_id}};
        for (const auto& [idx, value] : e.fields) {
            row["field" + std::to_string(idx)] = value;
        }
        feeds.push_back(std::move(row));
    }
    return Json{{"channel", std::move(channel)}, {"feeds", std::move(feeds)}};
}

Json to_json(const StatusSnapshot& status, std::int64_t clock_origin_utc_ms) {
    Json appliances = Json::array();
    for (const auto& a : status.appliances) {
        appliances.push_back(appliance_json(a));
    }
    Json doc{{"mode", to_string(status.mode)},
             {"count", status.count},
             {"appliances", std::move(appliances)},
             {"lights_on", status.lights_on},
             {"fans_on", status.fans_on}};
    doc["last_event_at"] = status.last_event_at_ms
                               ? Json(format_rfc3339(clock_origin_utc_ms + *status.last_event_at_ms))
                               : Json(nullptr);
    doc["telemetry_entries"] = status.telemetry_entries;
    return doc;
}

Json to_json(const WastageReport& r) {
    return Json{{"days", r.days},
                {"hours_per_day", r.hours_per_day},
                {"negligence_pct", r.negligence_pct},
                {"wasted_kwh", r.wasted_kwh},
                {"utilized_kwh", r.utilized_kwh}};
}

Json to_json(const SavingsReport& r) {
    Json doc{{"days", r.days},
             {"hours_per_day", r.hours_per_day},
             {"negligence_pct", r.negligence_pct},
             {"wasted_kwh", r.wasted_kwh},
             {"utilized_kwh", r.utilized_kwh},
             {"baseline_kwh", r.baseline_kwh},
             {"auto_kwh", r.auto_kwh}};
    if (r.savings_pct) {
        doc["savings_pct"] = *r.savings_pct;
    }
    return doc;
}

Json to_json(const EnergyLedger& ledger) {
    Json on = Json::array();
    for (const auto& o : ledger.on_time) {
        on.push_back({{"id", o.id}, {"kind", to_string(o.kind)}, {"on_ms", o.on_ms}});
    }
    return Json{{"duration_ms", ledger.duration_ms}, {"total_kwh", ledger.total_kwh}, {"on_time", std::move(on)}};
}

Json actuation_log_to_json(std::span<const ActuationSample> log) {
    Json rows = Json::array();
    for (const auto& s : log) {
        Json states = Json::array();
        for (const auto& a : s.bank.appliances()) {
            states.push_back({{"id", a.id}, {"state", to_string(a.state)}});
        }
        rows.push_back({{"t_ms", s.timestamp_ms}, {"mode", to_string(s.bank.mode())}, {"appliances", std::move(states)}});
    }
    return rows;
}

Json to_json(const ScenarioResult& r) {
    Json crossings = Json::array();
    for (const auto& c : r.crossings) {
        crossings.push_back({{"dir", to_string(c.direction)}, {"completed_at_ms", c.completed_at_ms}});
    }
    Json counts = Json::array();
    for (const auto& c : r.count_history) {
        counts.push_back({{"t_ms", c.timestamp_ms}, {"count", c.count}});
    }
    return Json{{"events", r.trace.size()},
                {"crossings", std::move(crossings)},
                {"count_history", std::move(counts)},
                {"final_count", r.final_count},
                {"end_ms", r.end_ms},
                {"actuation_log", actuation_log_to_json(r.actuation_log)},
                {"telemetry", to_json(r.telemetry)},
                {"ledger", to_json(r.ledger)},
                {"metrics",
                 {{"events", r.metrics.events},
                  {"crossings", r.metrics.crossings},
                  {"malformed_events", r.metrics.malformed_events},
                  {"published", r.metrics.published},
                  {"dropped_publishes", r.dropped_publishes}}}};
}

Json error_body(std::string_view code, std::string_view message) {
    return Json{{"error", code}, {"message", message}};
}

} // namespace apcs
