#include "apcs/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "apcs/error.hpp"

namespace apcs {

void CrossingSchedule::validate() const {
    if (duration_ms < 0) {
        throw Error(ErrorCode::InvalidSchedule, "duration_ms must be non-negative");
    }
    std::int64_t occupancy = 0;
    std::int64_t prev_time = 0;
    for (std::size_t i = 0; i < crossings.size(); ++i) {
        const auto& c = crossings[i];
        const std::string where = "crossing #" + std::to_string(i);
        if (c.time_ms < 0 || c.gap_ms < 0) {
            throw Error(ErrorCode::InvalidSchedule, where + ": negative time or gap");
        }
        if (c.time_ms < prev_time) {
            throw Error(ErrorCode::InvalidSchedule, where + ": times are not sorted");
        }
        prev_time = c.time_ms;
        occupancy += c.direction == Direction::In ? 1 : -1;
        if (occupancy < 0) {
            throw Error(ErrorCode::InvalidSchedule, where + ": more exits than entries");
        }
        if (c.completed_at_ms() > duration_ms) {
            throw Error(ErrorCode::InvalidSchedule, where + ": completes after duration_ms");
        }
    }
}

void NoiseProfile::validate() const {
    if (!(drop_edge_prob >= 0.0 && drop_edge_prob <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "drop_edge_prob must lie in [0,1]");
    }
    if (!(spurious_edge_rate_per_min >= 0.0)) {
        throw Error(ErrorCode::InvalidInput, "spurious_edge_rate_per_min must be non-negative");
    }
    if (jitter_ms < 0) {
        throw Error(ErrorCode::InvalidInput, "jitter_ms must be non-negative");
    }
}

std::vector<SensorEvent> gen_trace(const CrossingSchedule& schedule, const NoiseProfile& noise) {
    schedule.validate();
    noise.validate();

    std::mt19937_64 rng(noise.rng_seed);
    std::bernoulli_distribution drop(noise.drop_edge_prob);
    std::uniform_int_distribution<std::int64_t> jitter(-noise.jitter_ms, noise.jitter_ms);

    std::vector<SensorEvent> trace;
    trace.reserve(schedule.crossings.size() * 2);
    auto emit = [&](std::int64_t t, Sensor s) {
        if (noise.jitter_ms > 0) {
            t = std::max<std::int64_t>(0, t + jitter(rng));
        }
        if (noise.drop_edge_prob > 0.0 && drop(rng)) {
            return;
        }
        trace.push_back({t, s});
    };

    for (const auto& c : schedule.crossings) {
        const Sensor first = c.direction == Direction::In ? Sensor::IR1 : Sensor::IR2;
        const Sensor second = c.direction == Direction::In ? Sensor::IR2 : Sensor::IR1;
        emit(c.time_ms, first);
        emit(c.completed_at_ms(), second);
    }

    if (noise.spurious_edge_rate_per_min > 0.0 && schedule.duration_ms > 0) {
        std::exponential_distribution<double> inter_arrival(noise.spurious_edge_rate_per_min / 60000.0);
        std::bernoulli_distribution pick_ir2(0.5);
        double t = inter_arrival(rng);
        while (t < static_cast<double>(schedule.duration_ms)) {
            trace.push_back({static_cast<std::int64_t>(t), pick_ir2(rng) ? Sensor::IR2 : Sensor::IR1});
            t += inter_arrival(rng);
        }
    }

    std::stable_sort(trace.begin(), trace.end(), [](const SensorEvent& a, const SensorEvent& b) {
        return a.timestamp_ms < b.timestamp_ms;
    });
    return trace;
}

OccupancyTimeline::OccupancyTimeline(std::vector<OccupancyStep> steps) : steps_(std::move(steps)) {}

std::int64_t OccupancyTimeline::count_at(std::int64_t t_ms) const noexcept {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t_ms,
                               [](std::int64_t t, const OccupancyStep& s) { return t < s.from_ms; });
    return it == steps_.begin() ? 0 : std::prev(it)->count;
}

OccupancyTimeline oracle_occupancy(const CrossingSchedule& schedule) {
    schedule.validate();
    std::vector<std::pair<std::int64_t, int>> completions;
    completions.reserve(schedule.crossings.size());
    for (const auto& c : schedule.crossings) {
        completions.emplace_back(c.completed_at_ms(), c.direction == Direction::In ? 1 : -1);
    }
    std::stable_sort(completions.begin(), completions.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<OccupancyStep> steps{{0, 0}};
    std::int64_t count = 0;
    for (const auto& [t, delta] : completions) {
        count += delta;
        if (steps.back().from_ms == t) {
            steps.back().count = count;
        } else {
            steps.push_back({t, count});
        }
    }
    return OccupancyTimeline(std::move(steps));
}

ScenarioResult replay_trace(std::vector<SensorEvent> trace, std::int64_t duration_ms, const SystemConfig& config) {
    Pipeline pipeline(config);
    for (const auto& ev : trace) {
        while (auto wake = pipeline.next_wakeup_ms()) {
            if (*wake > ev.timestamp_ms) {
                break;
            }
            pipeline.on_tick(*wake);
        }
        pipeline.on_sensor(ev);
    }
    while (auto wake = pipeline.next_wakeup_ms()) {
        pipeline.on_tick(std::max(*wake, pipeline.now_ms()));
    }

    ScenarioResult r;
    r.trace = std::move(trace);
    r.crossings = pipeline.crossings();
    r.count_history = pipeline.count_history();
    r.actuation_log = pipeline.actuation_log();
    r.telemetry = pipeline.feeds(config.channel_id, 0);
    r.final_count = pipeline.counter().count;
    r.end_ms = std::max(duration_ms, r.actuation_log.back().timestamp_ms);
    r.ledger = ledger_from_log(config.energy, r.actuation_log, r.end_ms);
    r.metrics = pipeline.metrics();
    r.dropped_publishes = pipeline.publish_queue().dropped();
    return r;
}

ScenarioResult run_scenario(const CrossingSchedule& schedule, const NoiseProfile& noise, const SystemConfig& config) {
    return replay_trace(gen_trace(schedule, noise), schedule.duration_ms, config);
}

NegligenceBaseline negligence_baseline(const CrossingSchedule& schedule, double negligence_pct,
                                       const EnergyModel& model) {
    schedule.validate();
    model.validate();
    if (!(negligence_pct >= 0.0 && negligence_pct <= 100.0)) {
        throw Error(ErrorCode::InvalidInput, "negligence_pct must lie in [0,100]");
    }

    NegligenceBaseline out;
    out.negligence_pct = negligence_pct;
    out.occupancy = oracle_occupancy(schedule);

    const auto manual_bank = ApplianceBank::make_default(model.n_lights, model.n_fans, Mode::Manual);
    const auto all_on = manual_set(manual_bank, {std::nullopt, Power::On, 0});
    const auto all_off = manual_set(manual_bank, {std::nullopt, Power::Off, 0});

    auto& log = out.actuation_log;
    auto record = [&](std::int64_t t, bool on) {
        const auto& bank = on ? all_on : all_off;
        if (!log.empty() && log.back().timestamp_ms == t) {
            log.back().bank = bank;
        } else {
            log.push_back({t, bank});
        }
    };

    const auto& steps = out.occupancy.steps();
    const std::int64_t end = schedule.duration_ms;
    std::size_t i = 0;
    while (i < steps.size() && steps[i].from_ms < end) {
        const bool occupied = steps[i].count > 0;
        std::size_t j = i + 1;
        while (j < steps.size() && (steps[j].count > 0) == occupied) {
            ++j;
        }
        const std::int64_t a = steps[i].from_ms;
        const std::int64_t b = j < steps.size() ? std::min(steps[j].from_ms, end) : end;
        record(a, true);
        if (!occupied) {
            const auto forgotten = static_cast<std::int64_t>(
                std::llround(negligence_pct / 100.0 * static_cast<double>(b - a)));
            record(a + forgotten, false);
        }
        i = j;
    }
    if (log.empty()) {
        record(0, false);
    }

    // Drop samples that do not change state so the log only holds transitions.
    std::vector<ActuationSample> compact;
    for (auto& s : log) {
        if (compact.empty() || !(compact.back().bank == s.bank)) {
            compact.push_back(std::move(s));
        }
    }
    log = std::move(compact);
    out.ledger = ledger_from_log(model, log, end);
    return out;
}

} // namespace apcs
