#include "apcs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apcs/error.hpp"

namespace apcs {

namespace {

constexpr double kMsPerHour = 3'600'000.0;

void require_non_negative(double value, const char* what) {
    if (std::isnan(value) || value < 0.0) {
        throw Error(ErrorCode::NegativeInput, std::string(what) + " must be non-negative");
    }
}

} // namespace

void EnergyModel::validate() const {
    if (!(light_kwh_per_hour > 0.0) || !(fan_kwh_per_hour > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "energy coefficients must be positive");
    }
    if (n_lights < 0 || n_fans < 0) {
        throw Error(ErrorCode::NegativeInput, "appliance counts must be non-negative");
    }
}

double EnergyModel::coefficient(ApplianceKind kind) const noexcept {
    return kind == ApplianceKind::Light ? light_kwh_per_hour : fan_kwh_per_hour;
}

double EnergyModel::full_load_kwh_per_hour() const noexcept {
    return n_lights * light_kwh_per_hour + n_fans * fan_kwh_per_hour;
}

double negligent_hours(std::int64_t days, double hours_per_day, double negligence_pct) {
    if (days < 0) {
        throw Error(ErrorCode::NegativeInput, "days must be non-negative");
    }
    require_non_negative(hours_per_day, "hours_per_day");
    require_non_negative(negligence_pct, "negligence_pct");
    if (negligence_pct > 100.0) {
        throw Error(ErrorCode::InvalidInput, "negligence_pct must not exceed 100");
    }
    return static_cast<double>(days) * hours_per_day * negligence_pct / 100.0;
}

double wastage_kwh(const EnergyModel& model, double hours) {
    model.validate();
    require_non_negative(hours, "hours");
    return hours * model.full_load_kwh_per_hour();
}

WastageReport table1_report(const EnergyModel& model, std::int64_t days, double hours_per_day,
                            double negligence_pct) {
    WastageReport r;
    r.days = days;
    r.hours_per_day = hours_per_day;
    r.negligence_pct = negligence_pct;
    r.wasted_kwh = wastage_kwh(model, negligent_hours(days, hours_per_day, negligence_pct));
    const double month_kwh = wastage_kwh(model, static_cast<double>(days) * hours_per_day);
    r.utilized_kwh = month_kwh - r.wasted_kwh;
    return r;
}

EnergyLedger ledger_from_log(const EnergyModel& model, std::span<const ActuationSample> log,
                             std::int64_t end_ms) {
    model.validate();
    if (log.empty()) {
        throw Error(ErrorCode::EmptyLog, "actuation log is empty");
    }
    for (std::size_t i = 1; i < log.size(); ++i) {
        if (log[i].timestamp_ms < log[i - 1].timestamp_ms) {
            throw Error(ErrorCode::UnsortedLog, "actuation log timestamps are not sorted");
        }
    }
    if (end_ms < log.back().timestamp_ms) {
        throw Error(ErrorCode::UnsortedLog, "terminal timestamp precedes the last log entry");
    }

    EnergyLedger ledger;
    ledger.duration_ms = end_ms - log.front().timestamp_ms;
    auto slot_for = [&](const Appliance& a) -> ApplianceOnTime& {
        auto it = std::find_if(ledger.on_time.begin(), ledger.on_time.end(),
                               [&](const ApplianceOnTime& o) { return o.id == a.id; });
        if (it != ledger.on_time.end()) {
            return *it;
        }
        return ledger.on_time.emplace_back(ApplianceOnTime{a.id, a.kind, 0});
    };

    for (std::size_t i = 0; i < log.size(); ++i) {
        const std::int64_t until = i + 1 < log.size() ? log[i + 1].timestamp_ms : end_ms;
        const std::int64_t span = until - log[i].timestamp_ms;
        for (const auto& a : log[i].bank.appliances()) {
            auto& slot = slot_for(a);
            if (a.state == Power::On) {
                slot.on_ms += span;
            }
        }
    }
    for (const auto& o : ledger.on_time) {
        ledger.total_kwh += (static_cast<double>(o.on_ms) / kMsPerHour) * model.coefficient(o.kind);
    }
    return ledger;
}

double savings_pct(double baseline_kwh, double actual_kwh) {
    if (!(baseline_kwh > 0.0)) {
        throw Error(ErrorCode::ZeroBaseline, "baseline energy must be positive");
    }
    require_non_negative(actual_kwh, "actual_kwh");
    return 100.0 * (baseline_kwh - actual_kwh) / baseline_kwh;
}

SavingsReport make_savings_report(std::int64_t days, double hours_per_day, double negligence_pct,
                                  double baseline_kwh, double auto_kwh) {
    SavingsReport r{days, hours_per_day, negligence_pct, baseline_kwh - auto_kwh, auto_kwh,
                    baseline_kwh, auto_kwh, std::nullopt};
    if (baseline_kwh > 0.0) {
        r.savings_pct = savings_pct(baseline_kwh, auto_kwh);
    }
    return r;
}

} // namespace apcs
