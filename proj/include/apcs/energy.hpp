#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "apcs/actuation.hpp"

namespace apcs {

// Per-hour energy coefficients for the trial room. The defaults are the
// tabulated 0.0513 / 0.1374 kWh per hour, not the nominal 40 W / 60 W
// ratings; only the tabulated values reproduce the wastage table.
struct EnergyModel {
    double light_kwh_per_hour = 0.0513;
    double fan_kwh_per_hour = 0.1374;
    int n_lights = 4;
    int n_fans = 4;

    void validate() const;
    double coefficient(ApplianceKind kind) const noexcept;
    // Energy per hour with every appliance of the room on.
    double full_load_kwh_per_hour() const noexcept;
};

struct WastageReport {
    std::int64_t days = 0;
    double hours_per_day = 0.0;
    double negligence_pct = 0.0;
    double wasted_kwh = 0.0;
    double utilized_kwh = 0.0;
};

double negligent_hours(std::int64_t days, double hours_per_day, double negligence_pct);
double wastage_kwh(const EnergyModel& model, double hours);
WastageReport table1_report(const EnergyModel& model, std::int64_t days, double hours_per_day,
                            double negligence_pct);

struct ActuationSample {
    std::int64_t timestamp_ms = 0;
    ApplianceBank bank;
};

struct ApplianceOnTime {
    int id = 0;
    ApplianceKind kind = ApplianceKind::Light;
    std::int64_t on_ms = 0;

    friend bool operator==(const ApplianceOnTime&, const ApplianceOnTime&) = default;
};

struct EnergyLedger {
    std::vector<ApplianceOnTime> on_time; // in first-seen appliance order
    std::int64_t duration_ms = 0;
    double total_kwh = 0.0;
};

// Integrates the piecewise-constant log over [log.front().timestamp_ms, end_ms).
// Each sample's state holds until the next sample; end_ms closes the last one.
EnergyLedger ledger_from_log(const EnergyModel& model, std::span<const ActuationSample> log,
                             std::int64_t end_ms);

double savings_pct(double baseline_kwh, double actual_kwh);

// Scenario-level comparison of the automated run against its negligence
// baseline. savings_pct is absent when the baseline consumed nothing.
struct SavingsReport {
    std::int64_t days = 0;
    double hours_per_day = 0.0;
    double negligence_pct = 0.0;
    double wasted_kwh = 0.0;   // baseline minus automated
    double utilized_kwh = 0.0; // automated
    double baseline_kwh = 0.0;
    double auto_kwh = 0.0;
    std::optional<double> savings_pct;
};

SavingsReport make_savings_report(std::int64_t days, double hours_per_day, double negligence_pct,
                                  double baseline_kwh, double auto_kwh);

} // namespace apcs
