#include "apcs/actuation.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

#include "apcs/error.hpp"

namespace apcs {

ApplianceBank::ApplianceBank(std::vector<Appliance> appliances, Mode mode)
    : appliances_(std::move(appliances)), mode_(mode) {
    std::set<int> ids;
    for (const auto& a : appliances_) {
        if (!(a.watts > 0.0)) {
            throw Error(ErrorCode::InvalidInput,
                        "appliance " + std::to_string(a.id) + " must have positive wattage");
        }
        if (!ids.insert(a.id).second) {
            throw Error(ErrorCode::InvalidInput, "duplicate appliance id " + std::to_string(a.id));
        }
    }
}

ApplianceBank ApplianceBank::make_default(int lights, int fans, Mode mode) {
    if (lights < 0 || fans < 0) {
        throw Error(ErrorCode::NegativeInput, "appliance counts must be non-negative");
    }
    std::vector<Appliance> list;
    list.reserve(static_cast<std::size_t>(lights + fans));
    int id = 1;
    for (int i = 0; i < lights; ++i) {
        list.push_back({id++, ApplianceKind::Light, kDefaultLightWatts, Power::Off});
    }
    for (int i = 0; i < fans; ++i) {
        list.push_back({id++, ApplianceKind::Fan, kDefaultFanWatts, Power::Off});
    }
    return ApplianceBank(std::move(list), mode);
}

const Appliance* ApplianceBank::find(int id) const noexcept {
    auto it = std::find_if(appliances_.begin(), appliances_.end(),
                           [id](const Appliance& a) { return a.id == id; });
    return it == appliances_.end() ? nullptr : &*it;
}

bool ApplianceBank::any_on() const noexcept {
    return std::any_of(appliances_.begin(), appliances_.end(),
                       [](const Appliance& a) { return a.state == Power::On; });
}

int ApplianceBank::count_on(ApplianceKind kind) const noexcept {
    return static_cast<int>(std::count_if(appliances_.begin(), appliances_.end(), [kind](const Appliance& a) {
        return a.kind == kind && a.state == Power::On;
    }));
}

ApplianceBank reconcile(ApplianceBank bank, std::int64_t count) {
    if (bank.mode_ != Mode::Auto) {
        return bank;
    }
    const Power desired = count > 0 ? Power::On : Power::Off;
    for (auto& a : bank.appliances_) {
        a.state = desired;
    }
    return bank;
}

ApplianceBank set_mode(ApplianceBank bank, Mode mode, std::int64_t count) {
    bank.mode_ = mode;
    return reconcile(std::move(bank), count);
}

ApplianceBank manual_set(ApplianceBank bank, const ControlCommand& cmd) {
    if (bank.mode_ != Mode::Manual) {
        throw Error(ErrorCode::WrongMode, "manual commands are rejected while in AUTO mode");
    }
    if (!cmd.target) {
        for (auto& a : bank.appliances_) {
            a.state = cmd.desired;
        }
        return bank;
    }
    auto it = std::find_if(bank.appliances_.begin(), bank.appliances_.end(),
                           [&](const Appliance& a) { return a.id == *cmd.target; });
    if (it == bank.appliances_.end()) {
        throw Error(ErrorCode::UnknownAppliance, "no appliance with id " + std::to_string(*cmd.target));
    }
    it->state = cmd.desired;
    return bank;
}

const char* to_string(ApplianceKind kind) noexcept {
    return kind == ApplianceKind::Light ? "LIGHT" : "FAN";
}

const char* to_string(Power power) noexcept { return power == Power::On ? "ON" : "OFF"; }

const char* to_string(Mode mode) noexcept { return mode == Mode::Auto ? "AUTO" : "MANUAL"; }

std::optional<Mode> parse_mode(std::string_view text) noexcept {
    if (text == "AUTO") return Mode::Auto;
    if (text == "MANUAL") return Mode::Manual;
    return std::nullopt;
}

std::optional<Power> parse_power(std::string_view text) noexcept {
    if (text == "ON") return Power::On;
    if (text == "OFF") return Power::Off;
    return std::nullopt;
}

} // namespace apcs
