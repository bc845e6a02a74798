#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace apcs {

enum class ApplianceKind : std::uint8_t { Light, Fan };
enum class Power : std::uint8_t { Off, On };
enum class Mode : std::uint8_t { Auto, Manual };

inline constexpr double kDefaultLightWatts = 40.0;
inline constexpr double kDefaultFanWatts = 60.0;

struct Appliance {
    int id = 0;
    ApplianceKind kind = ApplianceKind::Light;
    double watts = kDefaultLightWatts;
    Power state = Power::Off;

    friend bool operator==(const Appliance&, const Appliance&) = default;
};

struct ControlCommand;

// The relay bank. Ids are unique and wattages positive; the constructor
// enforces both.
class ApplianceBank {
public:
    ApplianceBank(std::vector<Appliance> appliances, Mode mode);

    // Lights get ids 1..lights, fans follow on.
    static ApplianceBank make_default(int lights = 4, int fans = 4, Mode mode = Mode::Auto);

    const std::vector<Appliance>& appliances() const noexcept { return appliances_; }
    Mode mode() const noexcept { return mode_; }

    const Appliance* find(int id) const noexcept;
    bool any_on() const noexcept;
    int count_on(ApplianceKind kind) const noexcept;

    friend bool operator==(const ApplianceBank&, const ApplianceBank&) = default;

private:
    friend ApplianceBank reconcile(ApplianceBank, std::int64_t);
    friend ApplianceBank set_mode(ApplianceBank, Mode, std::int64_t);
    friend ApplianceBank manual_set(ApplianceBank, const ControlCommand&);

    std::vector<Appliance> appliances_;
    Mode mode_ = Mode::Auto;
};

struct ControlCommand {
    std::optional<int> target; // nullopt addresses every appliance
    Power desired = Power::Off;
    std::int64_t issued_at_ms = 0;
};

// AUTO: count <= 0 turns everything off, count > 0 turns everything on.
// MANUAL banks come back untouched.
ApplianceBank reconcile(ApplianceBank bank, std::int64_t count);

// Entering AUTO reasserts the occupancy-derived state; entering MANUAL
// freezes the current states.
ApplianceBank set_mode(ApplianceBank bank, Mode mode, std::int64_t count);

// Throws Error(WrongMode) in AUTO, Error(UnknownAppliance) for a bad id.
ApplianceBank manual_set(ApplianceBank bank, const ControlCommand& cmd);

const char* to_string(ApplianceKind kind) noexcept;
const char* to_string(Power power) noexcept;
const char* to_string(Mode mode) noexcept;
std::optional<Mode> parse_mode(std::string_view text) noexcept;
std::optional<Power> parse_power(std::string_view text) noexcept;

} // namespace apcs
