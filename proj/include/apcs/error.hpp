#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apcs {

enum class ErrorCode {
    Monotonicity,
    InvalidInput,
    NegativeInput,
    UnknownAppliance,
    WrongMode,
    BadMode,
    UnsortedLog,
    EmptyLog,
    ZeroBaseline,
    BadApiKey,
    UnknownChannel,
    InvalidSchedule,
    InvalidCredentials,
    Unauthorized,
    ServiceBusy,
    Parse,
};

// Stable snake_case identifier, used in API error bodies.
std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace apcs
