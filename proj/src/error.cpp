#include "apcs/error.hpp"

namespace apcs {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Monotonicity: return "monotonicity";
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::NegativeInput: return "negative_input";
    case ErrorCode::UnknownAppliance: return "unknown_appliance";
    case ErrorCode::WrongMode: return "wrong_mode";
    case ErrorCode::BadMode: return "bad_mode";
    case ErrorCode::UnsortedLog: return "unsorted_log";
    case ErrorCode::EmptyLog: return "empty_log";
    case ErrorCode::ZeroBaseline: return "zero_baseline";
    case ErrorCode::BadApiKey: return "bad_api_key";
    case ErrorCode::UnknownChannel: return "unknown_channel";
    case ErrorCode::InvalidSchedule: return "invalid_schedule";
    case ErrorCode::InvalidCredentials: return "invalid_credentials";
    case ErrorCode::Unauthorized: return "unauthorized";
    case ErrorCode::ServiceBusy: return "service_busy";
    case ErrorCode::Parse: return "parse_error";
    }
    return "unknown";
}

} // namespace apcs
