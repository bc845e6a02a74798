#include "apcs/gateway.hpp"

#include <array>
#include <random>
#include <utility>

namespace apcs {

ClockFn system_utc_clock() {
    return [] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

SessionManager::SessionManager(Credentials credentials, std::chrono::milliseconds ttl, ClockFn utc_clock)
    : credentials_(std::move(credentials)), ttl_(ttl), clock_(std::move(utc_clock)) {}

namespace {

std::string random_token() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::random_device rd;
    std::string out;
    out.reserve(64);
    for (int i = 0; i < 8; ++i) {
        std::uint32_t word = rd();
        for (int nibble = 0; nibble < 8; ++nibble) {
            out.push_back(kHex[word & 0xF]);
            word >>= 4;
        }
    }
    return out;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
    unsigned diff = a.size() == b.size() ? 0U : 1U;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff |= static_cast<unsigned>(a[i] ^ (i < b.size() ? b[i] : 0));
    }
    return diff == 0;
}

} // namespace

SessionToken SessionManager::login(std::string_view user, std::string_view password) {
    const bool user_ok = constant_time_equal(user, credentials_.user);
    const bool pass_ok = constant_time_equal(password, credentials_.password);
    if (!user_ok || !pass_ok || credentials_.user.empty()) {
        throw Error(ErrorCode::InvalidCredentials, "invalid user id or password");
    }
    SessionToken t{random_token(), clock_() + ttl_.count()};
    std::lock_guard lock(mu_);
    const auto now = clock_();
    std::erase_if(sessions_, [now](const auto& kv) { return kv.second <= now; });
    sessions_.emplace(t.token, t.expires_at_utc_ms);
    return t;
}

void SessionManager::validate(std::string_view token) {
    std::lock_guard lock(mu_);
    auto it = sessions_.find(token);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::Unauthorized, "missing or unknown session token");
    }
    if (clock_() >= it->second) {
        sessions_.erase(it);
        throw Error(ErrorCode::Unauthorized, "session token expired");
    }
}

Gateway::Gateway(SystemConfig config, ClockFn sim_clock, std::size_t queue_capacity)
    : config_(config), clock_(std::move(sim_clock)), capacity_(queue_capacity), pipeline_(std::move(config)) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
    std::lock_guard lock(mu_);
    if (worker_.joinable()) {
        return;
    }
    stopping_ = false;
    worker_ = std::thread([this] { run(); });
}

void Gateway::stop() {
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (worker_.joinable()) {
        worker_.join();
    }
}

void Gateway::enqueue(Task task) {
    {
        std::lock_guard lock(mu_);
        if (stopping_) {
            throw Error(ErrorCode::ServiceBusy, "gateway is shutting down");
        }
        if (queue_.size() >= capacity_) {
            throw Error(ErrorCode::ServiceBusy, "command queue is full");
        }
        queue_.push_back(std::move(task));
    }
    cv_.notify_one();
}

void Gateway::run() {
    using namespace std::chrono_literals;
    for (;;) {
        Task task;
        {
            std::unique_lock lock(mu_);
            cv_.wait_for(lock, 20ms, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) {
                if (stopping_) {
                    return;
                }
            } else {
                task = std::move(queue_.front());
                queue_.pop_front();
            }
        }
        const auto now = clock_();
        if (task) {
            task(pipeline_, now);
        }
        if (auto wake = pipeline_.next_wakeup_ms(); wake && *wake <= now) {
            pipeline_.on_tick(now);
        }
    }
}

void Gateway::post_event(const SensorEvent& event) {
    enqueue([event](Pipeline& p, std::int64_t now) {
        p.on_tick(std::min(now, event.timestamp_ms));
        p.on_sensor(event);
    });
}

StatusSnapshot Gateway::status() {
    return call([](Pipeline& p, std::int64_t) { return p.snapshot(); }).get();
}

StatusSnapshot Gateway::set_mode(Mode mode) {
    return call([mode](Pipeline& p, std::int64_t now) { return p.set_mode(mode, now); }).get();
}

StatusSnapshot Gateway::set_appliance(std::optional<int> id, Power desired) {
    return call([id, desired](Pipeline& p, std::int64_t now) {
               return p.set_appliance(ControlCommand{id, desired, now});
           })
        .get();
}

std::int64_t Gateway::telemetry_update(std::string api_key, FieldMap fields) {
    return call([key = std::move(api_key), fields = std::move(fields)](Pipeline& p, std::int64_t now) {
               return p.telemetry_update(key, fields, now);
           })
        .get();
}

FeedPage Gateway::feeds(std::int64_t channel_id, std::size_t results) {
    return call([=](Pipeline& p, std::int64_t) { return p.feeds(channel_id, results); }).get();
}

void Gateway::flush() {
    call([](Pipeline&, std::int64_t) {}).get();
}

} // namespace apcs
