#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>

#include "apcs/error.hpp"
#include "apcs/pipeline.hpp"

namespace apcs {

// Milliseconds on some monotone scale. The gateway clock runs in simulation
// time; the session clock in UTC.
using ClockFn = std::function<std::int64_t()>;

ClockFn system_utc_clock();

struct Credentials {
    std::string user;
    std::string password;
};

struct SessionToken {
    std::string token;
    std::int64_t expires_at_utc_ms = 0;
};

// Single-admin login. Tokens are 256 random bits, hex encoded.
class SessionManager {
public:
    SessionManager(Credentials credentials, std::chrono::milliseconds ttl, ClockFn utc_clock = system_utc_clock());

    SessionToken login(std::string_view user, std::string_view password); // throws InvalidCredentials
    void validate(std::string_view token);                                 // throws Unauthorized

private:
    Credentials credentials_;
    std::chrono::milliseconds ttl_;
    ClockFn clock_;
    std::mutex mu_;
    std::map<std::string, std::int64_t, std::less<>> sessions_;
};

/*
 * Owns the Pipeline and the thread that mutates it. Sensor events and API
 * commands share one bounded FIFO; a full queue rejects with ServiceBusy.
 * Callers get results back through futures, so every reply reflects the state
 * after a prefix of the processed queue.
 */
class Gateway {
public:
    Gateway(SystemConfig config, ClockFn sim_clock, std::size_t queue_capacity = 256);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    void start();
    void stop();

    // Runs fn(pipeline, now_ms) on the loop thread.
    template <class F>
    auto call(F fn) -> std::future<std::invoke_result_t<F, Pipeline&, std::int64_t>> {
        using R = std::invoke_result_t<F, Pipeline&, std::int64_t>;
        auto promise = std::make_shared<std::promise<R>>();
        auto future = promise->get_future();
        enqueue([promise, fn = std::move(fn)](Pipeline& p, std::int64_t now) mutable {
            try {
                if constexpr (std::is_void_v<R>) {
                    fn(p, now);
                    promise->set_value();
                } else {
                    promise->set_value(fn(p, now));
                }
            } catch (...) {
                promise->set_exception(std::current_exception());
            }
        });
        return future;
    }

    void post_event(const SensorEvent& event);

    StatusSnapshot status();
    StatusSnapshot set_mode(Mode mode);
    StatusSnapshot set_appliance(std::optional<int> id, Power desired);
    std::int64_t telemetry_update(std::string api_key, FieldMap fields);
    FeedPage feeds(std::int64_t channel_id, std::size_t results);

    // Blocks until every command queued before this call has been processed.
    void flush();

    const SystemConfig& config() const noexcept { return config_; }
    std::int64_t now_ms() const { return clock_(); }

private:
    using Task = std::function<void(Pipeline&, std::int64_t)>;

    void enqueue(Task task);
    void run();

    SystemConfig config_;
    ClockFn clock_;
    std::size_t capacity_;
    Pipeline pipeline_;

    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Task> queue_;
    bool stopping_ = false;
    std::thread worker_;
};

} // namespace apcs
