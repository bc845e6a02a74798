#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>

#include "apcs/error.hpp"
#include "apcs/gateway.hpp"
#include "apcs/http_api.hpp"
#include "apcs/json_io.hpp"
#include "apcs/simharness.hpp"

namespace apcs::cli {

namespace {

namespace fs = std::filesystem;

struct ModelFlags {
    double light_kwh = EnergyModel{}.light_kwh_per_hour;
    double fan_kwh = EnergyModel{}.fan_kwh_per_hour;
    int lights = 4;
    int fans = 4;

    EnergyModel model() const { return EnergyModel{light_kwh, fan_kwh, lights, fans}; }
};

void add_model_flags(CLI::App& cmd, ModelFlags& m) {
    cmd.add_option("--light-kwh", m.light_kwh, "kWh per hour for one light")->capture_default_str();
    cmd.add_option("--fan-kwh", m.fan_kwh, "kWh per hour for one fan")->capture_default_str();
    cmd.add_option("--lights", m.lights, "number of lights")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd.add_option("--fans", m.fans, "number of fans")->capture_default_str()->check(CLI::NonNegativeNumber);
}

struct SystemFlags {
    std::int64_t window_ms = 15000;
    std::int64_t debounce_ms = 200;
    std::int64_t rate_limit_ms = 15000;
    bool no_clamp = false;
    bool no_coalesce = false;
    std::string write_key = SystemConfig{}.write_api_key;
    std::int64_t channel_id = 1;

    SystemConfig config(const EnergyModel& model) const {
        SystemConfig c;
        c.detector = {window_ms, debounce_ms};
        c.rate_limit_ms = rate_limit_ms;
        c.clamp_at_zero = !no_clamp;
        c.coalesce = !no_coalesce;
        c.write_api_key = write_key;
        c.channel_id = channel_id;
        c.energy = model;
        c.n_lights = model.n_lights;
        c.n_fans = model.n_fans;
        return c;
    }
};

void add_system_flags(CLI::App& cmd, SystemFlags& s) {
    cmd.add_option("--window-ms", s.window_ms, "pairing window")->envname("APCS_WINDOW_MS")->capture_default_str();
    cmd.add_option("--debounce-ms", s.debounce_ms, "same-sensor refractory period")
        ->envname("APCS_DEBOUNCE_MS")
        ->capture_default_str();
    cmd.add_option("--rate-limit-ms", s.rate_limit_ms, "minimum interval between channel updates")
        ->envname("APCS_RATE_LIMIT_MS")
        ->capture_default_str();
    cmd.add_flag("--no-clamp", s.no_clamp, "let the count go negative on spurious exits");
    cmd.add_flag("--no-coalesce", s.no_coalesce, "publish every intermediate count");
    cmd.add_option("--write-key", s.write_key, "channel write API key")->envname("APCS_WRITE_KEY");
    cmd.add_option("--channel-id", s.channel_id, "telemetry channel id")->envname("APCS_CHANNEL_ID")->capture_default_str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidInput, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
    }
    out << content;
}

std::string fixed4(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(4) << v;
    return ss.str();
}

// ---------------------------------------------------------------- table1

struct Table1Args {
    std::int64_t days = 0;
    double hours = 0;
    std::vector<double> negligence;
    bool json = false;
    std::string out;
    ModelFlags model;
};

int cmd_table1(const Table1Args& a, std::ostream& out) {
    const auto model = a.model.model();
    Json rows = Json::array();
    std::vector<WastageReport> reports;
    for (double pct : a.negligence) {
        reports.push_back(table1_report(model, a.days, a.hours, pct));
        rows.push_back(to_json(reports.back()));
    }
    const Json doc{{"reports", rows}};
    if (!a.out.empty()) {
        write_file(a.out, doc.dump(2) + "\n");
    }
    if (a.json) {
        out << doc.dump(2) << '\n';
        return kExitOk;
    }
    out << "Wastage of power due to human negligence (" << a.days << " days x " << a.hours << " h)\n";
    out << std::left << std::setw(14) << "negligence %" << std::right << std::setw(16) << "wasted kWh"
        << std::setw(16) << "utilized kWh" << '\n';
    for (const auto& r : reports) {
        out << std::left << std::setw(14) << r.negligence_pct << std::right << std::setw(16) << fixed4(r.wasted_kwh)
            << std::setw(16) << fixed4(r.utilized_kwh) << '\n';
    }
    return kExitOk;
}

// -------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<double> negligence;
    std::string out;
    bool json = false;
    ModelFlags model;
    SystemFlags system;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    auto scenario = parse_scenario(read_file(a.scenario));
    if (a.seed) {
        scenario.noise.rng_seed = *a.seed;
    }
    const double pct = a.negligence.value_or(scenario.negligence_pct.value_or(50.0));
    const auto model = a.model.model();
    const auto config = a.system.config(model);

    const auto result = run_scenario(scenario.schedule, scenario.noise, config);
    const auto baseline = negligence_baseline(scenario.schedule, pct, model);

    const std::int64_t days = scenario.days.value_or(1);
    const double hours_per_day = scenario.hours_per_day.value_or(
        static_cast<double>(scenario.schedule.duration_ms) / 3'600'000.0 / static_cast<double>(days > 0 ? days : 1));
    const auto report =
        make_savings_report(days, hours_per_day, pct, baseline.ledger.total_kwh, result.ledger.total_kwh);
    const Json report_doc = to_json(report);

    if (!a.out.empty()) {
        const fs::path dir(a.out);
        fs::create_directories(dir);
        write_file(dir / "actuation_log.json", actuation_log_to_json(result.actuation_log).dump(2) + "\n");
        write_file(dir / "telemetry.json", to_json(result.telemetry).dump(2) + "\n");
        write_file(dir / "savings.json", report_doc.dump(2) + "\n");
        write_file(dir / "result.json", to_json(result).dump(2) + "\n");
        std::ostringstream trace;
        write_trace_jsonl(trace, result.trace);
        write_file(dir / "trace.jsonl", trace.str());
    }

    if (a.json) {
        out << report_doc.dump(2) << '\n';
        return kExitOk;
    }
    out << "events           " << result.trace.size() << '\n'
        << "crossings        " << result.crossings.size() << '\n'
        << "final count      " << result.final_count << '\n'
        << "telemetry rows   " << result.telemetry.entries.size() << '\n'
        << "negligence %     " << pct << '\n'
        << "baseline kWh     " << fixed4(report.baseline_kwh) << '\n'
        << "automated kWh    " << fixed4(report.auto_kwh) << '\n'
        << "wasted kWh       " << fixed4(report.wasted_kwh) << '\n';
    if (report.savings_pct) {
        out << "savings %        " << fixed4(*report.savings_pct) << '\n';
    } else {
        out << "savings %        n/a (baseline is 0 kWh)\n";
    }
    return kExitOk;
}

// ----------------------------------------------------------------- trace

struct TraceArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int cmd_trace(const TraceArgs& a, std::ostream& out) {
    auto scenario = parse_scenario(read_file(a.scenario));
    if (a.seed) {
        scenario.noise.rng_seed = *a.seed;
    }
    const auto trace = gen_trace(scenario.schedule, scenario.noise);
    if (a.out.empty()) {
        write_trace_jsonl(out, trace);
    } else {
        std::ostringstream ss;
        write_trace_jsonl(ss, trace);
        write_file(a.out, ss.str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------- replay

struct ReplayArgs {
    std::string trace;
    std::int64_t duration_ms = 0;
    bool json = false;
    ModelFlags model;
    SystemFlags system;
};

int cmd_replay(const ReplayArgs& a, std::ostream& out) {
    std::istringstream in(read_file(a.trace));
    auto trace = parse_trace_jsonl(in);
    const auto result = replay_trace(std::move(trace), a.duration_ms, a.system.config(a.model.model()));
    if (a.json) {
        out << to_json(result).dump(2) << '\n';
        return kExitOk;
    }
    for (const auto& c : result.count_history) {
        out << c.timestamp_ms << " ms  count=" << c.count << '\n';
    }
    out << "final count " << result.final_count << ", malformed events " << result.metrics.malformed_events
        << ", energy " << fixed4(result.ledger.total_kwh) << " kWh\n";
    return kExitOk;
}

// ----------------------------------------------------------------- serve

struct ServeArgs {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string user;
    std::string password;
    std::int64_t token_ttl_s = 3600;
    std::string feed;
    double speed = 1.0;
    ModelFlags model;
    SystemFlags system;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
    if (a.user.empty() || a.password.empty()) {
        err << "serve: credentials missing; set APCS_USER and APCS_PASSWORD (or --user/--password)\n";
        return kExitUsage;
    }
    std::vector<SensorEvent> feed;
    if (!a.feed.empty()) {
        std::istringstream in(read_file(a.feed));
        feed = parse_trace_jsonl(in);
    }

    const auto start = std::chrono::steady_clock::now();
    const double speed = a.speed;
    ClockFn sim_clock = [start, speed] {
        const auto real = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return static_cast<std::int64_t>(real * speed);
    };

    // Block termination signals before any thread starts so only the waiter sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Gateway gateway(a.system.config(a.model.model()), sim_clock);
    SessionManager sessions({a.user, a.password}, std::chrono::seconds(a.token_ttl_s));
    ApiServer server(gateway, sessions);
    const int port = server.bind(a.host, a.port);
    if (port < 0) {
        err << "serve: cannot bind " << a.host << ':' << a.port << '\n';
        pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
        return kExitRuntime;
    }
    gateway.start();
    out << "apcs gateway listening on " << a.host << ':' << port << std::endl;

    std::atomic<bool> done{false};
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        done = true;
        server.stop();
    });

    std::thread feeder;
    if (!feed.empty()) {
        feeder = std::thread([&] {
            for (const auto& ev : feed) {
                while (!done && sim_clock() < ev.timestamp_ms) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(5));
                }
                while (!done) {
                    try {
                        gateway.post_event(ev);
                        break;
                    } catch (const Error&) {
                        std::this_thread::sleep_for(std::chrono::milliseconds(10));
                    }
                }
                if (done) {
                    return;
                }
            }
        });
    }

    const bool ok = server.serve();
    done = true;
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    if (feeder.joinable()) {
        feeder.join();
    }
    gateway.stop();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    return ok ? kExitOk : kExitRuntime;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Automated power conservation system: occupancy-driven appliance control twin", "apcs"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    Table1Args t1;
    auto* table1 = app.add_subcommand("table1", "wastage/utilization report per negligence level");
    table1->add_option("--days", t1.days, "working days")->required()->check(CLI::NonNegativeNumber);
    table1->add_option("--hours", t1.hours, "working hours per day")->required()->check(CLI::NonNegativeNumber);
    table1->add_option("--negligence", t1.negligence, "comma separated percentages")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(0.0, 100.0));
    table1->add_flag("--json", t1.json, "machine-readable output");
    table1->add_option("--out", t1.out, "also write the JSON document here");
    add_model_flags(*table1, t1.model);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "replay a scenario and compare against a negligence baseline");
    simulate->add_option("--scenario", sim.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", sim.seed, "override the scenario noise seed");
    simulate->add_option("--negligence", sim.negligence, "baseline negligence percentage (default 50)")
        ->check(CLI::Range(0.0, 100.0));
    simulate->add_option("--out", sim.out, "output directory for logs and reports");
    simulate->add_flag("--json", sim.json, "print the savings report as JSON");
    add_model_flags(*simulate, sim.model);
    add_system_flags(*simulate, sim.system);

    TraceArgs tr;
    auto* trace = app.add_subcommand("trace", "expand a scenario into a JSON-lines sensor trace");
    trace->add_option("--scenario", tr.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    trace->add_option("--seed", tr.seed, "override the scenario noise seed");
    trace->add_option("--out", tr.out, "trace file (stdout if omitted)");

    ReplayArgs rp;
    auto* replay = app.add_subcommand("replay", "run a recorded trace through the detector and actuation logic");
    replay->add_option("--trace", rp.trace, "JSON-lines trace")->required()->check(CLI::ExistingFile);
    replay->add_option("--duration-ms", rp.duration_ms, "close the energy ledger at this time");
    replay->add_flag("--json", rp.json, "print the full result as JSON");
    add_model_flags(*replay, rp.model);
    add_system_flags(*replay, rp.system);

    ServeArgs sv;
    auto* serve = app.add_subcommand("serve", "run the control gateway and telemetry endpoints");
    serve->add_option("--host", sv.host, "bind address")->capture_default_str();
    serve->add_option("--port", sv.port, "listen port")
        ->envname("APCS_PORT")
        ->capture_default_str()
        ->check(CLI::Range(1, 65535));
    serve->add_option("--user", sv.user, "login user id")->envname("APCS_USER");
    serve->add_option("--password", sv.password, "login password")->envname("APCS_PASSWORD");
    serve->add_option("--token-ttl-s", sv.token_ttl_s, "session lifetime in seconds")->capture_default_str();
    serve->add_option("--feed", sv.feed, "JSON-lines trace streamed into the event loop")->check(CLI::ExistingFile);
    serve->add_option("--speed", sv.speed, "feed time acceleration")->capture_default_str()->check(CLI::PositiveNumber);
    add_model_flags(*serve, sv.model);
    add_system_flags(*serve, sv.system);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*table1) return cmd_table1(t1, out);
        if (*simulate) return cmd_simulate(sim, out);
        if (*trace) return cmd_trace(tr, out);
        if (*replay) return cmd_replay(rp, out);
        if (*serve) return cmd_serve(sv, out, err);
    } catch (const Error& e) {
        err << "apcs: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "apcs: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace apcs::cli
