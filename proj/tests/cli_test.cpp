#include <gtest/gtest.h>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <pthread.h>
#include <sys/socket.h>
#include <unistd.h>

#include "apcs/http_api.hpp"
#include "apcs/json_io.hpp"
#include "cli.hpp"

namespace apcs {
namespace {

namespace fs = std::filesystem;

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fixture(const std::string& name) { return std::string(APCS_FIXTURES) + "/" + name; }

fs::path temp_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("apcs_cli_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(CliTable1, ReproducesWastageTable) {
    const auto r = run({"table1", "--days", "30", "--hours", "8", "--negligence", "90,50,10", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = Json::parse(r.out).at("reports");
    ASSERT_EQ(doc.size(), 3u);
    const double expected[3][2] = {{163.0368, 18.1152}, {90.576, 90.576}, {18.1152, 163.0368}};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(doc[i].at("wasted_kwh").get<double>(), expected[i][0], 1e-9);
        EXPECT_NEAR(doc[i].at("utilized_kwh").get<double>(), expected[i][1], 1e-9);
    }
}

TEST(CliTable1, HumanReadableRoundsToFourPlaces) {
    const auto r = run({"table1", "--days", "30", "--hours", "8", "--negligence", "90,50,10"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("163.0368"), std::string::npos);
    EXPECT_NE(r.out.find("90.5760"), std::string::npos);
}

TEST(CliTable1, ZeroNegligence) {
    const auto r = run({"table1", "--days", "30", "--hours", "8", "--negligence", "0", "--json"});
    ASSERT_EQ(r.code, 0);
    const auto row = Json::parse(r.out).at("reports")[0];
    EXPECT_EQ(row.at("wasted_kwh").get<double>(), 0.0);
    EXPECT_NEAR(row.at("utilized_kwh").get<double>(), 181.152, 1e-9);
}

TEST(CliTable1, UsageErrors) {
    EXPECT_EQ(run({"table1", "--hours", "8", "--negligence", "90"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"table1", "--days", "30", "--hours", "8", "--negligence", "120"}).code, cli::kExitUsage);
    EXPECT_EQ(run({}).code, cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
}

TEST(Cli, HelpExitsZeroEverywhere) {
    EXPECT_EQ(run({"--help"}).code, 0);
    for (const char* sub : {"table1", "simulate", "trace", "replay", "serve"}) {
        const auto r = run({sub, "--help"});
        EXPECT_EQ(r.code, 0) << sub;
        EXPECT_NE(r.out.find("--"), std::string::npos) << sub;
    }
}

TEST(CliSimulate, ReferenceFixtureSavings) {
    const auto r = run({"simulate", "--scenario", fixture("reference_scenario.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = Json::parse(r.out);
    EXPECT_NEAR(doc.at("savings_pct").get<double>(), 100.0 * 85.0 / 565.0, 1e-9);
    EXPECT_EQ(doc.at("negligence_pct").get<double>(), 50.0);
}

TEST(CliSimulate, WritesArtifactsDeterministically) {
    const auto a = temp_dir("det_a");
    const auto b = temp_dir("det_b");
    for (const auto& dir : {a, b}) {
        const auto r = run({"simulate", "--scenario", fixture("noisy_day.json"), "--seed", "17", "--out", dir.string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    for (const char* f : {"actuation_log.json", "telemetry.json", "savings.json", "result.json", "trace.jsonl"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    const auto c = temp_dir("det_c");
    run({"simulate", "--scenario", fixture("noisy_day.json"), "--seed", "18", "--out", c.string()});
    EXPECT_NE(slurp(a / "trace.jsonl"), slurp(c / "trace.jsonl"));
}

TEST(CliSimulate, EmptyScheduleOmitsSavings) {
    const auto r = run({"simulate", "--scenario", fixture("empty_scenario.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("baseline_kwh").get<double>(), 0.0);
    EXPECT_FALSE(doc.contains("savings_pct"));
}

TEST(CliSimulate, ParseErrorReportsPosition) {
    const auto dir = temp_dir("parse");
    std::ofstream(dir / "bad.json") << "{\n  \"duration_ms\": 5,\n  \"crossings\": [ oops ]\n}\n";
    const auto r = run({"simulate", "--scenario", (dir / "bad.json").string()});
    EXPECT_EQ(r.code, cli::kExitRuntime);
    EXPECT_NE(r.err.find("line 3, column"), std::string::npos) << r.err;
}

TEST(CliTraceReplay, ExportedTraceReplays) {
    const auto dir = temp_dir("trace");
    const auto trace = dir / "day.jsonl";
    ASSERT_EQ(run({"trace", "--scenario", fixture("reference_scenario.json"), "--out", trace.string()}).code, 0);
    const auto r = run({"replay", "--trace", trace.string(), "--json", "--rate-limit-ms", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = Json::parse(r.out);
    EXPECT_EQ(doc.at("crossings").size(), 300u);
    EXPECT_EQ(doc.at("final_count"), 0);
    EXPECT_EQ(doc.at("telemetry").at("feeds").size(), 300u);
}

TEST(CliServe, RejectsBadConfiguration) {
    EXPECT_EQ(run({"serve", "--port", "70000", "--user", "a", "--password", "b"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"serve", "--port", "0", "--user", "a", "--password", "b"}).code, cli::kExitUsage);
    ::unsetenv("APCS_USER");
    ::unsetenv("APCS_PASSWORD");
    EXPECT_EQ(run({"serve", "--port", "18080"}).code, cli::kExitUsage);
    // Not an address of this host: bind fails at runtime.
    EXPECT_EQ(run({"serve", "--host", "203.0.113.7", "--port", "18080", "--user", "a", "--password", "b"}).code,
              cli::kExitRuntime);
}

int free_port() {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    socklen_t len = sizeof addr;
    int port = -1;
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0 &&
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) == 0) {
        port = ntohs(addr.sin_port);
    }
    ::close(fd);
    return port;
}

TEST(CliServe, ServesStatusAndStreamsFeed) {
    // Keep termination signals for the serve command's waiter thread.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const auto dir = temp_dir("serve");
    std::ofstream(dir / "feed.jsonl") << "{\"t_ms\":0,\"sensor\":\"IR1\"}\n{\"t_ms\":3000,\"sensor\":\"IR2\"}\n";
    const int port = free_port();
    ASSERT_GT(port, 0);

    CliRun result{};
    std::thread server([&] {
        result = run({"serve", "--host", "127.0.0.1", "--port", std::to_string(port), "--user", "admin", "--password",
                      "secret", "--feed", (dir / "feed.jsonl").string(), "--speed", "100"});
    });
    struct Shutdown {
        std::thread& t;
        ~Shutdown() {
            if (t.joinable()) {
                ::kill(::getpid(), SIGTERM);
                t.join();
            }
        }
    } shutdown{server};

    httplib::Client client("127.0.0.1", port);
    std::string token;
    for (int i = 0; i < 200 && token.empty(); ++i) {
        if (auto res = client.Post("/login", R"({"user":"admin","password":"secret"})", "application/json");
            res && res->status == 200) {
            token = Json::parse(res->body).at("token");
        } else {
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    ASSERT_FALSE(token.empty());
    std::int64_t count = -1;
    for (int i = 0; i < 200 && count != 1; ++i) {
        auto res = client.Get("/status", {{"Authorization", "Bearer " + token}});
        ASSERT_TRUE(res);
        ASSERT_EQ(res->status, 200);
        count = Json::parse(res->body).at("count").get<std::int64_t>();
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    EXPECT_EQ(count, 1);

    ::kill(::getpid(), SIGTERM);
    server.join();
    EXPECT_EQ(result.code, 0) << result.err;
}

} // namespace
} // namespace apcs
