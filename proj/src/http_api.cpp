#include "apcs/http_api.hpp"

#include <charconv>
#include <optional>
#include <string_view>

#include "apcs/json_io.hpp"

namespace apcs {

namespace {

constexpr const char* kJson = "application/json; charset=utf-8";

void send_error(httplib::Response& res, ErrorCode code, std::string_view message) {
    res.status = http_status_for(code);
    res.set_content(error_body(to_string(code), message).dump(), kJson);
}

void send_json(httplib::Response& res, const Json& body) {
    res.status = 200;
    res.set_content(body.dump(), kJson);
}

std::optional<std::int64_t> parse_int(std::string_view text) {
    std::int64_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

Json parse_body(const httplib::Request& req) {
    try {
        auto body = Json::parse(req.body);
        if (!body.is_object()) {
            throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
        }
        return body;
    } catch (const nlohmann::json::parse_error&) {
        throw Error(ErrorCode::InvalidInput, "request body is not valid JSON");
    }
}

std::string body_string(const Json& body, const char* key) {
    if (!body.contains(key) || !body.at(key).is_string()) {
        throw Error(ErrorCode::InvalidInput, std::string("\"") + key + "\" must be a string");
    }
    return body.at(key).get<std::string>();
}

void require_session(const httplib::Request& req, SessionManager& sessions) {
    constexpr std::string_view kBearer = "Bearer ";
    const auto header = req.get_header_value("Authorization");
    if (header.rfind(kBearer, 0) != 0) {
        throw Error(ErrorCode::Unauthorized, "missing bearer token");
    }
    sessions.validate(std::string_view(header).substr(kBearer.size()));
}

// Runs a handler, mapping domain errors onto the wire error body.
template <class F>
httplib::Server::Handler guarded(F fn) {
    return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e.code(), e.what());
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(error_body("internal", e.what()).dump(), kJson);
        }
    };
}

} // namespace

int http_status_for(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidCredentials:
    case ErrorCode::Unauthorized:
    case ErrorCode::BadApiKey: return 401;
    case ErrorCode::UnknownAppliance:
    case ErrorCode::UnknownChannel: return 404;
    case ErrorCode::WrongMode: return 409;
    case ErrorCode::ServiceBusy: return 503;
    default: return 400;
    }
}

void mount_routes(httplib::Server& server, Gateway& gateway, SessionManager& sessions) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/login", guarded([&sessions](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    const auto token = sessions.login(body_string(body, "user"), body_string(body, "password"));
                    send_json(res, Json{{"token", token.token}, {"expires_at", format_rfc3339(token.expires_at_utc_ms)}});
                }));

    server.Get("/status", guarded([&](const httplib::Request& req, httplib::Response& res) {
                   require_session(req, sessions);
                   send_json(res, to_json(gateway.status(), gateway.config().clock_origin_utc_ms));
               }));

    server.Post("/mode", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    require_session(req, sessions);
                    const auto body = parse_body(req);
                    const auto mode = body.contains("mode") && body.at("mode").is_string()
                                          ? parse_mode(body.at("mode").get<std::string>())
                                          : std::nullopt;
                    if (!mode) {
                        throw Error(ErrorCode::BadMode, "mode must be \"AUTO\" or \"MANUAL\"");
                    }
                    send_json(res, to_json(gateway.set_mode(*mode), gateway.config().clock_origin_utc_ms));
                }));

    server.Post(R"(/appliance/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
                    require_session(req, sessions);
                    const std::string target = req.matches[1];
                    std::optional<int> id;
                    if (target != "all" && target != "ALL") {
                        const auto parsed = parse_int(target);
                        if (!parsed) {
                            throw Error(ErrorCode::UnknownAppliance, "no appliance with id " + target);
                        }
                        id = static_cast<int>(*parsed);
                    }
                    const auto body = parse_body(req);
                    const auto desired = parse_power(body_string(body, "state"));
                    if (!desired) {
                        throw Error(ErrorCode::InvalidInput, "state must be \"ON\" or \"OFF\"");
                    }
                    send_json(res, to_json(gateway.set_appliance(id, *desired), gateway.config().clock_origin_utc_ms));
                }));

    auto update = guarded([&gateway](const httplib::Request& req, httplib::Response& res) {
        const auto key = req.get_param_value("api_key");
        FieldMap fields;
        for (int i = 1; i <= 8; ++i) {
            const auto name = "field" + std::to_string(i);
            if (req.has_param(name)) {
                fields[i] = req.get_param_value(name);
            }
        }
        if (fields.empty()) {
            throw Error(ErrorCode::InvalidInput, "no field values supplied");
        }
        const auto id = gateway.telemetry_update(key, std::move(fields));
        res.status = 200;
        res.set_content(std::to_string(id), "text/plain");
    });
    server.Post("/update", update);
    server.Get("/update", update);

    server.Get(R"(/channels/(\d+)/feeds\.json)", guarded([&gateway](const httplib::Request& req, httplib::Response& res) {
                   const auto channel = parse_int(req.matches[1].str());
                   if (!channel) {
                       throw Error(ErrorCode::UnknownChannel, "bad channel id");
                   }
                   std::size_t results = 100;
                   if (req.has_param("results")) {
                       const auto n = parse_int(req.get_param_value("results"));
                       if (!n || *n < 0) {
                           throw Error(ErrorCode::InvalidInput, "results must be a non-negative integer");
                       }
                       results = static_cast<std::size_t>(*n);
                   }
                   send_json(res, to_json(gateway.feeds(*channel, results)));
               }));
}

ApiServer::ApiServer(Gateway& gateway, SessionManager& sessions) { mount_routes(server_, gateway, sessions); }

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        return server_.bind_to_any_port(host);
    }
    return server_.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::serve() { return server_.listen_after_bind(); }

void ApiServer::stop() {
    if (server_.is_running()) {
        server_.stop();
    }
}

} // namespace apcs
