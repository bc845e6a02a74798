#pragma once

#include <string>

#include <httplib.h>

#include "apcs/gateway.hpp"

namespace apcs {

int http_status_for(ErrorCode code) noexcept;

/*
 * Routes:
 *   POST /login                      {"user","password"} -> {"token","expires_at"}
 *   GET  /status                     -> StatusSnapshot
 *   POST /mode                       {"mode":"AUTO"|"MANUAL"}
 *   POST /appliance/{id|all}         {"state":"ON"|"OFF"}
 *   POST /update                     api_key=<key>&field1=<int>   (form encoded)
 *   GET  /channels/{id}/feeds.json   ?results=<n>
 *
 * Everything except /login and the two telemetry routes needs
 * "Authorization: Bearer <token>".
 */
void mount_routes(httplib::Server& server, Gateway& gateway, SessionManager& sessions);

class ApiServer {
public:
    ApiServer(Gateway& gateway, SessionManager& sessions);
    ~ApiServer();

    // Returns the bound port, or -1 on failure. port 0 picks a free one.
    int bind(const std::string& host, int port);
    bool serve(); // blocks until stop()
    void stop();
    void wait_until_ready() const { server_.wait_until_ready(); }

private:
    httplib::Server server_;
};

} // namespace apcs
