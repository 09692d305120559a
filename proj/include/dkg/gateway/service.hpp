/**
 * @file service.hpp
 * @brief HTTP API over the engine. Dispatch is a plain function of the
 *        request so it can be exercised without sockets.
 *
 * Errors are returned as {"error": {"code", "message", "phase"?}} with
 * 400 (malformed JSON), 404 (unknown route or id), 405, 422 (validation),
 * 502 (remote extractor) or 500.
 */

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "dkg/error.hpp"
#include "dkg/gateway/codec.hpp"
#include "dkg/gateway/engine.hpp"

namespace httplib {
class Server;
}

namespace dkg::gateway {

struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;
};

int http_status(ErrorCode code) noexcept;

/// Body of POST /recommend and of `recommend --case` files:
/// {case_id?, symptoms, profile? (id or {id, features}), options?, budget? (number or object)}.
CaseRequest case_request_from_json(const json& j);
json case_result_to_json(const CaseResult& r, const CaseRequest& c);
json stats_json(const GraphStats& s);
json audit_json(const AuditEntry& a);

class Service {
public:
    explicit Service(Engine& engine) : engine_(engine) {}

    Response handle(const Request& request) const;

private:
    Engine& engine_;
};

/// Blocking HTTP front end.
class HttpServer {
public:
    HttpServer(Engine& engine, std::string host, int port);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Bind; port 0 picks a free port. Throws BindFailure.
    int bind();
    /// Serve until stop(). Binds first when needed.
    void run();
    void stop();
    int port() const noexcept { return port_; }

private:
    Service service_;
    std::string host_;
    int port_;
    bool bound_ = false;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace dkg::gateway
