#include "dkg/gateway/service.hpp"

#include <httplib.h>

#include <sstream>

#include "dkg/extraction/corpus.hpp"
#include "dkg/gateway/codec.hpp"

namespace dkg::gateway {

namespace {

Response ok(const json& body) { return {200, body.dump()}; }

Response failure(int status, ErrorCode code, const std::string& message) {
    return {status, to_json(Error(code, message)).dump()};
}

reasoning::SymptomSet split_ids(const std::string& csv) {
    reasoning::SymptomSet out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

json stats_json(const GraphStats& s) {
    return json{{"nodes", s.nodes},
                {"edges", s.edges},
                {"capacity", {{"max_edges", s.capacity.max_edges}, {"batch_budget", s.capacity.batch_budget}}},
                {"batch_counter", s.batch_counter},
                {"nodes_by_type", s.nodes_by_type},
                {"params", to_json(s.params)}};
}

json audit_json(const AuditEntry& a) {
    json j{{"sequence", a.sequence}, {"reason", a.reason}, {"before", to_json(a.before)}, {"after", to_json(a.after)}};
    j["reward_before"] = a.reward_before ? json(*a.reward_before) : json(nullptr);
    j["reward_after"] = a.reward_after ? json(*a.reward_after) : json(nullptr);
    return j;
}

CaseRequest case_request_from_json(const json& j) {
    CaseRequest c;
    if (!j.is_object()) throw Error(ErrorCode::InvalidField, "request body must be an object");
    if (j.contains("case_id") && !j.at("case_id").is_null()) {
        if (!j.at("case_id").is_string()) throw Error(ErrorCode::InvalidField, "case_id must be a string");
        c.case_id = j.at("case_id").get<std::string>();
    }
    if (!j.contains("symptoms")) throw Error(ErrorCode::InvalidField, "missing field symptoms");
    c.symptoms = symptoms_from_json(j.at("symptoms"));
    if (j.contains("profile") && !j.at("profile").is_null()) {
        const json& p = j.at("profile");
        c.profile = p.is_string() ? reasoning::PatientProfile{p.get<std::string>(), {}} : profile_from_json(p);
    }
    if (j.contains("options") && !j.at("options").is_null()) {
        if (!j.at("options").is_array()) throw Error(ErrorCode::InvalidField, "options must be an array");
        std::vector<reasoning::TreatmentOption> options;
        for (const auto& o : j.at("options")) options.push_back(option_from_json(o));
        c.options = std::move(options);
    }
    if (j.contains("budget") && !j.at("budget").is_null()) {
        const json& b = j.at("budget");
        c.budget = b.is_number() ? budget_from_json(json{{"c_max", b}}) : budget_from_json(b);
    }
    return c;
}

json case_result_to_json(const CaseResult& r, const CaseRequest& c) {
    json j{{"posterior", to_json(r.posterior)}, {"plan", to_json(r.plan)}};
    if (c.budget) {
        j["budget"] = to_json(*c.budget);
        j["unconstrained_plan"] = to_json(*r.unconstrained);
        j["constraint_bound"] = r.unconstrained->total_cost > c.budget->c_max;
    } else {
        j["budget"] = nullptr;
        j["constraint_bound"] = false;
    }
    return j;
}

namespace {

std::vector<extraction::Document> documents_from_json(const json& j) {
    if (j.is_object() && j.contains("corpus")) {
        if (!j.at("corpus").is_string()) throw Error(ErrorCode::InvalidField, "corpus must be a JSONL string");
        return extraction::parse_corpus(j.at("corpus").get<std::string>());
    }
    const json& list = j.is_array() ? j : (j.is_object() && j.contains("documents") ? j.at("documents") : json());
    if (!list.is_array()) throw Error(ErrorCode::InvalidField, "expected documents array or corpus string");
    std::vector<extraction::Document> docs;
    for (const auto& d : list) docs.push_back(document_from_json(d));
    return docs;
}

}  // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::CorruptDocument:
        case ErrorCode::SchemaVersionMismatch:
            return 400;
        case ErrorCode::NodeNotFound:
        case ErrorCode::EdgeNotFound:
        case ErrorCode::ElementNotFound:
        case ErrorCode::DiseaseNotFound:
        case ErrorCode::RouteNotFound:
            return 404;
        case ErrorCode::RemoteTransport:
        case ErrorCode::RemoteSchema:
            return 502;
        case ErrorCode::IoError:
        case ErrorCode::BindFailure:
            return 500;
        default:
            return 422;
    }
}

Response Service::handle(const Request& req) const {
    using Handler = std::function<Response(const Request&)>;
    struct Route {
        const char* method;
        const char* path;
        Handler handler;
    };
    const std::vector<Route> routes = {
        {"GET", "/healthz", [](const Request&) { return ok({{"status", "ok"}}); }},
        {"GET", "/graph/stats", [this](const Request&) { return ok(stats_json(engine_.stats())); }},
        {"GET", "/params",
         [this](const Request&) {
             json audit = json::array();
             for (const auto& a : engine_.audit()) audit.push_back(audit_json(a));
             return ok({{"params", to_json(engine_.params())}, {"bounds", params_bounds_json()}, {"audit", audit}});
         }},
        {"GET", "/explain",
         [this](const Request& r) {
             const auto d = r.query.find("disease");
             if (d == r.query.end() || d->second.empty()) throw Error(ErrorCode::InvalidField, "query parameter disease is required");
             const auto s = r.query.find("symptoms");
             const auto symptoms = s == r.query.end() ? reasoning::SymptomSet{} : split_ids(s->second);
             json entries = json::array();
             for (const auto& e : engine_.explain(d->second, symptoms)) entries.push_back(to_json(e));
             return ok({{"disease", d->second}, {"entries", entries}});
         }},
        {"POST", "/diagnose",
         [this](const Request& r) {
             const json body = parse_json(r.body);
             if (!body.is_object() || !body.contains("symptoms")) throw Error(ErrorCode::InvalidField, "missing field symptoms");
             return ok(to_json(engine_.diagnose(symptoms_from_json(body.at("symptoms")))));
         }},
        {"POST", "/recommend",
         [this](const Request& r) {
             const auto c = case_request_from_json(parse_json(r.body));
             return ok(case_result_to_json(engine_.recommend(c), c));
         }},
        {"POST", "/ingest",
         [this](const Request& r) {
             const auto docs = documents_from_json(parse_json(r.body));
             const auto result = engine_.ingest(docs);
             json reports = json::array();
             for (const auto& b : result.reports) reports.push_back(to_json(b));
             return ok({{"documents", result.documents},
                        {"accepted_entities", result.accepted.entities.size()},
                        {"accepted_relations", result.accepted.relations.size()},
                        {"reports", reports},
                        {"stats", stats_json(engine_.stats())}});
         }},
        {"POST", "/feedback",
         [this](const Request& r) {
             const json body = parse_json(r.body);
             std::vector<feedback::FeedbackEvent> events;
             if (body.is_array() || (body.is_object() && body.contains("events"))) {
                 const json& list = body.is_array() ? body : body.at("events");
                 if (!list.is_array()) throw Error(ErrorCode::InvalidFeedback, "events must be an array");
                 for (const auto& e : list) events.push_back(feedback_from_json(e));
             } else {
                 events.push_back(feedback_from_json(body));
             }
             const auto out = engine_.submit_feedback(events);
             return ok({{"accepted", out.accepted},
                        {"update", out.update ? to_json(*out.update) : json(nullptr)},
                        {"params", to_json(out.params)}});
         }},
        {"POST", "/params/update",
         [this](const Request& r) {
             json body = parse_json(r.body);
             if (body.is_object() && body.contains("params")) body = body.at("params");
             const auto updated = engine_.set_params(params_from_json(body, engine_.params()));
             const auto audit = engine_.audit();
             return ok({{"params", to_json(updated)}, {"audit_entry", audit_json(audit.back())}});
         }},
    };

    bool path_known = false;
    for (const auto& route : routes) {
        if (req.path != route.path) continue;
        path_known = true;
        if (req.method != route.method) continue;
        try {
            return route.handler(req);
        } catch (const Error& e) {
            return {http_status(e.code()), to_json(e).dump()};
        } catch (const std::exception& e) {
            return {500, json{{"error", {{"code", "Internal"}, {"message", e.what()}}}}.dump()};
        }
    }
    if (path_known) return failure(405, ErrorCode::UsageError, req.method + " not allowed on " + req.path);
    return failure(404, ErrorCode::RouteNotFound, "no route " + req.method + " " + req.path);
}

HttpServer::HttpServer(Engine& engine, std::string host, int port)
    : service_(engine), host_(std::move(host)), port_(port), server_(std::make_unique<httplib::Server>()) {
    auto forward = [this](const httplib::Request& hreq, httplib::Response& hres) {
        Request req{hreq.method, hreq.path, {}, hreq.body};
        for (const auto& [k, v] : hreq.params) req.query.emplace(k, v);
        const Response res = service_.handle(req);
        hres.status = res.status;
        hres.set_content(res.body, "application/json");
        hres.set_header("Access-Control-Allow-Origin", "*");
    };
    // SO_REUSEADDR only: a second server on a taken port must fail to bind.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    server_->Get(".*", forward);
    server_->Post(".*", forward);
    server_->Put(".*", forward);
    server_->Delete(".*", forward);
    server_->Options(".*", [](const httplib::Request&, httplib::Response& hres) {
        hres.set_header("Access-Control-Allow-Origin", "*");
        hres.set_header("Access-Control-Allow-Headers", "Content-Type");
        hres.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        hres.status = 204;
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    if (bound_) return port_;
    if (port_ == 0) {
        port_ = server_->bind_to_any_port(host_);
        bound_ = port_ > 0;
    } else {
        bound_ = server_->bind_to_port(host_, port_);
    }
    if (!bound_) throw Error(ErrorCode::BindFailure, "cannot bind " + host_ + ":" + std::to_string(port_));
    return port_;
}

void HttpServer::run() {
    bind();
    server_->listen_after_bind();
}

void HttpServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

}  // namespace dkg::gateway
