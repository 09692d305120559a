#include "dkg/extraction/remote_extractor.hpp"

#include <algorithm>
#include <map>

#include <httplib.h>
#include <json.hpp>

#include "dkg/error.hpp"
#include "dkg/extraction/corpus.hpp"

namespace dkg::extraction {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
    throw Error(ErrorCode::RemoteSchema, "remote extractor response: " + what);
}

const json& require(const json& obj, const char* field) {
    if (!obj.is_object() || !obj.contains(field)) schema_error(std::string("missing field '") + field + "'");
    return obj.at(field);
}

std::string require_string(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_string() || v.get<std::string>().empty()) {
        schema_error(std::string("field '") + field + "' must be a nonempty string");
    }
    return v.get<std::string>();
}

double require_prob(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_number()) schema_error(std::string("field '") + field + "' must be a number");
    const double p = v.get<double>();
    if (!(p >= 0.0 && p <= 1.0)) schema_error(std::string("field '") + field + "' outside [0,1]");
    return p;
}

NodeType require_node_type(const json& obj, const char* field) {
    auto t = graph::node_type_from_string(require_string(obj, field));
    if (!t) schema_error(std::string("unknown node type in '") + field + "'");
    return *t;
}

}  // namespace

RemoteLLMExtractor::RemoteLLMExtractor(RemoteExtractorConfig config)
    : config_(std::move(config)),
      in_flight_(std::make_shared<Semaphore>(
          static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 1024)))) {}

RemoteLLMExtractor RemoteLLMExtractor::replay(std::map<std::string, std::string> fixtures,
                                              std::size_t embedding_dim) {
    RemoteExtractorConfig cfg;
    cfg.embedding_dim = embedding_dim;
    RemoteLLMExtractor ex(cfg);
    ex.fixtures_ = std::move(fixtures);
    return ex;
}

RemoteLLMExtractor RemoteLLMExtractor::replay_file(const std::string& path, std::size_t embedding_dim) {
    std::map<std::string, std::string> fixtures;
    try {
        const json doc = json::parse(read_file(path));
        for (const auto& [doc_id, response] : doc.items()) fixtures[doc_id] = response.dump();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, "malformed replay fixture " + path + ": " + e.what());
    }
    return replay(std::move(fixtures), embedding_dim);
}

std::string RemoteLLMExtractor::build_request(const Document& doc, std::string_view context) {
    return json{{"doc_id", doc.doc_id},
                {"source", std::string(to_string(doc.source))},
                {"context_tag", std::string(context)},
                {"text", doc.text}}
        .dump();
}

Candidates RemoteLLMExtractor::parse_response(const Document& doc, std::string_view body,
                                              std::size_t embedding_dim) {
    json j;
    try {
        j = json::parse(body.begin(), body.end());
    } catch (const json::exception& e) {
        schema_error(std::string("not JSON: ") + e.what());
    }
    const json& spans = require(j, "spans");
    const json& relations = require(j, "relations");
    if (!spans.is_array()) schema_error("'spans' must be an array");
    if (!relations.is_array()) schema_error("'relations' must be an array");

    // Group spans by normalized surface; each group is one mention position.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<NodeType, double>>> groups;
    for (const auto& s : spans) {
        const std::string surface = join(preprocess(require_string(s, "surface")));
        if (surface.empty()) schema_error("span surface normalizes to nothing");
        const NodeType type = require_node_type(s, "entity_type");
        const double prob = require_prob(s, "prob");
        auto [it, inserted] = groups.try_emplace(surface);
        if (inserted) order.push_back(surface);
        it->second.emplace_back(type, prob);
    }

    Candidates out;
    std::map<std::string, NodeType> best_type;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::string& surface = order[pos];
        auto& group = groups[surface];
        double z = 0.0;
        for (const auto& [t, p] : group) z += p;
        const auto embedding = embed(preprocess(surface), embedding_dim);
        double best = -1.0;
        for (const auto& [t, p] : group) {
            const double prob = z > 0.0 ? p / z : 1.0 / static_cast<double>(group.size());
            out.entities.push_back({surface, t, prob, embedding, 0.5, doc.doc_id, pos});
            if (prob > best) {
                best = prob;
                best_type[surface] = t;
            }
        }
    }

    for (const auto& r : relations) {
        CandidateRelation rel;
        rel.src_surface = join(preprocess(require_string(r, "src_surface")));
        rel.dst_surface = join(preprocess(require_string(r, "dst_surface")));
        auto edge_type = graph::edge_type_from_string(require_string(r, "edge_type"));
        if (!edge_type) schema_error("unknown edge_type");
        rel.edge_type = *edge_type;
        rel.prob = require_prob(r, "prob");
        auto endpoint_type = [&](const char* field, const std::string& surface) {
            if (r.contains(field)) return require_node_type(r, field);
            auto it = best_type.find(surface);
            if (it == best_type.end()) schema_error("relation endpoint '" + surface + "' has no span");
            return it->second;
        };
        rel.src_type = endpoint_type("src_type", rel.src_surface);
        rel.dst_type = endpoint_type("dst_type", rel.dst_surface);
        rel.provenance = doc.doc_id;
        out.relations.push_back(std::move(rel));
    }
    return out;
}

Candidates RemoteLLMExtractor::extract(const Document& doc, std::string_view context) const {
    if (fixtures_) {
        auto it = fixtures_->find(doc.doc_id);
        if (it == fixtures_->end()) {
            throw Error(ErrorCode::RemoteTransport, "no replay fixture for document " + doc.doc_id);
        }
        return parse_response(doc, it->second, config_.embedding_dim);
    }

    in_flight_->acquire();
    struct Release {
        Semaphore& s;
        ~Release() { s.release(); }
    } release{*in_flight_};

    httplib::Client client(config_.host, config_.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(config_.path, build_request(doc, context), "application/json");
    if (!res) {
        throw Error(ErrorCode::RemoteTransport,
                    "remote extractor request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw Error(ErrorCode::RemoteTransport, "remote extractor returned HTTP " + std::to_string(res->status));
    }
    return parse_response(doc, res->body, config_.embedding_dim);
}

}  // namespace dkg::extraction
