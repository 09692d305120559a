#include "dkg/graph/snapshot.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dkg/error.hpp"

namespace dkg::graph {

using nlohmann::json;

namespace {

json node_to_json(const Node& n) {
    json j;
    j["id"] = n.id;
    j["type"] = std::string(to_string(n.type));
    j["label"] = n.label;
    j["prior"] = n.prior ? json(*n.prior) : json(nullptr);
    j["attributes"] = json::object();
    for (const auto& [k, v] : n.attributes) j["attributes"][k] = v;
    j["embedding"] = n.embedding;
    j["relevance"] = n.relevance;
    j["created_at"] = n.created_at;
    j["updated_at"] = n.updated_at;
    return j;
}

json edge_to_json(const Edge& e) {
    return json{{"src", e.src},
                {"dst", e.dst},
                {"type", std::string(to_string(e.type))},
                {"weight", e.weight},
                {"evidence_count", e.evidence_count},
                {"created_at", e.created_at},
                {"updated_at", e.updated_at}};
}

[[noreturn]] void corrupt(const std::string& what) {
    throw Error(ErrorCode::CorruptDocument, "corrupt snapshot: " + what);
}

Node node_from_json(const json& j) {
    Node n;
    n.id = j.at("id").get<std::string>();
    auto type = node_type_from_string(j.at("type").get<std::string>());
    if (!type) corrupt("unknown node type for " + n.id);
    n.type = *type;
    n.label = j.at("label").get<std::string>();
    if (const auto& p = j.at("prior"); !p.is_null()) n.prior = p.get<double>();
    for (const auto& [k, v] : j.at("attributes").items()) n.attributes[k] = v.get<double>();
    n.embedding = j.at("embedding").get<std::vector<double>>();
    n.relevance = j.at("relevance").get<double>();
    n.created_at = j.at("created_at").get<BatchCounter>();
    n.updated_at = j.at("updated_at").get<BatchCounter>();
    return n;
}

Edge edge_from_json(const json& j) {
    Edge e;
    e.src = j.at("src").get<std::string>();
    e.dst = j.at("dst").get<std::string>();
    auto type = edge_type_from_string(j.at("type").get<std::string>());
    if (!type) corrupt("unknown edge type");
    e.type = *type;
    e.weight = j.at("weight").get<double>();
    e.evidence_count = j.at("evidence_count").get<std::uint64_t>();
    e.created_at = j.at("created_at").get<BatchCounter>();
    e.updated_at = j.at("updated_at").get<BatchCounter>();
    return e;
}

}  // namespace

std::string snapshot(const KnowledgeGraph& g) {
    json doc;
    doc["schema_version"] = kSnapshotSchemaVersion;
    doc["capacity"] = {{"max_edges", g.capacity().max_edges},
                       {"batch_budget", g.capacity().batch_budget}};
    doc["batch_counter"] = g.batch_counter();
    json nodes = json::array();
    for (const auto& [id, n] : g.nodes()) nodes.push_back(node_to_json(n));
    json edges = json::array();
    for (const auto& [key, e] : g.edges()) edges.push_back(edge_to_json(e));
    doc["nodes"] = std::move(nodes);
    doc["edges"] = std::move(edges);
    return doc.dump();
}

KnowledgeGraph load(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::exception& e) {
        corrupt(e.what());
    }
    if (!doc.is_object() || !doc.contains("schema_version")) corrupt("missing schema_version");
    if (!doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<long long>() != kSnapshotSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch,
                    "snapshot schema_version " + doc["schema_version"].dump() +
                        " is not supported (expected " +
                        std::to_string(kSnapshotSchemaVersion) + ")");
    }

    try {
        CapacityConfig cap;
        cap.max_edges = doc.at("capacity").at("max_edges").get<std::uint64_t>();
        cap.batch_budget = doc.at("capacity").at("batch_budget").get<std::uint64_t>();
        KnowledgeGraph g(cap);

        for (const auto& jn : doc.at("nodes")) {
            Node n = node_from_json(jn);
            if (g.has_node(n.id)) corrupt("duplicate node " + n.id);
            const BatchCounter created = n.created_at;
            const BatchCounter updated = n.updated_at;
            NodeId id = g.add_node(std::move(n));
            g.nodes_.at(id).created_at = created;
            g.nodes_.at(id).updated_at = updated;
        }
        const auto& edges = doc.at("edges");
        if (edges.size() > cap.max_edges) corrupt("edge count exceeds max_edges");
        for (const auto& je : edges) {
            Edge e = edge_from_json(je);
            if (!g.has_node(e.src) || !g.has_node(e.dst)) corrupt("dangling edge " + e.key().to_string());
            if (!(e.weight >= 0.0 && e.weight <= 1.0)) corrupt("edge weight outside [0,1]");
            if (g.has_edge(e.key())) corrupt("duplicate edge " + e.key().to_string());
            g.insert_edge_unchecked(std::move(e));
        }
        g.batch_counter_ = doc.at("batch_counter").get<BatchCounter>();
        return g;
    } catch (const json::exception& e) {
        corrupt(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptDocument) throw;
        corrupt(e.what());
    }
}

void atomic_write(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "rename " + tmp.string() + ": " + ec.message());
}

void save_file(const KnowledgeGraph& g, const std::filesystem::path& path) {
    atomic_write(path, snapshot(g));
}

KnowledgeGraph load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load(buf.str());
}

}  // namespace dkg::graph
