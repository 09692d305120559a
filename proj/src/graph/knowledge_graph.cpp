#include "dkg/graph/knowledge_graph.hpp"

#include <algorithm>
#include <cmath>

#include "dkg/error.hpp"

namespace dkg::graph {

namespace {

const std::set<EdgeKey> kNoEdges;

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void validate_node(const Node& n) {
    if (n.id.empty()) throw Error(ErrorCode::InvalidField, "node id must be nonempty");
    if (n.prior && !is_probability(*n.prior)) {
        throw Error(ErrorCode::InvalidField, "prior of " + n.id + " outside [0,1]");
    }
    if (!is_probability(n.relevance)) {
        throw Error(ErrorCode::InvalidField, "relevance of " + n.id + " outside [0,1]");
    }
    for (const auto& [name, value] : n.attributes) {
        if (!std::isfinite(value)) {
            throw Error(ErrorCode::InvalidField, "attribute " + name + " of " + n.id + " not finite");
        }
    }
    if (!n.embedding.empty()) {
        double sq = 0.0;
        for (double x : n.embedding) sq += x * x;
        if (!(std::abs(std::sqrt(sq) - 1.0) <= 1e-6)) {
            throw Error(ErrorCode::InvalidField, "embedding of " + n.id + " is not unit norm");
        }
    }
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(CapacityConfig capacity) : capacity_(capacity) {
    capacity_.validate();
}

NodeId KnowledgeGraph::add_node(Node node) {
    validate_node(node);
    if (auto it = nodes_.find(node.id); it != nodes_.end()) {
        Node& existing = it->second;
        if (existing.type != node.type || existing.label != node.label) {
            throw Error(ErrorCode::DuplicateIdWithConflict,
                        "node " + node.id + " already exists as " +
                            std::string(to_string(existing.type)) + " '" + existing.label + "'");
        }
        existing.updated_at = batch_counter_;
        return existing.id;
    }
    node.created_at = batch_counter_;
    node.updated_at = batch_counter_;
    NodeId id = node.id;
    by_type_[static_cast<std::size_t>(node.type)].insert(id);
    nodes_.emplace(id, std::move(node));
    return id;
}

EdgeKey KnowledgeGraph::add_edge(Edge edge, AddEdgeOptions options) {
    if (!has_node(edge.src) || !has_node(edge.dst)) {
        throw Error(ErrorCode::MissingEndpoint,
                    "edge " + edge.key().to_string() + " references an absent node");
    }
    if (!is_probability(edge.weight)) {
        throw Error(ErrorCode::InvalidWeight, "weight of " + edge.key().to_string() + " outside [0,1]");
    }
    EdgeKey key = edge.key();
    if (has_edge(key)) {
        update_edge_weight(key, edge.weight, options.gamma);
        return key;
    }
    if (options.policy == CapacityPolicy::Reject && edges_.size() >= capacity_.max_edges) {
        throw Error(ErrorCode::CapacityExceeded,
                    "graph holds max_edges = " + std::to_string(capacity_.max_edges));
    }
    edge.created_at = batch_counter_;
    edge.updated_at = batch_counter_;
    insert_edge_unchecked(std::move(edge));
    enforce_capacity();
    return key;
}

double KnowledgeGraph::update_edge_weight(const EdgeKey& key, double p_new, double gamma) {
    auto it = edges_.find(key);
    if (it == edges_.end()) throw Error(ErrorCode::EdgeNotFound, "no edge " + key.to_string());
    if (!is_probability(p_new)) {
        throw Error(ErrorCode::InvalidProbability, "p_new outside [0,1]");
    }
    if (!is_probability(gamma)) {
        throw Error(ErrorCode::InvalidProbability, "gamma outside [0,1]");
    }
    Edge& e = it->second;
    const double blended = std::clamp(gamma * e.weight + (1.0 - gamma) * p_new, 0.0, 1.0);
    by_weight_.erase({e.weight, key});
    e.weight = blended;
    e.evidence_count += 1;
    e.updated_at = batch_counter_;
    by_weight_.emplace(e.weight, key);
    return blended;
}

void KnowledgeGraph::set_relevance(const NodeId& id, double relevance) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::NodeNotFound, "no node " + id);
    if (!is_probability(relevance)) throw Error(ErrorCode::InvalidField, "relevance outside [0,1]");
    it->second.relevance = relevance;
    it->second.updated_at = batch_counter_;
}

void KnowledgeGraph::set_prior(const NodeId& id, std::optional<double> prior) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::NodeNotFound, "no node " + id);
    if (prior && !is_probability(*prior)) throw Error(ErrorCode::InvalidField, "prior outside [0,1]");
    it->second.prior = prior;
    it->second.updated_at = batch_counter_;
}

void KnowledgeGraph::set_attribute(const NodeId& id, const std::string& name, double value) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::NodeNotFound, "no node " + id);
    if (!std::isfinite(value)) throw Error(ErrorCode::InvalidField, "attribute not finite");
    it->second.attributes[name] = value;
    it->second.updated_at = batch_counter_;
}

void KnowledgeGraph::remove_node(const NodeId& id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw Error(ErrorCode::NodeNotFound, "no node " + id);

    std::vector<EdgeKey> incident;
    for (const auto& k : out_edges(id)) incident.push_back(k);
    for (const auto& k : in_edges(id)) {
        if (k.src != k.dst) incident.push_back(k);
    }
    for (const auto& k : incident) {
        if (auto e = edges_.find(k); e != edges_.end()) erase_edge_unchecked(e);
    }
    out_.erase(id);
    in_.erase(id);
    by_type_[static_cast<std::size_t>(it->second.type)].erase(id);
    nodes_.erase(it);
}

void KnowledgeGraph::remove_edge(const EdgeKey& key) {
    auto it = edges_.find(key);
    if (it == edges_.end()) throw Error(ErrorCode::EdgeNotFound, "no edge " + key.to_string());
    erase_edge_unchecked(it);
}

std::vector<EdgeKey> KnowledgeGraph::enforce_capacity() {
    std::vector<EdgeKey> evicted;
    while (edges_.size() > capacity_.max_edges) {
        EdgeKey key = by_weight_.begin()->second;
        erase_edge_unchecked(edges_.find(key));
        evicted.push_back(std::move(key));
    }
    return evicted;
}

void KnowledgeGraph::set_capacity(CapacityConfig capacity) {
    capacity.validate();
    capacity_ = capacity;
    enforce_capacity();
}

const Node* KnowledgeGraph::find_node(const NodeId& id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* KnowledgeGraph::find_edge(const EdgeKey& key) const {
    auto it = edges_.find(key);
    return it == edges_.end() ? nullptr : &it->second;
}

const Node& KnowledgeGraph::node(const NodeId& id) const {
    if (const Node* n = find_node(id)) return *n;
    throw Error(ErrorCode::NodeNotFound, "no node " + id);
}

const Edge& KnowledgeGraph::edge(const EdgeKey& key) const {
    if (const Edge* e = find_edge(key)) return *e;
    throw Error(ErrorCode::EdgeNotFound, "no edge " + key.to_string());
}

const std::set<NodeId>& KnowledgeGraph::nodes_of_type(NodeType type) const {
    return by_type_[static_cast<std::size_t>(type)];
}

const std::set<EdgeKey>& KnowledgeGraph::out_edges(const NodeId& id) const {
    auto it = out_.find(id);
    return it == out_.end() ? kNoEdges : it->second;
}

const std::set<EdgeKey>& KnowledgeGraph::in_edges(const NodeId& id) const {
    auto it = in_.find(id);
    return it == in_.end() ? kNoEdges : it->second;
}

std::size_t KnowledgeGraph::degree(const NodeId& id) const {
    std::size_t self_loops = 0;
    for (const auto& k : out_edges(id)) self_loops += (k.dst == id);
    return out_edges(id).size() + in_edges(id).size() - self_loops;
}

std::vector<const Edge*> KnowledgeGraph::edges_between(const NodeId& a, const NodeId& b) const {
    std::vector<const Edge*> found;
    // Keys with equal (src, dst) are contiguous; AgeRelated has the
    // alphabetically smallest type name.
    auto collect = [&](const NodeId& from, const NodeId& to) {
        const auto& out = out_edges(from);
        for (auto it = out.lower_bound(EdgeKey{from, to, EdgeType::AgeRelated});
             it != out.end() && it->dst == to; ++it) {
            found.push_back(&edges_.at(*it));
        }
    };
    collect(a, b);
    if (a != b) collect(b, a);
    return found;
}

bool KnowledgeGraph::consistent() const {
    if (edges_.size() > capacity_.max_edges) return false;
    if (by_weight_.size() != edges_.size()) return false;
    std::size_t out_total = 0;
    std::size_t in_total = 0;
    for (const auto& [id, keys] : out_) {
        if (!has_node(id)) return false;
        out_total += keys.size();
    }
    for (const auto& [id, keys] : in_) {
        if (!has_node(id)) return false;
        in_total += keys.size();
    }
    if (out_total != edges_.size() || in_total != edges_.size()) return false;
    for (const auto& [key, e] : edges_) {
        if (!(key == e.key())) return false;
        if (!has_node(e.src) || !has_node(e.dst)) return false;
        if (!is_probability(e.weight)) return false;
        if (out_edges(e.src).count(key) == 0 || in_edges(e.dst).count(key) == 0) return false;
        if (by_weight_.count({e.weight, key}) == 0) return false;
    }
    std::size_t typed = 0;
    for (const auto& ids : by_type_) typed += ids.size();
    if (typed != nodes_.size()) return false;
    for (const auto& [id, n] : nodes_) {
        if (n.id != id) return false;
        if (nodes_of_type(n.type).count(id) == 0) return false;
    }
    return true;
}

void KnowledgeGraph::insert_edge_unchecked(Edge edge) {
    EdgeKey key = edge.key();
    out_[edge.src].insert(key);
    in_[edge.dst].insert(key);
    by_weight_.emplace(edge.weight, key);
    edges_.emplace(std::move(key), std::move(edge));
}

void KnowledgeGraph::erase_edge_unchecked(EdgeMap::iterator it) {
    const EdgeKey& key = it->first;
    if (auto o = out_.find(key.src); o != out_.end()) {
        o->second.erase(key);
        if (o->second.empty()) out_.erase(o);
    }
    if (auto i = in_.find(key.dst); i != in_.end()) {
        i->second.erase(key);
        if (i->second.empty()) in_.erase(i);
    }
    by_weight_.erase({it->second.weight, key});
    edges_.erase(it);
}

}  // namespace dkg::graph
