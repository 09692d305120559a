/**
 * @file knowledge_graph.hpp
 * @brief Typed, weighted, dynamic knowledge graph: the engine's system of
 *        record.
 *
 * Every public mutator leaves the graph consistent: no dangling edges, at
 * most one edge per (src, dst, type), and |E| <= capacity().max_edges.
 *
 * Not internally synchronized. Callers serialize writers; concurrent
 * readers are fine once construction is done.
 */

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "dkg/graph/types.hpp"

namespace dkg::graph {

/// What add_edge does when inserting would push |E| past max_edges.
enum class CapacityPolicy {
    Evict,   ///< insert, then evict lowest-weight edges until within capacity
    Reject,  ///< throw CapacityExceeded when |E| == max_edges
};

/// Decay used when add_edge meets an existing (src, dst, type).
inline constexpr double kDefaultGamma = 0.8;

struct AddEdgeOptions {
    double gamma = kDefaultGamma;
    CapacityPolicy policy = CapacityPolicy::Evict;
};

class KnowledgeGraph {
public:
    using NodeMap = std::map<NodeId, Node>;
    using EdgeMap = std::map<EdgeKey, Edge>;

    explicit KnowledgeGraph(CapacityConfig capacity = {});

    // -- mutation ---------------------------------------------------------

    /// Insert a node. Re-adding a node with the same id, type and label only
    /// refreshes updated_at.
    NodeId add_node(Node node);

    /// Insert an edge; an existing (src, dst, type) is blended in with
    /// update_edge_weight(key, e.weight, options.gamma).
    EdgeKey add_edge(Edge edge, AddEdgeOptions options = {});

    /// weight <- gamma * weight + (1 - gamma) * p_new; evidence_count += 1.
    double update_edge_weight(const EdgeKey& key, double p_new, double gamma);

    void set_relevance(const NodeId& id, double relevance);
    void set_prior(const NodeId& id, std::optional<double> prior);
    void set_attribute(const NodeId& id, const std::string& name, double value);

    /// Remove a node together with every incident edge.
    void remove_node(const NodeId& id);
    void remove_edge(const EdgeKey& key);

    /// Evict lowest-weight edges (ties: smaller key first) until
    /// |E| <= max_edges. Returns the evicted keys in eviction order.
    std::vector<EdgeKey> enforce_capacity();

    /// Change capacity; enforced immediately.
    void set_capacity(CapacityConfig capacity);

    /// Advance the logical clock; returns the new counter value.
    BatchCounter begin_batch() noexcept { return ++batch_counter_; }
    void set_batch_counter(BatchCounter value) noexcept { batch_counter_ = value; }

    // -- queries ----------------------------------------------------------

    const CapacityConfig& capacity() const noexcept { return capacity_; }
    BatchCounter batch_counter() const noexcept { return batch_counter_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    const NodeMap& nodes() const noexcept { return nodes_; }
    const EdgeMap& edges() const noexcept { return edges_; }

    bool has_node(const NodeId& id) const { return nodes_.count(id) != 0; }
    bool has_edge(const EdgeKey& key) const { return edges_.count(key) != 0; }

    /// nullptr when absent.
    const Node* find_node(const NodeId& id) const;
    const Edge* find_edge(const EdgeKey& key) const;

    const Node& node(const NodeId& id) const;  ///< throws NodeNotFound
    const Edge& edge(const EdgeKey& key) const;  ///< throws EdgeNotFound

    const std::set<NodeId>& nodes_of_type(NodeType type) const;
    const std::set<EdgeKey>& out_edges(const NodeId& id) const;
    const std::set<EdgeKey>& in_edges(const NodeId& id) const;
    std::size_t degree(const NodeId& id) const;

    /// Edges between a and b in either direction.
    std::vector<const Edge*> edges_between(const NodeId& a, const NodeId& b) const;

    /// Full internal consistency check (indexes, endpoints, capacity).
    bool consistent() const;

    /// Structural equality: nodes, edges, capacity and batch counter.
    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
        return a.capacity_ == b.capacity_ && a.batch_counter_ == b.batch_counter_ &&
               a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
    }

private:
    friend KnowledgeGraph load(std::string_view document);

    void insert_edge_unchecked(Edge edge);
    void erase_edge_unchecked(EdgeMap::iterator it);

    CapacityConfig capacity_;
    BatchCounter batch_counter_ = 0;

    NodeMap nodes_;
    EdgeMap edges_;

    std::array<std::set<NodeId>, kNodeTypeCount> by_type_;
    std::map<NodeId, std::set<EdgeKey>> out_;
    std::map<NodeId, std::set<EdgeKey>> in_;
    // Eviction order: lowest weight first, then smallest key.
    std::set<std::pair<double, EdgeKey>> by_weight_;
};

}  // namespace dkg::graph
