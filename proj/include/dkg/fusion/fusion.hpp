/**
 * @file fusion.hpp
 * @brief Graph update: merge accepted candidates under the batch budget,
 *        estimate link probabilities, MRF local-energy scoring, pruning and
 *        capacity enforcement.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dkg/extraction/extractor.hpp"
#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/params.hpp"

namespace dkg::fusion {

using graph::EdgeKey;
using graph::KnowledgeGraph;
using graph::NodeId;

struct MrfConfig {
    double tau = 0.7;        ///< keep iff retention >= tau
    double smoothing = 1.0;  ///< Laplace constant for link probabilities

    void validate() const;
};

/// Evidence for one candidate link u -> v.
struct LinkCounts {
    double pair_count = 0.0;    ///< (soft) observations of the typed link
    double source_count = 0.0;  ///< observations of u that could have produced it
    std::size_t alternatives = 2;
};

/// (pair + s) / (source + s * K). Strictly inside (0, 1).
/// Throws InvalidCounts on negative counts or pair > source.
double estimate_link_probability(const LinkCounts& counts, const MrfConfig& cfg);

using Element = std::variant<NodeId, EdgeKey>;

struct ElementScore {
    Element element;
    double unary = 0.0;         ///< psi_v = -ln relevance (0 for edges)
    double pairwise_sum = 0.0;  ///< sum of psi_uv = -ln w over incident edges
    double retention = 0.0;     ///< exp(-(unary + pairwise_sum) / (1 + deg))
};

/// Floor applied to relevance and weights before taking logs.
inline constexpr double kEnergyFloor = 1e-9;

/// Throws ElementNotFound.
ElementScore mrf_score(const KnowledgeGraph& g, const Element& element);

/// Scores every node then every edge. `threads` > 1 fans node scoring out
/// across workers; results are identical for any thread count.
std::vector<ElementScore> score_all(const KnowledgeGraph& g, unsigned threads = 1);

struct PruneResult {
    std::vector<NodeId> nodes;
    std::vector<EdgeKey> edges;  ///< includes edges dropped with their nodes

    std::size_t size() const noexcept { return nodes.size() + edges.size(); }
};

/// Single pass: score everything, then remove nodes and edges whose
/// retention is below tau. No rescoring after removal.
PruneResult prune(KnowledgeGraph& g, const MrfConfig& cfg, unsigned threads = 1);

/// Evict lowest-weight edges until |E| <= max_edges; returns the count.
std::size_t enforce_capacity(KnowledgeGraph& g);

struct FusionOptions {
    double link_threshold = 0.85;  ///< cosine needed to merge into an existing node
    double smoothing = 1.0;
    std::size_t alternatives = 2;
    unsigned threads = 1;
};

struct BatchReport {
    std::uint64_t batch_id = 0;
    std::size_t candidates_seen = 0;
    std::size_t nodes_added = 0;
    std::size_t edges_added = 0;
    std::size_t nodes_merged = 0;
    std::size_t edges_updated = 0;
    std::size_t over_budget = 0;  ///< admissions refused because the budget was spent
    std::size_t elements_pruned = 0;
    std::size_t edges_evicted = 0;
    double elapsed_ms = 0.0;
    std::size_t final_edge_count = 0;

    /// One machine-parseable JSON line (no trailing newline).
    std::string to_line() const;
};

/// Equality on every field except the wall-clock elapsed_ms.
bool same_outcome(const BatchReport& a, const BatchReport& b) noexcept;

/// Fuse confidence-filtered candidates into the graph: rank by confidence,
/// create or merge nodes, turn relations with P > tau into edges (existing
/// edges blended with gamma), prune at tau, enforce capacity. New nodes plus
/// new edges never exceed capacity().batch_budget.
BatchReport apply_batch(KnowledgeGraph& g, const extraction::Candidates& accepted,
                        const TunableParams& params, const FusionOptions& options = {});

}  // namespace dkg::fusion
