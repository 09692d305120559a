/**
 * @file types.hpp
 * @brief Node/edge vocabulary of the medical knowledge graph.
 */

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dkg::graph {

enum class NodeType : std::uint8_t {
    Disease,
    Symptom,
    Treatment,
    PatientProfile,
    Medication,
    Procedure,
    RiskFactor,
    Comorbidity,
    DiagnosticTest,
    BodySystem,
    Gene,
    LifestyleFactor,
    Biomarker,
};

enum class EdgeType : std::uint8_t {
    Causal,
    Therapeutic,
    Associative,
    Contraindicative,
    Diagnostic,
    Preventive,
    Exacerbative,
    Ameliorative,
    Temporal,
    DosageRelated,
    SideEffect,
    Interaction,
    Epidemiological,
    Genetic,
    Allergic,
    Monitoring,
    Supportive,
    Concomitant,
    RiskAssociated,
    SymptomSymptom,
    ProcedureRelated,
    OutcomeRelated,
    AgeRelated,
    LifestyleRelated,
    BiomarkerRelated,
    ComorbidityRelated,
};

inline constexpr std::size_t kNodeTypeCount = 13;
inline constexpr std::size_t kEdgeTypeCount = 26;

const std::array<NodeType, kNodeTypeCount>& all_node_types() noexcept;
const std::array<EdgeType, kEdgeTypeCount>& all_edge_types() noexcept;

std::string_view to_string(NodeType t) noexcept;
std::string_view to_string(EdgeType t) noexcept;
std::optional<NodeType> node_type_from_string(std::string_view s) noexcept;
std::optional<EdgeType> edge_type_from_string(std::string_view s) noexcept;

/// Id namespace for a node type: "d" for Disease, "s" for Symptom, ...
std::string_view id_prefix(NodeType t) noexcept;

/// Canonical id "<prefix>:<tokens joined by '_'>".
std::string make_node_id(NodeType t, const std::vector<std::string>& tokens);

using NodeId = std::string;
using BatchCounter = std::uint64_t;

struct Node {
    NodeId id;
    NodeType type = NodeType::Disease;
    std::string label;
    /// P(d) for Disease nodes; unset means "uniform over known diseases".
    std::optional<double> prior;
    std::map<std::string, double> attributes;
    std::vector<double> embedding;
    double relevance = 1.0;
    BatchCounter created_at = 0;
    BatchCounter updated_at = 0;

    friend bool operator==(const Node&, const Node&) = default;
};

/// Identity of an edge. Ordered lexicographically by (src, dst, type name).
struct EdgeKey {
    NodeId src;
    NodeId dst;
    EdgeType type = EdgeType::Associative;

    std::strong_ordering operator<=>(const EdgeKey& other) const noexcept;
    bool operator==(const EdgeKey& other) const noexcept = default;

    std::string to_string() const;
};

struct Edge {
    NodeId src;
    NodeId dst;
    EdgeType type = EdgeType::Associative;
    double weight = 0.0;
    std::uint64_t evidence_count = 0;
    BatchCounter created_at = 0;
    BatchCounter updated_at = 0;

    EdgeKey key() const { return {src, dst, type}; }

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct CapacityConfig {
    std::uint64_t max_edges = 987654;
    std::uint64_t batch_budget = 150;

    void validate() const;
    friend bool operator==(const CapacityConfig&, const CapacityConfig&) = default;
};

}  // namespace dkg::graph
