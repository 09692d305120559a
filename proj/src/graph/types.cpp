#include "dkg/graph/types.hpp"

#include <algorithm>

#include "dkg/error.hpp"

namespace dkg::graph {

namespace {

constexpr std::array<std::string_view, kNodeTypeCount> kNodeNames = {
    "Disease",    "Symptom",     "Treatment", "PatientProfile", "Medication",
    "Procedure",  "RiskFactor",  "Comorbidity", "DiagnosticTest", "BodySystem",
    "Gene",       "LifestyleFactor", "Biomarker"};

constexpr std::array<std::string_view, kNodeTypeCount> kNodePrefixes = {
    "d", "s", "t", "p", "m", "pr", "rf", "c", "dt", "bs", "g", "lf", "b"};

constexpr std::array<std::string_view, kEdgeTypeCount> kEdgeNames = {
    "Causal",           "Therapeutic",     "Associative",     "Contraindicative",
    "Diagnostic",       "Preventive",      "Exacerbative",    "Ameliorative",
    "Temporal",         "DosageRelated",   "SideEffect",      "Interaction",
    "Epidemiological",  "Genetic",         "Allergic",        "Monitoring",
    "Supportive",       "Concomitant",     "RiskAssociated",  "SymptomSymptom",
    "ProcedureRelated", "OutcomeRelated",  "AgeRelated",      "LifestyleRelated",
    "BiomarkerRelated", "ComorbidityRelated"};

// Position of each edge type name in alphabetical order, so EdgeKey
// comparison is lexicographic on the serialized name without string work.
std::array<int, kEdgeTypeCount> alphabetical_ranks() {
    std::array<int, kEdgeTypeCount> order{};
    for (std::size_t i = 0; i < kEdgeTypeCount; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [](int a, int b) { return kEdgeNames[a] < kEdgeNames[b]; });
    std::array<int, kEdgeTypeCount> rank{};
    for (std::size_t r = 0; r < kEdgeTypeCount; ++r) rank[order[r]] = static_cast<int>(r);
    return rank;
}

const std::array<int, kEdgeTypeCount>& edge_name_rank() {
    static const auto ranks = alphabetical_ranks();
    return ranks;
}

}  // namespace

const std::array<NodeType, kNodeTypeCount>& all_node_types() noexcept {
    static const auto types = [] {
        std::array<NodeType, kNodeTypeCount> out{};
        for (std::size_t i = 0; i < kNodeTypeCount; ++i) out[i] = static_cast<NodeType>(i);
        return out;
    }();
    return types;
}

const std::array<EdgeType, kEdgeTypeCount>& all_edge_types() noexcept {
    static const auto types = [] {
        std::array<EdgeType, kEdgeTypeCount> out{};
        for (std::size_t i = 0; i < kEdgeTypeCount; ++i) out[i] = static_cast<EdgeType>(i);
        return out;
    }();
    return types;
}

std::string_view to_string(NodeType t) noexcept {
    return kNodeNames[static_cast<std::size_t>(t)];
}

std::string_view to_string(EdgeType t) noexcept {
    return kEdgeNames[static_cast<std::size_t>(t)];
}

std::optional<NodeType> node_type_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kNodeTypeCount; ++i) {
        if (kNodeNames[i] == s) return static_cast<NodeType>(i);
    }
    return std::nullopt;
}

std::optional<EdgeType> edge_type_from_string(std::string_view s) noexcept {
    for (std::size_t i = 0; i < kEdgeTypeCount; ++i) {
        if (kEdgeNames[i] == s) return static_cast<EdgeType>(i);
    }
    return std::nullopt;
}

std::string_view id_prefix(NodeType t) noexcept {
    return kNodePrefixes[static_cast<std::size_t>(t)];
}

std::string make_node_id(NodeType t, const std::vector<std::string>& tokens) {
    std::string id(id_prefix(t));
    id += ':';
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) id += '_';
        id += tokens[i];
    }
    return id;
}

std::strong_ordering EdgeKey::operator<=>(const EdgeKey& other) const noexcept {
    if (auto c = src.compare(other.src); c != 0) return c <=> 0;
    if (auto c = dst.compare(other.dst); c != 0) return c <=> 0;
    const auto& rank = edge_name_rank();
    return rank[static_cast<std::size_t>(type)] <=> rank[static_cast<std::size_t>(other.type)];
}

std::string EdgeKey::to_string() const {
    std::string out = src;
    out += "|";
    out += dst;
    out += "|";
    out += graph::to_string(type);
    return out;
}

void CapacityConfig::validate() const {
    if (max_edges == 0) throw Error(ErrorCode::InvalidConfig, "max_edges must be positive");
    if (batch_budget == 0) throw Error(ErrorCode::InvalidConfig, "batch_budget must be positive");
}

}  // namespace dkg::graph
