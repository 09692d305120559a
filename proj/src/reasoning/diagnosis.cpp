/**
 * @file diagnosis.cpp
 * @brief Naive-Bayes likelihood, posterior and evidence explanation.
 */

#include <algorithm>
#include <cmath>
#include <limits>

#include "dkg/error.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::reasoning {

using graph::NodeType;

namespace {

bool is_evidence_type(EdgeType t) { return t == EdgeType::Diagnostic || t == EdgeType::Causal; }

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "epsilon must lie in (0,1)");
    }
}

void check_symptoms(const KnowledgeGraph& g, const SymptomSet& symptoms) {
    if (symptoms.empty()) throw Error(ErrorCode::EmptySymptomSet, "symptom set is empty");
    for (const auto& s : symptoms) {
        const auto* n = g.find_node(s);
        if (n != nullptr && n->type != NodeType::Symptom) {
            throw Error(ErrorCode::InvalidField, s + " is not a Symptom node");
        }
    }
}

// Heaviest Diagnostic/Causal edge between s and d, or nullptr.
const graph::Edge* strongest_evidence(const KnowledgeGraph& g, const NodeId& s, const NodeId& d,
                                      double min_weight) {
    const graph::Edge* best = nullptr;
    for (const auto* e : g.edges_between(s, d)) {
        if (!is_evidence_type(e->type) || e->weight < min_weight) continue;
        if (best == nullptr || e->weight > best->weight) best = e;
    }
    return best;
}

double log_likelihood(const KnowledgeGraph& g, const SymptomSet& symptoms, const NodeId& d,
                      const DiagnosisOptions& o) {
    double sum = 0.0;
    for (const auto& s : symptoms) {
        const auto* e = strongest_evidence(g, s, d, o.min_edge_weight);
        sum += std::log(std::max(e != nullptr ? e->weight : 0.0, o.epsilon));
    }
    return sum;
}

}  // namespace

double likelihood(const KnowledgeGraph& g, const SymptomSet& symptoms, const NodeId& disease,
                  const DiagnosisOptions& options) {
    check_epsilon(options.epsilon);
    const auto* n = g.find_node(disease);
    if (n == nullptr || n->type != NodeType::Disease) {
        throw Error(ErrorCode::NotADisease, disease + " is not a Disease node");
    }
    check_symptoms(g, symptoms);
    double product = 1.0;
    for (const auto& s : symptoms) {
        const auto* e = strongest_evidence(g, s, disease, options.min_edge_weight);
        product *= std::max(e != nullptr ? e->weight : 0.0, options.epsilon);
    }
    return product;
}

Posterior diagnose(const KnowledgeGraph& g, const SymptomSet& symptoms, const DiagnosisOptions& options) {
    check_epsilon(options.epsilon);
    check_symptoms(g, symptoms);
    const auto& diseases = g.nodes_of_type(NodeType::Disease);
    if (diseases.empty()) throw Error(ErrorCode::NoDiseases, "graph has no Disease nodes");

    const double uniform = 1.0 / static_cast<double>(diseases.size());
    bool any_mass = false;
    for (const auto& d : diseases) {
        const auto& prior = g.node(d).prior;
        if (!prior || *prior > 0.0) any_mass = true;
    }

    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    std::vector<std::pair<NodeId, double>> scores;
    scores.reserve(diseases.size());
    double top = kNegInf;
    for (const auto& d : diseases) {
        // All-zero explicit priors carry no information; fall back to uniform.
        const auto& prior = g.node(d).prior;
        const double p = any_mass ? prior.value_or(uniform) : uniform;
        const double s = p > 0.0 ? std::log(p) + log_likelihood(g, symptoms, d, options) : kNegInf;
        scores.emplace_back(d, s);
        top = std::max(top, s);
    }

    double z = 0.0;
    for (auto& [d, s] : scores) {
        s = std::isinf(s) ? 0.0 : std::exp(s - top);
        z += s;
    }

    Posterior post;
    post.epsilon = options.epsilon;
    post.entries.reserve(scores.size());
    for (const auto& [d, s] : scores) post.entries.push_back({d, s / z});
    std::stable_sort(post.entries.begin(), post.entries.end(), [](const auto& a, const auto& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.disease < b.disease;
    });
    return post;
}

double Posterior::probability_of(const NodeId& disease) const noexcept {
    for (const auto& e : entries) {
        if (e.disease == disease) return e.probability;
    }
    return 0.0;
}

std::vector<NodeId> Posterior::above(double threshold) const {
    std::vector<NodeId> out;
    for (const auto& e : entries) {
        if (e.probability > threshold) out.push_back(e.disease);
    }
    return out;
}

std::vector<EvidenceEntry> explain(const KnowledgeGraph& g, const NodeId& disease, const SymptomSet& symptoms,
                                   double epsilon) {
    check_epsilon(epsilon);
    if (!g.has_node(disease)) throw Error(ErrorCode::DiseaseNotFound, "no disease " + disease);
    std::vector<EvidenceEntry> out;
    out.reserve(symptoms.size());
    for (const auto& s : symptoms) {
        EvidenceEntry entry;
        entry.symptom = s;
        if (const auto* e = strongest_evidence(g, s, disease, 0.0); e != nullptr && e->weight >= epsilon) {
            entry.edge_type = e->type;
            entry.src = e->src;
            entry.dst = e->dst;
            entry.weight = e->weight;
        } else {
            entry.floor = true;
            entry.weight = epsilon;
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace dkg::reasoning
