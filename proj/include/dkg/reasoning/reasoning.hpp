/**
 * @file reasoning.hpp
 * @brief Bayesian diagnosis over graph edge weights and utility-optimal,
 *        budget-constrained treatment recommendation.
 *
 * All functions are read-only over the graph and safe to call concurrently.
 */

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dkg/graph/knowledge_graph.hpp"

namespace dkg::reasoning {

using graph::EdgeType;
using graph::KnowledgeGraph;
using graph::NodeId;

using SymptomSet = std::vector<NodeId>;

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultDiagnosisThreshold = 0.2;

struct DiagnosisOptions {
    double epsilon = kDefaultEpsilon;
    /// Edges lighter than this are ignored, as if pruned at that threshold.
    double min_edge_weight = 0.0;
};

/// P(S|d) = prod_{s in S} max(w(s,d), epsilon), where w(s,d) is the heaviest
/// Diagnostic or Causal edge between s and d in either direction.
/// Symptoms absent from the graph contribute epsilon.
double likelihood(const KnowledgeGraph& g, const SymptomSet& symptoms, const NodeId& disease,
                  const DiagnosisOptions& options = {});

struct PosteriorEntry {
    NodeId disease;
    double probability = 0.0;

    friend bool operator==(const PosteriorEntry&, const PosteriorEntry&) = default;
};

struct Posterior {
    std::vector<PosteriorEntry> entries;  ///< descending probability, ties by id
    double epsilon = kDefaultEpsilon;

    double probability_of(const NodeId& disease) const noexcept;
    /// Diseases with probability strictly above `threshold`, in entry order.
    std::vector<NodeId> above(double threshold) const;

    friend bool operator==(const Posterior&, const Posterior&) = default;
};

/// P(d|S) proportional to P(S|d) P(d) over every Disease node. Priors come
/// from Node::prior; unset priors default to 1/|D|.
Posterior diagnose(const KnowledgeGraph& g, const SymptomSet& symptoms, const DiagnosisOptions& options = {});

struct PatientProfile {
    NodeId id;
    std::map<std::string, double> features;  ///< age, comorbidity and allergy flags, ...
};

struct TreatmentOption {
    NodeId id;
    std::map<NodeId, double> efficacy_by_disease;
    std::map<std::string, double> risk_features;
    double cost = 0.0;
};

struct UtilityWeights {
    double w1 = 1.0;
    double w2 = 1.0;
};

/// clamp(sum over shared features of risk_features[f] * profile.features[f], 0, 1)
double risk(const TreatmentOption& t, const PatientProfile& p);

/// U = w1 * Efficacy(t, d) - w2 * Risk(t, p); efficacy 0 when d is not listed.
double utility(const TreatmentOption& t, const NodeId& disease, const PatientProfile& p,
               const UtilityWeights& w);

/// Fill efficacy entries missing from each option's table with the weight
/// of the option's Therapeutic edge to that disease. Explicit table values
/// take precedence; diseases with neither stay absent (efficacy 0).
std::vector<TreatmentOption> with_graph_efficacy(std::vector<TreatmentOption> options,
                                                 const KnowledgeGraph& g);

/// Every Treatment and Medication node as an option. Node attributes:
/// "cost", "risk:<feature>", "efficacy:<disease id>"; Therapeutic edges
/// supply the remaining efficacies.
std::vector<TreatmentOption> options_from_graph(const KnowledgeGraph& g);

/// Profile features from a PatientProfile node's attributes.
PatientProfile profile_from_graph(const KnowledgeGraph& g, const NodeId& id);

struct Budget {
    double c_max = 0.0;
    double eta = 0.05;            ///< subgradient step
    std::size_t max_iter = 200;
    std::size_t max_plan_size = 1;  ///< treatments per plan, 1..3

    void validate() const;
};

inline constexpr std::size_t kMaxPlanSize = 3;
inline constexpr std::size_t kExactOptionLimit = 20;

struct DiseaseBreakdown {
    NodeId disease;
    double probability = 0.0;
    double utility = 0.0;  ///< summed over the chosen treatments
};

struct TreatmentPlan {
    std::vector<NodeId> chosen;  ///< sorted ids
    double expected_utility = 0.0;
    double total_cost = 0.0;
    double lambda_final = 0.0;  ///< final penalty multiplier (>= 0)
    bool budget_ok = true;
    std::vector<DiseaseBreakdown> per_disease_breakdown;
    std::string method;  ///< "argmax", "exact" or "subgradient"
    /// Lagrangian dual bound and best primal found by the subgradient path.
    std::optional<double> dual_bound;
    std::optional<double> subgradient_utility;
};

/// argmax_t sum_d P(d|S) U(t, d, p); ties by treatment id. Throws NoOptions.
TreatmentPlan recommend(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                        const PatientProfile& profile, const UtilityWeights& w);

/// Best plan (1..max_plan_size options, additive cost and expected utility)
/// with total cost <= c_max. Exact enumeration for <= 20 options, with the
/// subgradient path run alongside as a cross-check; Lagrangian relaxation
/// with projected subgradient steps on the multiplier above that.
/// Throws NoOptions, NoFeasiblePlan.
TreatmentPlan recommend_constrained(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                                    const PatientProfile& profile, const UtilityWeights& w,
                                    const Budget& budget);

/// The Lagrangian/subgradient solver alone, for any option count.
TreatmentPlan recommend_subgradient(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                                    const PatientProfile& profile, const UtilityWeights& w,
                                    const Budget& budget);

struct EvidenceEntry {
    NodeId symptom;
    bool floor = false;  ///< no edge; epsilon was used
    std::optional<EdgeType> edge_type;
    NodeId src;
    NodeId dst;
    double weight = 0.0;  ///< edge weight, or epsilon when floor
};

/// One entry per symptom, in input order. Throws DiseaseNotFound.
std::vector<EvidenceEntry> explain(const KnowledgeGraph& g, const NodeId& disease, const SymptomSet& symptoms,
                                   double epsilon = kDefaultEpsilon);

}  // namespace dkg::reasoning
