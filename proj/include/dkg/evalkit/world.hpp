/**
 * @file world.hpp
 * @brief Deterministic synthetic worlds: a ground-truth graph, a templated
 *        corpus with entity annotations, a lexicon and patient cases with
 *        brute-force optimal treatments.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dkg/evalkit/metrics.hpp"
#include "dkg/extraction/extractor.hpp"
#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::evalkit {

struct WorldSizes {
    std::size_t diseases = 10;
    std::size_t symptoms = 30;
    std::size_t treatments = 15;
    std::size_t profiles = 20;

    /// Throws InvalidSizes: every count positive, at least two symptoms.
    void validate() const;
};

struct AnnotatedDocument {
    extraction::Document doc;
    std::vector<EntityMention> entities;  ///< intended mentions, canonical surfaces
    std::vector<graph::EdgeKey> relations;
    bool corrupted = false;
};

struct WorldCase {
    std::string case_id;
    reasoning::SymptomSet symptoms;
    graph::NodeId true_disease;
    graph::NodeId profile;
    graph::NodeId optimal_treatment;
    double optimal_utility = 0.0;  ///< U* for the true disease, w1 = w2 = 1
    bool complex = false;          ///< every symptom of the disease plus an unrelated one
};

struct GroundTruthWorld {
    std::uint64_t seed = 0;
    double noise_rate = 0.0;
    WorldSizes sizes;
    graph::KnowledgeGraph graph;
    std::vector<AnnotatedDocument> corpus;
    extraction::Lexicon lexicon;
    std::vector<reasoning::TreatmentOption> catalog;  ///< truth efficacy, risk and cost per treatment
    std::vector<WorldCase> cases;

    std::vector<extraction::Document> documents() const;
    std::vector<EntityMention> truth_mentions() const;
};

struct WorldOptions {
    std::size_t cases_per_disease = 4;  ///< alternating standard and complex
};

/// Each disease gets 2-5 symptoms (Diagnostic or Causal) and 1-3
/// treatments (Therapeutic). Every fact is stated by one clinical report and
/// one article sentence. With probability noise_rate a document has one
/// mention corrupted, by swapping its tokens or replacing it with an alias
/// the lexicon lists under three entity types.
/// Throws InvalidSizes, InvalidConfig (noise_rate outside [0,1]).
GroundTruthWorld generate_world(std::uint64_t seed, const WorldSizes& sizes = {}, double noise_rate = 0.0,
                                const WorldOptions& options = {});

/// Truth nodes and edges that at least one document mentions.
graph::KnowledgeGraph mentioned_truth(const GroundTruthWorld& world);

/// Canonical serialization; identical seeds give identical strings.
std::string serialize_world(const GroundTruthWorld& world);

}  // namespace dkg::evalkit
