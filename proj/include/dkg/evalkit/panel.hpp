/**
 * @file panel.hpp
 * @brief End-to-end evaluation on a synthetic world and the tab-separated
 *        metric panel.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dkg/evalkit/metrics.hpp"
#include "dkg/evalkit/world.hpp"
#include "dkg/feedback/feedback.hpp"
#include "dkg/fusion/ingest.hpp"
#include "dkg/params.hpp"

namespace dkg::evalkit {

/// Row names of the panel, in print order.
inline constexpr std::array<std::string_view, 10> kPanelRows = {
    "Diagnostic Accuracy",
    "Treatment Recommendation Precision",
    "Semantic Coverage",
    "Graph Update Efficiency",
    "Clinician Feedback (Mean Likert Score: Accuracy)",
    "Clinician Feedback (Mean Likert Score: Reliability)",
    "Clinician Feedback (Mean Likert Score: Applicability)",
    "Clinician Feedback (Cohen's Kappa)",
    "Semantic Extraction Accuracy",
    "Graph Alignment Score (GAS)",
};

struct EvalOptions {
    std::uint64_t seed = 42;
    double noise = 0.0;
    WorldSizes sizes;
    WorldOptions world;
    TunableParams params;
    double diagnosis_threshold = reasoning::kDefaultDiagnosisThreshold;
    double epsilon = reasoning::kDefaultEpsilon;
    fusion::FusionOptions fusion;
    std::size_t docs_per_batch = fusion::kDefaultDocsPerBatch;
    std::optional<RaterTable> raters;
    std::vector<feedback::FeedbackEvent> feedback;
};

struct WorldRun {
    graph::KnowledgeGraph graph;
    fusion::IngestResult ingest;
};

/// Phases 1-3 on the world's corpus with its lexicon, from an empty graph.
WorldRun run_world(const GroundTruthWorld& world, const TunableParams& params,
                   const fusion::FusionOptions& options = {},
                   std::size_t docs_per_batch = fusion::kDefaultDocsPerBatch);

/// (doc, type, surface) of every accepted entity candidate.
std::vector<EntityMention> found_mentions(const extraction::Candidates& accepted);

struct EvalReport {
    std::uint64_t seed = 0;
    double noise = 0.0;
    std::size_t cases = 0;
    std::size_t documents = 0;
    std::size_t final_nodes = 0;
    std::size_t final_edges = 0;

    ClassificationMetrics diagnosis;  ///< over (case, disease) pairs at the threshold
    std::optional<double> recommendation_precision;
    std::optional<double> mue;
    double coverage = 0.0;
    double gas = 0.0;
    double extraction_accuracy = 0.0;
    double extraction_sd = 0.0;  ///< across documents
    std::vector<double> batch_ms;
    std::size_t max_batch_additions = 0;
    std::uint64_t batch_budget = 0;
    std::uint64_t max_edges = 0;
    std::optional<feedback::LikertSummary> likert;
    std::optional<KappaResult> kappa;
    std::optional<TTest> complex_vs_standard;  ///< per-disease posterior of the true disease

    double median_batch_ms() const;
    /// "Metric\tResult" header, one line per panel row, then extra rows.
    std::string to_text() const;
};

EvalReport evaluate(const EvalOptions& options);

}  // namespace dkg::evalkit
