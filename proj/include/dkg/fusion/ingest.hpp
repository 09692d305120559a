/**
 * @file ingest.hpp
 * @brief Phases 1-3 over a document stream: extract, score, filter and fuse
 *        in fixed-size sub-batches.
 */

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "dkg/extraction/extractor.hpp"
#include "dkg/fusion/fusion.hpp"

namespace dkg::fusion {

inline constexpr std::size_t kDefaultDocsPerBatch = 100;

inline constexpr std::string_view kPhaseIngestion = "ingestion";
inline constexpr std::string_view kPhaseExtraction = "extraction";
inline constexpr std::string_view kPhaseGraphUpdate = "graph_update";
inline constexpr std::string_view kPhaseReasoning = "reasoning";
inline constexpr std::string_view kPhaseFeedback = "feedback";

struct IngestResult {
    std::vector<BatchReport> reports;
    extraction::Candidates accepted;  ///< everything that passed the filter
    std::size_t documents = 0;
};

/// Documents are processed in order, docs_per_batch at a time; each
/// sub-batch is scored against the graph as it stands before that batch.
/// Errors carry the extraction or graph_update phase tag.
IngestResult ingest(KnowledgeGraph& g, const std::vector<extraction::Document>& docs,
                    const extraction::ExtractorPort& extractor, const TunableParams& params,
                    const FusionOptions& options = {}, std::size_t docs_per_batch = kDefaultDocsPerBatch);

}  // namespace dkg::fusion
