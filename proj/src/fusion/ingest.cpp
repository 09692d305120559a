#include "dkg/fusion/ingest.hpp"

#include <algorithm>

#include "dkg/error.hpp"

namespace dkg::fusion {

IngestResult ingest(KnowledgeGraph& g, const std::vector<extraction::Document>& docs,
                    const extraction::ExtractorPort& extractor, const TunableParams& params,
                    const FusionOptions& options, std::size_t docs_per_batch) {
    if (docs_per_batch == 0) throw Error(ErrorCode::InvalidConfig, "docs_per_batch must be > 0");
    params.validate();
    const extraction::FusionWeights weights{params.alpha, params.beta};

    IngestResult result;
    for (std::size_t start = 0; start < docs.size(); start += docs_per_batch) {
        const std::size_t end = std::min(docs.size(), start + docs_per_batch);
        extraction::Candidates accepted;
        try {
            extraction::Candidates batch;
            for (std::size_t i = start; i < end; ++i) batch.append(extractor.extract(docs[i], docs[i].context_tag));
            extraction::score_candidates(batch, g, weights);
            accepted = extraction::filter_candidates(batch, params.tau);
        } catch (const Error& e) {
            throw e.with_phase(std::string(kPhaseExtraction));
        }
        try {
            result.reports.push_back(apply_batch(g, accepted, params, options));
        } catch (const Error& e) {
            throw e.with_phase(std::string(kPhaseGraphUpdate));
        }
        result.accepted.append(std::move(accepted));
        result.documents += end - start;
    }
    return result;
}

}  // namespace dkg::fusion
