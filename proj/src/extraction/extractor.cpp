#include "dkg/extraction/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "dkg/error.hpp"

namespace dkg::extraction {

std::string_view to_string(DocumentSource s) noexcept {
    switch (s) {
        case DocumentSource::ClinicalReport: return "clinical_report";
        case DocumentSource::Article: return "article";
        case DocumentSource::PatientRecord: return "patient_record";
        case DocumentSource::Synthetic: return "synthetic";
    }
    return "synthetic";
}

std::optional<DocumentSource> document_source_from_string(std::string_view s) noexcept {
    for (auto src : {DocumentSource::ClinicalReport, DocumentSource::Article,
                     DocumentSource::PatientRecord, DocumentSource::Synthetic}) {
        if (to_string(src) == s) return src;
    }
    return std::nullopt;
}

void Candidates::append(Candidates other) {
    entities.insert(entities.end(), std::make_move_iterator(other.entities.begin()),
                    std::make_move_iterator(other.entities.end()));
    relations.insert(relations.end(), std::make_move_iterator(other.relations.begin()),
                     std::make_move_iterator(other.relations.end()));
}

LexiconExtractor::LexiconExtractor(Lexicon lexicon, PatternTable patterns, std::size_t embedding_dim)
    : lexicon_(std::move(lexicon)), patterns_(std::move(patterns)), dim_(embedding_dim) {}

namespace {

struct Mention {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last token
    std::string surface;
    std::vector<std::pair<NodeType, double>> types;  // (type, prob)
};

}  // namespace

Candidates LexiconExtractor::extract(const Document& doc, std::string_view context) const {
    if (lexicon_.empty()) throw Error(ErrorCode::InvalidConfig, "reference extractor needs a nonempty lexicon");
    if (!lexicon_.has_context(context)) {
        throw Error(ErrorCode::UnknownContextTag, "context tag '" + std::string(context) + "' is not configured");
    }

    const Tokens tokens = preprocess(doc.text);
    std::vector<Mention> mentions;
    for (std::size_t i = 0; i < tokens.size();) {
        bool matched = false;
        const std::size_t longest = std::min(lexicon_.max_span_tokens(), tokens.size() - i);
        for (std::size_t len = longest; len >= 1; --len) {
            std::string surface = tokens[i];
            for (std::size_t k = 1; k < len; ++k) surface += " " + tokens[i + k];
            const auto* entries = lexicon_.find(surface);
            if (entries == nullptr) continue;

            Mention m{i, i + len, std::move(surface), {}};
            double max_score = -INFINITY;
            std::vector<double> scores;
            for (const auto& e : *entries) {
                scores.push_back(e.score + lexicon_.bonus(context, e.entity_type));
                max_score = std::max(max_score, scores.back());
            }
            double z = 0.0;
            for (double s : scores) z += std::exp(s - max_score);
            for (std::size_t k = 0; k < entries->size(); ++k) {
                m.types.emplace_back((*entries)[k].entity_type, std::exp(scores[k] - max_score) / z);
            }
            mentions.push_back(std::move(m));
            i += len;
            matched = true;
            break;
        }
        if (!matched) ++i;
    }

    Candidates out;
    for (std::size_t pos = 0; pos < mentions.size(); ++pos) {
        const Mention& m = mentions[pos];
        const Tokens surface_tokens(tokens.begin() + static_cast<std::ptrdiff_t>(m.begin),
                                    tokens.begin() + static_cast<std::ptrdiff_t>(m.end));
        const auto embedding = embed(surface_tokens, dim_);
        for (const auto& [type, prob] : m.types) {
            out.entities.push_back({m.surface, type, prob, embedding, 0.5, doc.doc_id, pos});
        }
    }

    for (std::size_t a = 0; a < mentions.size(); ++a) {
        for (std::size_t b = a + 1; b < mentions.size(); ++b) {
            const Mention& first = mentions[a];
            const Mention& second = mentions[b];
            if (first.surface == second.surface) continue;
            const std::span<const std::string> between(tokens.data() + first.end,
                                                       second.begin - first.end);
            for (const auto& [t1, p1] : first.types) {
                for (const auto& [t2, p2] : second.types) {
                    for (const auto& match : patterns_.match(t1, t2, between)) {
                        CandidateRelation r;
                        if (match.pattern->reversed) {
                            r = {second.surface, first.surface, t2, t1, match.pattern->edge_type, 0.0, doc.doc_id};
                        } else {
                            r = {first.surface, second.surface, t1, t2, match.pattern->edge_type, 0.0, doc.doc_id};
                        }
                        r.prob = p1 * p2 * match.prob;
                        out.relations.push_back(std::move(r));
                    }
                }
            }
        }
    }
    return out;
}

void FusionWeights::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0) {
        throw Error(ErrorCode::InvalidConfig, "fusion weights must be finite and nonnegative");
    }
}

double graph_similarity(const CandidateEntity& c, const graph::KnowledgeGraph& g) {
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < c.embedding.size(); ++i) {
        if (c.embedding[i] != 0.0) nonzero.push_back(i);
    }
    if (nonzero.empty()) return 0.0;

    double best = 0.0;
    for (const auto& id : g.nodes_of_type(c.entity_type)) {
        const auto& emb = g.node(id).embedding;
        if (emb.size() != c.embedding.size()) continue;
        double dot = 0.0;
        for (std::size_t i : nonzero) dot += c.embedding[i] * emb[i];
        best = std::max(best, dot);
    }
    return std::min(best, 1.0);
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double confidence(const CandidateEntity& c, const graph::KnowledgeGraph& g, const FusionWeights& w) {
    return sigmoid(w.alpha * c.prob + w.beta * graph_similarity(c, g));
}

void score_candidates(Candidates& cs, const graph::KnowledgeGraph& g, const FusionWeights& w) {
    w.validate();
    for (auto& c : cs.entities) c.confidence = confidence(c, g, w);
}

std::vector<CandidateEntity> filter_candidates(std::span<const CandidateEntity> cs, double tau) {
    std::vector<CandidateEntity> kept;
    for (const auto& c : cs) {
        if (c.confidence > tau) kept.push_back(c);
    }
    return kept;
}

Candidates filter_candidates(const Candidates& cs, double tau) {
    Candidates out;
    out.entities = filter_candidates(std::span<const CandidateEntity>(cs.entities), tau);
    std::set<std::tuple<std::string, std::string, NodeType>> accepted;
    for (const auto& e : out.entities) accepted.emplace(e.provenance, e.surface, e.entity_type);
    for (const auto& r : cs.relations) {
        if (accepted.count({r.provenance, r.src_surface, r.src_type}) &&
            accepted.count({r.provenance, r.dst_surface, r.dst_type})) {
            out.relations.push_back(r);
        }
    }
    return out;
}

}  // namespace dkg::extraction
