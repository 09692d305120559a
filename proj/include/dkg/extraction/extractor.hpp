/**
 * @file extractor.hpp
 * @brief Candidate extraction, confidence scoring and threshold filtering.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dkg/extraction/lexicon.hpp"
#include "dkg/extraction/text.hpp"
#include "dkg/graph/knowledge_graph.hpp"

namespace dkg::extraction {

enum class DocumentSource { ClinicalReport, Article, PatientRecord, Synthetic };

std::string_view to_string(DocumentSource s) noexcept;
std::optional<DocumentSource> document_source_from_string(std::string_view s) noexcept;

struct Document {
    std::string doc_id;
    DocumentSource source = DocumentSource::Synthetic;
    std::string text;
    std::string context_tag;

    friend bool operator==(const Document&, const Document&) = default;
};

struct CandidateEntity {
    std::string surface;  ///< normalized tokens joined by ' '
    NodeType entity_type = NodeType::Symptom;
    double prob = 0.0;    ///< P(e | text, context), softmax within one span
    std::vector<double> embedding;
    double confidence = 0.5;
    std::string provenance;  ///< doc_id
    std::size_t position = 0;  ///< index of the mention span within the document

    friend bool operator==(const CandidateEntity&, const CandidateEntity&) = default;
};

struct CandidateRelation {
    std::string src_surface;
    std::string dst_surface;
    NodeType src_type = NodeType::Symptom;
    NodeType dst_type = NodeType::Disease;
    EdgeType edge_type = EdgeType::Associative;
    double prob = 0.0;  ///< P(e_i, e_j | document)
    std::string provenance;

    friend bool operator==(const CandidateRelation&, const CandidateRelation&) = default;
};

struct Candidates {
    std::vector<CandidateEntity> entities;
    std::vector<CandidateRelation> relations;

    void append(Candidates other);
    bool empty() const noexcept { return entities.empty() && relations.empty(); }

    friend bool operator==(const Candidates&, const Candidates&) = default;
};

/// Pluggable extraction backend.
class ExtractorPort {
public:
    virtual ~ExtractorPort() = default;
    virtual Candidates extract(const Document& doc, std::string_view context) const = 0;
};

/// Deterministic gazetteer extractor. Mentions are found by greedy
/// longest-match over normalized tokens; every lexicon entry for a matched
/// surface becomes a candidate whose probability is the softmax of
/// (entry score + context bonus). Co-occurring mentions are paired through
/// the pattern table.
class LexiconExtractor final : public ExtractorPort {
public:
    explicit LexiconExtractor(Lexicon lexicon, PatternTable patterns = PatternTable::defaults(),
                              std::size_t embedding_dim = kDefaultEmbeddingDim);

    /// Throws UnknownContextTag when `context` is not configured and
    /// InvalidConfig when the lexicon is empty.
    Candidates extract(const Document& doc, std::string_view context) const override;

    const Lexicon& lexicon() const noexcept { return lexicon_; }
    std::size_t embedding_dim() const noexcept { return dim_; }

private:
    Lexicon lexicon_;
    PatternTable patterns_;
    std::size_t dim_;
};

struct FusionWeights {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
};

/// Sim(c, G): max cosine between c.embedding and the embeddings of nodes of
/// the same type, floored at 0 (0 for a graph without such nodes).
double graph_similarity(const CandidateEntity& c, const graph::KnowledgeGraph& g);

double sigmoid(double x) noexcept;

/// Conf = sigmoid(alpha * prob + beta * Sim(c, G)).
double confidence(const CandidateEntity& c, const graph::KnowledgeGraph& g, const FusionWeights& w);

/// Fill in `confidence` for every entity candidate.
void score_candidates(Candidates& cs, const graph::KnowledgeGraph& g, const FusionWeights& w);

/// Entities with confidence strictly greater than tau, order preserved.
std::vector<CandidateEntity> filter_candidates(std::span<const CandidateEntity> cs, double tau);

/// filter_candidates on the entities; a relation survives when both of its
/// endpoint mentions survived in the same document.
Candidates filter_candidates(const Candidates& cs, double tau);

}  // namespace dkg::extraction
