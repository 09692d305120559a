/**
 * @file lexicon.hpp
 * @brief Gazetteer, context table and relation-pattern table that drive the
 *        reference extractor.
 *
 * Lexicon JSON:
 *
 *   { "contexts": { "general": {}, "cardiology": {"Disease": 0.5} },
 *     "entries":  { "fever": {"entity_type": "Symptom", "score": 1.0},
 *                   "cold":  [{"entity_type": "Symptom", "score": 1.0},
 *                             {"entity_type": "Disease", "score": 1.0}] } }
 *
 * A document without "entries" is read as a bare surface -> entry mapping
 * with the single context "general".
 */

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dkg/extraction/text.hpp"
#include "dkg/graph/types.hpp"

namespace dkg::extraction {

using graph::EdgeType;
using graph::NodeType;

inline constexpr std::string_view kDefaultContext = "general";

struct LexiconEntry {
    NodeType entity_type = NodeType::Symptom;
    double score = 1.0;

    friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

class Lexicon {
public:
    Lexicon();

    /// `surface` is normalized with preprocess() before insertion. Re-adding
    /// an existing (surface, type) overwrites its score.
    void add(std::string_view surface, NodeType type, double score = 1.0);

    /// Register a context tag with per-type score bonuses.
    void add_context(std::string tag, std::map<NodeType, double> bonuses = {});

    /// Entries for a normalized surface ("sharp chest pain"), or nullptr.
    const std::vector<LexiconEntry>* find(const std::string& normalized) const;

    bool has_context(std::string_view tag) const;
    double bonus(std::string_view tag, NodeType type) const;

    std::size_t max_span_tokens() const noexcept { return max_span_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const std::map<std::string, std::vector<LexiconEntry>>& entries() const noexcept {
        return entries_;
    }
    const std::map<std::string, std::map<NodeType, double>, std::less<>>& contexts() const noexcept {
        return contexts_;
    }

    static Lexicon from_json(std::string_view document);
    std::string to_json() const;

    friend bool operator==(const Lexicon&, const Lexicon&) = default;

private:
    std::map<std::string, std::vector<LexiconEntry>> entries_;
    std::map<std::string, std::map<NodeType, double>, std::less<>> contexts_;
    std::size_t max_span_ = 0;
};

/// Maps an ordered pair of entity types (in text order) to a typed relation.
/// Triggered patterns fire only when one of their trigger tokens appears
/// between the two mentions; untriggered patterns are fallbacks used when no
/// triggered pattern for the pair fired.
struct RelationPattern {
    NodeType first = NodeType::Symptom;
    NodeType second = NodeType::Disease;
    std::vector<std::string> triggers;
    EdgeType edge_type = EdgeType::Associative;
    bool reversed = false;  ///< edge runs second -> first
    double score = 1.0;
};

struct PatternMatch {
    const RelationPattern* pattern = nullptr;
    double prob = 0.0;  ///< softmax over the matched patterns' scores
};

class PatternTable {
public:
    PatternTable() = default;
    explicit PatternTable(std::vector<RelationPattern> patterns) : patterns_(std::move(patterns)) {}

    /// Medical defaults: Causal, Diagnostic, Therapeutic, SideEffect, ...
    static PatternTable defaults();

    std::vector<PatternMatch> match(NodeType first, NodeType second,
                                    std::span<const std::string> between) const;

    const std::vector<RelationPattern>& patterns() const noexcept { return patterns_; }

private:
    std::vector<RelationPattern> patterns_;
};

}  // namespace dkg::extraction
