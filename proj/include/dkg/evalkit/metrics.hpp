/**
 * @file metrics.hpp
 * @brief Pure evaluation metrics: classification rates, MUE, coverage, GAS,
 *        extraction accuracy, Cohen's kappa and the paired t statistic.
 */

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dkg/graph/knowledge_graph.hpp"

namespace dkg::evalkit {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
};

/// Each rate is nullopt when its denominator is zero.
struct ClassificationMetrics {
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
};

ClassificationMetrics classification_metrics(const ConfusionCounts& c);

/// Throws UndefinedMetric naming the metric when `value` is empty.
double require(const std::optional<double>& value, const char* metric);

/// (1/N) sum |U_i - U*_i|. Throws LengthMismatch, EmptyInput.
double mue(std::span<const double> predicted, std::span<const double> optimal);

/// Present truth nodes (by id) and edges (by src, dst, type) over all truth
/// elements. Throws EmptyGroundTruth.
double semantic_coverage(const graph::KnowledgeGraph& g, const graph::KnowledgeGraph& truth);

/// Like semantic_coverage, but a node also needs the truth type and label
/// and an edge needs both endpoints integrated.
double gas(const graph::KnowledgeGraph& g, const graph::KnowledgeGraph& truth);

struct EntityMention {
    std::string doc_id;
    graph::NodeType type = graph::NodeType::Symptom;
    std::string surface;  ///< normalized

    friend auto operator<=>(const EntityMention&, const EntityMention&) = default;
};

/// |found intersect truth| / |truth|, duplicates ignored. Throws EmptyGroundTruth.
double extraction_accuracy(std::span<const EntityMention> found, std::span<const EntityMention> truth);

/// Paired categorical ratings from two raters.
struct RaterTable {
    std::vector<std::string> a;
    std::vector<std::string> b;
};

struct KappaResult {
    double kappa = 0.0;
    double p_observed = 0.0;
    double p_expected = 0.0;
};

/// Throws LengthMismatch, EmptyInput, DegenerateMarginals (P_e = 1).
KappaResult cohens_kappa_detail(const RaterTable& t);
double cohens_kappa(const RaterTable& t);

/// Two whitespace- or comma-separated columns per line; '#' starts a comment.
RaterTable parse_rater_table(const std::string& text);

struct TTest {
    double t = 0.0;
    std::size_t df = 0;
};

/// t = mean(d) / (sd(d) / sqrt(N)), d = x - y. Throws LengthMismatch,
/// EmptyInput (N < 2), ZeroVariance.
TTest paired_t(std::span<const double> x, std::span<const double> y);

}  // namespace dkg::evalkit
