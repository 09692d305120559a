/**
 * @file metrics.cpp
 * @brief Evaluation metrics.
 */

#include "dkg/evalkit/metrics.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dkg/error.hpp"

namespace dkg::evalkit {

namespace {

std::optional<double> ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

std::size_t truth_size(const graph::KnowledgeGraph& truth) {
    const std::size_t n = truth.node_count() + truth.edge_count();
    if (n == 0) throw Error(ErrorCode::EmptyGroundTruth, "ground truth has no elements");
    return n;
}

}  // namespace

ClassificationMetrics classification_metrics(const ConfusionCounts& c) {
    const auto tp = static_cast<double>(c.tp);
    const auto tn = static_cast<double>(c.tn);
    const auto fp = static_cast<double>(c.fp);
    const auto fn = static_cast<double>(c.fn);
    ClassificationMetrics m;
    m.accuracy = ratio(tp + tn, tp + tn + fp + fn);
    m.precision = ratio(tp, tp + fp);
    m.recall = ratio(tp, tp + fn);
    if (m.precision && m.recall) m.f1 = ratio(2.0 * *m.precision * *m.recall, *m.precision + *m.recall);
    return m;
}

double require(const std::optional<double>& value, const char* metric) {
    if (!value) throw Error(ErrorCode::UndefinedMetric, std::string(metric) + " has a zero denominator");
    return *value;
}

double mue(std::span<const double> predicted, std::span<const double> optimal) {
    if (predicted.size() != optimal.size()) throw Error(ErrorCode::LengthMismatch, "utility lists differ in length");
    if (predicted.empty()) throw Error(ErrorCode::EmptyInput, "no utilities");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::abs(predicted[i] - optimal[i]);
    return sum / static_cast<double>(predicted.size());
}

double semantic_coverage(const graph::KnowledgeGraph& g, const graph::KnowledgeGraph& truth) {
    const std::size_t total = truth_size(truth);
    std::size_t hit = 0;
    for (const auto& [id, n] : truth.nodes()) hit += g.has_node(id) ? 1 : 0;
    for (const auto& [key, e] : truth.edges()) hit += g.has_edge(key) ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(total);
}

double gas(const graph::KnowledgeGraph& g, const graph::KnowledgeGraph& truth) {
    const std::size_t total = truth_size(truth);
    auto integrated = [&](const graph::NodeId& id) {
        const auto* n = g.find_node(id);
        const auto& t = truth.node(id);
        return n != nullptr && n->type == t.type && n->label == t.label;
    };
    std::size_t hit = 0;
    for (const auto& [id, n] : truth.nodes()) hit += integrated(id) ? 1 : 0;
    for (const auto& [key, e] : truth.edges()) {
        hit += (g.has_edge(key) && integrated(key.src) && integrated(key.dst)) ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(total);
}

double extraction_accuracy(std::span<const EntityMention> found, std::span<const EntityMention> truth) {
    const std::set<EntityMention> want(truth.begin(), truth.end());
    if (want.empty()) throw Error(ErrorCode::EmptyGroundTruth, "no truth entities");
    const std::set<EntityMention> got(found.begin(), found.end());
    std::size_t hit = 0;
    for (const auto& m : want) hit += got.count(m);
    return static_cast<double>(hit) / static_cast<double>(want.size());
}

KappaResult cohens_kappa_detail(const RaterTable& t) {
    if (t.a.size() != t.b.size()) throw Error(ErrorCode::LengthMismatch, "rater columns differ in length");
    if (t.a.empty()) throw Error(ErrorCode::EmptyInput, "rater table is empty");
    const double n = static_cast<double>(t.a.size());
    std::map<std::string, double> ma;
    std::map<std::string, double> mb;
    double agree = 0.0;
    for (std::size_t i = 0; i < t.a.size(); ++i) {
        ma[t.a[i]] += 1.0;
        mb[t.b[i]] += 1.0;
        agree += t.a[i] == t.b[i] ? 1.0 : 0.0;
    }
    KappaResult r;
    r.p_observed = agree / n;
    for (const auto& [k, ca] : ma) {
        if (auto it = mb.find(k); it != mb.end()) r.p_expected += (ca / n) * (it->second / n);
    }
    if (r.p_expected >= 1.0) throw Error(ErrorCode::DegenerateMarginals, "expected agreement is 1");
    r.kappa = (r.p_observed - r.p_expected) / (1.0 - r.p_expected);
    return r;
}

double cohens_kappa(const RaterTable& t) { return cohens_kappa_detail(t).kappa; }

RaterTable parse_rater_table(const std::string& text) {
    RaterTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        for (char& ch : line) {
            if (ch == ',' || ch == '\t') ch = ' ';
        }
        std::istringstream fields(line);
        std::string a;
        std::string b;
        std::string extra;
        if (!(fields >> a)) continue;
        if (!(fields >> b) || (fields >> extra)) {
            throw Error(ErrorCode::InvalidField, "rater table line " + std::to_string(line_no) + ": expected two ratings");
        }
        t.a.push_back(std::move(a));
        t.b.push_back(std::move(b));
    }
    return t;
}

TTest paired_t(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "samples differ in length");
    if (x.size() < 2) throw Error(ErrorCode::EmptyInput, "paired t needs at least two pairs");
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mean += x[i] - y[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dev = (x[i] - y[i]) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    if (sd == 0.0) throw Error(ErrorCode::ZeroVariance, "differences have zero variance");
    return {mean / (sd / std::sqrt(n)), x.size() - 1};
}

}  // namespace dkg::evalkit
