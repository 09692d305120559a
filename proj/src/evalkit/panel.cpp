/**
 * @file panel.cpp
 * @brief World evaluation and panel rendering.
 */

#include "dkg/evalkit/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "dkg/error.hpp"

namespace dkg::evalkit {

namespace {

std::string format(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string ratio(const std::optional<double>& v) { return v ? format("%.4f", *v) : "n/a"; }

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1.0));
}

}  // namespace

WorldRun run_world(const GroundTruthWorld& world, const TunableParams& params, const fusion::FusionOptions& options,
                   std::size_t docs_per_batch) {
    WorldRun run;
    const extraction::LexiconExtractor extractor(world.lexicon);
    run.ingest = fusion::ingest(run.graph, world.documents(), extractor, params, options, docs_per_batch);
    return run;
}

std::vector<EntityMention> found_mentions(const extraction::Candidates& accepted) {
    std::vector<EntityMention> out;
    out.reserve(accepted.entities.size());
    for (const auto& c : accepted.entities) out.push_back({c.provenance, c.entity_type, c.surface});
    return out;
}

double EvalReport::median_batch_ms() const {
    if (batch_ms.empty()) return 0.0;
    auto v = batch_ms;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

EvalReport evaluate(const EvalOptions& options) {
    const GroundTruthWorld world = generate_world(options.seed, options.sizes, options.noise, options.world);
    const WorldRun run = run_world(world, options.params, options.fusion, options.docs_per_batch);
    const graph::KnowledgeGraph& g = run.graph;

    EvalReport r;
    r.seed = options.seed;
    r.noise = options.noise;
    r.cases = world.cases.size();
    r.documents = run.ingest.documents;
    r.final_nodes = g.node_count();
    r.final_edges = g.edge_count();
    r.batch_budget = g.capacity().batch_budget;
    r.max_edges = g.capacity().max_edges;
    for (const auto& b : run.ingest.reports) {
        r.batch_ms.push_back(b.elapsed_ms);
        r.max_batch_additions = std::max(r.max_batch_additions, b.nodes_added + b.edges_added);
    }

    // Extraction, overall and per document.
    const auto found = found_mentions(run.ingest.accepted);
    const auto truth = world.truth_mentions();
    r.extraction_accuracy = extraction_accuracy(found, truth);
    {
        const std::set<EntityMention> got(found.begin(), found.end());
        std::vector<double> per_doc;
        for (const auto& a : world.corpus) {
            std::size_t hit = 0;
            for (const auto& m : a.entities) hit += got.count(m);
            per_doc.push_back(static_cast<double>(hit) / static_cast<double>(a.entities.size()));
        }
        r.extraction_sd = sample_sd(per_doc);
    }
    const auto truth_graph = mentioned_truth(world);
    r.coverage = semantic_coverage(g, truth_graph);
    r.gas = gas(g, truth_graph);

    // Diagnosis and recommendation per case.
    const auto& diseases = world.graph.nodes_of_type(graph::NodeType::Disease);
    std::vector<reasoning::TreatmentOption> options_on_graph = world.catalog;
    for (auto& t : options_on_graph) t.efficacy_by_disease.clear();
    options_on_graph = reasoning::with_graph_efficacy(std::move(options_on_graph), g);
    std::map<graph::NodeId, const reasoning::TreatmentOption*> truth_options;
    for (const auto& t : world.catalog) truth_options[t.id] = &t;

    ConfusionCounts cm;
    std::size_t precise = 0;
    std::vector<double> predicted_u;
    std::vector<double> optimal_u;
    std::map<graph::NodeId, std::pair<std::vector<double>, std::vector<double>>> by_disease;  // standard, complex
    const reasoning::UtilityWeights w{options.params.w1, options.params.w2};
    for (const auto& c : world.cases) {
        reasoning::Posterior post;
        try {
            post = reasoning::diagnose(g, c.symptoms, {options.epsilon, 0.0});
        } catch (const Error&) {
            post.entries.clear();
        }
        for (const auto& d : diseases) {
            const bool predicted = post.probability_of(d) > options.diagnosis_threshold;
            const bool actual = d == c.true_disease;
            if (predicted && actual) ++cm.tp;
            else if (predicted) ++cm.fp;
            else if (actual) ++cm.fn;
            else ++cm.tn;
        }
        auto& slot = by_disease[c.true_disease];
        (c.complex ? slot.second : slot.first).push_back(post.probability_of(c.true_disease));

        if (post.entries.empty()) continue;
        const auto profile = reasoning::profile_from_graph(world.graph, c.profile);
        const auto plan = reasoning::recommend(post, options_on_graph, profile, w);
        const auto* chosen = truth_options.at(plan.chosen.front());
        precise += chosen->efficacy_by_disease.count(c.true_disease);
        predicted_u.push_back(reasoning::utility(*chosen, c.true_disease, profile, {1.0, 1.0}));
        optimal_u.push_back(c.optimal_utility);
    }
    r.diagnosis = classification_metrics(cm);
    if (!world.cases.empty()) {
        r.recommendation_precision = static_cast<double>(precise) / static_cast<double>(world.cases.size());
    }
    if (!predicted_u.empty()) r.mue = mue(predicted_u, optimal_u);

    std::vector<double> standard;
    std::vector<double> complex;
    for (const auto& [d, pair] : by_disease) {
        if (pair.first.empty() || pair.second.empty()) continue;
        standard.push_back(std::accumulate(pair.first.begin(), pair.first.end(), 0.0) / static_cast<double>(pair.first.size()));
        complex.push_back(std::accumulate(pair.second.begin(), pair.second.end(), 0.0) / static_cast<double>(pair.second.size()));
    }
    try {
        r.complex_vs_standard = paired_t(standard, complex);
    } catch (const Error&) {
        r.complex_vs_standard.reset();
    }

    if (options.raters) r.kappa = cohens_kappa_detail(*options.raters);
    try {
        r.likert = feedback::aggregate_likert(options.feedback);
    } catch (const Error&) {
        r.likert.reset();
    }
    return r;
}

std::string EvalReport::to_text() const {
    std::vector<std::string> values;
    values.push_back(ratio(diagnosis.accuracy));
    values.push_back(ratio(recommendation_precision));
    values.push_back(ratio(coverage));
    values.push_back(format("%.4f s median", median_batch_ms() / 1000.0) + " over " + std::to_string(batch_ms.size()) +
                     " batches (" + std::to_string(batch_budget) + " nodes/edges per batch, max " +
                     std::to_string(max_edges) + " edges)");
    if (likert) {
        values.push_back(feedback::format_likert(likert->accuracy));
        values.push_back(feedback::format_likert(likert->reliability));
        values.push_back(feedback::format_likert(likert->usability));
    } else {
        values.insert(values.end(), 3, "n/a");
    }
    values.push_back(kappa ? format("%.6f", kappa->kappa) : "n/a");
    values.push_back(ratio(extraction_accuracy) + " (± " + format("%.4f", extraction_sd) + ")");
    values.push_back(ratio(gas));

    std::string out = "Metric\tResult\n";
    for (std::size_t i = 0; i < kPanelRows.size(); ++i) {
        out += std::string(kPanelRows[i]) + "\t" + values[i] + "\n";
    }
    out += "Mean Utility Error (MUE)\t" + (mue ? format("%.4f", *mue) : std::string("n/a")) + "\n";
    out += "Paired t-test (standard vs complex cases)\t";
    if (complex_vs_standard) {
        out += format("t = %.4f", complex_vs_standard->t) + ", df = " + std::to_string(complex_vs_standard->df) + "\n";
    } else {
        out += "n/a\n";
    }
    out += "# seed " + std::to_string(seed) + ", noise " + format("%.2f", noise) + ", " + std::to_string(documents) +
           " documents, " + std::to_string(cases) + " cases, graph " + std::to_string(final_nodes) + " nodes / " +
           std::to_string(final_edges) + " edges\n";
    return out;
}

}  // namespace dkg::evalkit
