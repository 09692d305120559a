// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dkg/error.hpp"
#include "dkg/evalkit/metrics.hpp"
#include "dkg/evalkit/panel.hpp"
#include "dkg/evalkit/world.hpp"
#include "dkg/extraction/extractor.hpp"
#include "dkg/feedback/feedback.hpp"
#include "dkg/fusion/fusion.hpp"
#include "dkg/gateway/engine.hpp"
#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/reasoning/reasoning.hpp"

using namespace dkg;
using graph::EdgeType;
using graph::KnowledgeGraph;
using graph::NodeType;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first few failure messages of one criterion.
class Checker {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
    }
    void close(double a, double b, double rel, const std::string& what) {
        const double scale = std::max({1.0, std::abs(a), std::abs(b)});
        std::ostringstream s;
        s.precision(17);
        s << what << ": got " << a << ", want " << b;
        expect(std::abs(a - b) <= rel * scale, s.str());
    }
    bool ok() const { return failures_ == 0; }
    std::string summary() const { return std::to_string(failures_) + " failure(s): " + messages_; }

private:
    std::size_t failures_ = 0;
    std::string messages_;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

graph::Node make_node(const std::string& id, NodeType t, double relevance = 1.0) {
    graph::Node n;
    n.id = id;
    n.type = t;
    n.label = id;
    n.relevance = relevance;
    return n;
}

graph::Edge make_edge(const std::string& s, const std::string& d, EdgeType t, double w) {
    graph::Edge e;
    e.src = s;
    e.dst = d;
    e.type = t;
    e.weight = w;
    return e;
}

// -- 1. formula oracles ------------------------------------------------------

Outcome formula_oracles() {
    const auto t0 = Clock::now();
    Checker c;
    constexpr double tol = 1e-9;

    KnowledgeGraph g;
    g.add_node(make_node("s:x", NodeType::Symptom));
    g.add_node(make_node("s:y", NodeType::Symptom));
    g.add_node(make_node("d:a", NodeType::Disease));
    g.add_node(make_node("d:b", NodeType::Disease));
    g.add_edge(make_edge("s:x", "d:a", EdgeType::Diagnostic, 0.4));
    c.close(g.update_edge_weight({"s:x", "d:a", EdgeType::Diagnostic}, 0.8, 0.5), 0.5 * 0.4 + 0.5 * 0.8, tol,
            "update_edge_weight");

    extraction::CandidateEntity cand;
    cand.entity_type = NodeType::Symptom;
    cand.prob = 1.0;
    cand.embedding = extraction::embed(extraction::preprocess("fever"));
    KnowledgeGraph with_fever;
    auto fever = make_node("s:fever", NodeType::Symptom);
    fever.embedding = cand.embedding;
    with_fever.add_node(fever);
    c.close(extraction::confidence(cand, with_fever, {1.0, 1.0}), 1.0 / (1.0 + std::exp(-2.0)), tol, "confidence");
    cand.prob = 0.0;
    c.close(extraction::confidence(cand, KnowledgeGraph{}, {1.0, 1.0}), 0.5, tol, "confidence at zero");

    // Posterior: likelihoods 0.6 and 0.2 under uniform priors.
    g.update_edge_weight({"s:x", "d:a", EdgeType::Diagnostic}, 0.6, 0.0);
    g.add_edge(make_edge("s:x", "d:b", EdgeType::Diagnostic, 0.2));
    g.add_edge(make_edge("d:a", "s:y", EdgeType::Causal, 0.5));
    const auto post = reasoning::diagnose(g, {"s:x"});
    c.close(post.probability_of("d:a"), 0.6 / 0.8, tol, "posterior d:a");
    c.close(post.probability_of("d:b"), 0.2 / 0.8, tol, "posterior d:b");
    c.close(reasoning::likelihood(g, {"s:x", "s:y"}, "d:a"), 0.6 * 0.5, tol, "likelihood");

    const reasoning::TreatmentOption t{"t:1", {{"d:a", 0.9}}, {{"f", 0.2}}, 1.0};
    const reasoning::PatientProfile p{"p:1", {{"f", 1.0}}};
    c.close(reasoning::utility(t, "d:a", p, {1.0, 1.0}), 0.9 - 0.2, tol, "utility");

    const std::vector<double> u = {0.5};
    const std::vector<double> us = {0.7};
    c.close(evalkit::mue(u, us), 0.2, tol, "MUE");

    const evalkit::RaterTable table{{"1", "1", "1", "1", "1", "0", "0", "0", "0", "0"},
                                    {"1", "1", "1", "1", "0", "1", "0", "0", "0", "0"}};
    c.close(evalkit::cohens_kappa(table), (0.8 - 0.5) / (1.0 - 0.5), tol, "kappa");

    const auto m = evalkit::classification_metrics({5, 3, 1, 1});
    c.close(m.accuracy.value_or(-1), 8.0 / 10.0, tol, "accuracy");
    const double prec = 5.0 / 6.0;
    c.close(m.f1.value_or(-1), 2 * prec * prec / (prec + prec), tol, "F1");

    const std::vector<double> d = {1, 2, 3};
    const std::vector<double> zeros = {0, 0, 0};
    const auto tt = evalkit::paired_t(d, zeros);
    c.close(tt.t, 2.0 / (1.0 / std::sqrt(3.0)), tol, "paired t");
    c.expect(tt.df == 2, "paired t df");

    c.close(fusion::estimate_link_probability({8, 10, 2}, {0.7, 1.0}), 9.0 / 12.0, tol, "link probability");
    KnowledgeGraph mrf;
    mrf.add_node(make_node("c", NodeType::Symptom, 0.9));
    mrf.add_node(make_node("e", NodeType::Disease));
    mrf.add_edge(make_edge("c", "e", EdgeType::Diagnostic, 0.4));
    c.close(fusion::mrf_score(mrf, fusion::NodeId("c")).retention, std::sqrt(0.36), tol, "MRF retention");

    KnowledgeGraph sized({10, 150});
    sized.add_node(make_node("n0", NodeType::Symptom));
    for (int i = 1; i <= 4; ++i) {
        sized.add_node(make_node("n" + std::to_string(i), NodeType::Symptom));
        sized.add_edge(make_edge("n0", "n" + std::to_string(i), EdgeType::SymptomSymptom, 0.9));
    }
    std::vector<feedback::FeedbackEvent> ten(10);
    for (int i = 0; i < 10; ++i) {
        ten[i].case_id = "c" + std::to_string(i);
        ten[i].diagnosis_correct = ten[i].treatment_accepted = true;
    }
    c.close(feedback::reward(ten, sized, TunableParams{}), 10.0 - 0.5 * 0.4, tol, "reward");

    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "runtime " + fmt("%.3f s", secs));
    return {c.ok(), c.ok() ? "all oracles within 1e-9 in " + fmt("%.4f s", secs) : c.summary()};
}

// -- 2. Bayes normalization ------------------------------------------------

struct RandomDiagnosis {
    KnowledgeGraph graph;
    reasoning::SymptomSet symptoms;
};

RandomDiagnosis random_diagnosis(std::mt19937_64& rng, bool with_priors, double prior_hi) {
    std::uniform_int_distribution<int> nd(1, 8);
    std::uniform_int_distribution<int> ns(1, 10);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::uniform_real_distribution<double> pr(1e-3, prior_hi);
    RandomDiagnosis r;
    const int diseases = nd(rng);
    const int symptoms = ns(rng);
    for (int i = 0; i < diseases; ++i) {
        auto n = make_node("d:" + std::to_string(i), NodeType::Disease);
        if (with_priors) n.prior = pr(rng);
        r.graph.add_node(n);
    }
    for (int i = 0; i < symptoms; ++i) r.graph.add_node(make_node("s:" + std::to_string(i), NodeType::Symptom));
    for (int s = 0; s < symptoms; ++s) {
        for (int d = 0; d < diseases; ++d) {
            const double roll = w(rng);
            const auto sid = "s:" + std::to_string(s);
            const auto did = "d:" + std::to_string(d);
            if (roll < 0.35) r.graph.add_edge(make_edge(sid, did, EdgeType::Diagnostic, w(rng)));
            else if (roll < 0.5) r.graph.add_edge(make_edge(did, sid, EdgeType::Causal, w(rng)));
            else if (roll < 0.6) r.graph.add_edge(make_edge(sid, did, EdgeType::Associative, w(rng)));
        }
    }
    std::uniform_int_distribution<int> pick(0, symptoms - 1);
    const int k = std::uniform_int_distribution<int>(1, symptoms)(rng);
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < k) chosen.insert(pick(rng));
    for (int s : chosen) r.symptoms.push_back("s:" + std::to_string(s));
    return r;
}

// Direct evaluation of P(d|S), independent of the engine's log-space path.
std::map<std::string, double> oracle_posterior(const KnowledgeGraph& g, const reasoning::SymptomSet& symptoms,
                                               double eps) {
    const auto& diseases = g.nodes_of_type(NodeType::Disease);
    std::map<std::string, double> out;
    double z = 0.0;
    for (const auto& d : diseases) {
        double l = 1.0;
        for (const auto& s : symptoms) {
            double best = 0.0;
            for (const auto& [key, e] : g.edges()) {
                const bool touches = (e.src == s && e.dst == d) || (e.src == d && e.dst == s);
                if (touches && (e.type == EdgeType::Diagnostic || e.type == EdgeType::Causal)) best = std::max(best, e.weight);
            }
            l *= std::max(best, eps);
        }
        const auto& prior = g.node(d).prior;
        const double p = prior ? *prior : 1.0 / static_cast<double>(diseases.size());
        out[d] = l * p;
        z += l * p;
    }
    for (auto& [d, v] : out) v /= z;
    return out;
}

Outcome bayes_normalization() {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> scale(0.05, 10.0);
    Checker c;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const bool with_priors = trial % 4 != 0;
        const double factor = scale(rng);
        // Keep scaled priors inside [0,1].
        auto r = random_diagnosis(rng, with_priors, std::min(1.0, 1.0 / factor));
        const auto post = reasoning::diagnose(r.graph, r.symptoms);
        double sum = 0.0;
        for (const auto& e : post.entries) sum += e.probability;
        worst = std::max(worst, std::abs(sum - 1.0));
        c.expect(std::abs(sum - 1.0) <= 1e-9, "trial " + std::to_string(trial) + " sums to " + fmt("%.17g", sum));

        const auto oracle = oracle_posterior(r.graph, r.symptoms, reasoning::kDefaultEpsilon);
        for (const auto& e : post.entries) {
            c.close(e.probability, oracle.at(e.disease), 1e-9, "trial " + std::to_string(trial) + " " + e.disease);
        }

        if (!with_priors) continue;
        KnowledgeGraph scaled = r.graph;
        for (const auto& d : scaled.nodes_of_type(NodeType::Disease)) {
            scaled.set_prior(d, *scaled.node(d).prior * factor);
        }
        const auto post2 = reasoning::diagnose(scaled, r.symptoms);
        std::vector<std::string> a;
        std::vector<std::string> b;
        for (const auto& e : post.entries) a.push_back(e.disease);
        for (const auto& e : post2.entries) b.push_back(e.disease);
        c.expect(a == b, "trial " + std::to_string(trial) + " order changed under prior scaling");
    }
    return {c.ok(), c.ok() ? "1000 posteriors, max |sum - 1| = " + fmt("%.2e", worst) +
                                 ", order invariant under prior scaling, matches direct Bayes oracle"
                           : c.summary()};
}

// -- 3. constrained recommendation --------------------------------------------

Outcome constrained_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Checker c;
    std::size_t exact_matches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int n_opts = std::uniform_int_distribution<int>(1, 20)(rng);
        const int n_dis = std::uniform_int_distribution<int>(1, 4)(rng);
        const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
        const std::vector<std::string> features = {"age_over_65", "renal", "allergy"};

        reasoning::Posterior post;
        double z = 0.0;
        std::vector<double> raw;
        for (int d = 0; d < n_dis; ++d) {
            raw.push_back(u(rng) + 0.01);
            z += raw.back();
        }
        for (int d = 0; d < n_dis; ++d) post.entries.push_back({"d:" + std::to_string(d), raw[d] / z});

        reasoning::PatientProfile profile{"p:1", {}};
        for (const auto& f : features) profile.features[f] = u(rng) < 0.5 ? 1.0 : 0.0;

        std::vector<reasoning::TreatmentOption> opts;
        for (int i = 0; i < n_opts; ++i) {
            reasoning::TreatmentOption t;
            t.id = "t:" + std::to_string(100 + i);
            for (int d = 0; d < n_dis; ++d) {
                if (u(rng) < 0.8) t.efficacy_by_disease["d:" + std::to_string(d)] = u(rng);
            }
            for (const auto& f : features) {
                if (u(rng) < 0.4) t.risk_features[f] = 0.5 * u(rng);
            }
            t.cost = 1.0 + 19.0 * u(rng);
            opts.push_back(std::move(t));
        }
        const reasoning::UtilityWeights w{0.5 + u(rng), 0.5 + u(rng)};
        reasoning::Budget budget;
        budget.c_max = 40.0 * u(rng);
        budget.max_plan_size = k;

        // Brute force over every subset of size 1..k by bitmask.
        std::vector<double> eu(opts.size());
        for (std::size_t i = 0; i < opts.size(); ++i) {
            double risk = 0.0;
            for (const auto& [f, r] : opts[i].risk_features) risk += r * profile.features[f];
            risk = std::clamp(risk, 0.0, 1.0);
            for (const auto& e : post.entries) {
                const auto it = opts[i].efficacy_by_disease.find(e.disease);
                const double eff = it == opts[i].efficacy_by_disease.end() ? 0.0 : it->second;
                eu[i] += e.probability * (w.w1 * eff - w.w2 * risk);
            }
        }
        double best = -INFINITY;
        std::vector<std::string> best_plan;
        for (std::uint32_t mask = 1; mask < (1u << opts.size()); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) > k) continue;
            double cost = 0.0;
            double value = 0.0;
            std::vector<std::string> plan;
            for (std::size_t i = 0; i < opts.size(); ++i) {
                if (mask & (1u << i)) {
                    cost += opts[i].cost;
                    value += eu[i];
                    plan.push_back(opts[i].id);
                }
            }
            if (cost > budget.c_max) continue;
            std::sort(plan.begin(), plan.end());
            // Equal utilities resolve to the lexicographically smallest id list.
            const bool tie = std::abs(value - best) <= 1e-12;
            if ((!tie && value > best) || (tie && plan < best_plan)) {
                best = std::max(best, value);
                best_plan = plan;
            }
        }

        const std::string tag = "instance " + std::to_string(trial);
        if (best_plan.empty()) {
            bool threw = false;
            try {
                reasoning::recommend_constrained(post, opts, profile, w, budget);
            } catch (const dkg::Error& e) {
                threw = e.code() == ErrorCode::NoFeasiblePlan;
            }
            c.expect(threw, tag + ": expected NoFeasiblePlan");
            if (threw) ++exact_matches;
            continue;
        }
        const auto plan = reasoning::recommend_constrained(post, opts, profile, w, budget);
        c.expect(plan.chosen == best_plan, tag + ": plan differs from brute force");
        c.close(plan.expected_utility, best, 1e-9, tag + " utility");
        c.expect(plan.total_cost <= budget.c_max, tag + ": over budget");
        if (plan.chosen == best_plan) ++exact_matches;
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 30.0, "runtime " + fmt("%.2f s", secs));
    return {c.ok(), c.ok() ? std::to_string(exact_matches) + "/500 exact matches with bitmask brute force in " +
                                 fmt("%.2f s", secs)
                           : c.summary()};
}

// -- 4. prune / capacity safety ----------------------------------------------

bool no_dangling(const KnowledgeGraph& g) {
    for (const auto& [key, e] : g.edges()) {
        if (!g.has_node(e.src) || !g.has_node(e.dst)) return false;
    }
    return true;
}

Outcome prune_capacity_safety() {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Checker c;
    std::size_t max_additions = 0;
    std::size_t batches = 0;
    for (int seq = 0; seq < 1000; ++seq) {
        const std::uint64_t cap = std::uniform_int_distribution<std::uint64_t>(5, 200)(rng);
        KnowledgeGraph g({cap, 150});
        TunableParams params;
        params.tau = 0.05 + 0.9 * u(rng);
        params.gamma = u(rng);
        std::vector<std::string> ids;
        auto random_id = [&] { return ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng)]; };
        const int steps = std::uniform_int_distribution<int>(5, 40)(rng);
        for (int step = 0; step < steps; ++step) {
            const double op = u(rng);
            try {
                if (op < 0.25 || ids.size() < 2) {
                    const std::string id = "n" + std::to_string(ids.size());
                    g.add_node(make_node(id, graph::all_node_types()[ids.size() % graph::kNodeTypeCount], u(rng)));
                    ids.push_back(id);
                } else if (op < 0.55) {
                    const auto type = graph::all_edge_types()[std::uniform_int_distribution<std::size_t>(0, 25)(rng)];
                    g.add_edge(make_edge(random_id(), random_id(), type, u(rng)), {params.gamma, graph::CapacityPolicy::Evict});
                } else if (op < 0.62) {
                    if (g.edge_count() > 0) {
                        auto it = g.edges().begin();
                        std::advance(it, std::uniform_int_distribution<std::size_t>(0, g.edge_count() - 1)(rng));
                        g.update_edge_weight(it->first, u(rng), params.gamma);
                    }
                } else if (op < 0.68) {
                    const auto id = random_id();
                    if (g.has_node(id)) g.remove_node(id);
                } else if (op < 0.74) {
                    fusion::prune(g, {params.tau, 1.0});
                } else if (op < 0.78) {
                    g.set_capacity({std::uniform_int_distribution<std::uint64_t>(1, 200)(rng), 150});
                } else {
                    // A candidate batch that can exceed the per-batch budget.
                    extraction::Candidates cs;
                    const int n = std::uniform_int_distribution<int>(0, 260)(rng);
                    std::vector<std::pair<std::string, NodeType>> mentions;
                    for (int i = 0; i < n; ++i) {
                        const auto type = u(rng) < 0.5 ? NodeType::Symptom : NodeType::Disease;
                        const std::string surface = "term" + std::to_string(seq) + "x" + std::to_string(step) + "y" +
                                                    std::to_string(i) + " kind" + std::to_string(i % 7);
                        extraction::CandidateEntity e;
                        e.surface = surface;
                        e.entity_type = type;
                        e.prob = u(rng);
                        e.embedding = extraction::embed(extraction::preprocess(surface), 64);
                        e.confidence = 0.5 + 0.5 * u(rng);
                        e.provenance = "doc" + std::to_string(i % 5);
                        cs.entities.push_back(e);
                        mentions.emplace_back(surface, type);
                    }
                    for (int i = 0; i + 1 < n; i += 2) {
                        for (int d = 0; d < 5; ++d) {
                            cs.relations.push_back({mentions[i].first, mentions[i + 1].first, mentions[i].second,
                                                    mentions[i + 1].second, EdgeType::Associative, u(rng),
                                                    "doc" + std::to_string(d)});
                        }
                    }
                    const auto report = fusion::apply_batch(g, cs, params);
                    const auto additions = report.nodes_added + report.edges_added;
                    max_additions = std::max(max_additions, additions);
                    ++batches;
                    c.expect(additions <= 150, "batch added " + std::to_string(additions));
                }
            } catch (const dkg::Error& e) {
                // Rejected mutations (duplicate ids, removed endpoints) must leave the graph intact.
                c.expect(e.code() == ErrorCode::DuplicateIdWithConflict || e.code() == ErrorCode::NodeNotFound ||
                             e.code() == ErrorCode::MissingEndpoint,
                         std::string("unexpected error ") + std::string(to_string(e.code())));
            }
            c.expect(no_dangling(g), "dangling edge in sequence " + std::to_string(seq));
            c.expect(g.edge_count() <= g.capacity().max_edges, "over capacity in sequence " + std::to_string(seq));
            c.expect(g.consistent(), "index inconsistency in sequence " + std::to_string(seq));
        }
    }
    return {c.ok(), c.ok() ? "1000 sequences, " + std::to_string(batches) + " batches, max additions per batch " +
                                 std::to_string(max_additions) + " <= 150, no dangling edges, |E| <= max_edges"
                           : c.summary()};
}

// -- 5. clean and noisy worlds ------------------------------------------------

Outcome world_end_to_end() {
    Checker c;
    const auto clean = evalkit::generate_world(42, {}, 0.0);
    const auto run = evalkit::run_world(clean, TunableParams{});
    const double acc = evalkit::extraction_accuracy(evalkit::found_mentions(run.ingest.accepted), clean.truth_mentions());
    const double cov = evalkit::semantic_coverage(run.graph, evalkit::mentioned_truth(clean));
    c.expect(acc == 1.0, "clean extraction accuracy " + fmt("%.6f", acc));
    c.expect(cov == 1.0, "clean semantic coverage " + fmt("%.6f", cov));

    const auto noisy = evalkit::generate_world(42, {}, 0.1);
    const auto nrun = evalkit::run_world(noisy, TunableParams{});
    const double nacc =
        evalkit::extraction_accuracy(evalkit::found_mentions(nrun.ingest.accepted), noisy.truth_mentions());
    c.expect(nacc >= 0.85, "noisy extraction accuracy " + fmt("%.6f", nacc));
    return {c.ok(), c.ok() ? "noise 0: extraction " + fmt("%.4f", acc) + ", coverage " + fmt("%.4f", cov) +
                                 "; noise 0.1: extraction " + fmt("%.4f", nacc)
                           : c.summary()};
}

// -- 6. update latency ----------------------------------------------------------

std::string word(std::mt19937_64& rng) {
    static const char* syllables[] = {"ka", "lo", "mi", "ner", "tu", "sa", "vel", "dor", "qui", "ran",
                                      "po", "zen", "har", "bi", "sul", "te", "gro", "my", "fal", "den"};
    std::uniform_int_distribution<int> pick(0, 19);
    std::string w;
    for (int i = 0; i < 3; ++i) w += syllables[pick(rng)];
    return w;
}

Outcome update_latency() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    KnowledgeGraph base;
    constexpr int kDiseases = 2000;
    constexpr int kSymptoms = 20000;
    std::vector<std::string> disease_ids;
    std::vector<std::string> disease_surfaces;
    for (int i = 0; i < kDiseases; ++i) {
        const std::string surface = word(rng) + " " + word(rng) + " d" + std::to_string(i);
        auto n = make_node(graph::make_node_id(NodeType::Disease, extraction::preprocess(surface)), NodeType::Disease);
        n.label = surface;
        n.embedding = extraction::embed(extraction::preprocess(surface));
        base.add_node(n);
        disease_ids.push_back(n.id);
        disease_surfaces.push_back(surface);
    }
    std::vector<std::string> symptom_ids;
    for (int i = 0; i < kSymptoms; ++i) {
        const std::string surface = word(rng) + " " + word(rng) + " s" + std::to_string(i);
        auto n = make_node(graph::make_node_id(NodeType::Symptom, extraction::preprocess(surface)), NodeType::Symptom);
        n.label = surface;
        n.embedding = extraction::embed(extraction::preprocess(surface));
        base.add_node(n);
        symptom_ids.push_back(n.id);
    }
    std::uniform_int_distribution<int> pd(0, kDiseases - 1);
    std::uniform_int_distribution<int> ps(0, kSymptoms - 1);
    while (base.edge_count() < 100000) {
        const auto& s = symptom_ids[ps(rng)];
        const auto& d = disease_ids[pd(rng)];
        const auto type = u(rng) < 0.5 ? EdgeType::Diagnostic : EdgeType::Causal;
        base.add_edge(type == EdgeType::Diagnostic ? make_edge(s, d, type, 0.75 + 0.25 * u(rng))
                                                   : make_edge(d, s, type, 0.75 + 0.25 * u(rng)));
    }

    std::vector<double> ms;
    Checker c;
    std::size_t additions = 0;
    for (int run = 0; run < 20; ++run) {
        // 75 new symptoms, each linked to an existing disease: 150 additions.
        extraction::Candidates cs;
        for (int i = 0; i < 75; ++i) {
            const std::string surface = word(rng) + " " + word(rng) + " new" + std::to_string(run) + "x" + std::to_string(i);
            const int d = pd(rng);
            for (int doc = 0; doc < 4; ++doc) {
                const std::string doc_id = "r" + std::to_string(run) + "-" + std::to_string(i) + "-" + std::to_string(doc);
                extraction::CandidateEntity s;
                s.surface = extraction::join(extraction::preprocess(surface));
                s.entity_type = NodeType::Symptom;
                s.prob = 1.0;
                s.embedding = extraction::embed(extraction::preprocess(surface));
                s.confidence = 0.88;
                s.provenance = doc_id;
                extraction::CandidateEntity dis = s;
                dis.surface = extraction::join(extraction::preprocess(disease_surfaces[d]));
                dis.entity_type = NodeType::Disease;
                dis.embedding = extraction::embed(extraction::preprocess(disease_surfaces[d]));
                cs.entities.push_back(s);
                cs.entities.push_back(dis);
                cs.relations.push_back({s.surface, dis.surface, NodeType::Symptom, NodeType::Disease,
                                        EdgeType::Diagnostic, 1.0, doc_id});
            }
        }
        KnowledgeGraph g = base;
        const auto t0 = Clock::now();
        const auto report = fusion::apply_batch(g, cs, TunableParams{});
        ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        additions = report.nodes_added + report.edges_added;
        c.expect(additions == 150, "run " + std::to_string(run) + " added " + std::to_string(additions));
        c.expect(g.edge_count() >= 100000, "graph shrank below 100k edges");
    }
    std::sort(ms.begin(), ms.end());
    const double median = 0.5 * (ms[9] + ms[10]);
    c.expect(median < 1000.0, "median " + fmt("%.1f ms", median));
    std::ostringstream dist;
    dist << base.edge_count() << " edges preloaded, 20 batches of " << additions << " additions: min "
         << fmt("%.1f", ms.front()) << " ms, median " << fmt("%.1f", median) << " ms, p90 " << fmt("%.1f", ms[17])
         << " ms, max " << fmt("%.1f", ms.back()) << " ms";
    return {c.ok(), c.ok() ? dist.str() : c.summary() + " (" + dist.str() + ")"};
}

// -- 7. feedback fuzz -------------------------------------------------------------

Outcome feedback_fuzz() {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    gateway::Engine engine(gateway::EngineConfig{}, false);
    engine.replace_graph(gateway::demo_graph());
    const auto graph = engine.graph_copy();
    std::vector<std::string> symptoms(graph.nodes_of_type(NodeType::Symptom).begin(),
                                      graph.nodes_of_type(NodeType::Symptom).end());
    std::vector<std::string> diseases(graph.nodes_of_type(NodeType::Disease).begin(),
                                      graph.nodes_of_type(NodeType::Disease).end());
    Checker c;
    std::size_t events = 0;
    std::size_t updates = 0;
    std::size_t rejected = 0;
    std::size_t moved = 0;
    int case_no = 0;
    while (events < 10000) {
        if (u(rng) < 0.05) {
            // Occasionally restart from a random in-bounds parameter vector.
            TunableParams p;
            for (auto id : kAllParams) {
                const auto b = TunableParams::bounds(id);
                p.set(id, b.lo + u(rng) * b.range());
            }
            engine.set_params(p);
        }
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 100)(rng);
        std::vector<feedback::FeedbackEvent> batch;
        bool invalid = false;
        for (std::size_t i = 0; i < n; ++i) {
            feedback::FeedbackEvent e;
            e.case_id = "case-" + std::to_string(case_no++);
            if (u(rng) < 0.6) {
                gateway::CaseRequest req;
                req.case_id = e.case_id;
                const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
                std::set<std::string> s;
                while (s.size() < k) s.insert(symptoms[std::uniform_int_distribution<std::size_t>(0, symptoms.size() - 1)(rng)]);
                req.symptoms.assign(s.begin(), s.end());
                req.profile.id = u(rng) < 0.5 ? "p:demo_patient" : "p:elderly_patient";
                engine.recommend(req);
            }
            e.diagnosis_correct = u(rng) < 0.6;
            e.treatment_accepted = u(rng) < 0.5;
            if (u(rng) < 0.3) e.corrected_diagnosis = diseases[std::uniform_int_distribution<std::size_t>(0, diseases.size() - 1)(rng)];
            if (u(rng) < 0.5) {
                std::uniform_int_distribution<int> score(1, 5);
                e.likert = feedback::Likert{score(rng), score(rng), score(rng)};
            }
            batch.push_back(e);
        }
        if (u(rng) < 0.05) {
            // Out-of-range Likert score somewhere in the batch.
            auto& bad = batch[std::uniform_int_distribution<std::size_t>(0, batch.size() - 1)(rng)];
            bad.likert = feedback::Likert{u(rng) < 0.5 ? 0 : 6, 3, 3};
            invalid = true;
        }
        const auto before = engine.params();
        try {
            const auto out = engine.submit_feedback(batch);
            c.expect(!invalid, "invalid batch accepted");
            events += out.accepted;
            if (out.update) {
                ++updates;
                c.expect(out.update->reward_after >= out.update->reward_before,
                         "reward decreased: " + fmt("%.6f", out.update->reward_before) + " -> " +
                             fmt("%.6f", out.update->reward_after));
                if (!(out.update->after == out.update->before)) ++moved;
            }
        } catch (const dkg::Error& e) {
            c.expect(invalid && e.code() == ErrorCode::InvalidFeedback, "unexpected rejection");
            c.expect(engine.params() == before, "params changed by a rejected batch");
            ++rejected;
        }
        const auto p = engine.params();
        c.expect(p.within_bounds(), "params out of bounds after update " + std::to_string(updates));
        for (auto id : kAllParams) c.expect(std::isfinite(p.get(id)), "non-finite parameter");
    }
    return {c.ok(), c.ok() ? std::to_string(events) + " events accepted, " + std::to_string(rejected) +
                                 " invalid batches rejected, " + std::to_string(updates) + " updates (" +
                                 std::to_string(moved) + " moved params), all in bounds, reward never decreased"
                           : c.summary()};
}

// -- 8. metric panel ------------------------------------------------------------

Outcome metric_panel() {
    Checker c;
    // Independent kappa on the fixture table.
    const std::vector<int> a = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const std::vector<int> b = {1, 1, 1, 1, 0, 1, 0, 0, 0, 0};
    double agree = 0.0;
    double a1 = 0.0;
    double b1 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        agree += a[i] == b[i] ? 1.0 : 0.0;
        a1 += a[i];
        b1 += b[i];
    }
    const double n = static_cast<double>(a.size());
    const double po = agree / n;
    const double pe = (a1 / n) * (b1 / n) + (1 - a1 / n) * (1 - b1 / n);
    const std::string expected_kappa = fmt("%.6f", (po - pe) / (1 - pe));
    c.expect(po == 0.8 && pe == 0.5, "fixture marginals");

    const std::string cmd = std::string(DKG_CLI) + " eval --seed 42 --noise 0 --raters " + DKG_FIXTURES +
                            "/kappa_raters.txt 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return {false, "cannot run " + cmd};
    std::string out;
    char buf[512];
    while (fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
    const int status = pclose(pipe);
    c.expect(WIFEXITED(status) && WEXITSTATUS(status) == 0, "eval exit status " + std::to_string(status));
    for (auto row : evalkit::kPanelRows) {
        c.expect(out.find("\n" + std::string(row) + "\t") != std::string::npos, "missing row " + std::string(row));
    }
    c.expect(out.find("Clinician Feedback (Cohen's Kappa)\t" + expected_kappa + "\n") != std::string::npos,
             "kappa row is not " + expected_kappa);
    c.expect(out.find("Semantic Extraction Accuracy\t1.0000") != std::string::npos, "extraction accuracy row");
    return {c.ok(), c.ok() ? "all 10 rows present, kappa printed as " + expected_kappa : c.summary() + "\n" + out};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"formula oracles", formula_oracles},
        {"Bayes normalization", bayes_normalization},
        {"constrained-recommendation oracle", constrained_oracle},
        {"prune/capacity safety", prune_capacity_safety},
        {"clean/noisy world end-to-end", world_end_to_end},
        {"update latency", update_latency},
        {"feedback safety", feedback_fuzz},
        {"metric panel fidelity", metric_panel},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt("%.1f s", seconds_since(t0))
                  << "]" << std::endl;
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
