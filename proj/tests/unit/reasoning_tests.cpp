#include <doctest.h>

#include <random>

#include "dkg/reasoning/reasoning.hpp"
#include "helpers.hpp"

using namespace dkg;
using namespace dkg::reasoning;
using graph::NodeType;

namespace {

void add(KnowledgeGraph& g, const std::string& id, NodeType t, std::optional<double> prior = std::nullopt) {
    graph::Node n;
    n.id = id;
    n.type = t;
    n.label = id;
    n.prior = prior;
    g.add_node(n);
}

void link(KnowledgeGraph& g, const std::string& s, const std::string& d, double w, EdgeType t = EdgeType::Diagnostic) {
    graph::Edge e;
    e.src = s;
    e.dst = d;
    e.type = t;
    e.weight = w;
    g.add_edge(e);
}

KnowledgeGraph two_diseases() {
    KnowledgeGraph g;
    add(g, "d:a", NodeType::Disease);
    add(g, "d:b", NodeType::Disease);
    add(g, "s:x", NodeType::Symptom);
    add(g, "s:y", NodeType::Symptom);
    link(g, "s:x", "d:a", 0.6);
    link(g, "s:x", "d:b", 0.2);
    link(g, "d:a", "s:y", 0.5, EdgeType::Causal);
    return g;
}

TreatmentOption option(const std::string& id, std::map<NodeId, double> eff, double cost = 0.0,
                       std::map<std::string, double> risk = {}) {
    return {id, std::move(eff), std::move(risk), cost};
}

Posterior posterior(std::vector<PosteriorEntry> e) { return {std::move(e), kDefaultEpsilon}; }

}  // namespace

TEST_CASE("likelihood") {
    const auto g = two_diseases();
    CHECK(likelihood(g, {"s:x"}, "d:a") == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(likelihood(g, {"s:y"}, "d:b") == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(likelihood(g, {"s:x", "s:y"}, "d:a") == doctest::Approx(0.30).epsilon(1e-12));
    CHECK(likelihood(g, {"s:unknown"}, "d:a") == doctest::Approx(0.01));
    CHECK_THROWS_CODE(likelihood(g, {"s:x"}, "s:y"), ErrorCode::NotADisease);
    CHECK_THROWS_CODE(likelihood(g, {}, "d:a"), ErrorCode::EmptySymptomSet);
    CHECK_THROWS_CODE(likelihood(g, {"d:b"}, "d:a"), ErrorCode::InvalidField);
    CHECK_THROWS_CODE(likelihood(g, {"s:x"}, "d:a", {0.0, 0.0}), ErrorCode::InvalidConfig);
    // Edges lighter than the cutoff are ignored.
    CHECK(likelihood(g, {"s:x"}, "d:a", {0.01, 0.7}) == doctest::Approx(0.01));
}

TEST_CASE("diagnose") {
    const auto g = two_diseases();
    const auto p = diagnose(g, {"s:x"});
    REQUIRE(p.entries.size() == 2);
    CHECK(p.entries[0].disease == "d:a");
    CHECK(p.entries[0].probability == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(p.entries[1].probability == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p.above(0.3) == std::vector<NodeId>{"d:a"});
    CHECK(p.probability_of("d:b") == doctest::Approx(0.25));
    CHECK(p.probability_of("d:zz") == 0.0);

    KnowledgeGraph one;
    add(one, "d:only", NodeType::Disease);
    add(one, "s:x", NodeType::Symptom);
    CHECK(diagnose(one, {"s:x"}).entries.at(0).probability == doctest::Approx(1.0));

    KnowledgeGraph sym;
    add(sym, "d:1", NodeType::Disease, 0.5);
    add(sym, "d:2", NodeType::Disease, 0.5);
    add(sym, "s:x", NodeType::Symptom);
    link(sym, "s:x", "d:1", 0.4);
    link(sym, "s:x", "d:2", 0.4);
    const auto u = diagnose(sym, {"s:x"});
    CHECK(u.entries[0].probability == doctest::Approx(0.5));
    CHECK(u.entries[0].disease == "d:1");

    KnowledgeGraph none;
    add(none, "s:x", NodeType::Symptom);
    CHECK_THROWS_CODE(diagnose(none, {"s:x"}), ErrorCode::NoDiseases);
}

TEST_CASE("priors weight the posterior") {
    auto g = two_diseases();
    g.set_prior("d:a", 0.25);
    g.set_prior("d:b", 0.75);
    // 0.6 * 0.25 = 0.15 vs 0.2 * 0.75 = 0.15
    const auto p = diagnose(g, {"s:x"});
    CHECK(p.entries[0].probability == doctest::Approx(0.5));
}

TEST_CASE("utility and risk") {
    const PatientProfile p{"p:1", {{"age_over_65", 1.0}, {"renal", 1.0}}};
    const auto t = option("t:1", {{"d:a", 0.9}}, 1.0, {{"age_over_65", 0.2}});
    CHECK(risk(t, p) == doctest::Approx(0.2));
    CHECK(utility(t, "d:a", p, {1.0, 1.0}) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(utility(t, "d:a", p, {1.0, 0.0}) == doctest::Approx(0.9));
    CHECK(utility(t, "d:zz", p, {1.0, 1.0}) == doctest::Approx(-0.2));
    const auto even = option("t:2", {{"d:a", 0.3}}, 1.0, {{"renal", 0.3}});
    CHECK(utility(even, "d:a", p, {2.0, 2.0}) == doctest::Approx(0.0));
    const auto heavy = option("t:3", {}, 0.0, {{"age_over_65", 0.8}, {"renal", 0.8}});
    CHECK(risk(heavy, p) == 1.0);
}

TEST_CASE("recommend") {
    const PatientProfile p{"p:1", {}};
    const auto post = posterior({{"d:a", 0.75}, {"d:b", 0.25}});
    const std::vector<TreatmentOption> opts = {option("t:a", {{"d:a", 0.7}, {"d:b", 0.1}}),
                                               option("t:b", {{"d:a", 0.2}, {"d:b", 0.9}})};
    const auto plan = recommend(post, opts, p, {1.0, 1.0});
    CHECK(plan.chosen == std::vector<NodeId>{"t:a"});
    CHECK(plan.expected_utility == doctest::Approx(0.55).epsilon(1e-12));
    CHECK(plan.method == "argmax");
    REQUIRE(plan.per_disease_breakdown.size() == 2);

    CHECK(recommend(post, {opts[1]}, p, {1.0, 1.0}).chosen == std::vector<NodeId>{"t:b"});
    for (double c : {0.1, 3.0, 42.0}) CHECK(recommend(post, opts, p, {c, c}).chosen == plan.chosen);
    CHECK_THROWS_CODE(recommend(post, {}, p, {1.0, 1.0}), ErrorCode::NoOptions);
    CHECK_THROWS_CODE(recommend(post, {opts[0], opts[0]}, p, {1.0, 1.0}), ErrorCode::InvalidField);
}

TEST_CASE("recommend_constrained") {
    const PatientProfile p{"p:1", {}};
    const auto post = posterior({{"d:a", 1.0}});

    SUBCASE("inactive constraint") {
        const std::vector<TreatmentOption> opts = {option("t:1", {{"d:a", 0.9}}, 5.0), option("t:2", {{"d:a", 0.4}}, 1.0)};
        Budget b;
        b.c_max = 10.0;
        const auto plan = recommend_constrained(post, opts, p, {1.0, 1.0}, b);
        CHECK(plan.chosen == recommend(post, opts, p, {1.0, 1.0}).chosen);
        CHECK(plan.lambda_final == 0.0);
        CHECK(plan.budget_ok);
    }
    SUBCASE("runner-up under the budget") {
        const std::vector<TreatmentOption> opts = {option("t:best", {{"d:a", 0.9}}, 12.0),
                                                   option("t:next", {{"d:a", 0.6}}, 8.0)};
        Budget b;
        b.c_max = 10.0;
        const auto plan = recommend_constrained(post, opts, p, {1.0, 1.0}, b);
        CHECK(plan.chosen == std::vector<NodeId>{"t:next"});
        CHECK(plan.budget_ok);
        CHECK(plan.method == "exact");
        CHECK(plan.total_cost == 8.0);
        REQUIRE(plan.dual_bound.has_value());
        CHECK(*plan.dual_bound >= plan.expected_utility - 1e-9);
    }
    SUBCASE("infeasible") {
        const std::vector<TreatmentOption> opts = {option("t:1", {{"d:a", 0.9}}, 1.0)};
        Budget b;
        b.c_max = 0.0;
        CHECK_THROWS_CODE(recommend_constrained(post, opts, p, {1.0, 1.0}, b), ErrorCode::NoFeasiblePlan);
    }
    SUBCASE("plans of several treatments") {
        const std::vector<TreatmentOption> opts = {option("t:1", {{"d:a", 0.5}}, 4.0), option("t:2", {{"d:a", 0.4}}, 4.0),
                                                   option("t:3", {{"d:a", 0.8}}, 9.0)};
        Budget b;
        b.c_max = 9.0;
        b.max_plan_size = 2;
        const auto plan = recommend_constrained(post, opts, p, {1.0, 1.0}, b);
        CHECK(plan.chosen == std::vector<NodeId>{"t:1", "t:2"});
        CHECK(plan.expected_utility == doctest::Approx(0.9));
        b.max_plan_size = 4;
        CHECK_THROWS_CODE(recommend_constrained(post, opts, p, {1.0, 1.0}, b), ErrorCode::InvalidConfig);
    }
}

TEST_CASE("subgradient path respects the budget") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const PatientProfile p{"p:1", {}};
    const auto post = posterior({{"d:a", 0.6}, {"d:b", 0.4}});
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<TreatmentOption> opts;
        for (int i = 0; i < 30; ++i) {
            opts.push_back(option("t:" + std::to_string(i), {{"d:a", u(rng)}, {"d:b", u(rng)}}, 1.0 + 19.0 * u(rng)));
        }
        Budget b;
        b.c_max = 5.0 + 10.0 * u(rng);
        const auto plan = recommend_constrained(post, opts, p, {1.0, 1.0}, b);
        CHECK(plan.method == "subgradient");
        CHECK(plan.total_cost <= b.c_max);
        CHECK(plan.budget_ok);
        REQUIRE(plan.dual_bound.has_value());
        CHECK(*plan.dual_bound >= plan.expected_utility - 1e-9);
    }
}

TEST_CASE("graph-backed options") {
    auto g = two_diseases();
    add(g, "t:rest", NodeType::Treatment);
    add(g, "m:drug", NodeType::Medication);
    add(g, "p:old", NodeType::PatientProfile);
    g.set_attribute("m:drug", "cost", 3.0);
    g.set_attribute("m:drug", "risk:age_over_65", 0.3);
    g.set_attribute("m:drug", "efficacy:d:b", 0.9);
    g.set_attribute("p:old", "age_over_65", 1.0);
    link(g, "t:rest", "d:a", 0.8, EdgeType::Therapeutic);
    link(g, "m:drug", "d:b", 0.2, EdgeType::Therapeutic);
    const auto opts = options_from_graph(g);
    REQUIRE(opts.size() == 2);
    const auto& drug = opts[0].id == "m:drug" ? opts[0] : opts[1];
    CHECK(drug.cost == 3.0);
    CHECK(drug.efficacy_by_disease.at("d:b") == 0.9);
    CHECK(drug.risk_features.at("age_over_65") == 0.3);
    const auto profile = profile_from_graph(g, "p:old");
    CHECK(profile.features.at("age_over_65") == 1.0);
    CHECK_THROWS_CODE(profile_from_graph(g, "d:a"), ErrorCode::InvalidField);

    const auto filled = with_graph_efficacy({option("t:rest", {})}, g);
    CHECK(filled[0].efficacy_by_disease.at("d:a") == 0.8);
}

TEST_CASE("explain") {
    const auto g = two_diseases();
    const auto ev = explain(g, "d:a", {"s:x", "s:none", "s:y"});
    REQUIRE(ev.size() == 3);
    CHECK(ev[0].edge_type == EdgeType::Diagnostic);
    CHECK(ev[0].weight == 0.6);
    CHECK(ev[1].floor);
    CHECK(ev[1].weight == kDefaultEpsilon);
    CHECK(ev[2].edge_type == EdgeType::Causal);
    CHECK(ev[2].src == "d:a");
    CHECK_THROWS_CODE(explain(g, "d:zz", {"s:x"}), ErrorCode::DiseaseNotFound);
}
