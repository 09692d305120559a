#include <doctest.h>

#include "dkg/feedback/feedback.hpp"
#include "helpers.hpp"

using namespace dkg;
using namespace dkg::feedback;
using graph::EdgeType;
using graph::NodeType;

namespace {

FeedbackEvent event(std::string id, bool diag, bool treat, std::optional<Likert> likert = std::nullopt) {
    FeedbackEvent e;
    e.case_id = std::move(id);
    e.diagnosis_correct = diag;
    e.treatment_accepted = treat;
    e.likert = likert;
    e.clinician_id = "c1";
    return e;
}

KnowledgeGraph chain_graph(std::size_t edges, std::uint64_t max_edges) {
    KnowledgeGraph g({max_edges, 150});
    for (std::size_t i = 0; i <= edges; ++i) {
        graph::Node n;
        n.id = "s:" + std::to_string(i);
        n.type = NodeType::Symptom;
        n.label = n.id;
        g.add_node(n);
    }
    for (std::size_t i = 0; i < edges; ++i) {
        graph::Edge e;
        e.src = "s:" + std::to_string(i);
        e.dst = "s:" + std::to_string(i + 1);
        e.type = EdgeType::SymptomSymptom;
        e.weight = 0.9;
        g.add_edge(e);
    }
    return g;
}

KnowledgeGraph clinic() {
    KnowledgeGraph g;
    auto node = [&](const std::string& id, NodeType t) {
        graph::Node n;
        n.id = id;
        n.type = t;
        n.label = id;
        g.add_node(n);
    };
    auto edge = [&](const std::string& s, const std::string& d, double w) {
        graph::Edge e;
        e.src = s;
        e.dst = d;
        e.type = EdgeType::Diagnostic;
        e.weight = w;
        g.add_edge(e);
    };
    node("d:flu", NodeType::Disease);
    node("d:cold", NodeType::Disease);
    node("s:fever", NodeType::Symptom);
    node("s:sneeze", NodeType::Symptom);
    edge("s:fever", "d:flu", 0.9);
    edge("s:fever", "d:cold", 0.75);
    edge("s:sneeze", "d:cold", 0.8);
    return g;
}

ReplayCase served_case(const std::string& id, bool diag_correct, bool accepted) {
    ReplayCase c;
    c.event = event(id, diag_correct, accepted);
    c.symptoms = {"s:fever"};
    c.profile = {"p:1", {{"age_over_65", 1.0}}};
    c.options = {{"t:a", {{"d:flu", 0.9}, {"d:cold", 0.2}}, {}, 1.0},
                 {"t:b", {{"d:flu", 0.5}, {"d:cold", 0.5}}, {{"age_over_65", 0.1}}, 1.0}};
    c.served_diagnosis = "d:flu";
    c.served_treatment = {"t:a"};
    return c;
}

}  // namespace

TEST_CASE("feedback event validation") {
    CHECK_NOTHROW(event("c1", true, true, Likert{4, 4, 5}).validate());
    CHECK_THROWS_CODE(event("c1", true, true, Likert{6, 4, 4}).validate(), ErrorCode::InvalidFeedback);
    CHECK_THROWS_CODE(event("c1", true, true, Likert{0, 4, 4}).validate(), ErrorCode::InvalidFeedback);
    CHECK_THROWS_CODE(event("", true, true).validate(), ErrorCode::InvalidFeedback);
    CHECK(event("c", true, false).accuracy() == 0.5);
}

TEST_CASE("reward") {
    CHECK(reward({}, KnowledgeGraph{}, TunableParams{}) == 0.0);

    std::vector<FeedbackEvent> ten;
    for (int i = 0; i < 10; ++i) ten.push_back(event("c" + std::to_string(i), true, true));
    const auto g = chain_graph(4, 10);
    CHECK(complexity(g) == doctest::Approx(0.4));
    CHECK(reward(ten, g, TunableParams{}) == doctest::Approx(9.8).epsilon(1e-12));

    TunableParams free;
    free.lambda_c = 0.0;
    CHECK(reward(ten, chain_graph(9, 10), free) == doctest::Approx(10.0));
    const auto rec = reward_record(ten, g, TunableParams{});
    CHECK(rec.window.size() == 10);
    CHECK(rec.complexity == doctest::Approx(0.4));
}

TEST_CASE("replay buffer is FIFO") {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) buf.push(served_case("c" + std::to_string(i), true, true));
    CHECK(buf.size() == 3);
    CHECK(buf.cases().front().event.case_id == "c2");
    CHECK_THROWS_CODE(buf.push(served_case("", true, true)), ErrorCode::InvalidFeedback);
    CHECK_THROWS_CODE(ReplayBuffer(0), ErrorCode::InvalidConfig);
}

TEST_CASE("replay accuracy") {
    const auto g = clinic();
    const TunableParams params;
    CHECK(replay_accuracy(served_case("c", true, true), g, params) == 1.0);
    // Rejected diagnosis and treatment: the replay reproduces both, so neither counts.
    CHECK(replay_accuracy(served_case("c", false, false), g, params) == 0.0);

    auto corrected = served_case("c", false, true);
    corrected.event.corrected_diagnosis = "d:cold";
    CHECK(replay_accuracy(corrected, g, params) == 0.5);

    ReplayCase bare;
    bare.event = event("bare", true, false);
    CHECK(replay_accuracy(bare, g, params) == 0.5);
}

TEST_CASE("update_params") {
    const auto g = clinic();
    ReplayBuffer empty;
    const auto none = update_params(TunableParams{}, empty, g, 1);
    CHECK(none.after == TunableParams{});

    // Bare events replay their indicators: the reward is flat everywhere.
    ReplayBuffer flat;
    for (int i = 0; i < 5; ++i) {
        ReplayCase c;
        c.event = event("c" + std::to_string(i), i % 2 == 0, true);
        flat.push(c);
    }
    const auto unchanged = update_params(TunableParams{}, flat, KnowledgeGraph{}, 1);
    CHECK(unchanged.after == TunableParams{});

    ReplayBuffer mixed;
    for (int i = 0; i < 12; ++i) mixed.push(served_case("c" + std::to_string(i), i % 3 != 0, i % 2 == 0));
    const auto r = update_params(TunableParams{}, mixed, g, 7);
    CHECK(r.reward_after >= r.reward_before);
    CHECK(r.after.within_bounds());
    CHECK(r.cases_replayed == 12);
    CHECK(r.steps.size() == kTunedOrder.size());
    CHECK(r.after.lambda_c == r.before.lambda_c);
}

TEST_CASE("likert aggregation") {
    const auto flat = aggregate_likert({event("a", true, true, Likert{4, 4, 4}), event("b", true, true, Likert{4, 4, 4}),
                                        event("c", true, true, Likert{4, 4, 4})});
    CHECK(flat.count == 3);
    CHECK(flat.accuracy.mean == 4.0);
    CHECK(flat.accuracy.sd == 0.0);

    const auto s = aggregate_likert({event("a", true, true, Likert{4, 3, 2}), event("b", true, true, Likert{4, 3, 2}),
                                     event("c", true, true, Likert{5, 3, 2}), event("d", true, true)});
    CHECK(s.count == 3);
    CHECK(s.accuracy.mean == doctest::Approx(13.0 / 3.0).epsilon(1e-12));
    CHECK(format_likert(s.accuracy) == "4.3 (± 0.6)");
    CHECK(format_likert({4.3, 0.2}) == "4.3 (± 0.2)");
    CHECK_THROWS_CODE(aggregate_likert({event("a", true, true)}), ErrorCode::NoLikertData);
}
