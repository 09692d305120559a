#include <doctest.h>

#include <filesystem>
#include <random>

#include <json.hpp>

#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/graph/snapshot.hpp"
#include "helpers.hpp"

using namespace dkg;
using namespace dkg::graph;

namespace {

Node make_node(const std::string& id, NodeType type, const std::string& label = "") {
    Node n;
    n.id = id;
    n.type = type;
    n.label = label.empty() ? id : label;
    return n;
}

Edge make_edge(const std::string& src, const std::string& dst, EdgeType type, double w) {
    Edge e;
    e.src = src;
    e.dst = dst;
    e.type = type;
    e.weight = w;
    return e;
}

KnowledgeGraph small_graph() {
    KnowledgeGraph g;
    g.add_node(make_node("s:fever", NodeType::Symptom));
    g.add_node(make_node("d:flu", NodeType::Disease));
    g.add_node(make_node("t:rest", NodeType::Treatment));
    g.add_edge(make_edge("s:fever", "d:flu", EdgeType::Diagnostic, 0.6));
    g.add_edge(make_edge("t:rest", "d:flu", EdgeType::Therapeutic, 0.5));
    return g;
}

}  // namespace

TEST_CASE("vocabulary round-trips through strings") {
    CHECK(all_node_types().size() == 13);
    CHECK(all_edge_types().size() == 26);
    for (auto t : all_node_types()) CHECK(node_type_from_string(to_string(t)) == t);
    for (auto t : all_edge_types()) CHECK(edge_type_from_string(to_string(t)) == t);
    CHECK_FALSE(node_type_from_string("Planet").has_value());
    CHECK(make_node_id(NodeType::Disease, {"type", "2", "diabetes"}) == "d:type_2_diabetes");
    CHECK(make_node_id(NodeType::Symptom, {"fever"}) == "s:fever");
}

TEST_CASE("add_node") {
    KnowledgeGraph g;
    g.add_node(make_node("d:diabetes", NodeType::Disease));
    CHECK(g.node_count() == 1);
    g.add_node(make_node("d:diabetes", NodeType::Disease));
    CHECK(g.node_count() == 1);
    CHECK_THROWS_CODE(g.add_node(make_node("d:diabetes", NodeType::Symptom)), ErrorCode::DuplicateIdWithConflict);

    Node bad = make_node("d:x", NodeType::Disease);
    bad.prior = 1.5;
    CHECK_THROWS_CODE(g.add_node(bad), ErrorCode::InvalidField);
    CHECK_THROWS_CODE(g.add_node(make_node("", NodeType::Disease)), ErrorCode::InvalidField);
    CHECK(g.nodes_of_type(NodeType::Disease).size() == 1);
}

TEST_CASE("add_edge") {
    KnowledgeGraph g;
    g.add_node(make_node("s:fever", NodeType::Symptom));
    g.add_node(make_node("d:flu", NodeType::Disease));
    g.add_edge(make_edge("s:fever", "d:flu", EdgeType::Diagnostic, 0.6));
    CHECK(g.edge_count() == 1);
    CHECK_THROWS_CODE(g.add_edge(make_edge("s:fever", "d:none", EdgeType::Diagnostic, 0.6)),
                      ErrorCode::MissingEndpoint);
    CHECK_THROWS_CODE(g.add_edge(make_edge("s:fever", "d:flu", EdgeType::Causal, -0.1)), ErrorCode::InvalidWeight);

    // Re-adding blends with the default decay.
    g.add_edge(make_edge("s:fever", "d:flu", EdgeType::Diagnostic, 1.0));
    CHECK(g.edge_count() == 1);
    CHECK(g.edge({"s:fever", "d:flu", EdgeType::Diagnostic}).weight == doctest::Approx(0.8 * 0.6 + 0.2));
    CHECK(g.edges_between("d:flu", "s:fever").size() == 1);
    CHECK(g.degree("s:fever") == 1);
}

TEST_CASE("update_edge_weight") {
    KnowledgeGraph g;
    g.add_node(make_node("a", NodeType::Symptom));
    g.add_node(make_node("b", NodeType::Disease));
    const EdgeKey k{"a", "b", EdgeType::Causal};
    auto reset = [&] {
        g.remove_edge(k);
        g.add_edge(make_edge("a", "b", EdgeType::Causal, 0.4));
    };
    g.add_edge(make_edge("a", "b", EdgeType::Causal, 0.4));
    CHECK(g.update_edge_weight(k, 0.9, 1.0) == doctest::Approx(0.4));
    reset();
    CHECK(g.update_edge_weight(k, 0.9, 0.0) == doctest::Approx(0.9));
    reset();
    CHECK(g.update_edge_weight(k, 0.8, 0.5) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(g.edge(k).evidence_count == 1);
    CHECK_THROWS_CODE(g.update_edge_weight(k, 1.2, 0.5), ErrorCode::InvalidProbability);
    CHECK_THROWS_CODE(g.update_edge_weight({"a", "b", EdgeType::Temporal}, 0.5, 0.5), ErrorCode::EdgeNotFound);
}

TEST_CASE("remove_node drops incident edges") {
    auto g = small_graph();
    g.remove_node("d:flu");
    CHECK(g.edge_count() == 0);
    CHECK(g.consistent());
    CHECK_THROWS_CODE(g.remove_node("d:flu"), ErrorCode::NodeNotFound);
}

TEST_CASE("capacity eviction") {
    KnowledgeGraph g(CapacityConfig{10, 150});
    for (int i = 0; i < 13; ++i) g.add_node(make_node("n" + std::to_string(i), NodeType::Symptom));
    for (int i = 0; i < 10; ++i) {
        g.add_edge(make_edge("n0", "n" + std::to_string(i + 1), EdgeType::Associative, 0.5 + i * 0.01));
    }
    CHECK(g.edge_count() == 10);
    CHECK(g.enforce_capacity().empty());

    // Over capacity by raising it temporarily is not possible, so insert
    // with eviction: the lightest edge goes first.
    g.add_edge(make_edge("n0", "n11", EdgeType::Associative, 0.9));
    CHECK(g.edge_count() == 10);
    CHECK_FALSE(g.has_edge({"n0", "n1", EdgeType::Associative}));

    // Tie at the minimum weight: the smaller key is evicted.
    KnowledgeGraph t(CapacityConfig{1, 150});
    t.add_node(make_node("a", NodeType::Symptom));
    t.add_node(make_node("b", NodeType::Symptom));
    t.add_node(make_node("c", NodeType::Symptom));
    t.add_edge(make_edge("a", "c", EdgeType::Associative, 0.3));
    t.add_edge(make_edge("a", "b", EdgeType::Associative, 0.3));
    CHECK(t.edge_count() == 1);
    CHECK(t.has_edge({"a", "c", EdgeType::Associative}));

    KnowledgeGraph r(CapacityConfig{1, 150});
    r.add_node(make_node("a", NodeType::Symptom));
    r.add_node(make_node("b", NodeType::Symptom));
    r.add_edge(make_edge("a", "b", EdgeType::Associative, 0.3));
    CHECK_THROWS_CODE(r.add_edge(make_edge("b", "a", EdgeType::Associative, 0.3), {0.8, CapacityPolicy::Reject}),
                      ErrorCode::CapacityExceeded);

    KnowledgeGraph twelve(CapacityConfig{20, 150});
    twelve.add_node(make_node("x", NodeType::Symptom));
    for (int i = 0; i < 12; ++i) {
        twelve.add_node(make_node("y" + std::to_string(i), NodeType::Symptom));
        twelve.add_edge(make_edge("x", "y" + std::to_string(i), EdgeType::Associative, 0.1 + i * 0.05));
    }
    twelve.set_capacity({10, 150});
    CHECK(twelve.edge_count() == 10);
    CHECK_FALSE(twelve.has_edge({"x", "y0", EdgeType::Associative}));
    CHECK_FALSE(twelve.has_edge({"x", "y1", EdgeType::Associative}));
    CHECK(twelve.consistent());
}

TEST_CASE("snapshot roundtrip") {
    KnowledgeGraph empty;
    CHECK(load(snapshot(empty)) == empty);

    auto g = small_graph();
    g.set_prior("d:flu", 0.25);
    g.set_attribute("t:rest", "cost", 1.5);
    g.set_relevance("s:fever", 0.9);
    g.begin_batch();
    const auto copy = load(snapshot(g));
    CHECK(copy == g);
    CHECK(copy.consistent());
    CHECK(copy.edge({"s:fever", "d:flu", EdgeType::Diagnostic}).weight == 0.6);

    auto doc = nlohmann::json::parse(snapshot(g));
    doc["schema_version"] = 99;
    CHECK_THROWS_CODE(load(doc.dump()), ErrorCode::SchemaVersionMismatch);
    CHECK_THROWS_CODE(load("{not json"), ErrorCode::CorruptDocument);

    auto dangling = nlohmann::json::parse(snapshot(g));
    dangling["edges"][0]["dst"] = "d:missing";
    CHECK_THROWS_CODE(load(dangling.dump()), ErrorCode::CorruptDocument);
}

TEST_CASE("snapshot roundtrip on random graphs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        KnowledgeGraph g(CapacityConfig{40, 150});
        std::uniform_int_distribution<int> pick(0, 9);
        std::uniform_real_distribution<double> w(0.0, 1.0);
        for (int i = 0; i < 10; ++i) {
            Node n = make_node("n" + std::to_string(i), all_node_types()[i % kNodeTypeCount]);
            n.relevance = w(rng);
            if (i % 3 == 0) n.prior = w(rng);
            g.add_node(n);
        }
        for (int i = 0; i < 60; ++i) {
            g.add_edge(make_edge("n" + std::to_string(pick(rng)), "n" + std::to_string(pick(rng)),
                                 all_edge_types()[static_cast<std::size_t>(i) % kEdgeTypeCount], w(rng)));
        }
        CHECK(g.consistent());
        CHECK(load(snapshot(g)) == g);
    }
}

TEST_CASE("save_file and load_file") {
    const auto dir = std::filesystem::temp_directory_path() / "dkg_graph_tests";
    std::filesystem::create_directories(dir);
    const auto path = dir / "g.json";
    const auto g = small_graph();
    save_file(g, path);
    CHECK(load_file(path) == g);
    CHECK_THROWS_CODE(load_file(dir / "absent.json"), ErrorCode::IoError);
    std::filesystem::remove_all(dir);
}
