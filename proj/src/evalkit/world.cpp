/**
 * @file world.cpp
 * @brief Synthetic world generator.
 */

#include "dkg/evalkit/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "dkg/error.hpp"
#include "dkg/extraction/corpus.hpp"
#include "dkg/extraction/text.hpp"
#include "dkg/graph/snapshot.hpp"

namespace dkg::evalkit {

using extraction::DocumentSource;
using graph::EdgeKey;
using graph::EdgeType;
using graph::NodeId;
using graph::NodeType;

namespace {

// Only raw engine output is used, so worlds match across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    bool chance(double p) { return unit() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

constexpr const char* kConsonants = "bdfgklmnprstvz";
constexpr const char* kVowels = "aeiou";
constexpr double kMaxNameCosine = 0.5;

const std::vector<std::string> kFeatures = {"age_over_65", "renal_impairment", "penicillin_allergy", "pregnancy"};

class NameForge {
public:
    explicit NameForge(Rng& rng) : rng_(rng) {}

    // A word-plus-suffix name (or a bare word when suffixes is empty) whose
    // embedding stays away from every name issued so far.
    std::string make(const std::vector<std::string>& suffixes) {
        for (;;) {
            std::string name = word();
            if (!suffixes.empty()) name += " " + suffixes[rng_.below(suffixes.size())];
            if (issued_.count(name) != 0) continue;
            auto emb = extraction::embed(extraction::preprocess(name));
            const bool clash = std::any_of(embeddings_.begin(), embeddings_.end(), [&](const auto& other) {
                return std::abs(extraction::cosine(emb, other)) >= kMaxNameCosine;
            });
            if (clash) continue;
            issued_.insert(name);
            embeddings_.push_back(std::move(emb));
            return name;
        }
    }

private:
    std::string word() {
        std::string w;
        const std::size_t syllables = rng_.between(2, 3);
        for (std::size_t i = 0; i < syllables; ++i) {
            w += kConsonants[rng_.below(14)];
            w += kVowels[rng_.below(5)];
        }
        return w;
    }

    Rng& rng_;
    std::set<std::string> issued_;
    std::vector<std::vector<double>> embeddings_;
};

struct Entity {
    NodeId id;
    NodeType type;
    std::string surface;
};

Entity make_entity(NodeType type, std::string surface) {
    return {graph::make_node_id(type, extraction::preprocess(surface)), type, std::move(surface)};
}

struct Fact {
    const Entity* first;  ///< in sentence order
    const Entity* second;
    EdgeKey key;
};

// {clinical report, article} templates; {0} is the first mention.
struct Templates {
    const char* clinical;
    const char* article;
};

Templates templates_for(EdgeType t) {
    switch (t) {
        case EdgeType::Causal: return {"Known {0} causes {1} in this patient.", "Evidence shows {0} produces {1} in most cohorts."};
        case EdgeType::Diagnostic: return {"Observed {0} suggests {1}.", "Persistent {0} indicates {1} in adults."};
        default: return {"Started {0} which treats {1}.", "Trials report {0} relieves {1} effectively."};
    }
}

std::string fill(const char* tmpl, const std::string& a, const std::string& b) {
    std::string out(tmpl);
    out.replace(out.find("{0}"), 3, a);
    out.replace(out.find("{1}"), 3, b);
    return out;
}

std::string swap_tokens(const std::string& surface) {
    auto toks = extraction::preprocess(surface);
    std::reverse(toks.begin(), toks.end());
    return extraction::join(toks);
}

std::string padded(std::size_t n, std::size_t width) {
    std::string s = std::to_string(n);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

}  // namespace

void WorldSizes::validate() const {
    if (diseases == 0 || symptoms < 2 || treatments == 0 || profiles == 0) {
        throw Error(ErrorCode::InvalidSizes, "world sizes must be positive with at least two symptoms");
    }
}

std::vector<extraction::Document> GroundTruthWorld::documents() const {
    std::vector<extraction::Document> docs;
    docs.reserve(corpus.size());
    for (const auto& a : corpus) docs.push_back(a.doc);
    return docs;
}

std::vector<EntityMention> GroundTruthWorld::truth_mentions() const {
    std::vector<EntityMention> out;
    for (const auto& a : corpus) out.insert(out.end(), a.entities.begin(), a.entities.end());
    return out;
}

GroundTruthWorld generate_world(std::uint64_t seed, const WorldSizes& sizes, double noise_rate,
                                const WorldOptions& options) {
    sizes.validate();
    if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw Error(ErrorCode::InvalidConfig, "noise_rate outside [0,1]");

    Rng rng(seed);
    NameForge names(rng);
    GroundTruthWorld w;
    w.seed = seed;
    w.noise_rate = noise_rate;
    w.sizes = sizes;

    std::vector<Entity> diseases;
    std::vector<Entity> symptoms;
    std::vector<Entity> treatments;
    for (std::size_t i = 0; i < sizes.diseases; ++i) {
        diseases.push_back(make_entity(NodeType::Disease, names.make({"syndrome", "disorder", "disease"})));
    }
    for (std::size_t i = 0; i < sizes.symptoms; ++i) {
        symptoms.push_back(make_entity(NodeType::Symptom, names.make({"pain", "rash", "cough", "ache", "spasm"})));
    }
    for (std::size_t i = 0; i < sizes.treatments; ++i) {
        treatments.push_back(make_entity(NodeType::Treatment, names.make({"therapy", "regimen", "infusion"})));
    }
    std::vector<std::string> aliases;
    const std::size_t alias_count = std::max<std::size_t>(5, (sizes.diseases + sizes.symptoms + sizes.treatments) / 5);
    for (std::size_t i = 0; i < alias_count; ++i) aliases.push_back(names.make({}));

    auto add_entity_node = [&](const Entity& e) {
        graph::Node n;
        n.id = e.id;
        n.type = e.type;
        n.label = e.surface;
        n.embedding = extraction::embed(extraction::preprocess(e.surface));
        w.graph.add_node(std::move(n));
        w.lexicon.add(e.surface, e.type, 1.0);
    };
    for (const auto* group : {&diseases, &symptoms, &treatments}) {
        for (const auto& e : *group) add_entity_node(e);
    }
    for (const auto& a : aliases) {
        for (const auto t : {NodeType::Disease, NodeType::Symptom, NodeType::Treatment}) w.lexicon.add(a, t, 1.0);
    }

    // Treatments: cost and per-feature risk.
    for (const auto& t : treatments) {
        reasoning::TreatmentOption opt;
        opt.id = t.id;
        opt.cost = std::round(rng.uniform(1.0, 20.0) * 100.0) / 100.0;
        for (const auto& f : kFeatures) {
            if (rng.chance(0.4)) opt.risk_features[f] = std::round(rng.uniform(0.05, 0.4) * 100.0) / 100.0;
        }
        w.graph.set_attribute(t.id, "cost", opt.cost);
        for (const auto& [f, r] : opt.risk_features) w.graph.set_attribute(t.id, "risk:" + f, r);
        w.catalog.push_back(std::move(opt));
    }

    std::vector<NodeId> profiles;
    for (std::size_t i = 0; i < sizes.profiles; ++i) {
        graph::Node n;
        n.id = "p:profile_" + padded(i + 1, 3);
        n.type = NodeType::PatientProfile;
        n.label = "profile " + padded(i + 1, 3);
        for (const auto& f : kFeatures) n.attributes[f] = rng.chance(0.3) ? 1.0 : 0.0;
        profiles.push_back(n.id);
        w.graph.add_node(std::move(n));
    }

    // Disease neighbourhoods.
    std::vector<Fact> facts;
    std::vector<std::vector<std::size_t>> disease_symptoms(diseases.size());
    std::vector<std::size_t> symptom_order(symptoms.size());
    std::vector<std::size_t> treatment_order(treatments.size());
    for (std::size_t d = 0; d < diseases.size(); ++d) {
        for (std::size_t i = 0; i < symptom_order.size(); ++i) symptom_order[i] = i;
        rng.shuffle(symptom_order);
        const std::size_t ns = std::min(rng.between(2, 5), symptoms.size());
        for (std::size_t k = 0; k < ns; ++k) {
            const Entity& s = symptoms[symptom_order[k]];
            disease_symptoms[d].push_back(symptom_order[k]);
            const bool causal = rng.chance(0.5);
            const EdgeKey key = causal ? EdgeKey{diseases[d].id, s.id, EdgeType::Causal}
                                       : EdgeKey{s.id, diseases[d].id, EdgeType::Diagnostic};
            w.graph.add_edge({key.src, key.dst, key.type, std::round(rng.uniform(0.6, 0.95) * 100.0) / 100.0, 1, 0, 0});
            facts.push_back(causal ? Fact{&diseases[d], &s, key} : Fact{&s, &diseases[d], key});
        }
        for (std::size_t i = 0; i < treatment_order.size(); ++i) treatment_order[i] = i;
        rng.shuffle(treatment_order);
        const std::size_t nt = std::min(rng.between(1, 3), treatments.size());
        for (std::size_t k = 0; k < nt; ++k) {
            const std::size_t ti = treatment_order[k];
            const EdgeKey key{treatments[ti].id, diseases[d].id, EdgeType::Therapeutic};
            const double efficacy = std::round(rng.uniform(0.6, 0.95) * 100.0) / 100.0;
            w.graph.add_edge({key.src, key.dst, key.type, efficacy, 1, 0, 0});
            w.catalog[ti].efficacy_by_disease[diseases[d].id] = efficacy;
            facts.push_back({&treatments[ti], &diseases[d], key});
        }
    }

    // Corpus: one clinical report and one article per fact.
    std::size_t doc_no = 0;
    for (const Fact& f : facts) {
        const Templates tm = templates_for(f.key.type);
        for (const auto source : {DocumentSource::ClinicalReport, DocumentSource::Article}) {
            AnnotatedDocument a;
            a.doc.doc_id = "doc-" + padded(++doc_no, 5);
            a.doc.source = source;
            a.doc.context_tag = std::string(extraction::kDefaultContext);
            std::string first = f.first->surface;
            std::string second = f.second->surface;
            if (rng.chance(noise_rate)) {
                a.corrupted = true;
                std::string& victim = rng.chance(0.5) ? first : second;
                victim = rng.chance(0.5) ? swap_tokens(victim) : aliases[rng.below(aliases.size())];
            }
            a.doc.text = fill(source == DocumentSource::ClinicalReport ? tm.clinical : tm.article, first, second);
            a.entities = {{a.doc.doc_id, f.first->type, f.first->surface}, {a.doc.doc_id, f.second->type, f.second->surface}};
            a.relations = {f.key};
            w.corpus.push_back(std::move(a));
        }
    }

    // Cases with brute-force optima, cross-checked against recommend().
    const reasoning::UtilityWeights unit{1.0, 1.0};
    std::size_t case_no = 0;
    for (std::size_t d = 0; d < diseases.size(); ++d) {
        for (std::size_t k = 0; k < options.cases_per_disease; ++k) {
            WorldCase c;
            c.case_id = "case-" + padded(++case_no, 4);
            c.true_disease = diseases[d].id;
            c.complex = k % 2 == 1;
            auto own = disease_symptoms[d];
            if (c.complex) {
                for (const auto i : own) c.symptoms.push_back(symptoms[i].id);
                std::vector<std::size_t> others;
                for (std::size_t i = 0; i < symptoms.size(); ++i) {
                    if (std::find(own.begin(), own.end(), i) == own.end()) others.push_back(i);
                }
                if (!others.empty()) c.symptoms.push_back(symptoms[others[rng.below(others.size())]].id);
            } else {
                rng.shuffle(own);
                for (std::size_t i = 0; i < std::min<std::size_t>(2, own.size()); ++i) c.symptoms.push_back(symptoms[own[i]].id);
            }
            std::sort(c.symptoms.begin(), c.symptoms.end());
            c.profile = profiles[rng.below(profiles.size())];

            const auto profile = reasoning::profile_from_graph(w.graph, c.profile);
            bool first = true;
            for (const auto& t : w.catalog) {  // catalog is in id order
                const double u = reasoning::utility(t, c.true_disease, profile, unit);
                if (first || u > c.optimal_utility) {
                    c.optimal_utility = u;
                    c.optimal_treatment = t.id;
                    first = false;
                }
            }
            reasoning::Posterior certain;
            certain.entries = {{c.true_disease, 1.0}};
            if (reasoning::recommend(certain, w.catalog, profile, unit).chosen.front() != c.optimal_treatment) {
                throw Error(ErrorCode::InvalidConfig, "optimal treatment disagrees with recommend for " + c.case_id);
            }
            w.cases.push_back(std::move(c));
        }
    }
    std::sort(w.catalog.begin(), w.catalog.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return w;
}

graph::KnowledgeGraph mentioned_truth(const GroundTruthWorld& world) {
    graph::KnowledgeGraph out(world.graph.capacity());
    std::set<NodeId> nodes;
    std::set<EdgeKey> edges;
    for (const auto& a : world.corpus) {
        for (const auto& k : a.relations) {
            nodes.insert(k.src);
            nodes.insert(k.dst);
            edges.insert(k);
        }
    }
    for (const auto& id : nodes) out.add_node(world.graph.node(id));
    for (const auto& k : edges) out.add_edge(world.graph.edge(k));
    return out;
}

std::string serialize_world(const GroundTruthWorld& world) {
    using nlohmann::json;
    json cases = json::array();
    for (const auto& c : world.cases) {
        cases.push_back({{"case_id", c.case_id},
                         {"symptoms", c.symptoms},
                         {"true_disease", c.true_disease},
                         {"profile", c.profile},
                         {"optimal_treatment", c.optimal_treatment},
                         {"optimal_utility", c.optimal_utility},
                         {"complex", c.complex}});
    }
    json annotations = json::array();
    for (const auto& a : world.corpus) {
        json ents = json::array();
        for (const auto& e : a.entities) ents.push_back({e.doc_id, graph::to_string(e.type), e.surface});
        json rels = json::array();
        for (const auto& k : a.relations) rels.push_back(k.to_string());
        annotations.push_back({{"doc_id", a.doc.doc_id}, {"entities", ents}, {"relations", rels}, {"corrupted", a.corrupted}});
    }
    json doc{{"seed", world.seed},
             {"noise_rate", world.noise_rate},
             {"graph", json::parse(graph::snapshot(world.graph))},
             {"lexicon", json::parse(world.lexicon.to_json())},
             {"annotations", annotations},
             {"cases", cases}};
    return doc.dump() + "\n" + extraction::to_jsonl(world.documents());
}

}  // namespace dkg::evalkit
