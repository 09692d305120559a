#include "dkg/fusion/fusion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "dkg/error.hpp"

namespace dkg::fusion {

using extraction::CandidateEntity;
using extraction::CandidateRelation;
using graph::Edge;
using graph::Node;
using graph::NodeType;

void MrfConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidConfig, "mrf tau outside [0,1]");
    if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
        throw Error(ErrorCode::InvalidConfig, "mrf smoothing must be positive");
    }
}

double estimate_link_probability(const LinkCounts& c, const MrfConfig& cfg) {
    if (!std::isfinite(c.pair_count) || !std::isfinite(c.source_count) || c.pair_count < 0.0 ||
        c.source_count < 0.0 || c.pair_count > c.source_count) {
        throw Error(ErrorCode::InvalidCounts, "link counts must satisfy 0 <= pair <= source");
    }
    if (c.alternatives < 2) throw Error(ErrorCode::InvalidCounts, "need at least two alternatives");
    if (!(cfg.smoothing > 0.0)) throw Error(ErrorCode::InvalidConfig, "smoothing must be positive");
    return (c.pair_count + cfg.smoothing) /
           (c.source_count + cfg.smoothing * static_cast<double>(c.alternatives));
}

namespace {

double energy(double p) { return -std::log(std::max(p, kEnergyFloor)); }

ElementScore score_node(const KnowledgeGraph& g, const NodeId& id) {
    const Node& n = g.node(id);
    ElementScore s{id, energy(n.relevance), 0.0, 0.0};
    std::size_t deg = 0;
    for (const auto& k : g.out_edges(id)) {
        s.pairwise_sum += energy(g.edge(k).weight);
        ++deg;
    }
    for (const auto& k : g.in_edges(id)) {
        if (k.src == k.dst) continue;  // self-loop already counted
        s.pairwise_sum += energy(g.edge(k).weight);
        ++deg;
    }
    s.retention = std::exp(-(s.unary + s.pairwise_sum) / (1.0 + static_cast<double>(deg)));
    return s;
}

ElementScore score_edge(const Edge& e) {
    return ElementScore{e.key(), 0.0, energy(e.weight), e.weight};
}

}  // namespace

ElementScore mrf_score(const KnowledgeGraph& g, const Element& element) {
    if (const auto* id = std::get_if<NodeId>(&element)) {
        if (!g.has_node(*id)) throw Error(ErrorCode::ElementNotFound, "no node " + *id);
        return score_node(g, *id);
    }
    const auto& key = std::get<EdgeKey>(element);
    const Edge* e = g.find_edge(key);
    if (e == nullptr) throw Error(ErrorCode::ElementNotFound, "no edge " + key.to_string());
    return score_edge(*e);
}

std::vector<ElementScore> score_all(const KnowledgeGraph& g, unsigned threads) {
    std::vector<const NodeId*> ids;
    ids.reserve(g.node_count());
    for (const auto& [id, n] : g.nodes()) ids.push_back(&id);

    std::vector<ElementScore> scores(ids.size());
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) scores[i] = score_node(g, *ids[i]);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(ids.size() / 1024 + 1)));
    if (workers == 1) {
        work(0, ids.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (ids.size() + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk;
            const std::size_t e = std::min(ids.size(), b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& t : pool) t.join();
    }

    scores.reserve(scores.size() + g.edge_count());
    for (const auto& [key, e] : g.edges()) scores.push_back(score_edge(e));
    return scores;
}

PruneResult prune(KnowledgeGraph& g, const MrfConfig& cfg, unsigned threads) {
    cfg.validate();
    PruneResult removed;
    std::set<EdgeKey> doomed_edges;
    for (const auto& s : score_all(g, threads)) {
        if (s.retention >= cfg.tau) continue;
        if (const auto* id = std::get_if<NodeId>(&s.element)) {
            removed.nodes.push_back(*id);
        } else {
            doomed_edges.insert(std::get<EdgeKey>(s.element));
        }
    }
    for (const auto& id : removed.nodes) {
        for (const auto& k : g.out_edges(id)) doomed_edges.insert(k);
        for (const auto& k : g.in_edges(id)) doomed_edges.insert(k);
    }
    for (const auto& k : doomed_edges) g.remove_edge(k);
    for (const auto& id : removed.nodes) g.remove_node(id);
    removed.edges.assign(doomed_edges.begin(), doomed_edges.end());
    return removed;
}

std::size_t enforce_capacity(KnowledgeGraph& g) { return g.enforce_capacity().size(); }

std::string BatchReport::to_line() const {
    return nlohmann::json{{"batch_id", batch_id},
                          {"candidates_seen", candidates_seen},
                          {"nodes_added", nodes_added},
                          {"edges_added", edges_added},
                          {"nodes_merged", nodes_merged},
                          {"edges_updated", edges_updated},
                          {"over_budget", over_budget},
                          {"elements_pruned", elements_pruned},
                          {"edges_evicted", edges_evicted},
                          {"elapsed_ms", elapsed_ms},
                          {"final_edge_count", final_edge_count}}
        .dump();
}

bool same_outcome(const BatchReport& a, const BatchReport& b) noexcept {
    return a.batch_id == b.batch_id && a.candidates_seen == b.candidates_seen &&
           a.nodes_added == b.nodes_added && a.edges_added == b.edges_added &&
           a.nodes_merged == b.nodes_merged && a.edges_updated == b.edges_updated &&
           a.over_budget == b.over_budget && a.elements_pruned == b.elements_pruned &&
           a.edges_evicted == b.edges_evicted && a.final_edge_count == b.final_edge_count;
}

namespace {

struct EntityGroup {
    NodeType type;
    std::string surface;
    double confidence = 0.0;
    const std::vector<double>* embedding = nullptr;
};

std::vector<std::string> split_surface(const std::string& surface) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < surface.size()) {
        std::size_t end = surface.find(' ', start);
        if (end == std::string::npos) end = surface.size();
        if (end > start) tokens.push_back(surface.substr(start, end - start));
        start = end + 1;
    }
    return tokens;
}

/// Existing node of `type` most similar to `embedding`, if at or above the
/// threshold. Ties go to the smaller id.
const NodeId* best_link(const KnowledgeGraph& g, NodeType type, const std::vector<double>& embedding,
                        double threshold) {
    std::vector<std::size_t> nonzero;
    for (std::size_t i = 0; i < embedding.size(); ++i) {
        if (embedding[i] != 0.0) nonzero.push_back(i);
    }
    if (nonzero.empty()) return nullptr;
    const NodeId* best = nullptr;
    double best_sim = threshold;
    for (const auto& id : g.nodes_of_type(type)) {
        const auto& emb = g.node(id).embedding;
        if (emb.size() != embedding.size()) continue;
        double dot = 0.0;
        for (std::size_t i : nonzero) dot += embedding[i] * emb[i];
        if (dot > best_sim || (best == nullptr && dot >= best_sim)) {
            best = &id;
            best_sim = dot;
        }
    }
    return best;
}

}  // namespace

BatchReport apply_batch(KnowledgeGraph& g, const extraction::Candidates& accepted,
                        const TunableParams& params, const FusionOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const MrfConfig mrf{params.tau, options.smoothing};
    mrf.validate();

    BatchReport report;
    report.batch_id = g.begin_batch();
    report.candidates_seen = accepted.entities.size() + accepted.relations.size();
    std::size_t budget = g.capacity().batch_budget;

    // Collapse repeated mentions of one entity; keep the strongest confidence.
    std::map<std::pair<NodeType, std::string>, EntityGroup> groups;
    for (const CandidateEntity& c : accepted.entities) {
        auto [it, inserted] = groups.try_emplace({c.entity_type, c.surface},
                                                 EntityGroup{c.entity_type, c.surface, c.confidence, &c.embedding});
        if (!inserted && c.confidence > it->second.confidence) {
            it->second.confidence = c.confidence;
            it->second.embedding = &c.embedding;
        }
    }
    std::vector<const EntityGroup*> ranked;
    for (const auto& [key, grp] : groups) ranked.push_back(&grp);
    std::stable_sort(ranked.begin(), ranked.end(), [](const EntityGroup* a, const EntityGroup* b) {
        return a->confidence > b->confidence;
    });

    std::map<std::pair<NodeType, std::string>, NodeId> resolved;
    for (const EntityGroup* grp : ranked) {
        const auto tokens = split_surface(grp->surface);
        NodeId id = graph::make_node_id(grp->type, tokens);
        const double conf = std::clamp(grp->confidence, 0.0, 1.0);
        const Node* existing = g.find_node(id);
        if (existing == nullptr || existing->type != grp->type) {
            existing = nullptr;
            if (const NodeId* linked = best_link(g, grp->type, *grp->embedding, options.link_threshold)) {
                id = *linked;
                existing = &g.node(id);
            }
        }
        if (existing != nullptr) {
            g.set_relevance(id, std::clamp(params.gamma * existing->relevance + (1.0 - params.gamma) * conf, 0.0, 1.0));
            ++report.nodes_merged;
        } else if (budget > 0) {
            Node n;
            n.id = id;
            n.type = grp->type;
            n.label = grp->surface;
            n.embedding = *grp->embedding;
            n.relevance = conf;
            g.add_node(std::move(n));
            ++report.nodes_added;
            --budget;
        } else {
            ++report.over_budget;
            continue;
        }
        resolved.emplace(std::make_pair(grp->type, grp->surface), id);
    }

    // Evidence per typed link (soft counts per document) and per node pair.
    std::map<EdgeKey, std::map<std::string, double>> typed;
    std::map<std::pair<NodeId, NodeId>, std::set<std::string>> pair_docs;
    for (const CandidateRelation& r : accepted.relations) {
        auto src = resolved.find({r.src_type, r.src_surface});
        auto dst = resolved.find({r.dst_type, r.dst_surface});
        if (src == resolved.end() || dst == resolved.end()) continue;
        if (src->second == dst->second) continue;
        double& p = typed[EdgeKey{src->second, dst->second, r.edge_type}][r.provenance];
        p = std::max(p, std::clamp(r.prob, 0.0, 1.0));
        pair_docs[std::minmax(src->second, dst->second)].insert(r.provenance);
    }

    struct Link {
        EdgeKey key;
        double prob;
        std::size_t docs;
    };
    std::vector<Link> links;
    for (const auto& [key, per_doc] : typed) {
        double soft = 0.0;
        for (const auto& [doc, p] : per_doc) soft += p;
        const std::size_t observations = pair_docs.at(std::minmax(key.src, key.dst)).size();
        LinkCounts counts{soft, static_cast<double>(observations), options.alternatives};
        links.push_back({key, estimate_link_probability(counts, mrf), per_doc.size()});
    }
    std::stable_sort(links.begin(), links.end(),
                     [](const Link& a, const Link& b) { return a.prob > b.prob; });

    for (const Link& link : links) {
        if (!(link.prob > params.tau)) continue;
        if (g.has_edge(link.key)) {
            g.update_edge_weight(link.key, link.prob, params.gamma);
            ++report.edges_updated;
        } else if (budget > 0) {
            Edge e{link.key.src, link.key.dst, link.key.type, link.prob, link.docs, 0, 0};
            g.add_edge(std::move(e), {params.gamma, graph::CapacityPolicy::Evict});
            ++report.edges_added;
            --budget;
        } else {
            ++report.over_budget;
        }
    }

    report.elements_pruned = prune(g, mrf, options.threads).size();
    report.edges_evicted = enforce_capacity(g);
    report.final_edge_count = g.edge_count();
    report.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace dkg::fusion
