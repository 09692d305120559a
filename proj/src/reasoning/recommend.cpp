/**
 * @file recommend.cpp
 * @brief Utility, expected-utility argmax and the budget-constrained planner.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dkg/error.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::reasoning {

using graph::NodeType;

namespace {

bool unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_weights(const UtilityWeights& w) {
    if (!(std::isfinite(w.w1) && std::isfinite(w.w2) && w.w1 >= 0.0 && w.w2 >= 0.0)) {
        throw Error(ErrorCode::InvalidConfig, "utility weights must be finite and nonnegative");
    }
}

void check_options(const std::vector<TreatmentOption>& options) {
    if (options.empty()) throw Error(ErrorCode::NoOptions, "no treatment options");
    std::set<NodeId> seen;
    for (const auto& t : options) {
        if (t.id.empty()) throw Error(ErrorCode::InvalidField, "treatment option without id");
        if (!seen.insert(t.id).second) throw Error(ErrorCode::InvalidField, "duplicate option " + t.id);
        if (!std::isfinite(t.cost) || t.cost < 0.0) {
            throw Error(ErrorCode::InvalidField, "cost of " + t.id + " must be finite and >= 0");
        }
        for (const auto& [d, e] : t.efficacy_by_disease) {
            if (!unit_interval(e)) throw Error(ErrorCode::InvalidField, "efficacy outside [0,1] for " + t.id);
        }
        for (const auto& [f, r] : t.risk_features) {
            if (!unit_interval(r)) throw Error(ErrorCode::InvalidField, "risk outside [0,1] for " + t.id);
        }
    }
}

void check_profile(const PatientProfile& p) {
    for (const auto& [f, v] : p.features) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidField, "profile feature " + f + " not finite");
    }
}

// Options in id order with their expected utilities.
struct Scored {
    const TreatmentOption* option;
    double eu;
};

std::vector<Scored> score_options(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                                  const PatientProfile& profile, const UtilityWeights& w) {
    check_weights(w);
    check_options(options);
    check_profile(profile);
    std::vector<Scored> scored;
    scored.reserve(options.size());
    for (const auto& t : options) {
        double eu = 0.0;
        for (const auto& e : posterior.entries) eu += e.probability * utility(t, e.disease, profile, w);
        scored.push_back({&t, eu});
    }
    std::sort(scored.begin(), scored.end(),
              [](const Scored& a, const Scored& b) { return a.option->id < b.option->id; });
    return scored;
}

TreatmentPlan make_plan(const std::vector<Scored>& scored, const std::vector<std::size_t>& picks,
                        const Posterior& posterior, const PatientProfile& profile, const UtilityWeights& w,
                        std::string method) {
    TreatmentPlan plan;
    plan.method = std::move(method);
    for (const auto i : picks) {
        plan.chosen.push_back(scored[i].option->id);
        plan.expected_utility += scored[i].eu;
        plan.total_cost += scored[i].option->cost;
    }
    for (const auto& e : posterior.entries) {
        double u = 0.0;
        for (const auto i : picks) u += utility(*scored[i].option, e.disease, profile, w);
        plan.per_disease_breakdown.push_back({e.disease, e.probability, u});
    }
    return plan;
}

struct Subset {
    std::vector<std::size_t> picks;
    double eu = 0.0;
    double cost = 0.0;
};

Subset subset_of(const std::vector<Scored>& scored, std::vector<std::size_t> picks) {
    std::sort(picks.begin(), picks.end());
    Subset s;
    for (const auto i : picks) {
        s.eu += scored[i].eu;
        s.cost += scored[i].option->cost;
    }
    s.picks = std::move(picks);
    return s;
}

// Depth-first enumeration visits index lists (hence id lists) in
// lexicographic order, so a strict comparison keeps the smallest id list
// among equal utilities.
void enumerate(const std::vector<Scored>& scored, const Budget& b, std::vector<std::size_t>& current,
               double eu, double cost, std::optional<Subset>& best) {
    const std::size_t start = current.empty() ? 0 : current.back() + 1;
    for (std::size_t i = start; i < scored.size(); ++i) {
        const double c = cost + scored[i].option->cost;
        const double u = eu + scored[i].eu;
        current.push_back(i);
        if (c <= b.c_max && (!best || u > best->eu)) best = Subset{current, u, c};
        if (current.size() < b.max_plan_size) enumerate(scored, b, current, u, c, best);
        current.pop_back();
    }
}

struct SubgradientResult {
    std::optional<Subset> best;
    double mu = 0.0;
    double dual = std::numeric_limits<double>::infinity();
};

// Lagrangian relaxation of the budget: for fixed mu the relaxed problem is
// separable, solved by taking the highest reduced values eu - mu*cost.
SubgradientResult run_subgradient(const std::vector<Scored>& scored, const Budget& b) {
    SubgradientResult r;
    std::vector<std::size_t> order(scored.size());
    for (std::size_t iter = 0;; ++iter) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        const double mu = r.mu;
        auto reduced = [&](std::size_t i) { return scored[i].eu - mu * scored[i].option->cost; };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            const double ra = reduced(a);
            const double rc = reduced(c);
            return ra != rc ? ra > rc : a < c;
        });
        std::vector<std::size_t> picks{order[0]};
        double value = reduced(order[0]);
        for (std::size_t j = 1; j < order.size() && picks.size() < b.max_plan_size && reduced(order[j]) > 0.0; ++j) {
            picks.push_back(order[j]);
            value += reduced(order[j]);
        }
        r.dual = std::min(r.dual, value + mu * b.c_max);

        Subset s = subset_of(scored, std::move(picks));
        const double overspend = s.cost - b.c_max;
        if (s.cost <= b.c_max && (!r.best || s.eu > r.best->eu ||
                                  (s.eu == r.best->eu && s.picks < r.best->picks))) {
            r.best = s;
        }
        if (iter >= b.max_iter) break;
        r.mu = std::max(0.0, mu + b.eta * overspend);
    }
    return r;
}

// Best affordable single option; the subgradient's primal fallback.
std::optional<Subset> best_single(const std::vector<Scored>& scored, const Budget& b) {
    std::optional<Subset> best;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (scored[i].option->cost > b.c_max) continue;
        if (!best || scored[i].eu > best->eu) best = Subset{{i}, scored[i].eu, scored[i].option->cost};
    }
    return best;
}

TreatmentPlan finish(const std::vector<Scored>& scored, const Subset& s, const Posterior& posterior,
                     const PatientProfile& profile, const UtilityWeights& w, const Budget& b,
                     const SubgradientResult& sg, std::string method) {
    auto plan = make_plan(scored, s.picks, posterior, profile, w, std::move(method));
    plan.lambda_final = sg.mu;
    plan.budget_ok = plan.total_cost <= b.c_max;
    plan.dual_bound = sg.dual;
    if (sg.best) plan.subgradient_utility = sg.best->eu;
    return plan;
}

}  // namespace

double risk(const TreatmentOption& t, const PatientProfile& p) {
    double sum = 0.0;
    for (const auto& [feature, contribution] : t.risk_features) {
        if (auto it = p.features.find(feature); it != p.features.end()) sum += contribution * it->second;
    }
    return std::clamp(sum, 0.0, 1.0);
}

double utility(const TreatmentOption& t, const NodeId& disease, const PatientProfile& p, const UtilityWeights& w) {
    const auto it = t.efficacy_by_disease.find(disease);
    const double efficacy = it != t.efficacy_by_disease.end() ? it->second : 0.0;
    return w.w1 * efficacy - w.w2 * risk(t, p);
}

std::vector<TreatmentOption> with_graph_efficacy(std::vector<TreatmentOption> options, const KnowledgeGraph& g) {
    for (auto& t : options) {
        if (!g.has_node(t.id)) continue;
        std::map<NodeId, double> from_edges;
        auto take = [&](const graph::EdgeKey& k, const NodeId& other) {
            if (k.type != EdgeType::Therapeutic) return;
            const auto* n = g.find_node(other);
            if (n == nullptr || n->type != NodeType::Disease) return;
            double& slot = from_edges[other];
            slot = std::max(slot, g.edge(k).weight);
        };
        for (const auto& k : g.out_edges(t.id)) take(k, k.dst);
        for (const auto& k : g.in_edges(t.id)) take(k, k.src);
        for (const auto& [d, weight] : from_edges) t.efficacy_by_disease.try_emplace(d, weight);
    }
    return options;
}

std::vector<TreatmentOption> options_from_graph(const KnowledgeGraph& g) {
    static const std::string kRisk = "risk:";
    static const std::string kEfficacy = "efficacy:";
    std::vector<TreatmentOption> options;
    for (const auto type : {NodeType::Treatment, NodeType::Medication}) {
        for (const auto& id : g.nodes_of_type(type)) {
            TreatmentOption t;
            t.id = id;
            for (const auto& [name, value] : g.node(id).attributes) {
                if (name == "cost") {
                    t.cost = std::max(0.0, value);
                } else if (name.rfind(kRisk, 0) == 0) {
                    t.risk_features[name.substr(kRisk.size())] = std::clamp(value, 0.0, 1.0);
                } else if (name.rfind(kEfficacy, 0) == 0) {
                    t.efficacy_by_disease[name.substr(kEfficacy.size())] = std::clamp(value, 0.0, 1.0);
                }
            }
            options.push_back(std::move(t));
        }
    }
    std::sort(options.begin(), options.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return with_graph_efficacy(std::move(options), g);
}

PatientProfile profile_from_graph(const KnowledgeGraph& g, const NodeId& id) {
    const auto& n = g.node(id);
    if (n.type != NodeType::PatientProfile) throw Error(ErrorCode::InvalidField, id + " is not a PatientProfile");
    return PatientProfile{id, n.attributes};
}

void Budget::validate() const {
    if (!std::isfinite(c_max) || c_max < 0.0) throw Error(ErrorCode::InvalidConfig, "c_max must be finite and >= 0");
    if (!std::isfinite(eta) || eta <= 0.0) throw Error(ErrorCode::InvalidConfig, "eta must be > 0");
    if (max_plan_size < 1 || max_plan_size > kMaxPlanSize) {
        throw Error(ErrorCode::InvalidConfig, "max_plan_size must be in [1,3]");
    }
}

TreatmentPlan recommend(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                        const PatientProfile& profile, const UtilityWeights& w) {
    const auto scored = score_options(posterior, options, profile, w);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scored.size(); ++i) {
        if (scored[i].eu > scored[best].eu) best = i;
    }
    return make_plan(scored, {best}, posterior, profile, w, "argmax");
}

TreatmentPlan recommend_constrained(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                                    const PatientProfile& profile, const UtilityWeights& w, const Budget& budget) {
    budget.validate();
    const auto scored = score_options(posterior, options, profile, w);
    if (scored.size() > kExactOptionLimit) return recommend_subgradient(posterior, options, profile, w, budget);

    const auto sg = run_subgradient(scored, budget);
    std::optional<Subset> best;
    std::vector<std::size_t> current;
    enumerate(scored, budget, current, 0.0, 0.0, best);
    if (!best) throw Error(ErrorCode::NoFeasiblePlan, "every option exceeds the budget");
    return finish(scored, *best, posterior, profile, w, budget, sg, "exact");
}

TreatmentPlan recommend_subgradient(const Posterior& posterior, const std::vector<TreatmentOption>& options,
                                    const PatientProfile& profile, const UtilityWeights& w, const Budget& budget) {
    budget.validate();
    const auto scored = score_options(posterior, options, profile, w);
    const auto sg = run_subgradient(scored, budget);
    auto best = sg.best;
    if (const auto single = best_single(scored, budget); single && (!best || single->eu > best->eu)) best = single;
    if (!best) throw Error(ErrorCode::NoFeasiblePlan, "every option exceeds the budget");
    return finish(scored, *best, posterior, profile, w, budget, sg, "subgradient");
}

}  // namespace dkg::reasoning
