/**
 * @file feedback.cpp
 * @brief Reward, replay evaluation, hill-climb tuner and Likert summaries.
 */

#include "dkg/feedback/feedback.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "dkg/error.hpp"

namespace dkg::feedback {

namespace {

bool valid_score(int s) { return s >= 1 && s <= 5; }

double indicator(bool b) { return b ? 1.0 : 0.0; }

// Diagnosis half of a replayed case; nullopt when it cannot be re-run.
std::optional<bool> replay_diagnosis(const ReplayCase& c, const KnowledgeGraph& g, const TunableParams& params,
                                     const ReplayOptions& options, reasoning::Posterior& posterior) {
    try {
        posterior = reasoning::diagnose(g, c.symptoms, {options.epsilon, params.tau});
    } catch (const Error&) {
        return std::nullopt;
    }
    const NodeId& top = posterior.entries.front().disease;
    if (c.event.diagnosis_correct) return top == c.served_diagnosis;
    if (c.event.corrected_diagnosis) return top == *c.event.corrected_diagnosis;
    return top != c.served_diagnosis;
}

std::optional<bool> replay_treatment(const ReplayCase& c, const TunableParams& params,
                                     const reasoning::Posterior& posterior) {
    if (c.options.empty()) return std::nullopt;
    const reasoning::UtilityWeights w{params.w1, params.w2};
    std::vector<NodeId> chosen;
    try {
        chosen = c.budget ? reasoning::recommend_constrained(posterior, c.options, c.profile, w, *c.budget).chosen
                          : reasoning::recommend(posterior, c.options, c.profile, w).chosen;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoFeasiblePlan) return std::nullopt;
    }
    const bool same = chosen == c.served_treatment;
    return c.event.treatment_accepted ? same : !same;
}

std::vector<const ReplayCase*> select_cases(const ReplayBuffer& history, std::size_t max_eval,
                                            std::uint64_t seed) {
    std::vector<const ReplayCase*> all;
    all.reserve(history.size());
    for (const auto& c : history.cases()) all.push_back(&c);
    if (all.size() <= max_eval) return all;
    // Partial Fisher-Yates on raw engine output; stable across standard libraries.
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < max_eval; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (all.size() - i));
        std::swap(all[i], all[j]);
    }
    all.resize(max_eval);
    return all;
}

}  // namespace

void FeedbackEvent::validate() const {
    if (case_id.empty()) throw Error(ErrorCode::InvalidFeedback, "case_id is required");
    if (likert && !(valid_score(likert->accuracy) && valid_score(likert->reliability) &&
                    valid_score(likert->usability))) {
        throw Error(ErrorCode::InvalidFeedback, "likert scores must be integers in 1..5");
    }
    if (corrected_diagnosis && corrected_diagnosis->empty()) {
        throw Error(ErrorCode::InvalidFeedback, "corrected_diagnosis must not be empty");
    }
}

double FeedbackEvent::accuracy() const noexcept {
    return 0.5 * (indicator(diagnosis_correct) + indicator(treatment_accepted));
}

double complexity(const KnowledgeGraph& g) noexcept {
    const auto cap = g.capacity().max_edges;
    if (cap == 0) return 0.0;
    return std::min(1.0, static_cast<double>(g.edge_count()) / static_cast<double>(cap));
}

RewardRecord reward_record(const std::vector<FeedbackEvent>& window, const KnowledgeGraph& g,
                           const TunableParams& params) {
    RewardRecord r;
    r.window.reserve(window.size());
    for (const auto& e : window) r.window.push_back(e.accuracy());
    r.complexity = complexity(g);
    r.reward = std::accumulate(r.window.begin(), r.window.end(), 0.0) - params.lambda_c * r.complexity;
    return r;
}

double reward(const std::vector<FeedbackEvent>& window, const KnowledgeGraph& g, const TunableParams& params) {
    return reward_record(window, g, params).reward;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw Error(ErrorCode::InvalidConfig, "replay buffer capacity must be > 0");
}

void ReplayBuffer::push(ReplayCase c) {
    c.event.validate();
    if (cases_.size() == capacity_) cases_.pop_front();
    cases_.push_back(std::move(c));
}

double replay_accuracy(const ReplayCase& c, const KnowledgeGraph& g, const TunableParams& params,
                       const ReplayOptions& options) {
    if (c.symptoms.empty()) return c.event.accuracy();
    reasoning::Posterior posterior;
    const auto diag = replay_diagnosis(c, g, params, options, posterior);
    const auto treat = diag ? replay_treatment(c, params, posterior) : std::nullopt;
    const double d = diag ? indicator(*diag) : indicator(c.event.diagnosis_correct);
    const double t = treat ? indicator(*treat) : indicator(c.event.treatment_accepted);
    return 0.5 * (d + t);
}

double replay_reward(const std::vector<const ReplayCase*>& cases, const KnowledgeGraph& g,
                     const TunableParams& params, const ReplayOptions& options) {
    double sum = 0.0;
    for (const auto* c : cases) sum += replay_accuracy(*c, g, params, options);
    std::size_t kept = 0;
    for (const auto& [key, e] : g.edges()) {
        if (e.weight >= params.tau) ++kept;
    }
    const double cap = static_cast<double>(std::max<std::size_t>(1, g.capacity().max_edges));
    return sum - params.lambda_c * (static_cast<double>(kept) / cap);
}

HillClimbTuner::HillClimbTuner(ReplayOptions options, double step_fraction)
    : options_(options), step_fraction_(step_fraction) {
    if (!(step_fraction_ > 0.0 && step_fraction_ <= 1.0)) {
        throw Error(ErrorCode::InvalidConfig, "step fraction must lie in (0,1]");
    }
}

UpdateResult HillClimbTuner::update(const TunableParams& params, const ReplayBuffer& history,
                                    const KnowledgeGraph& g, std::uint64_t seed) const {
    params.validate();
    UpdateResult result;
    result.before = params;
    result.after = params;
    const auto cases = select_cases(history, options_.max_eval, seed);
    result.cases_replayed = cases.size();
    result.reward_before = replay_reward(cases, g, params, options_);
    result.reward_after = result.reward_before;
    if (cases.empty()) return result;

    TunableParams current = params;
    double best = result.reward_before;
    for (const ParamId id : kTunedOrder) {
        const ParamBounds b = TunableParams::bounds(id);
        const double centre = current.get(id);
        const double delta = step_fraction_ * b.range();
        double chosen = centre;
        for (const double probe : {std::clamp(centre - delta, b.lo, b.hi), std::clamp(centre + delta, b.lo, b.hi)}) {
            if (probe == centre) continue;
            TunableParams trial = current;
            trial.set(id, probe);
            const double r = replay_reward(cases, g, trial, options_);
            if (r > best) {
                best = r;
                chosen = probe;
            }
        }
        current.set(id, chosen);
        result.steps.push_back({id, centre, chosen, best});
    }
    result.after = current;
    result.reward_after = best;
    return result;
}

UpdateResult update_params(const TunableParams& params, const ReplayBuffer& history, const KnowledgeGraph& g,
                           std::uint64_t seed, const ReplayOptions& options) {
    return HillClimbTuner(options).update(params, history, g, seed);
}

LikertSummary aggregate_likert(const std::vector<FeedbackEvent>& events) {
    std::array<std::vector<double>, 3> scores;
    for (const auto& e : events) {
        if (!e.likert) continue;
        scores[0].push_back(e.likert->accuracy);
        scores[1].push_back(e.likert->reliability);
        scores[2].push_back(e.likert->usability);
    }
    if (scores[0].empty()) throw Error(ErrorCode::NoLikertData, "no events carry Likert scores");

    auto summarize = [](const std::vector<double>& xs) {
        const double n = static_cast<double>(xs.size());
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
        double ss = 0.0;
        for (const double x : xs) ss += (x - mean) * (x - mean);
        return LikertDimension{mean, xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
    };
    LikertSummary s;
    s.count = scores[0].size();
    s.accuracy = summarize(scores[0]);
    s.reliability = summarize(scores[1]);
    s.usability = summarize(scores[2]);
    return s;
}

std::string format_likert(const LikertDimension& d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f (± %.1f)", d.mean, d.sd);
    return buf;
}

}  // namespace dkg::feedback
