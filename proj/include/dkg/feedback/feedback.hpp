/**
 * @file feedback.hpp
 * @brief Clinician feedback, the accuracy/complexity reward and the bounded
 *        parameter tuner.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/params.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::feedback {

using graph::KnowledgeGraph;
using graph::NodeId;

struct Likert {
    int accuracy = 0;
    int reliability = 0;
    int usability = 0;

    friend bool operator==(const Likert&, const Likert&) = default;
};

struct FeedbackEvent {
    std::string case_id;
    bool diagnosis_correct = false;
    bool treatment_accepted = false;
    std::optional<Likert> likert;
    std::optional<NodeId> corrected_diagnosis;
    std::string clinician_id;

    /// Throws InvalidFeedback for an empty case id or a Likert score outside 1..5.
    void validate() const;
    /// Mean of the two 0/1 indicators.
    double accuracy() const noexcept;

    friend bool operator==(const FeedbackEvent&, const FeedbackEvent&) = default;
};

/// |E| / max_edges, in [0,1].
double complexity(const KnowledgeGraph& g) noexcept;

struct RewardRecord {
    std::vector<double> window;  ///< per-case accuracy
    double complexity = 0.0;
    double reward = 0.0;
};

/// R = sum_t acc_t - lambda_c * |E|/max_edges.
RewardRecord reward_record(const std::vector<FeedbackEvent>& window, const KnowledgeGraph& g,
                           const TunableParams& params);
double reward(const std::vector<FeedbackEvent>& window, const KnowledgeGraph& g, const TunableParams& params);

/// A served case together with its feedback. Cases with symptoms can be
/// re-run under candidate parameters; bare events replay their indicators.
struct ReplayCase {
    FeedbackEvent event;
    reasoning::SymptomSet symptoms;
    reasoning::PatientProfile profile;
    std::vector<reasoning::TreatmentOption> options;
    std::optional<reasoning::Budget> budget;
    NodeId served_diagnosis;
    std::vector<NodeId> served_treatment;
};

/// FIFO buffer of the most recent cases.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 256);

    void push(ReplayCase c);
    void clear() noexcept { cases_.clear(); }

    std::size_t size() const noexcept { return cases_.size(); }
    bool empty() const noexcept { return cases_.empty(); }
    std::size_t capacity() const noexcept { return capacity_; }
    const std::deque<ReplayCase>& cases() const noexcept { return cases_; }

private:
    std::size_t capacity_;
    std::deque<ReplayCase> cases_;
};

struct ReplayOptions {
    double epsilon = reasoning::kDefaultEpsilon;
    std::size_t max_eval = 256;  ///< cases replayed per evaluation; a seeded subsample above this
};

/// Accuracy of one case under `params`. Diagnosis: the top disease on the
/// graph restricted to edges with weight >= tau must be the served disease
/// when it was confirmed, the correction when one was given, and anything
/// but the served disease otherwise. Treatment: recomputing with (w1, w2)
/// must reproduce an accepted plan and avoid a rejected one.
double replay_accuracy(const ReplayCase& c, const KnowledgeGraph& g, const TunableParams& params,
                       const ReplayOptions& options = {});

/// sum of replay accuracies - lambda_c * (edges with weight >= tau) / max_edges.
double replay_reward(const std::vector<const ReplayCase*>& cases, const KnowledgeGraph& g,
                     const TunableParams& params, const ReplayOptions& options = {});

struct ParamStep {
    ParamId param;
    double before = 0.0;
    double after = 0.0;
    double reward = 0.0;  ///< replay reward after this coordinate step
};

struct UpdateResult {
    TunableParams before;
    TunableParams after;
    double reward_before = 0.0;
    double reward_after = 0.0;
    std::size_t cases_replayed = 0;
    std::vector<ParamStep> steps;
};

/// Parameter update strategy.
class ParamTuner {
public:
    virtual ~ParamTuner() = default;
    virtual UpdateResult update(const TunableParams& params, const ReplayBuffer& history,
                                const KnowledgeGraph& g, std::uint64_t seed) const = 0;
};

/// Coordinates visited by the hill climb, in order. lambda_c is not tuned:
/// the reward it weights would always favour driving it to zero.
inline constexpr std::array<ParamId, 6> kTunedOrder = {ParamId::W1,  ParamId::W2,    ParamId::Gamma,
                                                       ParamId::Tau, ParamId::Alpha, ParamId::Beta};

/// Coordinate-wise finite-difference hill climb: for each coordinate try
/// value - delta and value + delta (delta = step_fraction of the bound
/// range, clamped), keep the best of the three, centre on ties.
class HillClimbTuner final : public ParamTuner {
public:
    explicit HillClimbTuner(ReplayOptions options = {}, double step_fraction = 0.05);

    UpdateResult update(const TunableParams& params, const ReplayBuffer& history, const KnowledgeGraph& g,
                        std::uint64_t seed) const override;

private:
    ReplayOptions options_;
    double step_fraction_;
};

UpdateResult update_params(const TunableParams& params, const ReplayBuffer& history, const KnowledgeGraph& g,
                           std::uint64_t seed, const ReplayOptions& options = {});

struct LikertDimension {
    double mean = 0.0;
    double sd = 0.0;  ///< sample standard deviation; 0 for a single score
};

struct LikertSummary {
    std::size_t count = 0;
    LikertDimension accuracy;
    LikertDimension reliability;
    LikertDimension usability;
};

/// Throws NoLikertData when no event carries scores.
LikertSummary aggregate_likert(const std::vector<FeedbackEvent>& events);

/// "4.3 (± 0.2)"
std::string format_likert(const LikertDimension& d);

}  // namespace dkg::feedback
