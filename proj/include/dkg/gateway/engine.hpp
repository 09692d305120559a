/**
 * @file engine.hpp
 * @brief The engine: graph, parameters, extractor, replay buffer and
 *        audit log behind one reader/writer lock, persisted to a data
 *        directory.
 *
 * Data directory layout:
 *   dkg.conf        configuration
 *   graph.json      graph snapshot (write-then-rename)
 *   params.json     live parameters
 *   lexicon.json    gazetteer for the lexicon extractor
 *   served.jsonl    served recommendation contexts, one per case
 *   feedback.jsonl  feedback events in arrival order
 *   audit.jsonl     parameter changes with before/after values
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dkg/extraction/extractor.hpp"
#include "dkg/feedback/feedback.hpp"
#include "dkg/fusion/ingest.hpp"
#include "dkg/gateway/config.hpp"
#include "dkg/graph/knowledge_graph.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::gateway {

inline constexpr std::string_view kGraphFile = "graph.json";
inline constexpr std::string_view kParamsFile = "params.json";
inline constexpr std::string_view kLexiconFile = "lexicon.json";
inline constexpr std::string_view kServedFile = "served.jsonl";
inline constexpr std::string_view kFeedbackFile = "feedback.jsonl";
inline constexpr std::string_view kAuditFile = "audit.jsonl";

/// One diagnose/recommend request.
struct CaseRequest {
    std::optional<std::string> case_id;
    reasoning::SymptomSet symptoms;
    /// Profile id resolved against the graph when features are absent.
    reasoning::PatientProfile profile;
    /// Defaults to every Treatment/Medication node of the graph.
    std::optional<std::vector<reasoning::TreatmentOption>> options;
    std::optional<reasoning::Budget> budget;
};

struct CaseResult {
    reasoning::Posterior posterior;
    reasoning::TreatmentPlan plan;
    /// With a budget: the plan recommend() picks without one.
    std::optional<reasoning::TreatmentPlan> unconstrained;
};

struct AuditEntry {
    std::uint64_t sequence = 0;
    std::string reason;  ///< "feedback" or "manual"
    TunableParams before;
    TunableParams after;
    std::optional<double> reward_before;
    std::optional<double> reward_after;
};

struct FeedbackOutcome {
    std::size_t accepted = 0;
    std::optional<feedback::UpdateResult> update;
    TunableParams params;
};

struct PipelineResult {
    std::vector<fusion::BatchReport> reports;
    std::vector<reasoning::Posterior> diagnoses;
    std::vector<reasoning::TreatmentPlan> plans;
    std::optional<FeedbackOutcome> feedback;
};

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    graph::CapacityConfig capacity;
    graph::BatchCounter batch_counter = 0;
    std::map<std::string, std::size_t> nodes_by_type;
    TunableParams params;
};

class Engine {
public:
    /// Opens (or starts) the state under cfg.data_dir. persist = false keeps
    /// everything in memory.
    explicit Engine(EngineConfig cfg, bool persist = true);

    const EngineConfig& config() const noexcept { return cfg_; }

    // -- writers -----------------------------------------------------------

    /// Phases 1-3 on a corpus, docs_per_batch documents per batch.
    fusion::IngestResult ingest(const std::vector<extraction::Document>& docs);

    /// Record events, then run one parameter update over the replay buffer.
    FeedbackOutcome submit_feedback(const std::vector<feedback::FeedbackEvent>& events);

    /// Manual parameter change; throws InvalidConfig when out of bounds.
    TunableParams set_params(const TunableParams& params);

    void replace_graph(graph::KnowledgeGraph g);
    void set_lexicon(extraction::Lexicon lexicon);

    /// Phases 1-4, then Phase 5 when feedback is given. Errors carry a phase tag.
    PipelineResult run_pipeline(const std::vector<extraction::Document>& corpus, const std::vector<CaseRequest>& cases,
                                const std::vector<feedback::FeedbackEvent>& feedback = {});

    // -- readers -----------------------------------------------------------

    reasoning::Posterior diagnose(const reasoning::SymptomSet& symptoms) const;
    /// Diagnose, then recommend (constrained when a budget is given). A
    /// case_id records the served context for later feedback.
    CaseResult recommend(const CaseRequest& request);
    std::vector<reasoning::EvidenceEntry> explain(const graph::NodeId& disease,
                                                  const reasoning::SymptomSet& symptoms) const;

    TunableParams params() const;
    GraphStats stats() const;
    std::vector<AuditEntry> audit() const;
    graph::KnowledgeGraph graph_copy() const;
    std::string snapshot() const;
    std::size_t replay_size() const;

private:
    void load_state();
    void persist_graph() const;
    void persist_params() const;
    void append_line(std::string_view file, const std::string& line) const;
    void append_audit(AuditEntry entry);
    std::unique_ptr<extraction::ExtractorPort> make_extractor() const;
    fusion::FusionOptions fusion_options() const;
    reasoning::PatientProfile resolve_profile(const reasoning::PatientProfile& p) const;
    CaseResult run_case(const CaseRequest& request) const;
    FeedbackOutcome feedback_locked(const std::vector<feedback::FeedbackEvent>& events);
    void record_served(feedback::ReplayCase context);
    std::filesystem::path file(std::string_view name) const { return cfg_.data_dir / name; }

    EngineConfig cfg_;
    bool persist_;
    mutable std::shared_mutex mutex_;
    graph::KnowledgeGraph graph_;
    TunableParams params_;
    extraction::Lexicon lexicon_;
    std::unique_ptr<extraction::ExtractorPort> extractor_;
    std::map<std::string, feedback::ReplayCase> served_;
    feedback::ReplayBuffer replay_;
    std::vector<AuditEntry> audit_;
};

/// A small seeded graph (influenza, common cold, ...) and its lexicon.
graph::KnowledgeGraph demo_graph();
extraction::Lexicon demo_lexicon();

}  // namespace dkg::gateway
