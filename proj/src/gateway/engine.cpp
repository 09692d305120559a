#include "dkg/gateway/engine.hpp"

#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "dkg/error.hpp"
#include "dkg/extraction/corpus.hpp"
#include "dkg/extraction/remote_extractor.hpp"
#include "dkg/extraction/text.hpp"
#include "dkg/gateway/codec.hpp"
#include "dkg/gateway/service.hpp"
#include "dkg/graph/snapshot.hpp"

namespace dkg::gateway {

using graph::NodeType;

namespace {

constexpr std::size_t kServedPerReplaySlot = 4;

template <class F>
void for_each_line(const std::filesystem::path& path, F&& f) {
    if (!std::filesystem::exists(path)) return;
    std::istringstream in(extraction::read_file(path));
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            f(parse_json(line));
        } catch (const Error& e) {
            throw Error(ErrorCode::CorruptDocument,
                        path.filename().string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

template <class F>
auto tagged(std::string_view phase, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.phase().empty()) throw;
        throw e.with_phase(std::string(phase));
    }
}

AuditEntry audit_from_json(const json& j) {
    AuditEntry a;
    a.sequence = j.at("sequence").get<std::uint64_t>();
    a.reason = j.at("reason").get<std::string>();
    a.before = params_from_json(j.at("before"), {});
    a.after = params_from_json(j.at("after"), {});
    if (!j.at("reward_before").is_null()) a.reward_before = j.at("reward_before").get<double>();
    if (!j.at("reward_after").is_null()) a.reward_after = j.at("reward_after").get<double>();
    return a;
}

}  // namespace

Engine::Engine(EngineConfig cfg, bool persist)
    : cfg_(std::move(cfg)), persist_(persist), graph_(cfg_.capacity), params_(cfg_.params),
      replay_(cfg_.replay_capacity) {
    cfg_.validate();
    if (persist_) {
        std::filesystem::create_directories(cfg_.data_dir);
        load_state();
    }
}

void Engine::load_state() {
    if (std::filesystem::exists(file(kGraphFile))) {
        graph_ = graph::load_file(file(kGraphFile));
        if (!(graph_.capacity() == cfg_.capacity)) graph_.set_capacity(cfg_.capacity);
    }
    if (std::filesystem::exists(file(kParamsFile))) {
        params_ = params_from_json(parse_json(extraction::read_file(file(kParamsFile))), cfg_.params);
        params_.validate();
    }
    if (std::filesystem::exists(file(kLexiconFile))) lexicon_ = extraction::load_lexicon_file(file(kLexiconFile));
    for_each_line(file(kServedFile), [&](const json& j) {
        auto c = replay_case_from_json(j);
        served_[c.event.case_id] = std::move(c);
    });
    for_each_line(file(kFeedbackFile), [&](const json& j) {
        const auto e = feedback_from_json(j);
        feedback::ReplayCase c;
        if (auto it = served_.find(e.case_id); it != served_.end()) c = it->second;
        c.event = e;
        replay_.push(std::move(c));
    });
    for_each_line(file(kAuditFile), [&](const json& j) { audit_.push_back(audit_from_json(j)); });
}

void Engine::persist_graph() const {
    if (persist_) graph::save_file(graph_, file(kGraphFile));
}

void Engine::persist_params() const {
    if (persist_) graph::atomic_write(file(kParamsFile), to_json(params_).dump(2) + "\n");
}

void Engine::append_line(std::string_view name, const std::string& line) const {
    if (!persist_) return;
    std::ofstream out(file(name), std::ios::app);
    out << line << "\n";
    if (!out) throw Error(ErrorCode::IoError, "cannot append to " + file(name).string());
}

void Engine::append_audit(AuditEntry entry) {
    entry.sequence = audit_.size() + 1;
    append_line(kAuditFile, audit_json(entry).dump());
    audit_.push_back(std::move(entry));
}

std::unique_ptr<extraction::ExtractorPort> Engine::make_extractor() const {
    if (cfg_.extractor == ExtractorKind::Remote) {
        if (!cfg_.remote_replay.empty()) {
            return std::make_unique<extraction::RemoteLLMExtractor>(
                extraction::RemoteLLMExtractor::replay_file(cfg_.remote_replay, cfg_.embedding_dim));
        }
        return std::make_unique<extraction::RemoteLLMExtractor>(cfg_.remote());
    }
    if (lexicon_.empty()) throw Error(ErrorCode::InvalidConfig, "no lexicon loaded; run init --demo or init --lexicon");
    return std::make_unique<extraction::LexiconExtractor>(lexicon_, extraction::PatternTable::defaults(),
                                                          cfg_.embedding_dim);
}

fusion::FusionOptions Engine::fusion_options() const {
    fusion::FusionOptions o;
    o.link_threshold = cfg_.link_threshold;
    o.smoothing = cfg_.mrf_smoothing;
    return o;
}

fusion::IngestResult Engine::ingest(const std::vector<extraction::Document>& docs) {
    std::unique_lock lock(mutex_);
    tagged(fusion::kPhaseIngestion, [&] {
        std::set<std::string> ids;
        for (const auto& d : docs) {
            if (d.doc_id.empty()) throw Error(ErrorCode::InvalidField, "document without doc_id");
            if (!ids.insert(d.doc_id).second) throw Error(ErrorCode::CorruptDocument, "duplicate doc_id " + d.doc_id);
        }
        return 0;
    });
    if (docs.empty()) return {};
    if (!extractor_) extractor_ = tagged(fusion::kPhaseExtraction, [&] { return make_extractor(); });
    try {
        auto result = fusion::ingest(graph_, docs, *extractor_, params_, fusion_options(), cfg_.docs_per_batch);
        persist_graph();
        return result;
    } catch (...) {
        persist_graph();  // batches applied before the failure stay
        throw;
    }
}

reasoning::PatientProfile Engine::resolve_profile(const reasoning::PatientProfile& p) const {
    if (!p.features.empty() || p.id.empty()) return p;
    return reasoning::profile_from_graph(graph_, p.id);
}

reasoning::Posterior Engine::diagnose(const reasoning::SymptomSet& symptoms) const {
    std::shared_lock lock(mutex_);
    for (const auto& s : symptoms) {
        const auto* n = graph_.find_node(s);
        if (n == nullptr || n->type != NodeType::Symptom) throw Error(ErrorCode::InvalidField, "unknown symptom " + s);
    }
    return reasoning::diagnose(graph_, symptoms, {cfg_.epsilon, 0.0});
}

CaseResult Engine::run_case(const CaseRequest& request) const {
    for (const auto& s : request.symptoms) {
        const auto* n = graph_.find_node(s);
        if (n == nullptr || n->type != NodeType::Symptom) throw Error(ErrorCode::InvalidField, "unknown symptom " + s);
    }
    CaseResult r;
    r.posterior = reasoning::diagnose(graph_, request.symptoms, {cfg_.epsilon, 0.0});
    const auto profile = resolve_profile(request.profile);
    const auto options = request.options ? reasoning::with_graph_efficacy(*request.options, graph_)
                                         : reasoning::options_from_graph(graph_);
    const reasoning::UtilityWeights w{params_.w1, params_.w2};
    if (request.budget) {
        r.unconstrained = reasoning::recommend(r.posterior, options, profile, w);
        r.plan = reasoning::recommend_constrained(r.posterior, options, profile, w, *request.budget);
    } else {
        r.plan = reasoning::recommend(r.posterior, options, profile, w);
    }
    return r;
}

void Engine::record_served(feedback::ReplayCase context) {
    append_line(kServedFile, to_json(context).dump());
    served_[context.event.case_id] = std::move(context);
    // Keep the context table bounded; the smallest case ids go first.
    while (served_.size() > kServedPerReplaySlot * cfg_.replay_capacity) served_.erase(served_.begin());
}

CaseResult Engine::recommend(const CaseRequest& request) {
    CaseResult result;
    feedback::ReplayCase context;
    {
        std::shared_lock lock(mutex_);
        result = run_case(request);
        if (!request.case_id) return result;
        context.event.case_id = *request.case_id;
        context.symptoms = request.symptoms;
        context.profile = resolve_profile(request.profile);
        context.options = request.options ? reasoning::with_graph_efficacy(*request.options, graph_)
                                          : reasoning::options_from_graph(graph_);
        context.budget = request.budget;
        context.served_diagnosis = result.posterior.entries.front().disease;
        context.served_treatment = result.plan.chosen;
    }
    std::unique_lock lock(mutex_);
    record_served(std::move(context));
    return result;
}

std::vector<reasoning::EvidenceEntry> Engine::explain(const graph::NodeId& disease,
                                                      const reasoning::SymptomSet& symptoms) const {
    std::shared_lock lock(mutex_);
    return reasoning::explain(graph_, disease, symptoms, cfg_.epsilon);
}

FeedbackOutcome Engine::feedback_locked(const std::vector<feedback::FeedbackEvent>& events) {
    for (const auto& e : events) e.validate();
    FeedbackOutcome out;
    for (const auto& e : events) {
        append_line(kFeedbackFile, to_json(e).dump());
        feedback::ReplayCase c;
        if (auto it = served_.find(e.case_id); it != served_.end()) c = it->second;
        c.event = e;
        replay_.push(std::move(c));
        ++out.accepted;
    }
    if (out.accepted > 0) {
        const feedback::ReplayOptions ro{cfg_.epsilon, cfg_.replay_capacity};
        auto update = feedback::update_params(params_, replay_, graph_, cfg_.seed + audit_.size(), ro);
        params_ = update.after;
        persist_params();
        append_audit({0, "feedback", update.before, update.after, update.reward_before, update.reward_after});
        out.update = std::move(update);
    }
    out.params = params_;
    return out;
}

FeedbackOutcome Engine::submit_feedback(const std::vector<feedback::FeedbackEvent>& events) {
    std::unique_lock lock(mutex_);
    return feedback_locked(events);
}

TunableParams Engine::set_params(const TunableParams& params) {
    params.validate();
    std::unique_lock lock(mutex_);
    const TunableParams before = params_;
    params_ = params;
    persist_params();
    append_audit({0, "manual", before, params_, std::nullopt, std::nullopt});
    return params_;
}

void Engine::replace_graph(graph::KnowledgeGraph g) {
    std::unique_lock lock(mutex_);
    graph_ = std::move(g);
    persist_graph();
}

void Engine::set_lexicon(extraction::Lexicon lexicon) {
    std::unique_lock lock(mutex_);
    lexicon_ = std::move(lexicon);
    extractor_.reset();
    if (persist_) graph::atomic_write(file(kLexiconFile), lexicon_.to_json());
}

PipelineResult Engine::run_pipeline(const std::vector<extraction::Document>& corpus,
                                    const std::vector<CaseRequest>& cases,
                                    const std::vector<feedback::FeedbackEvent>& feedback) {
    PipelineResult out;
    out.reports = ingest(corpus).reports;

    std::unique_lock lock(mutex_);
    for (const auto& c : cases) {
        auto r = tagged(fusion::kPhaseReasoning, [&] { return run_case(c); });
        if (c.case_id) {
            feedback::ReplayCase context;
            context.event.case_id = *c.case_id;
            context.symptoms = c.symptoms;
            context.profile = resolve_profile(c.profile);
            context.options = c.options ? reasoning::with_graph_efficacy(*c.options, graph_)
                                        : reasoning::options_from_graph(graph_);
            context.budget = c.budget;
            context.served_diagnosis = r.posterior.entries.front().disease;
            context.served_treatment = r.plan.chosen;
            record_served(std::move(context));
        }
        out.diagnoses.push_back(std::move(r.posterior));
        out.plans.push_back(std::move(r.plan));
    }
    if (!feedback.empty()) out.feedback = tagged(fusion::kPhaseFeedback, [&] { return feedback_locked(feedback); });
    return out;
}

TunableParams Engine::params() const {
    std::shared_lock lock(mutex_);
    return params_;
}

GraphStats Engine::stats() const {
    std::shared_lock lock(mutex_);
    GraphStats s;
    s.nodes = graph_.node_count();
    s.edges = graph_.edge_count();
    s.capacity = graph_.capacity();
    s.batch_counter = graph_.batch_counter();
    for (const auto t : graph::all_node_types()) {
        s.nodes_by_type[std::string(graph::to_string(t))] = graph_.nodes_of_type(t).size();
    }
    s.params = params_;
    return s;
}

std::vector<AuditEntry> Engine::audit() const {
    std::shared_lock lock(mutex_);
    return audit_;
}

graph::KnowledgeGraph Engine::graph_copy() const {
    std::shared_lock lock(mutex_);
    return graph_;
}

std::string Engine::snapshot() const {
    std::shared_lock lock(mutex_);
    return graph::snapshot(graph_);
}

std::size_t Engine::replay_size() const {
    std::shared_lock lock(mutex_);
    return replay_.size();
}

namespace {

struct DemoEntity {
    NodeType type;
    const char* label;
};

const std::vector<DemoEntity>& demo_entities() {
    static const std::vector<DemoEntity> entities = {
        {NodeType::Disease, "influenza"},
        {NodeType::Disease, "common cold"},
        {NodeType::Disease, "pneumonia"},
        {NodeType::Disease, "migraine"},
        {NodeType::Symptom, "fever"},
        {NodeType::Symptom, "cough"},
        {NodeType::Symptom, "sore throat"},
        {NodeType::Symptom, "headache"},
        {NodeType::Symptom, "runny nose"},
        {NodeType::Symptom, "nausea"},
        {NodeType::Symptom, "shortness of breath"},
        {NodeType::Treatment, "rest and fluids"},
        {NodeType::Medication, "oseltamivir"},
        {NodeType::Medication, "amoxicillin"},
        {NodeType::Medication, "sumatriptan"},
        {NodeType::Medication, "ibuprofen"},
        {NodeType::RiskFactor, "smoking"},
    };
    return entities;
}

graph::NodeId demo_id(NodeType t, const char* label) {
    return graph::make_node_id(t, extraction::preprocess(label));
}

}  // namespace

graph::KnowledgeGraph demo_graph() {
    graph::KnowledgeGraph g;
    for (const auto& e : demo_entities()) {
        graph::Node n;
        n.id = demo_id(e.type, e.label);
        n.type = e.type;
        n.label = e.label;
        n.embedding = extraction::embed(extraction::preprocess(e.label));
        g.add_node(std::move(n));
    }
    g.set_prior("d:influenza", 0.3);
    g.set_prior("d:common_cold", 0.4);
    g.set_prior("d:pneumonia", 0.1);
    g.set_prior("d:migraine", 0.2);

    using graph::EdgeType;
    const std::vector<graph::Edge> edges = {
        {"s:fever", "d:influenza", EdgeType::Diagnostic, 0.9, 1, 0, 0},
        {"s:fever", "d:pneumonia", EdgeType::Diagnostic, 0.8, 1, 0, 0},
        {"s:cough", "d:influenza", EdgeType::Diagnostic, 0.75, 1, 0, 0},
        {"s:cough", "d:common_cold", EdgeType::Diagnostic, 0.85, 1, 0, 0},
        {"s:cough", "d:pneumonia", EdgeType::Diagnostic, 0.9, 1, 0, 0},
        {"s:sore_throat", "d:common_cold", EdgeType::Diagnostic, 0.9, 1, 0, 0},
        {"s:sore_throat", "d:influenza", EdgeType::Diagnostic, 0.7, 1, 0, 0},
        {"s:headache", "d:migraine", EdgeType::Diagnostic, 0.9, 1, 0, 0},
        {"s:headache", "d:influenza", EdgeType::Diagnostic, 0.7, 1, 0, 0},
        {"s:runny_nose", "d:common_cold", EdgeType::Diagnostic, 0.95, 1, 0, 0},
        {"d:migraine", "s:nausea", EdgeType::Causal, 0.75, 1, 0, 0},
        {"d:pneumonia", "s:shortness_of_breath", EdgeType::Causal, 0.85, 1, 0, 0},
        {"t:rest_and_fluids", "d:common_cold", EdgeType::Therapeutic, 0.8, 1, 0, 0},
        {"t:rest_and_fluids", "d:influenza", EdgeType::Therapeutic, 0.7, 1, 0, 0},
        {"m:oseltamivir", "d:influenza", EdgeType::Therapeutic, 0.85, 1, 0, 0},
        {"m:amoxicillin", "d:pneumonia", EdgeType::Therapeutic, 0.85, 1, 0, 0},
        {"m:sumatriptan", "d:migraine", EdgeType::Therapeutic, 0.9, 1, 0, 0},
        {"m:ibuprofen", "d:migraine", EdgeType::Therapeutic, 0.7, 1, 0, 0},
        {"rf:smoking", "d:pneumonia", EdgeType::RiskAssociated, 0.7, 1, 0, 0},
    };
    for (const auto& e : edges) g.add_edge(e);

    g.set_attribute("t:rest_and_fluids", "cost", 1.0);
    g.set_attribute("m:oseltamivir", "cost", 8.0);
    g.set_attribute("m:oseltamivir", "risk:renal_impairment", 0.3);
    g.set_attribute("m:amoxicillin", "cost", 5.0);
    g.set_attribute("m:amoxicillin", "risk:penicillin_allergy", 0.9);
    g.set_attribute("m:sumatriptan", "cost", 12.0);
    g.set_attribute("m:sumatriptan", "risk:pregnancy", 0.5);
    g.set_attribute("m:ibuprofen", "cost", 2.0);
    g.set_attribute("m:ibuprofen", "risk:renal_impairment", 0.4);

    for (const auto& [id, label, features] : std::vector<std::tuple<const char*, const char*, std::map<std::string, double>>>{
             {"p:demo_patient", "demo patient",
              {{"age_over_65", 0.0}, {"renal_impairment", 1.0}, {"penicillin_allergy", 0.0}, {"pregnancy", 0.0}}},
             {"p:elderly_patient", "elderly patient",
              {{"age_over_65", 1.0}, {"renal_impairment", 0.0}, {"penicillin_allergy", 1.0}, {"pregnancy", 0.0}}}}) {
        graph::Node n;
        n.id = id;
        n.type = NodeType::PatientProfile;
        n.label = label;
        n.attributes = features;
        g.add_node(std::move(n));
    }
    return g;
}

extraction::Lexicon demo_lexicon() {
    extraction::Lexicon lex;
    for (const auto& e : demo_entities()) lex.add(e.label, e.type, 1.0);
    return lex;
}

}  // namespace dkg::gateway
