#include "dkg/extraction/lexicon.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "dkg/error.hpp"

namespace dkg::extraction {

using nlohmann::json;

Lexicon::Lexicon() { contexts_.emplace(std::string(kDefaultContext), std::map<NodeType, double>{}); }

void Lexicon::add(std::string_view surface, NodeType type, double score) {
    const Tokens tokens = preprocess(surface);
    if (tokens.empty()) throw Error(ErrorCode::InvalidField, "empty lexicon surface");
    if (!std::isfinite(score)) throw Error(ErrorCode::InvalidField, "lexicon score not finite");
    auto& list = entries_[join(tokens)];
    auto it = std::find_if(list.begin(), list.end(),
                           [type](const LexiconEntry& e) { return e.entity_type == type; });
    if (it != list.end()) {
        it->score = score;
    } else {
        list.push_back({type, score});
    }
    max_span_ = std::max(max_span_, tokens.size());
}

void Lexicon::add_context(std::string tag, std::map<NodeType, double> bonuses) {
    contexts_[std::move(tag)] = std::move(bonuses);
}

const std::vector<LexiconEntry>* Lexicon::find(const std::string& normalized) const {
    auto it = entries_.find(normalized);
    return it == entries_.end() ? nullptr : &it->second;
}

bool Lexicon::has_context(std::string_view tag) const {
    return contexts_.find(tag.empty() ? kDefaultContext : tag) != contexts_.end();
}

double Lexicon::bonus(std::string_view tag, NodeType type) const {
    auto it = contexts_.find(tag.empty() ? kDefaultContext : tag);
    if (it == contexts_.end()) return 0.0;
    auto b = it->second.find(type);
    return b == it->second.end() ? 0.0 : b->second;
}

namespace {

NodeType parse_type(const std::string& name) {
    auto t = graph::node_type_from_string(name);
    if (!t) throw Error(ErrorCode::InvalidConfig, "unknown entity_type '" + name + "' in lexicon");
    return *t;
}

void add_entry_json(Lexicon& lex, const std::string& surface, const json& j) {
    lex.add(surface, parse_type(j.at("entity_type").get<std::string>()),
            j.contains("score") ? j.at("score").get<double>() : 1.0);
}

}  // namespace

Lexicon Lexicon::from_json(std::string_view document) {
    try {
        const json doc = json::parse(document.begin(), document.end());
        if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "lexicon must be a JSON object");
        Lexicon lex;
        const json* entries = &doc;
        if (doc.contains("entries") && doc["entries"].is_object()) {
            entries = &doc["entries"];
            if (doc.contains("contexts")) {
                for (const auto& [tag, bonuses] : doc["contexts"].items()) {
                    std::map<NodeType, double> b;
                    for (const auto& [type, value] : bonuses.items()) b[parse_type(type)] = value.get<double>();
                    lex.add_context(tag, std::move(b));
                }
            }
        }
        for (const auto& [surface, value] : entries->items()) {
            if (value.is_array()) {
                for (const auto& e : value) add_entry_json(lex, surface, e);
            } else {
                add_entry_json(lex, surface, value);
            }
        }
        return lex;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("malformed lexicon: ") + e.what());
    }
}

std::string Lexicon::to_json() const {
    json doc;
    json contexts = json::object();
    for (const auto& [tag, bonuses] : contexts_) {
        json b = json::object();
        for (const auto& [type, value] : bonuses) b[std::string(graph::to_string(type))] = value;
        contexts[tag] = std::move(b);
    }
    json entries = json::object();
    for (const auto& [surface, list] : entries_) {
        json arr = json::array();
        for (const auto& e : list) {
            arr.push_back({{"entity_type", std::string(graph::to_string(e.entity_type))},
                           {"score", e.score}});
        }
        entries[surface] = std::move(arr);
    }
    doc["contexts"] = std::move(contexts);
    doc["entries"] = std::move(entries);
    return doc.dump(2);
}

PatternTable PatternTable::defaults() {
    using NT = NodeType;
    using ET = EdgeType;
    const std::vector<std::string> causes = {"causes", "cause", "causing", "produces", "triggers"};
    const std::vector<std::string> indicates = {"suggests", "suggest", "indicates", "indicate",
                                                "signals"};
    const std::vector<std::string> treats = {"treats", "treat", "relieves", "for", "manages"};
    return PatternTable({
        {NT::Disease, NT::Symptom, causes, ET::Causal, false, 1.0},
        {NT::Disease, NT::Symptom, {}, ET::Causal, false, 1.0},
        {NT::Symptom, NT::Disease, indicates, ET::Diagnostic, false, 1.0},
        {NT::Symptom, NT::Disease, {}, ET::Diagnostic, false, 1.0},
        {NT::Treatment, NT::Disease, treats, ET::Therapeutic, false, 1.0},
        {NT::Treatment, NT::Disease, {}, ET::Therapeutic, false, 1.0},
        {NT::Disease, NT::Treatment, {}, ET::Therapeutic, true, 1.0},
        {NT::Medication, NT::Disease, {}, ET::Therapeutic, false, 1.0},
        {NT::Disease, NT::Medication, {}, ET::Therapeutic, true, 1.0},
        {NT::Treatment, NT::Symptom, causes, ET::SideEffect, false, 1.0},
        {NT::Medication, NT::Symptom, causes, ET::SideEffect, false, 1.0},
        {NT::Medication, NT::Medication, {}, ET::Interaction, false, 1.0},
        {NT::Symptom, NT::Symptom, {}, ET::SymptomSymptom, false, 1.0},
        {NT::Disease, NT::Disease, {}, ET::ComorbidityRelated, false, 1.0},
        {NT::Comorbidity, NT::Disease, {}, ET::ComorbidityRelated, false, 1.0},
        {NT::RiskFactor, NT::Disease, {}, ET::RiskAssociated, false, 1.0},
        {NT::LifestyleFactor, NT::Disease, {}, ET::LifestyleRelated, false, 1.0},
        {NT::Gene, NT::Disease, {}, ET::Genetic, false, 1.0},
        {NT::Biomarker, NT::Disease, {}, ET::BiomarkerRelated, false, 1.0},
        {NT::DiagnosticTest, NT::Disease, {}, ET::Monitoring, false, 1.0},
        {NT::Procedure, NT::Disease, {}, ET::ProcedureRelated, false, 1.0},
    });
}

std::vector<PatternMatch> PatternTable::match(NodeType first, NodeType second,
                                              std::span<const std::string> between) const {
    std::vector<const RelationPattern*> triggered;
    std::vector<const RelationPattern*> fallback;
    for (const auto& p : patterns_) {
        if (p.first != first || p.second != second) continue;
        if (p.triggers.empty()) {
            fallback.push_back(&p);
            continue;
        }
        const bool fired = std::any_of(between.begin(), between.end(), [&](const std::string& tok) {
            return std::find(p.triggers.begin(), p.triggers.end(), tok) != p.triggers.end();
        });
        if (fired) triggered.push_back(&p);
    }
    const auto& chosen = triggered.empty() ? fallback : triggered;
    std::vector<PatternMatch> out;
    if (chosen.empty()) return out;

    double max_score = chosen.front()->score;
    for (const auto* p : chosen) max_score = std::max(max_score, p->score);
    double z = 0.0;
    for (const auto* p : chosen) z += std::exp(p->score - max_score);
    for (const auto* p : chosen) out.push_back({p, std::exp(p->score - max_score) / z});
    return out;
}

}  // namespace dkg::extraction
