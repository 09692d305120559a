#include "dkg/gateway/codec.hpp"

#include <sstream>

namespace dkg::gateway {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidField, what); }

const json& field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) invalid(std::string("missing field ") + name);
    return j.at(name);
}

std::string string_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_string()) invalid(std::string(name) + " must be a string");
    return v.get<std::string>();
}

double number_of(const json& v, const std::string& name) {
    if (!v.is_number()) invalid(name + " must be a number");
    return v.get<double>();
}

bool bool_field(const json& j, const char* name) {
    const json& v = field(j, name);
    if (!v.is_boolean()) invalid(std::string(name) + " must be a boolean");
    return v.get<bool>();
}

std::map<std::string, double> number_map(const json& j, const std::string& name) {
    if (!j.is_object()) invalid(name + " must be an object");
    std::map<std::string, double> out;
    for (const auto& [k, v] : j.items()) out[k] = number_of(v, name + "." + k);
    return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::CorruptDocument, std::string("malformed JSON: ") + e.what());
    }
}

json to_json(const Error& e) {
    json err{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (!e.phase().empty()) err["phase"] = e.phase();
    return json{{"error", err}};
}

json to_json(const TunableParams& p) {
    json j = json::object();
    for (const ParamId id : kAllParams) j[std::string(param_name(id))] = p.get(id);
    return j;
}

json params_bounds_json() {
    json j = json::object();
    for (const ParamId id : kAllParams) {
        const auto b = TunableParams::bounds(id);
        j[std::string(param_name(id))] = {b.lo, b.hi};
    }
    return j;
}

TunableParams params_from_json(const json& j, TunableParams base) {
    if (!j.is_object()) invalid("params must be an object");
    for (const auto& [k, v] : j.items()) {
        const auto id = param_from_name(k);
        if (!id) invalid("unknown parameter " + k);
        base.set(*id, number_of(v, k));
    }
    return base;
}

json to_json(const reasoning::Posterior& p) {
    json entries = json::array();
    for (const auto& e : p.entries) entries.push_back({{"disease", e.disease}, {"probability", e.probability}});
    return json{{"entries", entries}, {"epsilon", p.epsilon}};
}

json to_json(const reasoning::TreatmentPlan& p) {
    json breakdown = json::array();
    for (const auto& b : p.per_disease_breakdown) {
        breakdown.push_back({{"disease", b.disease}, {"probability", b.probability}, {"utility", b.utility}});
    }
    json j{{"chosen", p.chosen},
           {"expected_utility", p.expected_utility},
           {"total_cost", p.total_cost},
           {"lambda_final", p.lambda_final},
           {"budget_ok", p.budget_ok},
           {"per_disease_breakdown", breakdown},
           {"method", p.method}};
    j["dual_bound"] = optional_number(p.dual_bound);
    j["subgradient_utility"] = optional_number(p.subgradient_utility);
    return j;
}

json to_json(const reasoning::EvidenceEntry& e) {
    json j{{"symptom", e.symptom}, {"floor", e.floor}, {"weight", e.weight}};
    if (e.edge_type) {
        j["edge_type"] = std::string(graph::to_string(*e.edge_type));
        j["src"] = e.src;
        j["dst"] = e.dst;
    } else {
        j["edge_type"] = nullptr;
    }
    return j;
}

json to_json(const reasoning::TreatmentOption& t) {
    return json{{"id", t.id}, {"efficacy_by_disease", t.efficacy_by_disease}, {"risk_features", t.risk_features},
                {"cost", t.cost}};
}

json to_json(const reasoning::PatientProfile& p) { return json{{"id", p.id}, {"features", p.features}}; }

json to_json(const reasoning::Budget& b) {
    return json{{"c_max", b.c_max}, {"eta", b.eta}, {"max_iter", b.max_iter}, {"max_plan_size", b.max_plan_size}};
}

json to_json(const fusion::BatchReport& r) { return json::parse(r.to_line()); }

json to_json(const feedback::FeedbackEvent& e) {
    json j{{"case_id", e.case_id},
           {"diagnosis_correct", e.diagnosis_correct},
           {"treatment_accepted", e.treatment_accepted},
           {"clinician_id", e.clinician_id}};
    if (e.likert) {
        j["likert"] = {{"accuracy", e.likert->accuracy},
                       {"reliability", e.likert->reliability},
                       {"usability", e.likert->usability}};
    }
    if (e.corrected_diagnosis) j["corrected_diagnosis"] = *e.corrected_diagnosis;
    return j;
}

json to_json(const feedback::UpdateResult& u) {
    json steps = json::array();
    for (const auto& s : u.steps) {
        steps.push_back({{"param", std::string(param_name(s.param))}, {"before", s.before}, {"after", s.after},
                         {"reward", s.reward}});
    }
    return json{{"before", to_json(u.before)},
                {"after", to_json(u.after)},
                {"reward_before", u.reward_before},
                {"reward_after", u.reward_after},
                {"cases_replayed", u.cases_replayed},
                {"steps", steps}};
}

json to_json(const feedback::ReplayCase& c) {
    json options = json::array();
    for (const auto& o : c.options) options.push_back(to_json(o));
    json j{{"case_id", c.event.case_id},
           {"symptoms", c.symptoms},
           {"profile", to_json(c.profile)},
           {"options", options},
           {"served_diagnosis", c.served_diagnosis},
           {"served_treatment", c.served_treatment}};
    j["budget"] = c.budget ? to_json(*c.budget) : json(nullptr);
    return j;
}

reasoning::SymptomSet symptoms_from_json(const json& j) {
    if (!j.is_array()) invalid("symptoms must be an array of node ids");
    reasoning::SymptomSet out;
    for (const auto& s : j) {
        if (!s.is_string() || s.get<std::string>().empty()) invalid("symptoms must be nonempty strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

reasoning::TreatmentOption option_from_json(const json& j) {
    reasoning::TreatmentOption t;
    t.id = string_field(j, "id");
    if (j.contains("efficacy_by_disease")) t.efficacy_by_disease = number_map(j.at("efficacy_by_disease"), "efficacy_by_disease");
    if (j.contains("risk_features")) t.risk_features = number_map(j.at("risk_features"), "risk_features");
    if (j.contains("cost")) t.cost = number_of(j.at("cost"), "cost");
    return t;
}

reasoning::PatientProfile profile_from_json(const json& j) {
    reasoning::PatientProfile p;
    if (j.contains("id")) {
        if (!j.at("id").is_string()) invalid("profile.id must be a string");
        p.id = j.at("id").get<std::string>();
    }
    if (j.contains("features")) p.features = number_map(j.at("features"), "features");
    return p;
}

reasoning::Budget budget_from_json(const json& j) {
    reasoning::Budget b;
    b.c_max = number_of(field(j, "c_max"), "c_max");
    if (j.contains("eta")) b.eta = number_of(j.at("eta"), "eta");
    auto count = [&](const char* name, std::size_t& out) {
        if (!j.contains(name)) return;
        const json& v = j.at(name);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            invalid(std::string(name) + " must be a nonnegative integer");
        }
        out = v.get<std::size_t>();
    };
    count("max_iter", b.max_iter);
    count("max_plan_size", b.max_plan_size);
    return b;
}

feedback::FeedbackEvent feedback_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidFeedback, "feedback event must be an object");
    feedback::FeedbackEvent e;
    try {
        e.case_id = string_field(j, "case_id");
        e.diagnosis_correct = bool_field(j, "diagnosis_correct");
        e.treatment_accepted = bool_field(j, "treatment_accepted");
        if (j.contains("clinician_id") && !j.at("clinician_id").is_null()) e.clinician_id = string_field(j, "clinician_id");
        if (j.contains("corrected_diagnosis") && !j.at("corrected_diagnosis").is_null()) {
            e.corrected_diagnosis = string_field(j, "corrected_diagnosis");
        }
        if (j.contains("likert") && !j.at("likert").is_null()) {
            const json& l = j.at("likert");
            auto score = [&](const char* name) {
                const json& v = field(l, name);
                if (!v.is_number_integer()) invalid(std::string("likert.") + name + " must be an integer");
                return v.get<int>();
            };
            e.likert = feedback::Likert{score("accuracy"), score("reliability"), score("usability")};
        }
    } catch (const Error& err) {
        throw Error(ErrorCode::InvalidFeedback, err.what());
    }
    e.validate();
    return e;
}

feedback::ReplayCase replay_case_from_json(const json& j) {
    feedback::ReplayCase c;
    c.event.case_id = string_field(j, "case_id");
    c.symptoms = symptoms_from_json(field(j, "symptoms"));
    c.profile = profile_from_json(field(j, "profile"));
    for (const auto& o : field(j, "options")) c.options.push_back(option_from_json(o));
    if (j.contains("budget") && !j.at("budget").is_null()) c.budget = budget_from_json(j.at("budget"));
    c.served_diagnosis = string_field(j, "served_diagnosis");
    for (const auto& t : field(j, "served_treatment")) {
        if (!t.is_string()) invalid("served_treatment must hold strings");
        c.served_treatment.push_back(t.get<std::string>());
    }
    return c;
}

extraction::Document document_from_json(const json& j) {
    extraction::Document d;
    d.doc_id = string_field(j, "doc_id");
    d.text = string_field(j, "text");
    if (j.contains("source")) {
        const auto s = extraction::document_source_from_string(string_field(j, "source"));
        if (!s) invalid("unknown document source");
        d.source = *s;
    }
    d.context_tag = j.contains("context_tag") ? string_field(j, "context_tag") : std::string(extraction::kDefaultContext);
    if (d.doc_id.empty()) invalid("doc_id must not be empty");
    return d;
}

std::vector<feedback::FeedbackEvent> parse_feedback(std::string_view text) {
    std::vector<feedback::FeedbackEvent> out;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return out;
    if (text[first] == '[') {
        const json j = parse_json(text);
        for (const auto& e : j) out.push_back(feedback_from_json(e));
        return out;
    }
    // One object per line; a single pretty-printed object also parses whole.
    try {
        const json j = json::parse(text);
        out.push_back(feedback_from_json(j));
        return out;
    } catch (const json::parse_error&) {
    }
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(feedback_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::CorruptDocument, "feedback line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace dkg::gateway
