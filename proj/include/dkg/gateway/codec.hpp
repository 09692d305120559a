/**
 * @file codec.hpp
 * @brief JSON wire format shared by the HTTP service, the CLI and the
 *        engine's data directory.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dkg/error.hpp"
#include "dkg/extraction/extractor.hpp"
#include "dkg/feedback/feedback.hpp"
#include "dkg/fusion/fusion.hpp"
#include "dkg/params.hpp"
#include "dkg/reasoning/reasoning.hpp"

namespace dkg::gateway {

using nlohmann::json;

/// Parse a request body; throws CorruptDocument on malformed JSON.
json parse_json(std::string_view text);

json to_json(const Error& e);
json to_json(const TunableParams& p);
json to_json(const reasoning::Posterior& p);
json to_json(const reasoning::TreatmentPlan& p);
json to_json(const reasoning::EvidenceEntry& e);
json to_json(const reasoning::TreatmentOption& t);
json to_json(const reasoning::PatientProfile& p);
json to_json(const reasoning::Budget& b);
json to_json(const fusion::BatchReport& r);
json to_json(const feedback::FeedbackEvent& e);
json to_json(const feedback::UpdateResult& u);
json to_json(const feedback::ReplayCase& c);

/// Bounds of every tunable as {name: [lo, hi]}.
json params_bounds_json();

/// Overlay the keys present in `j` onto `base`; unknown keys and
/// non-numbers throw InvalidField. Bounds are not checked here.
TunableParams params_from_json(const json& j, TunableParams base);

reasoning::SymptomSet symptoms_from_json(const json& j);
reasoning::TreatmentOption option_from_json(const json& j);
reasoning::PatientProfile profile_from_json(const json& j);
reasoning::Budget budget_from_json(const json& j);
feedback::FeedbackEvent feedback_from_json(const json& j);
feedback::ReplayCase replay_case_from_json(const json& j);
extraction::Document document_from_json(const json& j);

/// A JSON array of events, a single event object, or one event per line.
std::vector<feedback::FeedbackEvent> parse_feedback(std::string_view text);

}  // namespace dkg::gateway
