#pragma once

#include <string>

#include "dlasso/inference.hpp"

namespace dlasso {

/// JSON serialization with fixed field order and floats at 17 significant
/// digits, so identical reports serialize to identical bytes and estimates
/// survive a round trip exactly.
std::string report_to_json(const InferenceReport& report);

/// CSV mirror: one row per coordinate, columns
/// index,name,estimate,se,ci_lower,ci_upper,p_value,p_adj,reject,reject_fwer.
std::string report_to_csv(const InferenceReport& report);

/// Parses report_to_json output. Malformed input raises ParseError.
InferenceReport report_from_json(const std::string& text);

}  // namespace dlasso
