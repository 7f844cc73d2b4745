#pragma once

#include <nlohmann/json.hpp>

#include "diagforge/machine.hpp"
#include "diagforge/value.hpp"

namespace diagforge {

/// Tagged single-key objects: {"int": 3}, {"str": "a"}, {"program": src},
/// {"pair": [a, b]}, {"unit": null}, {"verdict": "halts"}, {"trace": {...}},
/// {"fault": msg}, {"config": {"state_hash": hex, "steps": n}}.
nlohmann::json value_to_json(const Value& v);

/// Inverse of value_to_json for every kind except configurations.
/// Throws std::invalid_argument on malformed input.
Value value_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const Trace& t);
std::shared_ptr<const Trace> trace_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const HaltReport& r);

std::string_view to_string(OraclePolicy p);
std::string hex64(std::uint64_t v);

}  // namespace diagforge
