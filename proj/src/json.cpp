#include "diagforge/json.hpp"

#include <cstdio>
#include <stdexcept>

#include "diagforge/syntax.hpp"

namespace diagforge {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string_view to_string(OraclePolicy p) { return p == OraclePolicy::Metered ? "metered" : "free"; }

json trace_to_json(const Trace& t) {
  json draws = json::array();
  for (bool b : t.random_draws()) draws.push_back(b ? 1 : 0);
  json hashes = json::array();
  for (auto h : t.step_hashes()) hashes.push_back(hex64(h));
  json out{{"verifier", t.verifier_id()},
           {"subject", serialize(t.subject())},
           {"input", value_to_json(t.input())},
           {"random_draws", std::move(draws)},
           {"step_hashes", std::move(hashes)},
           {"final_verdict", to_string(t.final_verdict())}};
  out["time_limit"] = t.time_limit() ? json(*t.time_limit()) : json(nullptr);
  return out;
}

std::shared_ptr<const Trace> trace_from_json(const json& j) {
  try {
    std::vector<bool> draws;
    for (const auto& b : j.at("random_draws")) draws.push_back(b.get<int>() != 0);
    std::vector<std::uint64_t> hashes;
    for (const auto& h : j.at("step_hashes")) hashes.push_back(std::stoull(h.get<std::string>(), nullptr, 16));
    const auto verdict = parse_verdict(j.at("final_verdict").get<std::string>());
    if (!verdict) throw std::invalid_argument("unknown verdict");
    std::optional<std::uint64_t> limit;
    if (j.contains("time_limit") && !j.at("time_limit").is_null()) limit = j.at("time_limit").get<std::uint64_t>();
    return std::make_shared<const Trace>(j.at("verifier").get<std::string>(),
                                         parse(j.at("subject").get<std::string>()), value_from_json(j.at("input")),
                                         limit, std::move(draws), std::move(hashes), *verdict);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed trace: ") + e.what());
  }
}

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Unit: return json{{"unit", nullptr}};
    case Value::Kind::Int: return json{{"int", v.as_int()}};
    case Value::Kind::Str: return json{{"str", v.as_str()}};
    case Value::Kind::Program: return json{{"program", serialize(v.as_program())}};
    case Value::Kind::Pair: return json{{"pair", json::array({value_to_json(v.first()), value_to_json(v.second())})}};
    case Value::Kind::Trace: return json{{"trace", trace_to_json(v.as_trace())}};
    case Value::Kind::Verdict: return json{{"verdict", to_string(v.as_verdict())}};
    case Value::Kind::Fault: return json{{"fault", v.as_str()}};
    case Value::Kind::Config:
      return json{{"config", {{"state_hash", hex64(v.as_config().hash())}, {"steps", v.as_config().steps}}}};
  }
  return nullptr;
}

Value value_from_json(const json& j) {
  if (!j.is_object() || j.size() != 1) throw std::invalid_argument("value must be a single-key object");
  const std::string key = j.begin().key();
  const json& body = j.begin().value();
  try {
    if (key == "unit") return Value();
    if (key == "int") return Value::integer(body.get<std::int64_t>());
    if (key == "str") return Value::string(body.get<std::string>());
    if (key == "program") return Value::program(parse(body.get<std::string>()));
    if (key == "pair") {
      if (!body.is_array() || body.size() != 2) throw std::invalid_argument("pair needs two elements");
      return Value::pair(value_from_json(body[0]), value_from_json(body[1]));
    }
    if (key == "verdict") {
      const auto v = parse_verdict(body.get<std::string>());
      if (!v) throw std::invalid_argument("unknown verdict");
      return Value::verdict(*v);
    }
    if (key == "trace") return Value::trace(trace_from_json(body));
    if (key == "fault") return Value::fault(body.get<std::string>());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed value: ") + e.what());
  }
  throw std::invalid_argument("cannot decode value of kind '" + key + "'");
}

json report_to_json(const HaltReport& r) {
  json out;
  switch (r.outcome) {
    case HaltReport::Outcome::Halted:
      out["outcome"] = "halted";
      out["value"] = value_to_json(r.value);
      break;
    case HaltReport::Outcome::FuelExhausted:
      out["outcome"] = "fuel-exhausted";
      break;
    case HaltReport::Outcome::CycleCertificate:
      out["outcome"] = "cycle-certificate";
      out["prefix_len"] = r.prefix_len;
      out["cycle_len"] = r.cycle_len;
      break;
  }
  out["steps"] = r.steps;
  return out;
}

}  // namespace diagforge
