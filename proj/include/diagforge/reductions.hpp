#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "diagforge/machine.hpp"

namespace diagforge {

/// Where a configuration came from, so it can be rebuilt from scratch.
struct ConfigOrigin {
  Program program;
  Value input;
  std::uint64_t seed = 0;
  OraclePolicy policy = OraclePolicy::Free;
};

/// Planning problem given by explicit programs. next_state takes
/// (state, move) and returns the next state or Str "not-allowed"; goal takes
/// a state and returns Int 1 on goal states.
struct PlanningInstance {
  Program next_state;
  Value start;
  Program goal;
  std::vector<Value> moves;
  std::optional<ConfigOrigin> origin;
};

struct Plan {
  std::vector<Value> moves;
};

/// Why no plan / path exists.
struct InfeasibilityCertificate {
  enum class Kind : std::uint8_t {
    CycleBacked,         // the single-move chain revisits a state before any goal
    ExhaustiveFrontier,  // closed visited set with no goal / sink in it
  };
  Kind kind = Kind::ExhaustiveFrontier;
  std::uint64_t prefix_len = 0;
  std::uint64_t cycle_len = 0;
  std::vector<Value> visited;
};

struct PlanningResult {
  enum class Status : std::uint8_t { Solved, Infeasible, Unknown };
  Status status = Status::Unknown;
  Plan plan;
  InfeasibilityCertificate certificate;
  std::uint64_t states_explored = 0;
};

/// States are interpreter configurations of p on input; the one move
/// "advance" performs a single transition; goals are halted configurations.
PlanningInstance halting_to_planning(const Program& p, const Value& input, std::uint64_t seed = 0,
                                     OraclePolicy policy = OraclePolicy::Free);

/// Explores at most `budget` states. Plans are checked before returning.
PlanningResult solve_planning(const PlanningInstance& inst, std::uint64_t budget, const OracleBinding& oracles);

bool verify_plan(const PlanningInstance& inst, const Plan& plan, const OracleBinding& oracles);
bool verify_certificate(const PlanningInstance& inst, const InfeasibilityCertificate& cert,
                        const OracleBinding& oracles);

/// Directed graph given by an adjacency program: vertex -> list of vertices,
/// encoded as nested pairs ending in unit.
struct GraphInstance {
  Program adjacency;
  Value source;
  Value sink;
  std::uint64_t size_bound = 0;
  std::optional<ConfigOrigin> origin;
};

struct ReachabilityResult {
  bool reachable = false;
  std::vector<Value> path;  // source .. sink
  InfeasibilityCertificate certificate;
};

/// Vertices are configurations of p on input that have used at most T steps,
/// plus a sink Str "halt" that every halted configuration points to.
GraphInstance tb_halting_to_reachability(const Program& p, const Value& input, std::uint64_t T,
                                         std::uint64_t seed = 0, OraclePolicy policy = OraclePolicy::Free);

/// Breadth-first search. Throws std::length_error if more than
/// size_bound + 2 vertices turn up (the instance is not what it claims).
ReachabilityResult solve_reachability(const GraphInstance& inst, const OracleBinding& oracles);

bool verify_path(const GraphInstance& inst, const std::vector<Value>& path, const OracleBinding& oracles);
bool verify_certificate(const GraphInstance& inst, const InfeasibilityCertificate& cert,
                        const OracleBinding& oracles);

/// Decodes a nested-pair list.
std::vector<Value> list_elements(const Value& list);

nlohmann::json to_json(const PlanningInstance& inst);
nlohmann::json to_json(const GraphInstance& inst);
nlohmann::json to_json(const InfeasibilityCertificate& cert);

}  // namespace diagforge
