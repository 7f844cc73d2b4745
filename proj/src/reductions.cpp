#include "diagforge/reductions.hpp"

#include <deque>
#include <stdexcept>
#include <unordered_map>

#include "diagforge/json.hpp"
#include "diagforge/syntax.hpp"

namespace diagforge {

namespace {

const char* const kNotAllowed = "not-allowed";
const char* const kAdvance = "advance";
const char* const kSink = "halt";

// Helper programs are tiny and loop-free; anything else is a broken instance.
constexpr std::uint64_t kHelperFuel = 100'000;

Value call(const Program& f, const Value& arg, const OracleBinding& oracles) {
  RunOptions options;
  options.detect_cycles = false;
  const RunResult r = run(f, arg, Fuel{kHelperFuel, OraclePolicy::Free}, 0, oracles, options);
  if (!r.report.halted()) throw std::runtime_error("instance program did not return");
  return r.report.value;
}

bool is_not_allowed(const Value& v) { return v.is(Value::Kind::Str) && v.as_str() == kNotAllowed; }

bool is_goal(const PlanningInstance& inst, const Value& s, const OracleBinding& oracles) {
  const Value g = call(inst.goal, s, oracles);
  return g.is(Value::Kind::Int) && g.as_int() != 0;
}

Value successor(const PlanningInstance& inst, const Value& s, const Value& move, const OracleBinding& oracles) {
  return call(inst.next_state, Value::pair(s, move), oracles);
}

// Value set keyed by structural hash.
class ValueIndex {
 public:
  std::optional<std::size_t> find(const Value& v) const {
    auto it = buckets_.find(v.hash());
    if (it == buckets_.end()) return std::nullopt;
    for (auto i : it->second) {
      if (items_[i] == v) return i;
    }
    return std::nullopt;
  }
  std::size_t insert(const Value& v) {
    if (auto i = find(v)) return *i;
    items_.push_back(v);
    buckets_[v.hash()].push_back(items_.size() - 1);
    return items_.size() - 1;
  }
  const std::vector<Value>& items() const { return items_; }

 private:
  std::vector<Value> items_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

Value start_config(const Program& p, const Value& input, std::uint64_t seed, OraclePolicy policy) {
  return Value::config(std::make_shared<const MachineState>(initial_state(p, input, seed, policy)));
}

nlohmann::json origin_json(const ConfigOrigin& o) {
  return {{"config",
           {{"program", serialize(o.program)},
            {"input", value_to_json(o.input)},
            {"seed", o.seed},
            {"policy", to_string(o.policy)},
            {"transitions", 0}}}};
}

}  // namespace

std::vector<Value> list_elements(const Value& list) {
  std::vector<Value> out;
  const Value* cur = &list;
  while (cur->is(Value::Kind::Pair)) {
    out.push_back(cur->first());
    cur = &cur->second();
  }
  if (!cur->is(Value::Kind::Unit)) throw std::invalid_argument("malformed list");
  return out;
}

// ---------------------------------------------------------------------------
// Planning

PlanningInstance halting_to_planning(const Program& p, const Value& input, std::uint64_t seed, OraclePolicy policy) {
  PlanningInstance inst;
  inst.next_state = parse(
      "(if (eq (snd (var x)) (str \"advance\")) (config-step (fst (var x))) (str \"not-allowed\"))");
  inst.goal = parse("(config-halted (var x))");
  inst.start = start_config(p, input, seed, policy);
  inst.moves = {Value::string(kAdvance)};
  inst.origin = ConfigOrigin{p, input, seed, policy};
  return inst;
}

PlanningResult solve_planning(const PlanningInstance& inst, std::uint64_t budget, const OracleBinding& oracles) {
  if (budget == 0) throw std::invalid_argument("planning budget must be positive");
  if (inst.moves.empty()) throw std::invalid_argument("planning instance has no moves");
  PlanningResult out;

  if (inst.moves.size() == 1) {
    // Single move: the reachable states form a chain.
    const Value& move = inst.moves[0];
    ValueIndex seen;
    Value s = inst.start;
    for (std::uint64_t i = 0; i < budget; ++i) {
      ++out.states_explored;
      if (is_goal(inst, s, oracles)) {
        out.plan.moves.assign(i, move);
        if (!verify_plan(inst, out.plan, oracles)) throw std::logic_error("solver produced an invalid plan");
        out.status = PlanningResult::Status::Solved;
        return out;
      }
      if (auto prior = seen.find(s)) {
        out.status = PlanningResult::Status::Infeasible;
        out.certificate.kind = InfeasibilityCertificate::Kind::CycleBacked;
        out.certificate.prefix_len = *prior;
        out.certificate.cycle_len = i - *prior;
        return out;
      }
      seen.insert(s);
      Value next = successor(inst, s, move, oracles);
      if (is_not_allowed(next)) {
        // Dead end: the chain closes here.
        out.status = PlanningResult::Status::Infeasible;
        out.certificate.kind = InfeasibilityCertificate::Kind::ExhaustiveFrontier;
        out.certificate.visited = seen.items();
        return out;
      }
      s = std::move(next);
    }
    return out;
  }

  // General alphabet: breadth-first search.
  ValueIndex seen;
  std::vector<std::pair<std::size_t, std::size_t>> parent;  // (state, move)
  std::deque<std::size_t> queue;
  seen.insert(inst.start);
  parent.emplace_back(0, 0);
  queue.push_back(0);
  while (!queue.empty()) {
    if (out.states_explored >= budget) return out;
    const std::size_t cur = queue.front();
    queue.pop_front();
    ++out.states_explored;
    const Value state = seen.items()[cur];
    if (is_goal(inst, state, oracles)) {
      std::vector<Value> rev;
      for (std::size_t at = cur; at != 0; at = parent[at].first) rev.push_back(inst.moves[parent[at].second]);
      out.plan.moves.assign(rev.rbegin(), rev.rend());
      if (!verify_plan(inst, out.plan, oracles)) throw std::logic_error("solver produced an invalid plan");
      out.status = PlanningResult::Status::Solved;
      return out;
    }
    for (std::size_t m = 0; m < inst.moves.size(); ++m) {
      Value next = successor(inst, state, inst.moves[m], oracles);
      if (is_not_allowed(next) || seen.find(next)) continue;
      seen.insert(next);
      parent.emplace_back(cur, m);
      queue.push_back(seen.items().size() - 1);
    }
  }
  out.status = PlanningResult::Status::Infeasible;
  out.certificate.kind = InfeasibilityCertificate::Kind::ExhaustiveFrontier;
  out.certificate.visited = seen.items();
  return out;
}

bool verify_plan(const PlanningInstance& inst, const Plan& plan, const OracleBinding& oracles) {
  try {
    Value s = inst.start;
    for (const Value& m : plan.moves) {
      s = successor(inst, s, m, oracles);
      if (is_not_allowed(s)) return false;
    }
    return is_goal(inst, s, oracles);
  } catch (const std::exception&) {
    return false;
  }
}

bool verify_certificate(const PlanningInstance& inst, const InfeasibilityCertificate& cert,
                        const OracleBinding& oracles) {
  try {
    if (cert.kind == InfeasibilityCertificate::Kind::CycleBacked) {
      if (inst.moves.size() != 1 || cert.cycle_len == 0) return false;
      Value s = inst.start;
      Value mark;
      for (std::uint64_t i = 0; i < cert.prefix_len + cert.cycle_len; ++i) {
        if (i == cert.prefix_len) mark = s;
        if (is_goal(inst, s, oracles)) return false;
        s = successor(inst, s, inst.moves[0], oracles);
        if (is_not_allowed(s)) return false;
      }
      return s == mark;
    }
    ValueIndex visited;
    for (const Value& v : cert.visited) visited.insert(v);
    if (!visited.find(inst.start)) return false;
    for (const Value& v : cert.visited) {
      if (is_goal(inst, v, oracles)) return false;
      for (const Value& m : inst.moves) {
        const Value next = successor(inst, v, m, oracles);
        if (!is_not_allowed(next) && !visited.find(next)) return false;
      }
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Reachability

GraphInstance tb_halting_to_reachability(const Program& p, const Value& input, std::uint64_t T, std::uint64_t seed,
                                         OraclePolicy policy) {
  if (T == 0) throw std::invalid_argument("size bound must be positive");
  GraphInstance g;
  const std::string bound = std::to_string(T + 1);
  g.adjacency = parse(
      "(if (eq (var x) (str \"halt\")) (seq)"
      " (if (config-halted (var x)) (pair (str \"halt\") (seq))"
      "  (let n (config-step (var x))"
      "   (if (eq (var n) (str \"not-allowed\")) (seq)"
      "    (if (lt (config-steps (var n)) (int " + bound + ")) (pair (var n) (seq)) (seq))))))");
  g.source = start_config(p, input, seed, policy);
  g.sink = Value::string(kSink);
  g.size_bound = T;
  g.origin = ConfigOrigin{p, input, seed, policy};
  return g;
}

ReachabilityResult solve_reachability(const GraphInstance& inst, const OracleBinding& oracles) {
  ReachabilityResult out;
  if (inst.source == inst.sink) {
    out.reachable = true;
    out.path = {inst.source};
    return out;
  }
  ValueIndex seen;
  std::vector<std::size_t> parent{0};
  std::deque<std::size_t> queue{0};
  seen.insert(inst.source);
  const std::size_t limit = inst.size_bound + 2;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const Value vertex = seen.items()[cur];
    for (const Value& next : list_elements(call(inst.adjacency, vertex, oracles))) {
      if (seen.find(next)) continue;
      const std::size_t id = seen.insert(next);
      parent.push_back(cur);
      if (next == inst.sink) {
        std::vector<Value> rev;
        for (std::size_t at = id; at != 0; at = parent[at]) rev.push_back(seen.items()[at]);
        rev.push_back(inst.source);
        out.path.assign(rev.rbegin(), rev.rend());
        out.reachable = true;
        return out;
      }
      if (seen.items().size() > limit) throw std::length_error("graph exceeds its declared size bound");
      queue.push_back(id);
    }
  }
  out.certificate.kind = InfeasibilityCertificate::Kind::ExhaustiveFrontier;
  out.certificate.visited = seen.items();
  return out;
}

bool verify_path(const GraphInstance& inst, const std::vector<Value>& path, const OracleBinding& oracles) {
  try {
    if (path.empty() || !(path.front() == inst.source) || !(path.back() == inst.sink)) return false;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      bool edge = false;
      for (const Value& n : list_elements(call(inst.adjacency, path[i], oracles))) edge = edge || n == path[i + 1];
      if (!edge) return false;
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

bool verify_certificate(const GraphInstance& inst, const InfeasibilityCertificate& cert,
                        const OracleBinding& oracles) {
  try {
    if (cert.kind != InfeasibilityCertificate::Kind::ExhaustiveFrontier) return false;
    ValueIndex visited;
    for (const Value& v : cert.visited) visited.insert(v);
    if (!visited.find(inst.source) || visited.find(inst.sink)) return false;
    for (const Value& v : cert.visited) {
      for (const Value& n : list_elements(call(inst.adjacency, v, oracles))) {
        if (!visited.find(n)) return false;
      }
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const PlanningInstance& inst) {
  nlohmann::json moves = nlohmann::json::array();
  for (const auto& m : inst.moves) moves.push_back(value_to_json(m));
  return {{"next_state", serialize(inst.next_state)},
          {"start", inst.origin ? origin_json(*inst.origin) : value_to_json(inst.start)},
          {"goal", serialize(inst.goal)},
          {"moves", std::move(moves)}};
}

nlohmann::json to_json(const GraphInstance& inst) {
  return {{"adjacency", serialize(inst.adjacency)},
          {"source", inst.origin ? origin_json(*inst.origin) : value_to_json(inst.source)},
          {"sink", value_to_json(inst.sink)},
          {"size_bound", inst.size_bound}};
}

nlohmann::json to_json(const InfeasibilityCertificate& cert) {
  nlohmann::json out;
  if (cert.kind == InfeasibilityCertificate::Kind::CycleBacked) {
    out = {{"kind", "cycle-backed"}, {"prefix_len", cert.prefix_len}, {"cycle_len", cert.cycle_len}};
  } else {
    out = {{"kind", "exhaustive-frontier"}, {"visited", cert.visited.size()}};
    nlohmann::json hashes = nlohmann::json::array();
    for (const auto& v : cert.visited) hashes.push_back(hex64(v.hash()));
    out["visited_hashes"] = std::move(hashes);
  }
  return out;
}

}  // namespace diagforge
