#include "diagforge/corpus.hpp"

#include <stdexcept>

#include "diagforge/json.hpp"
#include "diagforge/syntax.hpp"

namespace diagforge {

namespace {

std::uint64_t below(SplitMix64& rng, std::uint64_t n) { return rng.next() % n; }

std::string num(SplitMix64& rng, std::uint64_t n = 100) { return std::to_string(below(rng, n)); }

std::string int_lit(SplitMix64& rng) { return "(int " + num(rng) + ")"; }

std::string halting_leaf(SplitMix64& rng) { return "(return " + int_lit(rng) + ")"; }

// Loop bodies whose state recurs each iteration.
std::string loop_leaf(SplitMix64& rng) {
  switch (below(rng, 4)) {
    case 0: return "(while-true (seq))";
    case 1: return "(while-true (pair " + int_lit(rng) + " (str \"spin\")))";
    case 2: return "(let a " + int_lit(rng) + " (while-true (concat (var a) (str \"!\"))))";
    default: return "(while-true (eval (quote (return (int 1))) (seq)))";
  }
}

std::string straight_line(SplitMix64& rng) {
  std::string body = "(seq";
  const auto n = 1 + below(rng, 6);
  for (std::uint64_t i = 0; i < n; ++i) {
    switch (below(rng, 3)) {
      case 0: body += " (concat (str \"s\") " + int_lit(rng) + ")"; break;
      case 1: body += " (pair " + int_lit(rng) + " (str \"p\"))"; break;
      default: body += " (let v " + int_lit(rng) + " (eq (var v) " + int_lit(rng) + "))"; break;
    }
  }
  return body + " " + halting_leaf(rng) + ")";
}

std::string conditional(SplitMix64& rng, int depth) {
  auto branch = [&] {
    if (depth > 1 && below(rng, 2) == 0) return conditional(rng, depth - 1);
    return below(rng, 2) == 0 ? halting_leaf(rng) : loop_leaf(rng);
  };
  const std::string test = "(lt " + int_lit(rng) + " " + int_lit(rng) + ")";
  const std::string a = branch();
  const std::string b = branch();
  return "(if " + test + " " + a + " " + b + ")";
}

std::string coin(SplitMix64& rng) {
  const std::string p = std::to_string(1 + below(rng, 3)) + " 4";
  switch (below(rng, 3)) {
    case 0: return "(if (bernoulli " + p + ") " + halting_leaf(rng) + " (while-true (seq)))";
    case 1: return "(while-true (if (bernoulli " + p + ") " + halting_leaf(rng) + " (seq)))";
    default: return "(seq (bernoulli " + p + ") " + halting_leaf(rng) + ")";
  }
}

std::string input_dependent(SplitMix64& rng, std::int64_t& input) {
  input = static_cast<std::int64_t>(below(rng, 20));
  const std::string k = num(rng, 20);
  if (below(rng, 2) == 0) {
    return "(program int (if (lt (var x) (int " + k + ")) (return (var x)) " + loop_leaf(rng) + "))";
  }
  return "(program int (if (eq (var x) (int " + k + ")) " + loop_leaf(rng) + " (return (int 0))))";
}

}  // namespace

std::vector<CertifiedEntry> build_corpus(std::size_t size, std::uint64_t seed) {
  if (size > 200) throw std::invalid_argument("corpus size must be at most 200");
  static const char* const kFamilies[] = {"straight-line", "loop", "conditional", "coin", "input"};
  SplitMix64 rng(seed);
  const Registry no_verifiers;
  std::vector<CertifiedEntry> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t family = i % 5;
    Value input;
    std::string src;
    switch (family) {
      case 0: src = straight_line(rng); break;
      case 1: src = below(rng, 2) == 0 ? loop_leaf(rng) : "(seq " + int_lit(rng) + " " + loop_leaf(rng) + ")"; break;
      case 2: src = conditional(rng, 3); break;
      case 3: src = coin(rng); break;
      default: {
        std::int64_t k = 0;
        src = input_dependent(rng, k);
        input = Value::integer(k);
      }
    }
    CertifiedEntry e;
    e.entry.id = std::string(kFamilies[family]) + "-" + std::to_string(i);
    e.entry.program = parse(src);
    e.entry.input = input;
    e.family = kFamilies[family];
    e.truth = certify(no_verifiers, e.entry.program, input, kCorpusCertifyBudget);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> entries_of(const std::vector<CertifiedEntry>& corpus) {
  std::vector<CorpusEntry> out;
  out.reserve(corpus.size());
  for (const auto& c : corpus) out.push_back(c.entry);
  return out;
}

nlohmann::json to_json(const std::vector<CertifiedEntry>& corpus) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : corpus) {
    const char* status = c.truth.status == GroundTruth::Status::Halts      ? "halts"
                         : c.truth.status == GroundTruth::Status::Diverges ? "diverges"
                                                                           : "undetermined";
    nlohmann::json cert = report_to_json(c.truth.report);
    cert["seed"] = 0;
    cert["policy"] = "free";
    rows.push_back({{"id", c.entry.id},
                    {"family", c.family},
                    {"program", serialize(c.entry.program)},
                    {"input", value_to_json(c.entry.input)},
                    {"status", status},
                    {"draws", c.truth.draws},
                    {"certificate", std::move(cert)}});
  }
  return rows;
}

// ---------------------------------------------------------------------------

namespace {

const char* const kNames[] = {"a", "b", "x", "v_1", "tmp-2", "Q"};
const char* const kIds[] = {"bounded:100", "liar:5", "abstain", "coin:1/2:halts", "A"};
const char* const kStrings[] = {"", "Not ", "a b", "quote\"d", "back\\slash", "line\nbreak", "tab\there"};

Shape random_shape(SplitMix64& rng, int depth) {
  const auto k = below(rng, depth > 0 ? 8 : 7);
  switch (k) {
    case 0: return Shape::of(Shape::Kind::Any);
    case 1: return Shape::of(Shape::Kind::Unit);
    case 2: return Shape::of(Shape::Kind::Int);
    case 3: return Shape::of(Shape::Kind::Str);
    case 4: return Shape::of(Shape::Kind::Program);
    case 5: return Shape::of(Shape::Kind::Trace);
    case 6: return Shape::of(Shape::Kind::Verdict);
    default: return Shape::pair(random_shape(rng, depth - 1), random_shape(rng, depth - 1));
  }
}

NodePtr random_node(SplitMix64& rng, int depth) {
  auto kids = [&](int n) {
    std::vector<NodePtr> out;
    for (int i = 0; i < n; ++i) out.push_back(random_node(rng, depth - 1));
    return out;
  };
  if (depth <= 0) {
    switch (below(rng, 6)) {
      case 0: return Node::int_lit(static_cast<std::int64_t>(rng.next() % 2001) - 1000);
      case 1: return Node::str_lit(kStrings[below(rng, std::size(kStrings))]);
      case 2: return Node::var(kNames[below(rng, std::size(kNames))]);
      case 3: return Node::verdict_lit(static_cast<Verdict>(below(rng, 10)));
      case 4: return Node::bernoulli(below(rng, 5), 5 + below(rng, 5));
      default: return Node::seq({});
    }
  }
  const auto kind = static_cast<NodeKind>(below(rng, 26));
  switch (kind) {
    case NodeKind::IntLit:
    case NodeKind::StrLit:
    case NodeKind::Var:
    case NodeKind::VerdictLit:
    case NodeKind::BernoulliDraw:
      return random_node(rng, 0);
    case NodeKind::Quote:
      return Node::quote(Program(random_node(rng, depth - 1), random_shape(rng, 2)));
    case NodeKind::Let:
      return Node::let(kNames[below(rng, std::size(kNames))], random_node(rng, depth - 1),
                       random_node(rng, depth - 1));
    case NodeKind::Seq:
      return Node::seq(kids(static_cast<int>(below(rng, 4))));
    case NodeKind::OracleCall:
      return Node::with_verifier(kind, kIds[below(rng, std::size(kIds))], kids(static_cast<int>(below(rng, 4))));
    case NodeKind::CheckTrace:
      return Node::with_verifier(kind, kIds[below(rng, std::size(kIds))], kids(2));
    case NodeKind::BestArm: {
      auto c = kids(2);
      return Node::best_arm(1 + below(rng, 10), 100, 1 + below(rng, 1000), c[0], c[1]);
    }
    default:
      return Node::op(kind, kids(arity(kind)));
  }
}

}  // namespace

Program random_program(SplitMix64& rng, int max_depth) {
  const int depth = 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(max_depth)));
  return Program(random_node(rng, depth), below(rng, 2) == 0 ? Shape() : random_shape(rng, 2));
}

}  // namespace diagforge
