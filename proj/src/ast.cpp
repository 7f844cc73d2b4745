#include "diagforge/ast.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "diagforge/hash.hpp"

namespace diagforge {

Shape Shape::of(Kind k) {
  if (k == Kind::Pair) throw std::invalid_argument("Shape::of(Pair) needs components");
  Shape s;
  s.kind_ = k;
  return s;
}

Shape Shape::pair(Shape first, Shape second) {
  Shape s;
  s.kind_ = Kind::Pair;
  s.parts_ = std::make_shared<const std::pair<Shape, Shape>>(std::move(first), std::move(second));
  return s;
}

std::uint64_t Shape::hash() const {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(kind_) + 0x51);
  if (kind_ == Kind::Pair) {
    h = hash_combine(h, first().hash());
    h = hash_combine(h, second().hash());
  }
  return h;
}

bool operator==(const Shape& a, const Shape& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != Shape::Kind::Pair) return true;
  return a.first() == b.first() && a.second() == b.second();
}

int arity(NodeKind kind) {
  switch (kind) {
    case NodeKind::IntLit:
    case NodeKind::StrLit:
    case NodeKind::Quote:
    case NodeKind::Var:
    case NodeKind::VerdictLit:
    case NodeKind::BernoulliDraw:
      return 0;
    case NodeKind::WhileTrue:
    case NodeKind::Return:
    case NodeKind::TraceFinalVerdict:
    case NodeKind::First:
    case NodeKind::Second:
    case NodeKind::ConfigStep:
    case NodeKind::ConfigHalted:
    case NodeKind::ConfigSteps:
      return 1;
    case NodeKind::Pair:
    case NodeKind::Concat:
    case NodeKind::Let:
    case NodeKind::Eval:
    case NodeKind::CheckTrace:
    case NodeKind::TypeCheckInput:
    case NodeKind::Equal:
    case NodeKind::Less:
    case NodeKind::BestArm:
      return 2;
    case NodeKind::If:
      return 3;
    case NodeKind::Seq:
    case NodeKind::OracleCall:
      return -1;
  }
  return -1;
}

void Node::finish() {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(kind_) + 1);
  h = hash_combine(h, static_cast<std::uint64_t>(number_));
  h = hash_combine(h, hash_bytes(text_));
  h = hash_combine(h, static_cast<std::uint64_t>(verdict_));
  for (auto p : params_) h = hash_combine(h, p);
  size_ = 1;
  for (const auto& c : children_) {
    h = hash_combine(h, c->hash());
    size_ += c->size();
  }
  if (quoted_) {
    h = hash_combine(h, quoted_->hash());
    size_ += quoted_->size();
  }
  hash_ = h;
}

NodePtr Node::int_lit(std::int64_t v) {
  Node n;
  n.kind_ = NodeKind::IntLit;
  n.number_ = v;
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::str_lit(std::string s) {
  Node n;
  n.kind_ = NodeKind::StrLit;
  n.text_ = std::move(s);
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::quote(Program p) {
  Node n;
  n.kind_ = NodeKind::Quote;
  n.quoted_ = std::make_shared<const Program>(std::move(p));
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::var(std::string name) {
  Node n;
  n.kind_ = NodeKind::Var;
  n.text_ = std::move(name);
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::verdict_lit(Verdict v) {
  Node n;
  n.kind_ = NodeKind::VerdictLit;
  n.verdict_ = v;
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::let(std::string name, NodePtr bound, NodePtr body) {
  Node n;
  n.kind_ = NodeKind::Let;
  n.text_ = std::move(name);
  n.children_ = {std::move(bound), std::move(body)};
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::seq(std::vector<NodePtr> items) {
  Node n;
  n.kind_ = NodeKind::Seq;
  n.children_ = std::move(items);
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::bernoulli(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num > den) throw std::invalid_argument("bernoulli needs 0 <= num <= den, den > 0");
  Node n;
  n.kind_ = NodeKind::BernoulliDraw;
  n.params_[0] = num;
  n.params_[1] = den;
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::best_arm(std::uint64_t delta_num, std::uint64_t delta_den, std::uint64_t pull_cap,
                       NodePtr arm1, NodePtr arm2) {
  if (delta_den == 0 || delta_num == 0 || 2 * delta_num >= delta_den) {
    throw std::invalid_argument("best-arm confidence must lie in (0, 1/2)");
  }
  if (pull_cap == 0) throw std::invalid_argument("best-arm pull cap must be positive");
  Node n;
  n.kind_ = NodeKind::BestArm;
  n.params_[0] = delta_num;
  n.params_[1] = delta_den;
  n.params_[2] = pull_cap;
  n.children_ = {std::move(arm1), std::move(arm2)};
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::with_verifier(NodeKind kind, std::string verifier_id, std::vector<NodePtr> args) {
  if (kind != NodeKind::OracleCall && kind != NodeKind::CheckTrace) {
    throw std::invalid_argument("with_verifier: kind does not name a verifier");
  }
  if (kind == NodeKind::CheckTrace && args.size() != 2) {
    throw std::invalid_argument("check-trace takes a program and a trace");
  }
  Node n;
  n.kind_ = kind;
  n.text_ = std::move(verifier_id);
  n.children_ = std::move(args);
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

NodePtr Node::op(NodeKind kind, std::vector<NodePtr> children) {
  switch (kind) {
    case NodeKind::IntLit:
    case NodeKind::StrLit:
    case NodeKind::Quote:
    case NodeKind::Var:
    case NodeKind::VerdictLit:
    case NodeKind::Let:
    case NodeKind::BernoulliDraw:
    case NodeKind::BestArm:
    case NodeKind::OracleCall:
    case NodeKind::CheckTrace:
      throw std::invalid_argument("Node::op: kind has a dedicated factory");
    default:
      break;
  }
  const int want = arity(kind);
  if (want >= 0 && static_cast<int>(children.size()) != want) {
    throw std::invalid_argument("Node::op: wrong number of children");
  }
  Node n;
  n.kind_ = kind;
  n.children_ = std::move(children);
  n.finish();
  return std::make_shared<const Node>(std::move(n));
}

bool same_node(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.size() != b.size()) return false;
  if (a.int_value() != b.int_value() || a.text() != b.text() || a.verdict() != b.verdict()) {
    return false;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (a.param(i) != b.param(i)) return false;
  }
  if (a.children().size() != b.children().size()) return false;
  for (std::size_t i = 0; i < a.children().size(); ++i) {
    if (!same_node(*a.children()[i], *b.children()[i])) return false;
  }
  if (a.kind() == NodeKind::Quote) return a.quoted() == b.quoted();
  return true;
}

Program::Program() : Program(Node::seq({})) {}

Program::Program(NodePtr root, Shape input) : input_(std::move(input)), root_(std::move(root)) {
  if (!root_) throw std::invalid_argument("Program: null root");
  hash_ = hash_combine(input_.hash(), root_->hash());
}

bool operator==(const Program& a, const Program& b) {
  if (a.hash_ != b.hash_) return false;
  return a.input_ == b.input_ && same_node(*a.root_, *b.root_);
}

namespace {

bool reads(const Node& n, const std::string& name) {
  switch (n.kind()) {
    case NodeKind::Var:
      return n.text() == name;
    case NodeKind::Quote:
      return false;
    case NodeKind::Let:
      if (reads(*n.children()[0], name)) return true;
      return n.text() != name && reads(*n.children()[1], name);
    default:
      return std::any_of(n.children().begin(), n.children().end(),
                         [&](const NodePtr& c) { return reads(*c, name); });
  }
}

void collect_ids(const Node& n, std::set<std::string>& out) {
  if (n.kind() == NodeKind::OracleCall || n.kind() == NodeKind::CheckTrace) out.insert(n.text());
  if (n.kind() == NodeKind::Quote) collect_ids(n.quoted().root(), out);
  for (const auto& c : n.children()) collect_ids(*c, out);
}

}  // namespace

bool references_input(const Program& p) { return reads(p.root(), kInputVar); }

std::vector<std::string> verifier_ids(const Program& p) {
  std::set<std::string> ids;
  collect_ids(p.root(), ids);
  return {ids.begin(), ids.end()};
}

}  // namespace diagforge
