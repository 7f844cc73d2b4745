#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "diagforge/verdict.hpp"

namespace diagforge {

/// Node kinds of the diagonal language. The first block mirrors the core
/// constructs; the second block holds the helpers the constructions need
/// (projections, comparisons, verdict literals, the embedded bandit loop and
/// configuration primitives used by the reductions).
enum class NodeKind : std::uint8_t {
  IntLit,
  StrLit,
  Quote,
  Var,
  Pair,
  Concat,
  Let,
  Seq,
  If,
  WhileTrue,
  Return,
  Eval,
  OracleCall,
  TraceFinalVerdict,
  CheckTrace,
  TypeCheckInput,
  BernoulliDraw,

  First,
  Second,
  Equal,
  Less,
  VerdictLit,
  BestArm,
  ConfigStep,
  ConfigHalted,
  ConfigSteps,
};

/// Declared input shape of a program. `Any` accepts every value.
class Shape {
 public:
  enum class Kind : std::uint8_t { Any, Unit, Int, Str, Program, Trace, Verdict, Pair };

  Shape() = default;
  static Shape of(Kind k);
  static Shape pair(Shape first, Shape second);

  Kind kind() const { return kind_; }
  const Shape& first() const { return parts_->first; }
  const Shape& second() const { return parts_->second; }
  std::uint64_t hash() const;

  friend bool operator==(const Shape& a, const Shape& b);

 private:
  Kind kind_ = Kind::Any;
  std::shared_ptr<const std::pair<Shape, Shape>> parts_;
};

class Node;
class Program;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable AST node with a cached structural hash.
class Node {
 public:
  static NodePtr int_lit(std::int64_t v);
  static NodePtr str_lit(std::string s);
  static NodePtr quote(Program p);
  static NodePtr var(std::string name);
  static NodePtr verdict_lit(Verdict v);
  static NodePtr let(std::string name, NodePtr bound, NodePtr body);
  static NodePtr seq(std::vector<NodePtr> items);
  static NodePtr bernoulli(std::uint64_t num, std::uint64_t den);
  static NodePtr best_arm(std::uint64_t delta_num, std::uint64_t delta_den,
                          std::uint64_t pull_cap, NodePtr arm1, NodePtr arm2);
  /// Nodes that reference a verifier: OracleCall and CheckTrace.
  static NodePtr with_verifier(NodeKind kind, std::string verifier_id, std::vector<NodePtr> args);
  /// Every other kind: fixed-arity operator over child expressions.
  static NodePtr op(NodeKind kind, std::vector<NodePtr> children);

  NodeKind kind() const { return kind_; }
  std::int64_t int_value() const { return number_; }
  /// Literal text, variable/let name, or verifier id depending on kind.
  const std::string& text() const { return text_; }
  Verdict verdict() const { return verdict_; }
  const std::vector<NodePtr>& children() const { return children_; }
  const Program& quoted() const { return *quoted_; }
  std::uint64_t param(std::size_t i) const { return params_[i]; }

  std::uint64_t hash() const { return hash_; }
  /// Number of nodes in this subtree, quoted programs included.
  std::size_t size() const { return size_; }

 private:
  Node() = default;
  void finish();

  NodeKind kind_ = NodeKind::Seq;
  std::int64_t number_ = 0;
  std::string text_;
  Verdict verdict_ = Verdict::DontKnow;
  std::vector<NodePtr> children_;
  std::shared_ptr<const Program> quoted_;
  std::uint64_t params_[3] = {0, 0, 0};
  std::uint64_t hash_ = 0;
  std::size_t size_ = 1;
};

bool same_node(const Node& a, const Node& b);

/// A program: declared input shape plus body. Its input is bound to `x`.
class Program {
 public:
  Program();
  explicit Program(NodePtr root, Shape input = {});

  const Shape& input_shape() const { return input_; }
  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  std::uint64_t hash() const { return hash_; }
  std::size_t size() const { return root_->size(); }

  friend bool operator==(const Program& a, const Program& b);

 private:
  Shape input_;
  NodePtr root_;
  std::uint64_t hash_ = 0;
};

/// The variable every program receives its input in.
inline constexpr const char* kInputVar = "x";

/// Arity of fixed-arity kinds; -1 for variadic (Seq, OracleCall).
int arity(NodeKind kind);

/// True if the body reads `x` outside of quoted programs and let-shadowing.
bool references_input(const Program& p);

/// Every verifier id mentioned in the program, quoted sub-programs included.
std::vector<std::string> verifier_ids(const Program& p);

}  // namespace diagforge
