#include "diagforge/syntax.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <optional>

namespace diagforge {

SyntaxError::SyntaxError(std::size_t position, std::string expected)
    : std::runtime_error("syntax error at offset " + std::to_string(position) + ": expected " +
                         expected),
      position_(position),
      expected_(std::move(expected)) {}

namespace {

struct Keyword {
  std::string_view name;
  NodeKind kind;
};

constexpr Keyword kKeywords[] = {
    {"int", NodeKind::IntLit},
    {"str", NodeKind::StrLit},
    {"quote", NodeKind::Quote},
    {"var", NodeKind::Var},
    {"pair", NodeKind::Pair},
    {"concat", NodeKind::Concat},
    {"let", NodeKind::Let},
    {"seq", NodeKind::Seq},
    {"if", NodeKind::If},
    {"while-true", NodeKind::WhileTrue},
    {"return", NodeKind::Return},
    {"eval", NodeKind::Eval},
    {"oracle", NodeKind::OracleCall},
    {"trace-final-verdict", NodeKind::TraceFinalVerdict},
    {"check-trace", NodeKind::CheckTrace},
    {"typecheck-input", NodeKind::TypeCheckInput},
    {"bernoulli", NodeKind::BernoulliDraw},
    {"fst", NodeKind::First},
    {"snd", NodeKind::Second},
    {"eq", NodeKind::Equal},
    {"lt", NodeKind::Less},
    {"verdict", NodeKind::VerdictLit},
    {"best-arm", NodeKind::BestArm},
    {"config-step", NodeKind::ConfigStep},
    {"config-halted", NodeKind::ConfigHalted},
    {"config-steps", NodeKind::ConfigSteps},
};

std::string_view keyword_of(NodeKind kind) {
  for (const auto& k : kKeywords) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

struct ShapeName {
  std::string_view name;
  Shape::Kind kind;
};

constexpr ShapeName kShapeNames[] = {
    {"any", Shape::Kind::Any},       {"unit", Shape::Kind::Unit},
    {"int", Shape::Kind::Int},       {"str", Shape::Kind::Str},
    {"program", Shape::Kind::Program}, {"trace", Shape::Kind::Trace},
    {"verdict", Shape::Kind::Verdict},
};

bool is_name(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

bool is_verifier_id(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
          c == ':' || c == '/' || c == '@' || c == '+')) {
      return false;
    }
  }
  return true;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Program program() {
    skip();
    Program p = program_form();
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "end of input");
    return p;
  }

  Shape shape_only() {
    skip();
    Shape s = shape();
    skip();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "end of input");
    return s;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != c) throw SyntaxError(pos_, std::string("'") + c + "'");
    ++pos_;
  }

  std::string_view atom(const char* what) {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == '"' ||
          c == ';') {
        break;
      }
      ++pos_;
    }
    if (pos_ == start) throw SyntaxError(start, what);
    return text_.substr(start, pos_ - start);
  }

  std::int64_t integer() {
    skip();
    const std::size_t start = pos_;
    const std::string_view a = atom("integer");
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || ptr != a.data() + a.size()) throw SyntaxError(start, "integer");
    return v;
  }

  std::uint64_t count() {
    skip();
    const std::size_t start = pos_;
    const std::string_view a = atom("non-negative integer");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(a.data(), a.data() + a.size(), v);
    if (ec != std::errc() || ptr != a.data() + a.size()) {
      throw SyntaxError(start, "non-negative integer");
    }
    return v;
  }

  std::string string_literal() {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != '"') throw SyntaxError(pos_, "string literal");
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= text_.size()) throw SyntaxError(pos_, "closing '\"'");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= text_.size()) throw SyntaxError(pos_, "escape character");
      const char e = text_[pos_++];
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw SyntaxError(pos_ - 1, "one of \\\" \\\\ \\n \\t");
      }
    }
    return out;
  }

  Shape shape() {
    skip();
    if (peek('(')) {
      ++pos_;
      const std::size_t at = pos_;
      if (atom("'pair'") != "pair") throw SyntaxError(at, "'pair'");
      Shape a = shape();
      Shape b = shape();
      expect(')');
      return Shape::pair(std::move(a), std::move(b));
    }
    const std::size_t at = pos_;
    const std::string_view name = atom("shape");
    for (const auto& s : kShapeNames) {
      if (s.name == name) return Shape::of(s.kind);
    }
    throw SyntaxError(at, "shape (any, unit, int, str, program, trace, verdict or (pair ...))");
  }

  // Either `(program <shape> <body>)` or a bare body.
  Program program_form() {
    skip();
    const std::size_t save = pos_;
    if (peek('(')) {
      ++pos_;
      skip();
      const std::size_t at = pos_;
      if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
          atom("keyword") == "program") {
        Shape s = shape();
        NodePtr body = expr();
        expect(')');
        return Program(std::move(body), std::move(s));
      }
      (void)at;
      pos_ = save;
    }
    return Program(expr());
  }

  std::vector<NodePtr> exprs_until_close() {
    std::vector<NodePtr> out;
    while (!peek(')')) {
      if (pos_ >= text_.size()) throw SyntaxError(pos_, "')'");
      out.push_back(expr());
    }
    return out;
  }

  NodePtr expr() {
    expect('(');
    skip();
    const std::size_t at = pos_;
    const std::string_view kw = atom("keyword");
    std::optional<NodeKind> kind;
    for (const auto& k : kKeywords) {
      if (k.name == kw) kind = k.kind;
    }
    if (!kind) throw SyntaxError(at, "keyword");

    NodePtr n;
    switch (*kind) {
      case NodeKind::IntLit:
        n = Node::int_lit(integer());
        break;
      case NodeKind::StrLit:
        n = Node::str_lit(string_literal());
        break;
      case NodeKind::Quote:
        n = Node::quote(program_form());
        break;
      case NodeKind::Var: {
        skip();
        const std::size_t p = pos_;
        const std::string_view name = atom("variable name");
        if (!is_name(name)) throw SyntaxError(p, "variable name");
        n = Node::var(std::string(name));
        break;
      }
      case NodeKind::VerdictLit: {
        skip();
        const std::size_t p = pos_;
        const auto v = parse_verdict(atom("verdict name"));
        if (!v) throw SyntaxError(p, "verdict name");
        n = Node::verdict_lit(*v);
        break;
      }
      case NodeKind::Let: {
        skip();
        const std::size_t p = pos_;
        const std::string_view name = atom("variable name");
        if (!is_name(name)) throw SyntaxError(p, "variable name");
        NodePtr bound = expr();
        NodePtr body = expr();
        n = Node::let(std::string(name), std::move(bound), std::move(body));
        break;
      }
      case NodeKind::Seq:
        n = Node::seq(exprs_until_close());
        break;
      case NodeKind::BernoulliDraw: {
        skip();
        const std::size_t p = pos_;
        const std::uint64_t num = count();
        const std::uint64_t den = count();
        if (den == 0 || num > den) throw SyntaxError(p, "probability num/den with 0 <= num <= den");
        n = Node::bernoulli(num, den);
        break;
      }
      case NodeKind::BestArm: {
        skip();
        const std::size_t p = pos_;
        const std::uint64_t num = count();
        const std::uint64_t den = count();
        const std::uint64_t cap = count();
        if (num == 0 || den == 0 || 2 * num >= den || cap == 0) {
          throw SyntaxError(p, "confidence in (0, 1/2) and positive pull cap");
        }
        NodePtr a = expr();
        NodePtr b = expr();
        n = Node::best_arm(num, den, cap, std::move(a), std::move(b));
        break;
      }
      case NodeKind::OracleCall:
      case NodeKind::CheckTrace: {
        skip();
        const std::size_t p = pos_;
        const std::string_view id = atom("verifier id");
        if (!is_verifier_id(id)) throw SyntaxError(p, "verifier id");
        std::vector<NodePtr> args = exprs_until_close();
        if (*kind == NodeKind::CheckTrace && args.size() != 2) {
          throw SyntaxError(pos_, "check-trace with exactly two arguments");
        }
        n = Node::with_verifier(*kind, std::string(id), std::move(args));
        break;
      }
      default: {
        std::vector<NodePtr> kids = exprs_until_close();
        if (static_cast<int>(kids.size()) != arity(*kind)) {
          throw SyntaxError(pos_, std::to_string(arity(*kind)) + " argument(s) for '" +
                                      std::string(kw) + "'");
        }
        n = Node::op(*kind, std::move(kids));
        break;
      }
    }
    expect(')');
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write_string(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

void write_shape(std::string& out, const Shape& s) {
  if (s.kind() == Shape::Kind::Pair) {
    out += "(pair ";
    write_shape(out, s.first());
    out.push_back(' ');
    write_shape(out, s.second());
    out.push_back(')');
    return;
  }
  for (const auto& n : kShapeNames) {
    if (n.kind == s.kind()) {
      out += n.name;
      return;
    }
  }
}

void write_node(std::string& out, const Node& n);

void write_program(std::string& out, const Program& p) {
  if (p.input_shape().kind() == Shape::Kind::Any) {
    write_node(out, p.root());
    return;
  }
  out += "(program ";
  write_shape(out, p.input_shape());
  out.push_back(' ');
  write_node(out, p.root());
  out.push_back(')');
}

void write_node(std::string& out, const Node& n) {
  out.push_back('(');
  out += keyword_of(n.kind());
  switch (n.kind()) {
    case NodeKind::IntLit:
      out.push_back(' ');
      out += std::to_string(n.int_value());
      break;
    case NodeKind::StrLit:
      out.push_back(' ');
      write_string(out, n.text());
      break;
    case NodeKind::Quote:
      out.push_back(' ');
      write_program(out, n.quoted());
      break;
    case NodeKind::Var:
    case NodeKind::Let:
    case NodeKind::OracleCall:
    case NodeKind::CheckTrace:
      out.push_back(' ');
      out += n.text();
      break;
    case NodeKind::VerdictLit:
      out.push_back(' ');
      out += to_string(n.verdict());
      break;
    case NodeKind::BernoulliDraw:
      out += ' ' + std::to_string(n.param(0)) + ' ' + std::to_string(n.param(1));
      break;
    case NodeKind::BestArm:
      out += ' ' + std::to_string(n.param(0)) + ' ' + std::to_string(n.param(1)) + ' ' +
             std::to_string(n.param(2));
      break;
    default:
      break;
  }
  for (const auto& c : n.children()) {
    out.push_back(' ');
    write_node(out, *c);
  }
  out.push_back(')');
}

}  // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

Shape parse_shape(std::string_view text) { return Parser(text).shape_only(); }

std::string serialize(const Program& p) {
  std::string out;
  write_program(out, p);
  return out;
}

std::string serialize(const Node& n) {
  std::string out;
  write_node(out, n);
  return out;
}

std::string serialize(const Shape& s) {
  std::string out;
  write_shape(out, s);
  return out;
}

}  // namespace diagforge
