#pragma once

// Region-expression language:
//
//   expr      := primitive | "rot" "(" num "," expr ")" | "refl" "(" expr ")"
//              | "disp" "(" num "," num "," expr ")" | "union" "(" expr { "," expr } ")"
//   primitive := "point" | "seg" "(" num "," num ")" | "line" "(" num "," num ")"
//              | "rect" "(" num "," num "," num "," num ")" | "disk" "(" num "," num "," num ")"
//              | "tri" "(" num "," num ")" | "poly" "(" num "," num ")"
//
// Angles are radians. tri(a, M) is the triangle [a, 2 pi / M] of a canonical
// M-gon with its apex at the origin, pointing along +q.

#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qregion/errors.hpp"
#include "qregion/geometry.hpp"

namespace qregion::dsl {

/// 1-based position plus byte range in the source text.
struct Span {
  int line = 1;
  int col = 1;
  std::size_t offset = 0;
  std::size_t length = 0;
};

enum class ErrorKind { syntax, arity, non_finite, semantic };

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::syntax: return "syntax error";
    case ErrorKind::arity: return "arity error";
    case ErrorKind::non_finite: return "non-finite literal";
    case ErrorKind::semantic: return "invalid region";
  }
  return "error";
}

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, Span at, std::string token, const std::string& what)
      : Error(std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + to_string(kind) + ": " + what +
              (token.empty() ? std::string() : " at '" + token + "'")),
        kind_(kind),
        span_(at),
        token_(std::move(token)) {}

  ErrorKind kind() const { return kind_; }
  int line() const { return span_.line; }
  int column() const { return span_.col; }
  const Span& span() const { return span_; }
  const std::string& token() const { return token_; }

 private:
  ErrorKind kind_;
  Span span_;
  std::string token_;
};

enum class NodeKind { point, seg, line, rect, disk, tri, poly, rot, refl, disp, union_ };

inline const char* keyword(NodeKind k) {
  switch (k) {
    case NodeKind::point: return "point";
    case NodeKind::seg: return "seg";
    case NodeKind::line: return "line";
    case NodeKind::rect: return "rect";
    case NodeKind::disk: return "disk";
    case NodeKind::tri: return "tri";
    case NodeKind::poly: return "poly";
    case NodeKind::rot: return "rot";
    case NodeKind::refl: return "refl";
    case NodeKind::disp: return "disp";
    case NodeKind::union_: return "union";
  }
  return "?";
}

/// AST node. Numeric arguments precede child expressions in every form, so
/// they are stored separately; num_spans parallels nums.
struct Node {
  NodeKind kind = NodeKind::point;
  std::vector<double> nums;
  std::vector<Node> children;
  Span span;
  std::vector<Span> num_spans;
};

/// Structural equality; spans are ignored.
inline bool operator==(const Node& a, const Node& b) {
  return a.kind == b.kind && a.nums == b.nums && a.children == b.children;
}

namespace detail {

enum class Tok { ident, number, lparen, rparen, comma, end, bad };

struct Token {
  Tok type = Tok::end;
  std::string_view text;
  Span span;
  double value = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.span = {line_, col_, pos_, 0};
    if (pos_ >= src_.size()) {
      t.type = Tok::end;
      return t;
    }
    const char c = src_[pos_];
    const std::size_t start = pos_;
    if (c == '(' || c == ')' || c == ',') {
      advance();
      t.type = c == '(' ? Tok::lparen : c == ')' ? Tok::rparen : Tok::comma;
    } else if (is_alpha(c)) {
      while (pos_ < src_.size() && (is_alpha(src_[pos_]) || is_digit(src_[pos_]))) advance();
      t.type = Tok::ident;
    } else if (is_digit(c) || c == '.' || c == '+' || c == '-') {
      lex_number(t);
    } else {
      advance();
      t.type = Tok::bad;
    }
    t.text = src_.substr(start, pos_ - start);
    t.span.length = pos_ - start;
    return t;
  }

 private:
  static bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      advance();
  }

  std::size_t digits() {
    std::size_t n = 0;
    while (pos_ < src_.size() && is_digit(src_[pos_])) {
      advance();
      ++n;
    }
    return n;
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    if (src_[pos_] == '+' || src_[pos_] == '-') advance();
    // Signed words like -inf are swallowed whole so they report as one token.
    if (pos_ < src_.size() && is_alpha(src_[pos_])) {
      while (pos_ < src_.size() && is_alpha(src_[pos_])) advance();
      t.type = Tok::ident;
      return;
    }
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      n += digits();
    }
    if (n == 0) {
      t.type = Tok::bad;
      return;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (digits() == 0) {
        t.type = Tok::bad;
        return;
      }
    }
    std::string_view body = src_.substr(start, pos_ - start);
    if (body.front() == '+') body.remove_prefix(1);
    const auto res = std::from_chars(body.data(), body.data() + body.size(), t.value);
    if (res.ec == std::errc::result_out_of_range) {
      // from_chars leaves the value unset; strtod gives +-HUGE_VAL on overflow
      // and a denormal or zero on underflow.
      t.value = std::strtod(std::string(body).c_str(), nullptr);
    }
    t.type = Tok::number;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct Signature {
  NodeKind kind;
  int nums;
  int exprs;  // -1: one or more
};

inline std::optional<Signature> signature(std::string_view word) {
  static constexpr std::pair<std::string_view, Signature> table[] = {
      {"point", {NodeKind::point, 0, 0}}, {"seg", {NodeKind::seg, 2, 0}},   {"line", {NodeKind::line, 2, 0}},
      {"rect", {NodeKind::rect, 4, 0}},   {"disk", {NodeKind::disk, 3, 0}}, {"tri", {NodeKind::tri, 2, 0}},
      {"poly", {NodeKind::poly, 2, 0}},   {"rot", {NodeKind::rot, 1, 1}},   {"refl", {NodeKind::refl, 0, 1}},
      {"disp", {NodeKind::disp, 2, 1}},   {"union", {NodeKind::union_, 0, -1}},
  };
  for (const auto& [w, s] : table)
    if (w == word) return s;
  return std::nullopt;
}

inline bool is_non_finite_word(std::string_view w) {
  if (!w.empty() && (w.front() == '-' || w.front() == '+')) w.remove_prefix(1);
  std::string lower(w);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return lower == "inf" || lower == "infinity" || lower == "nan";
}

class Parser {
 public:
  static constexpr int kMaxDepth = 200;

  explicit Parser(std::string_view src) : lex_(src) { cur_ = lex_.next(); }

  Node parse() {
    Node n = expr(0);
    if (cur_.type != Tok::end) fail(ErrorKind::syntax, cur_, "unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] static void fail(ErrorKind kind, const Token& t, const std::string& what) {
    throw ParseError(kind, t.span, t.type == Tok::end ? "<end of input>" : std::string(t.text), what);
  }

  Token take() {
    Token t = cur_;
    cur_ = lex_.next();
    return t;
  }

  void expect(Tok type, const char* what) {
    if (cur_.type != type) fail(ErrorKind::syntax, cur_, std::string("expected ") + what);
    take();
  }

  Node expr(int depth) {
    if (depth > kMaxDepth) fail(ErrorKind::syntax, cur_, "expression nested too deeply");
    if (cur_.type != Tok::ident) {
      if (cur_.type == Tok::number) fail(ErrorKind::syntax, cur_, "expected a region expression, found a number");
      fail(ErrorKind::syntax, cur_, "expected a region expression");
    }
    const Token head = take();
    const auto sig = signature(head.text);
    if (!sig) {
      if (is_non_finite_word(head.text)) fail(ErrorKind::non_finite, head, "numeric literal must be finite");
      fail(ErrorKind::syntax, head, "unknown region form");
    }
    Node n;
    n.kind = sig->kind;
    n.span = head.span;
    if (sig->nums == 0 && sig->exprs == 0) {
      if (cur_.type == Tok::lparen) fail(ErrorKind::arity, cur_, std::string(keyword(n.kind)) + " takes no arguments");
      return n;
    }
    expect(Tok::lparen, "'('");
    int args = 0;
    while (true) {
      argument(n, *sig, args, depth);
      ++args;
      if (cur_.type == Tok::comma) {
        take();
        continue;
      }
      if (cur_.type == Tok::rparen) break;
      fail(ErrorKind::syntax, cur_, "expected ',' or ')'");
    }
    const Token close = take();
    const int want = sig->nums + std::max(sig->exprs, 1);
    const bool ok = sig->exprs == -1 ? args >= sig->nums + 1 : args == sig->nums + sig->exprs;
    if (!ok) {
      fail(ErrorKind::arity, close,
           std::string(keyword(n.kind)) + " expects " + (sig->exprs == -1 ? "at least " : "") + std::to_string(want) +
               " argument" + (want == 1 ? "" : "s") + ", got " + std::to_string(args));
    }
    n.span.length = close.span.offset + close.span.length - n.span.offset;
    return n;
  }

  void argument(Node& n, const Signature& sig, int index, int depth) {
    const bool want_num = index < sig.nums;
    const bool surplus = sig.exprs != -1 && index >= sig.nums + sig.exprs;
    if (cur_.type == Tok::number) {
      const Token t = take();
      if (!std::isfinite(t.value)) fail(ErrorKind::non_finite, t, "numeric literal must be finite");
      if (!want_num && !surplus) fail(ErrorKind::syntax, t, "expected a region expression, found a number");
      n.nums.push_back(t.value);
      n.num_spans.push_back(t.span);
      return;
    }
    if (cur_.type == Tok::ident) {
      if (is_non_finite_word(cur_.text)) fail(ErrorKind::non_finite, cur_, "numeric literal must be finite");
      if (want_num) fail(ErrorKind::syntax, cur_, "expected a number");
      n.children.push_back(expr(depth + 1));
      return;
    }
    fail(ErrorKind::syntax, cur_, want_num ? "expected a number" : "expected a region expression");
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace detail

/// Parses one region expression. Throws ParseError with a 1-based line:column
/// and the offending token.
inline Node parse_region_expression(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical text form. Numbers use the shortest round-trip representation,
/// so parse(print(ast)) == ast.
inline std::string print(const Node& n) {
  std::string s = keyword(n.kind);
  if (n.nums.empty() && n.children.empty()) return s;
  s += '(';
  bool first = true;
  for (double v : n.nums) {
    if (!first) s += ',';
    s += format_number(v);
    first = false;
  }
  for (const Node& c : n.children) {
    if (!first) s += ',';
    s += print(c);
    first = false;
  }
  return s + ')';
}

struct EvalOptions {
  /// Unions whose members overlap by more than this fraction of their summed
  /// area are rejected (Monte Carlo estimate).
  double overlap_tol = 1e-3;
  int overlap_samples = 100000;
  unsigned long long seed = 1;
};

namespace detail {

inline int sides_arg(const Node& n, std::size_t i) {
  const double m = n.nums[i];
  if (m != std::floor(m) || m < 3 || m > 1e6)
    throw ParseError(ErrorKind::semantic, n.num_spans.empty() ? n.span : n.num_spans[i], format_number(m),
                     "side count must be an integer >= 3");
  return static_cast<int>(m);
}

inline Region build(const Node& n, const EvalOptions& opt) {
  try {
    switch (n.kind) {
      case NodeKind::point: return point_origin();
      case NodeKind::seg: return segment(n.nums[0], n.nums[1]);
      case NodeKind::line: return line(n.nums[0], n.nums[1]);
      case NodeKind::rect: return rectangle(n.nums[0], n.nums[1], n.nums[2], n.nums[3]);
      case NodeKind::disk: return disk({n.nums[0], n.nums[1]}, n.nums[2]);
      case NodeKind::tri: return polygon_triangle(n.nums[0], sides_arg(n, 1));
      case NodeKind::poly: return canonical_polygon(n.nums[0], sides_arg(n, 1));
      case NodeKind::rot: return rotated(n.nums[0], build(n.children[0], opt));
      case NodeKind::refl: return reflected_origin(build(n.children[0], opt));
      case NodeKind::disp: return displaced({n.nums[0], n.nums[1]}, build(n.children[0], opt));
      case NodeKind::union_: {
        std::vector<Region> members;
        double total = 0.0;
        for (const Node& c : n.children) {
          members.push_back(build(c, opt));
          total += region_area(members.back());
        }
        Region u = region_union(std::move(members));
        const double overlap = estimate_overlap_area(*u.get_if<Union>(), opt.overlap_samples, opt.seed);
        if (overlap > opt.overlap_tol * std::max(total, 1e-300))
          throw ParseError(ErrorKind::semantic, n.span, "union",
                           "union members overlap (estimated area " + format_number(overlap) + ")");
        return u;
      }
    }
  } catch (const InvalidArgument& e) {
    throw ParseError(ErrorKind::semantic, n.span, keyword(n.kind), e.what());
  }
  throw ParseError(ErrorKind::semantic, n.span, keyword(n.kind), "unhandled form");
}

}  // namespace detail

inline Region evaluate(const Node& ast, const EvalOptions& opt = {}) { return detail::build(ast, opt); }

inline Region parse_region(std::string_view text, const EvalOptions& opt = {}) {
  return evaluate(parse_region_expression(text), opt);
}

}  // namespace qregion::dsl
