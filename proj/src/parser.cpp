#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "vshape/error.hpp"
#include "vshape/lang.hpp"

namespace vshape::lang {

std::string_view to_string(PrimOp op) {
  switch (op) {
    case PrimOp::Add:
      return "+";
    case PrimOp::Sub:
      return "-";
    case PrimOp::Mul:
      return "*";
    case PrimOp::Eq:
      return "=";
    case PrimOp::Lt:
      return "<";
  }
  return "?";
}

namespace {

struct Token {
  enum class Kind { Open, Close, Atom, End };
  Kind kind;
  std::string_view text;
  SourceLoc loc;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourceLoc loc{line_, column_};
      if (pos_ >= text_.size()) {
        out.push_back({Token::Kind::End, {}, loc});
        return out;
      }
      char c = text_[pos_];
      if (c == '(' || c == ')') {
        out.push_back({c == '(' ? Token::Kind::Open : Token::Kind::Close, text_.substr(pos_, 1), loc});
        advance();
        continue;
      }
      std::size_t start = pos_;
      while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
        if (static_cast<unsigned char>(text_[pos_]) < 0x20) {
          throw ParseError("unexpected control character", line_, column_);
        }
        advance();
      }
      out.push_back({Token::Kind::Atom, text_.substr(start, pos_ - start), loc});
    }
  }

 private:
  static bool is_delimiter(char c) {
    return c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

const std::set<std::string_view, std::less<>> kKeywords = {"define", "lambda", "if", "match", "_"};

std::optional<PrimOp> primop_of(std::string_view s) {
  if (s == "+") return PrimOp::Add;
  if (s == "-") return PrimOp::Sub;
  if (s == "*") return PrimOp::Mul;
  if (s == "=") return PrimOp::Eq;
  if (s == "<") return PrimOp::Lt;
  return std::nullopt;
}

bool looks_numeric(std::string_view s) {
  std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

bool is_constructor_name(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

  Program program() {
    Program p;
    std::set<std::string, std::less<>> defined;
    while (peek().kind != Token::Kind::End) {
      if (p.body) fail("unexpected form after the program body", peek());
      if (peek().kind == Token::Kind::Open && peek(1).kind == Token::Kind::Atom &&
          peek(1).text == "define") {
        Definition d = definition();
        if (!defined.insert(d.name).second) {
          throw ParseError("duplicate definition of '" + d.name + "'", d.loc.line, d.loc.column);
        }
        p.definitions.push_back(std::move(d));
      } else {
        p.body = expr();
      }
    }
    if (!p.body) fail("program has no body expression", peek());
    return p;
  }

 private:
  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    throw ParseError(msg, at.loc.line, at.loc.column);
  }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }

  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Token::Kind::End) ++pos_;
    return t;
  }

  void expect_open(const char* what) {
    const Token& t = next();
    if (t.kind != Token::Kind::Open) fail(std::string("expected '(' to start ") + what, t);
  }

  void expect_close(const char* what) {
    const Token& t = next();
    if (t.kind == Token::Kind::End) fail(std::string("unbalanced parentheses: unterminated ") + what, t);
    if (t.kind != Token::Kind::Close) fail(std::string("expected ')' to close ") + what, t);
  }

  std::string identifier(const char* what) {
    const Token& t = next();
    if (t.kind != Token::Kind::Atom) fail(std::string("expected ") + what, t);
    check_variable_name(t);
    return std::string(t.text);
  }

  static void check_variable_name(const Token& t) {
    if (looks_numeric(t.text)) fail("expected a name, found number '" + std::string(t.text) + "'", t);
    if (kKeywords.contains(t.text)) fail("'" + std::string(t.text) + "' is reserved", t);
    if (primop_of(t.text)) fail("'" + std::string(t.text) + "' is a primitive operator", t);
    if (is_constructor_name(t.text)) {
      fail("'" + std::string(t.text) + "' is a constructor name, not a variable", t);
    }
  }

  static std::int64_t integer(const Token& t) {
    std::string_view s = t.text;
    if (!s.empty() && s[0] == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) fail("integer literal out of range", t);
    if (ec != std::errc() || end != s.data() + s.size()) {
      fail("malformed integer '" + std::string(t.text) + "'", t);
    }
    return v;
  }

  std::vector<std::string> params(const char* what) {
    expect_open(what);
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    while (peek().kind == Token::Kind::Atom) {
      const Token& at = peek();
      std::string name = identifier("parameter name");
      if (!seen.insert(name).second) fail("duplicate parameter '" + name + "'", at);
      out.push_back(std::move(name));
    }
    expect_close(what);
    return out;
  }

  Definition definition() {
    SourceLoc loc = peek().loc;
    next();  // (
    next();  // define
    Definition d;
    d.loc = loc;
    if (peek().kind == Token::Kind::Open) {
      next();
      SourceLoc fn_loc = peek().loc;
      d.name = identifier("function name");
      std::vector<std::string> ps;
      std::set<std::string, std::less<>> seen;
      while (peek().kind == Token::Kind::Atom) {
        const Token& at = peek();
        std::string name = identifier("parameter name");
        if (!seen.insert(name).second) fail("duplicate parameter '" + name + "'", at);
        ps.push_back(std::move(name));
      }
      expect_close("parameter list");
      auto lambda = std::make_unique<Expr>();
      lambda->loc = fn_loc;
      lambda->node = Lambda{std::move(ps), expr()};
      d.value = std::move(lambda);
    } else {
      d.name = identifier("definition name");
      d.value = expr();
    }
    expect_close("define");
    return d;
  }

  ExprPtr expr() {
    const Token& t = peek();
    auto e = std::make_unique<Expr>();
    e->loc = t.loc;
    switch (t.kind) {
      case Token::Kind::End:
        fail("unexpected end of input", t);
      case Token::Kind::Close:
        fail("unbalanced parentheses: unexpected ')'", t);
      case Token::Kind::Atom:
        next();
        if (looks_numeric(t.text)) {
          e->node = IntLit{integer(t)};
        } else {
          if (is_constructor_name(t.text)) {
            fail("constructor '" + std::string(t.text) + "' must be applied, e.g. (" +
                     std::string(t.text) + ")",
                 t);
          }
          check_variable_name(t);
          e->node = VarRef{std::string(t.text)};
        }
        return e;
      case Token::Kind::Open:
        break;
    }
    next();
    const Token& head = peek();
    if (head.kind == Token::Kind::Close) fail("empty application '()'", head);
    if (head.kind == Token::Kind::Atom) {
      std::string_view h = head.text;
      if (h == "define") fail("define is only allowed at top level", head);
      if (h == "lambda") {
        next();
        std::vector<std::string> ps = params("lambda parameter list");
        e->node = Lambda{std::move(ps), expr()};
        expect_close("lambda");
        return e;
      }
      if (h == "if") {
        next();
        If node;
        node.cond = expr();
        node.then_branch = expr();
        node.else_branch = expr();
        e->node = std::move(node);
        expect_close("if");
        return e;
      }
      if (h == "match") {
        next();
        Match node;
        node.scrutinee = expr();
        while (peek().kind == Token::Kind::Open) node.clauses.push_back(clause());
        if (node.clauses.empty()) fail("match needs at least one clause", peek());
        e->node = std::move(node);
        expect_close("match");
        return e;
      }
      if (auto op = primop_of(h)) {
        next();
        Prim node{*op, nullptr, nullptr};
        if (peek().kind == Token::Kind::Close) fail("primitive needs two operands", peek());
        node.lhs = expr();
        if (peek().kind == Token::Kind::Close) fail("primitive needs two operands", peek());
        node.rhs = expr();
        if (peek().kind != Token::Kind::Close) fail("primitive takes exactly two operands", peek());
        e->node = std::move(node);
        expect_close("primitive");
        return e;
      }
      if (is_constructor_name(h)) {
        next();
        Construct node{std::string(h), {}};
        while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End) {
          node.args.push_back(expr());
        }
        e->node = std::move(node);
        expect_close("constructor");
        return e;
      }
    }
    Apply node;
    node.callee = expr();
    while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End) {
      node.args.push_back(expr());
    }
    e->node = std::move(node);
    expect_close("application");
    return e;
  }

  Clause clause() {
    next();  // (
    Clause c;
    std::set<std::string, std::less<>> names;
    c.pattern = pattern(names, c.binding_count);
    c.body = expr();
    expect_close("match clause");
    return c;
  }

  Pattern pattern(std::set<std::string, std::less<>>& names, std::size_t& slots) {
    const Token& t = next();
    Pattern p;
    p.loc = t.loc;
    if (t.kind == Token::Kind::Atom) {
      if (t.text == "_") {
        p.node = WildcardPattern{};
      } else if (looks_numeric(t.text)) {
        p.node = IntPattern{integer(t)};
      } else {
        if (is_constructor_name(t.text)) {
          fail("constructor pattern needs parentheses: (" + std::string(t.text) + " ...)", t);
        }
        check_variable_name(t);
        if (!names.insert(std::string(t.text)).second) {
          fail("variable '" + std::string(t.text) + "' bound twice in one pattern", t);
        }
        p.node = BindPattern{std::string(t.text), slots++};
      }
      return p;
    }
    if (t.kind != Token::Kind::Open) fail("expected a pattern", t);
    const Token& head = next();
    if (head.kind != Token::Kind::Atom || !is_constructor_name(head.text)) {
      fail("expected a constructor name in pattern", head);
    }
    CtorPattern ctor{std::string(head.text), {}};
    while (peek().kind != Token::Kind::Close && peek().kind != Token::Kind::End) {
      ctor.args.push_back(pattern(names, slots));
    }
    expect_close("constructor pattern");
    p.node = std::move(ctor);
    return p;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

Program load(std::string_view text) { return validate(parse(text)); }

}  // namespace vshape::lang
