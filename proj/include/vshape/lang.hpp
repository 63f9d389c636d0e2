/**
 * Surface language: a lambda calculus with value-class constructors and
 * pattern matching, written as s-expressions.
 *
 *   program := defn* expr
 *   defn    := (define (NAME param*) expr) | (define NAME expr)
 *   expr    := INT | NAME | (lambda (param*) expr) | (if expr expr expr)
 *            | (match expr clause+) | (PRIMOP expr expr) | (CTOR expr*)
 *            | (expr expr*)
 *   clause  := (pattern expr)
 *   pattern := _ | NAME | INT | (CTOR pattern*)
 *
 * Names starting with an uppercase letter are constructors; the number of
 * arguments at an occurrence fixes the class arity. PRIMOP is one of
 * + - * = <. Comments run from `;` to the end of the line.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace vshape::lang {

inline constexpr std::size_t kUnresolved = std::numeric_limits<std::size_t>::max();

struct SourceLoc {
  std::size_t line = 1;
  std::size_t column = 1;
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class PrimOp { Add, Sub, Mul, Eq, Lt };

std::string_view to_string(PrimOp op);

struct IntLit {
  std::int64_t value;
};

struct VarRef {
  enum class Scope { Unresolved, Local, Global };

  std::string name;
  Scope scope = Scope::Unresolved;
  /// Local: number of frames to walk up, then the slot in that frame.
  /// Global: index into the program's definitions.
  std::size_t depth = 0;
  std::size_t index = 0;
};

struct Lambda {
  std::vector<std::string> params;
  ExprPtr body;
};

struct Apply {
  ExprPtr callee;
  std::vector<ExprPtr> args;
};

struct Construct {
  std::string name;
  std::vector<ExprPtr> args;
  std::size_t class_id = kUnresolved;
};

struct If {
  ExprPtr cond;
  ExprPtr then_branch;
  ExprPtr else_branch;
};

struct Prim {
  PrimOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Pattern;

struct WildcardPattern {};

struct BindPattern {
  std::string name;
  std::size_t slot = 0;
};

struct IntPattern {
  std::int64_t value;
};

struct CtorPattern {
  std::string name;
  std::vector<Pattern> args;
  std::size_t class_id = kUnresolved;
};

struct Pattern {
  std::variant<WildcardPattern, BindPattern, IntPattern, CtorPattern> node;
  SourceLoc loc;
};

struct Clause {
  Pattern pattern;
  ExprPtr body;
  /// Number of variables bound by the pattern (slots in the clause frame).
  std::size_t binding_count = 0;
};

struct Match {
  ExprPtr scrutinee;
  std::vector<Clause> clauses;
};

struct Expr {
  std::variant<IntLit, VarRef, Lambda, Apply, Construct, If, Prim, Match> node;
  SourceLoc loc;
};

/// A constructor class used by the program, `name/arity`.
struct ClassRef {
  std::string name;
  std::size_t arity;

  bool operator==(const ClassRef&) const = default;
};

struct Definition {
  std::string name;
  ExprPtr value;
  SourceLoc loc;
};

struct Program {
  std::vector<Definition> definitions;
  ExprPtr body;
  /// Filled by validate(); constructor nodes and patterns index into it.
  std::vector<ClassRef> classes;
  bool validated = false;
};

/// Throws ParseError with the position of the offending token.
Program parse(std::string_view text);

/// Resolves variables and constructor classes; throws ParseError for
/// unbound variables.
Program validate(Program program);

/// parse() followed by validate().
Program load(std::string_view text);

/// Canonical s-expression form; parsing it yields the same program.
std::string to_source(const Program& program);
std::string to_source(const Expr& expr);
std::string to_source(const Pattern& pattern);

}  // namespace vshape::lang
