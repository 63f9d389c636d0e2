#include <string>

#include "vshape/lang.hpp"

namespace vshape::lang {

namespace {

struct Printer {
  std::string out;

  void expr(const Expr& e) {
    std::visit([&](const auto& node) { visit(node); }, e.node);
  }

  void visit(const IntLit& i) { out += std::to_string(i.value); }
  void visit(const VarRef& v) { out += v.name; }

  void visit(const Lambda& l) {
    out += "(lambda (";
    names(l.params);
    out += ") ";
    expr(*l.body);
    out += ')';
  }

  void visit(const Apply& a) {
    out += '(';
    expr(*a.callee);
    args(a.args);
    out += ')';
  }

  void visit(const Construct& c) {
    out += '(';
    out += c.name;
    args(c.args);
    out += ')';
  }

  void visit(const If& i) {
    out += "(if ";
    expr(*i.cond);
    out += ' ';
    expr(*i.then_branch);
    out += ' ';
    expr(*i.else_branch);
    out += ')';
  }

  void visit(const Prim& p) {
    out += '(';
    out += to_string(p.op);
    out += ' ';
    expr(*p.lhs);
    out += ' ';
    expr(*p.rhs);
    out += ')';
  }

  void visit(const Match& m) {
    out += "(match ";
    expr(*m.scrutinee);
    for (const Clause& c : m.clauses) {
      out += " (";
      pattern(c.pattern);
      out += ' ';
      expr(*c.body);
      out += ')';
    }
    out += ')';
  }

  void pattern(const Pattern& p) {
    if (std::holds_alternative<WildcardPattern>(p.node)) {
      out += '_';
    } else if (const auto* b = std::get_if<BindPattern>(&p.node)) {
      out += b->name;
    } else if (const auto* i = std::get_if<IntPattern>(&p.node)) {
      out += std::to_string(i->value);
    } else {
      const auto& c = std::get<CtorPattern>(p.node);
      out += '(';
      out += c.name;
      for (const Pattern& sub : c.args) {
        out += ' ';
        pattern(sub);
      }
      out += ')';
    }
  }

  void names(const std::vector<std::string>& ns) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i != 0) out += ' ';
      out += ns[i];
    }
  }

  void args(const std::vector<ExprPtr>& as) {
    for (const ExprPtr& a : as) {
      out += ' ';
      expr(*a);
    }
  }
};

}  // namespace

std::string to_source(const Expr& expr) {
  Printer p;
  p.expr(expr);
  return std::move(p.out);
}

std::string to_source(const Pattern& pattern) {
  Printer p;
  p.pattern(pattern);
  return std::move(p.out);
}

std::string to_source(const Program& program) {
  Printer p;
  for (const Definition& d : program.definitions) {
    if (const auto* l = std::get_if<Lambda>(&d.value->node)) {
      p.out += "(define (" + d.name;
      for (const std::string& param : l->params) p.out += ' ' + param;
      p.out += ") ";
      p.expr(*l->body);
    } else {
      p.out += "(define " + d.name + ' ';
      p.expr(*d.value);
    }
    p.out += ")\n";
  }
  if (program.body) p.expr(*program.body);
  p.out += '\n';
  return std::move(p.out);
}

}  // namespace vshape::lang
