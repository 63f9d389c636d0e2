#include <map>
#include <string>
#include <unordered_map>

#include "vshape/error.hpp"
#include "vshape/lang.hpp"

namespace vshape::lang {

namespace {

class Resolver {
 public:
  explicit Resolver(Program& p) : program_(p) {
    for (std::size_t i = 0; i < p.definitions.size(); ++i) globals_.emplace(p.definitions[i].name, i);
  }

  void run() {
    for (Definition& d : program_.definitions) expr(*d.value);
    expr(*program_.body);
  }

 private:
  std::size_t class_id(const std::string& name, std::size_t arity) {
    auto [it, inserted] = class_ids_.try_emplace({name, arity}, program_.classes.size());
    if (inserted) program_.classes.push_back({name, arity});
    return it->second;
  }

  void expr(Expr& e) {
    std::visit([&](auto& node) { visit(node, e.loc); }, e.node);
  }

  void visit(IntLit&, SourceLoc) {}

  void visit(VarRef& v, SourceLoc loc) {
    // Frames are searched innermost first; depth counts frames, not bindings.
    for (std::size_t k = scopes_.size(); k-- > 0;) {
      const std::vector<std::string>& frame = scopes_[k];
      for (std::size_t i = 0; i < frame.size(); ++i) {
        if (frame[i] == v.name) {
          v.scope = VarRef::Scope::Local;
          v.depth = scopes_.size() - 1 - k;
          v.index = i;
          return;
        }
      }
    }
    if (auto it = globals_.find(v.name); it != globals_.end()) {
      v.scope = VarRef::Scope::Global;
      v.index = it->second;
      return;
    }
    throw ParseError("unbound variable '" + v.name + "'", loc.line, loc.column);
  }

  void visit(Lambda& l, SourceLoc) {
    bool framed = !l.params.empty();
    if (framed) scopes_.push_back(l.params);
    expr(*l.body);
    if (framed) scopes_.pop_back();
  }

  void visit(Apply& a, SourceLoc) {
    expr(*a.callee);
    for (ExprPtr& arg : a.args) expr(*arg);
  }

  void visit(Construct& c, SourceLoc) {
    c.class_id = class_id(c.name, c.args.size());
    for (ExprPtr& arg : c.args) expr(*arg);
  }

  void visit(If& i, SourceLoc) {
    expr(*i.cond);
    expr(*i.then_branch);
    expr(*i.else_branch);
  }

  void visit(Prim& p, SourceLoc) {
    expr(*p.lhs);
    expr(*p.rhs);
  }

  void visit(Match& m, SourceLoc) {
    expr(*m.scrutinee);
    for (Clause& c : m.clauses) {
      std::vector<std::string> names(c.binding_count);
      pattern(c.pattern, names);
      bool framed = c.binding_count > 0;
      if (framed) scopes_.push_back(std::move(names));
      expr(*c.body);
      if (framed) scopes_.pop_back();
    }
  }

  void pattern(Pattern& p, std::vector<std::string>& names) {
    if (auto* b = std::get_if<BindPattern>(&p.node)) {
      names.at(b->slot) = b->name;
    } else if (auto* c = std::get_if<CtorPattern>(&p.node)) {
      c->class_id = class_id(c->name, c->args.size());
      for (Pattern& sub : c->args) pattern(sub, names);
    }
  }

  Program& program_;
  std::unordered_map<std::string, std::size_t> globals_;
  std::map<std::pair<std::string, std::size_t>, std::size_t> class_ids_;
  std::vector<std::vector<std::string>> scopes_;
};

}  // namespace

Program validate(Program program) {
  if (!program.body) throw ParseError("program has no body expression", 1, 1);
  program.classes.clear();
  Resolver(program).run();
  program.validated = true;
  return program;
}

}  // namespace vshape::lang
