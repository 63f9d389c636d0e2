#include "vshape/machine.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "vshape/error.hpp"

namespace vshape {

using namespace lang;

namespace {

struct Closure;
struct Env;
using EnvPtr = std::shared_ptr<const Env>;

// Machine-level value: data, or a function closure.
struct MValue {
  Value data;
  std::shared_ptr<const Closure> fn;

  bool is_fn() const { return fn != nullptr; }
};

struct Env {
  std::vector<MValue> slots;
  EnvPtr parent;
};

struct Closure {
  const Lambda* lambda;
  EnvPtr env;
};

// Continuation frames.
struct ArgsFrame {  // callee and arguments of an application, or constructor arguments
  const Expr* node;
  EnvPtr env;
  std::vector<MValue> vals;
};
struct PrimFrame {
  const Prim* node;
  EnvPtr env;
  std::optional<MValue> lhs;
};
struct IfFrame {
  const If* node;
  EnvPtr env;
};
struct MatchFrame {
  const Match* node;
  EnvPtr env;
};
using Frame = std::variant<ArgsFrame, PrimFrame, IfFrame, MatchFrame>;

std::string describe(const MValue& v) {
  if (v.is_fn()) return "<function>";
  std::string s = print_value(v.data);
  if (s.size() > 200) s = s.substr(0, 200) + "...";
  return s;
}

// Pattern matching shared by the machine and the public match_pattern().
// `cls_of` maps a program class id to the runtime's descriptor.
template <typename ClassOf, typename Bind>
bool match_into(Runtime& rt, const Pattern& pat, const MValue& v, ClassOf&& cls_of, Bind&& bind) {
  if (std::holds_alternative<WildcardPattern>(pat.node)) return true;
  if (const auto* b = std::get_if<BindPattern>(&pat.node)) {
    bind(b->slot, v);
    return true;
  }
  if (v.is_fn()) return false;
  if (const auto* i = std::get_if<IntPattern>(&pat.node)) {
    return v.data.is_int() && v.data.as_int() == i->value;
  }
  const auto& c = std::get<CtorPattern>(pat.node);
  if (!v.data.is_boxed()) return false;
  if (!(v.data.object().cls() == cls_of(c.class_id))) return false;
  for (std::size_t j = 0; j < c.args.size(); ++j) {
    const Pattern& sub = c.args[j];
    if (std::holds_alternative<WildcardPattern>(sub.node)) continue;
    MValue field{get_field(rt, v.data, j), nullptr};
    if (!match_into(rt, sub, field, cls_of, bind)) return false;
  }
  return true;
}

class Machine {
 public:
  Machine(Runtime& rt, const Program& program, const EvalOptions& options)
      : rt_(rt),
        program_(program),
        options_(options),
        true_(rt.intern_class("True", 0)),
        false_(rt.intern_class("False", 0)),
        globals_(program.definitions.size()) {
    classes_.reserve(program.classes.size());
    for (const ClassRef& c : program.classes) classes_.push_back(&rt.intern_class(c.name, c.arity));
  }

  Value run() {
    for (std::size_t i = 0; i < program_.definitions.size(); ++i) {
      globals_[i] = execute(*program_.definitions[i].value);
    }
    MValue result = execute(*program_.body);
    if (result.is_fn()) throw RuntimeError("program result is a function, not a value");
    return result.data;
  }

  const EvalStats& stats() const { return stats_; }

 private:
  MValue execute(const Expr& root) {
    std::vector<Frame> k;
    const Expr* control = &root;
    EnvPtr env;
    MValue value;
    bool returning = false;

    while (true) {
      tick(k.size());
      if (!returning) {
        const Expr& e = *control;
        if (const auto* lit = std::get_if<IntLit>(&e.node)) {
          value = {Value::integer(lit->value), nullptr};
          returning = true;
        } else if (const auto* var = std::get_if<VarRef>(&e.node)) {
          value = lookup(*var, env);
          returning = true;
        } else if (const auto* lam = std::get_if<Lambda>(&e.node)) {
          value = {Value{}, std::make_shared<const Closure>(Closure{lam, env})};
          returning = true;
        } else if (const auto* app = std::get_if<Apply>(&e.node)) {
          ArgsFrame f{&e, env, {}};
          f.vals.reserve(app->args.size() + 1);
          k.emplace_back(std::move(f));
          control = app->callee.get();
        } else if (const auto* ctor = std::get_if<Construct>(&e.node)) {
          if (ctor->args.empty()) {
            value = {construct(rt_, *classes_[ctor->class_id], {}), nullptr};
            returning = true;
          } else {
            ArgsFrame f{&e, env, {}};
            f.vals.reserve(ctor->args.size());
            k.emplace_back(std::move(f));
            control = ctor->args.front().get();
          }
        } else if (const auto* branch = std::get_if<If>(&e.node)) {
          k.emplace_back(IfFrame{branch, env});
          control = branch->cond.get();
        } else if (const auto* prim = std::get_if<Prim>(&e.node)) {
          k.emplace_back(PrimFrame{prim, env, std::nullopt});
          control = prim->lhs.get();
        } else {
          const auto& m = std::get<Match>(e.node);
          k.emplace_back(MatchFrame{&m, env});
          control = m.scrutinee.get();
        }
        continue;
      }

      if (k.empty()) return value;
      Frame& top = k.back();

      if (auto* f = std::get_if<ArgsFrame>(&top)) {
        f->vals.push_back(std::move(value));
        if (const auto* app = std::get_if<Apply>(&f->node->node)) {
          if (f->vals.size() <= app->args.size()) {
            control = app->args[f->vals.size() - 1].get();
            env = f->env;
            returning = false;
            continue;
          }
          std::vector<MValue> vals = std::move(f->vals);
          SourceLoc loc = f->node->loc;
          k.pop_back();
          apply(vals, loc, control, env);
          returning = false;
          continue;
        }
        const auto& ctor = std::get<Construct>(f->node->node);
        if (f->vals.size() < ctor.args.size()) {
          control = ctor.args[f->vals.size()].get();
          env = f->env;
          returning = false;
          continue;
        }
        std::vector<Value> fields;
        fields.reserve(f->vals.size());
        for (const MValue& v : f->vals) {
          if (v.is_fn()) {
            throw RuntimeError("functions cannot be stored in value objects (" + ctor.name + ")");
          }
          fields.push_back(v.data);
        }
        k.pop_back();
        value = {construct(rt_, *classes_[ctor.class_id], fields), nullptr};
        continue;
      }

      if (auto* f = std::get_if<PrimFrame>(&top)) {
        if (!f->lhs) {
          f->lhs = std::move(value);
          control = f->node->rhs.get();
          env = f->env;
          returning = false;
          continue;
        }
        MValue lhs = std::move(*f->lhs);
        const Prim* node = f->node;
        k.pop_back();
        value = primitive(*node, lhs, value);
        continue;
      }

      if (auto* f = std::get_if<IfFrame>(&top)) {
        const If* node = f->node;
        env = std::move(f->env);
        k.pop_back();
        control = truthy(value) ? node->then_branch.get() : node->else_branch.get();
        returning = false;
        continue;
      }

      auto& f = std::get<MatchFrame>(top);
      const Match* node = f.node;
      EnvPtr outer = std::move(f.env);
      k.pop_back();
      select_clause(*node, value, outer, control, env);
      returning = false;
    }
  }

  void tick(std::size_t frames) {
    ++stats_.steps;
    if (frames + 1 > stats_.peak_continuation_depth) stats_.peak_continuation_depth = frames + 1;
    if (options_.step_limit != 0 && stats_.steps > options_.step_limit) {
      throw RuntimeError("step limit of " + std::to_string(options_.step_limit) + " exceeded");
    }
  }

  MValue lookup(const VarRef& var, const EnvPtr& env) const {
    if (var.scope == VarRef::Scope::Global) {
      const std::optional<MValue>& g = globals_[var.index];
      if (!g) throw RuntimeError("'" + var.name + "' used before its definition was evaluated");
      return *g;
    }
    const Env* frame = env.get();
    for (std::size_t d = 0; d < var.depth; ++d) frame = frame->parent.get();
    return frame->slots[var.index];
  }

  void apply(std::vector<MValue>& vals, SourceLoc loc, const Expr*& control, EnvPtr& env) {
    const MValue& callee = vals.front();
    if (!callee.is_fn()) {
      throw RuntimeError(at(loc) + "application of non-function " + describe(callee));
    }
    const Closure& fn = *callee.fn;
    std::size_t argc = vals.size() - 1;
    if (argc != fn.lambda->params.size()) {
      throw RuntimeError(at(loc) + "function expects " + std::to_string(fn.lambda->params.size()) +
                         " arguments, got " + std::to_string(argc));
    }
    control = fn.lambda->body.get();
    if (argc == 0) {
      env = fn.env;
      return;
    }
    auto frame = std::make_shared<Env>();
    frame->slots.assign(std::make_move_iterator(vals.begin() + 1), std::make_move_iterator(vals.end()));
    frame->parent = fn.env;
    env = std::move(frame);
  }

  MValue primitive(const Prim& p, const MValue& lhs, const MValue& rhs) {
    if (lhs.is_fn() || rhs.is_fn() || !lhs.data.is_int() || !rhs.data.is_int()) {
      throw RuntimeError("primitive '" + std::string(to_string(p.op)) + "' expects integers, got " +
                         describe(lhs) + " and " + describe(rhs));
    }
    std::int64_t a = lhs.data.as_int();
    std::int64_t b = rhs.data.as_int();
    std::int64_t r = 0;
    bool overflow = false;
    switch (p.op) {
      case PrimOp::Add:
        overflow = __builtin_add_overflow(a, b, &r);
        break;
      case PrimOp::Sub:
        overflow = __builtin_sub_overflow(a, b, &r);
        break;
      case PrimOp::Mul:
        overflow = __builtin_mul_overflow(a, b, &r);
        break;
      case PrimOp::Eq:
        return boolean(a == b);
      case PrimOp::Lt:
        return boolean(a < b);
    }
    if (overflow) throw RuntimeError("integer overflow in '" + std::string(to_string(p.op)) + "'");
    return {Value::integer(r), nullptr};
  }

  MValue boolean(bool b) { return {Value::boxed(rt_.canonical_nullary(b ? true_ : false_)), nullptr}; }

  bool truthy(const MValue& v) const {
    return v.is_fn() || v.data.is_int() || !(v.data.object().cls() == false_);
  }

  void select_clause(const Match& m, const MValue& scrutinee, const EnvPtr& outer,
                     const Expr*& control, EnvPtr& env) {
    auto cls_of = [this](std::size_t id) -> const ClassDescriptor& { return *classes_[id]; };
    for (const Clause& c : m.clauses) {
      std::vector<MValue> bindings(c.binding_count);
      auto bind = [&](std::size_t slot, const MValue& v) { bindings[slot] = v; };
      if (!match_into(rt_, c.pattern, scrutinee, cls_of, bind)) continue;
      control = c.body.get();
      if (c.binding_count == 0) {
        env = outer;
      } else {
        env = std::make_shared<const Env>(Env{std::move(bindings), outer});
      }
      return;
    }
    throw RuntimeError("no clause matched " + describe(scrutinee));
  }

  static std::string at(SourceLoc loc) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": ";
  }

  Runtime& rt_;
  const Program& program_;
  EvalOptions options_;
  const ClassDescriptor& true_;
  const ClassDescriptor& false_;
  std::vector<const ClassDescriptor*> classes_;
  std::vector<std::optional<MValue>> globals_;
  EvalStats stats_;
};

}  // namespace

Value eval(Runtime& rt, const Program& program, const EvalOptions& options, EvalStats* stats) {
  if (!program.validated) throw std::invalid_argument("eval needs a validated program");
  Machine machine(rt, program, options);
  struct Report {
    const Machine& m;
    EvalStats* out;
    ~Report() {
      if (out != nullptr) *out = m.stats();
    }
  } report{machine, stats};
  return machine.run();
}

bool match_pattern(Runtime& rt, const Program& program, const Pattern& pattern, Value v,
                   std::vector<Value>& bindings) {
  auto cls_of = [&](std::size_t id) -> const ClassDescriptor& {
    const ClassRef& c = program.classes.at(id);
    return rt.intern_class(c.name, c.arity);
  };
  auto bind = [&](std::size_t slot, const MValue& mv) {
    if (bindings.size() <= slot) bindings.resize(slot + 1);
    bindings[slot] = mv.data;
  };
  return match_into(rt, pattern, MValue{v, nullptr}, cls_of, bind);
}

}  // namespace vshape
