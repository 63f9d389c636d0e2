#include "vshape/values.hpp"

#include <new>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace vshape {

const Object& allocate_object(Runtime& rt, const Shape& shape, std::span<const Value> storage) {
  if (storage.size() != shape.width()) {
    throw std::logic_error("storage length " + std::to_string(storage.size()) +
                           " does not match shape width " + std::to_string(shape.width()));
  }
  std::pmr::memory_resource* arena = rt.arena();
  Value* slots = nullptr;
  if (!storage.empty()) {
    slots = static_cast<Value*>(arena->allocate(storage.size() * sizeof(Value), alignof(Value)));
    for (std::size_t i = 0; i < storage.size(); ++i) new (slots + i) Value(storage[i]);
  }
  void* mem = arena->allocate(sizeof(Object), alignof(Object));
  return *new (mem) Object(shape, std::span<const Value>(slots, storage.size()));
}

InlineResult inline_fields(Runtime& rt, const Shape& s, std::span<const Value> fields) {
  if (s.is_leaf()) throw std::logic_error("inline_fields needs a compound shape");
  if (fields.size() != s.width()) {
    throw std::logic_error("inline_fields: " + std::to_string(fields.size()) +
                           " fields for shape of width " + std::to_string(s.width()));
  }
  InlineResult result{&s, {fields.begin(), fields.end()}, 0};
  if (!rt.config().inlining_enabled()) return result;
  const bool recognize = rt.config().mode == Mode::Auto;

  std::vector<Value>& f = result.fields;
  std::size_t i = 0;
  while (i < f.size()) {
    if (f[i].is_int()) {
      ++i;
      continue;
    }
    const Object& donor = f[i].object();
    const Shape& sub = donor.shape();
    if (recognize) {
      rt.record_history(*result.shape, i, sub);
      rt.maybe_create_rule(*result.shape, i, sub);
    }
    const Shape* target = rt.lookup_rule(*result.shape, i, sub);
    if (target == nullptr) {
      ++i;
      continue;
    }
    // Splice the donor's storage in place of the reference; the donor itself
    // is left untouched.
    std::span<const Value> donated = donor.storage();
    f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
    f.insert(f.begin() + static_cast<std::ptrdiff_t>(i), donated.begin(), donated.end());
    result.shape = target;
    ++result.restarts;
    i = 0;
  }
  if (f.size() != result.shape->width()) throw std::logic_error("inlining broke the storage law");
  rt.mutable_counters().inline_restarts += result.restarts;
  return result;
}

Value construct(Runtime& rt, const ClassDescriptor& cls, std::span<const Value> fields) {
  if (fields.size() != cls.arity()) {
    throw std::invalid_argument(cls.qualified_name() + " constructed with " +
                                std::to_string(fields.size()) + " fields");
  }
  InlineResult r = inline_fields(rt, cls.default_shape(), fields);
  const Object& obj = allocate_object(rt, *r.shape, r.fields);
  Counters& c = rt.mutable_counters();
  ++c.objects_allocated;
  c.slots_allocated += r.shape->width();
  rt.note_instantiation(*r.shape);
  return Value::boxed(obj);
}

Value get_field(Runtime& rt, Value v, std::size_t field) {
  if (!v.is_boxed()) throw std::logic_error("get_field on a primitive value");
  const Object& obj = v.object();
  auto [offset, child] = child_region(obj.shape(), field);
  Counters& c = rt.mutable_counters();
  ++c.field_reads;
  if (child->is_leaf()) return obj.storage()[offset];
  ++c.reifications;
  ++c.objects_allocated;
  return Value::boxed(allocate_object(rt, *child, obj.storage().subspan(offset, child->width())));
}

ValueView view_of(Value v) {
  if (v.is_int()) return v.as_int();
  const Object& obj = v.object();
  return ObjectView{&obj.shape(), obj.storage()};
}

ValueView view_field(const ObjectView& obj, std::size_t field) {
  auto [offset, child] = child_region(*obj.shape, field);
  if (child->is_leaf()) return view_of(obj.slots[offset]);
  return ObjectView{child, obj.slots.subspan(offset, child->width())};
}

bool structural_eq(Value a, Value b) {
  std::vector<std::pair<ValueView, ValueView>> work{{view_of(a), view_of(b)}};
  while (!work.empty()) {
    auto [x, y] = std::move(work.back());
    work.pop_back();
    if (x.index() != y.index()) return false;
    if (const auto* xi = std::get_if<std::int64_t>(&x)) {
      if (*xi != std::get<std::int64_t>(y)) return false;
      continue;
    }
    const ObjectView& xo = std::get<ObjectView>(x);
    const ObjectView& yo = std::get<ObjectView>(y);
    if (xo.shape == yo.shape && xo.slots.data() == yo.slots.data()) continue;
    if (!(xo.cls() == yo.cls())) return false;
    for (std::size_t j = 0; j < xo.cls().arity(); ++j) {
      work.emplace_back(view_field(xo, j), view_field(yo, j));
    }
  }
  return true;
}

MemoryStats measure(Value root) {
  MemoryStats stats;
  if (root.is_int()) return stats;
  std::unordered_set<const Object*> seen{&root.object()};
  std::vector<const Object*> work{&root.object()};
  while (!work.empty()) {
    const Object* obj = work.back();
    work.pop_back();
    ++stats.boxed_objects;
    stats.storage_slots += obj->storage().size();
    for (const Value& slot : obj->storage()) {
      if (slot.is_boxed() && seen.insert(&slot.object()).second) work.push_back(&slot.object());
    }
  }
  stats.shape_refs = stats.boxed_objects;
  stats.total_cells = stats.storage_slots + stats.shape_refs;
  return stats;
}

namespace {

// Pre-order walk over language-level fields without reifying anything.
template <typename OnInt, typename OnEnter, typename OnLeave>
void walk(Value root, OnInt on_int, OnEnter on_enter, OnLeave on_leave) {
  struct Frame {
    ObjectView obj;
    std::size_t next;
  };
  auto visit = [&](const ValueView& v, std::vector<Frame>& stack) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
      on_int(*i);
    } else {
      const ObjectView& o = std::get<ObjectView>(v);
      on_enter(o);
      stack.push_back({o, 0});
    }
  };
  std::vector<Frame> stack;
  visit(view_of(root), stack);
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.obj.cls().arity()) {
      ObjectView done = top.obj;
      stack.pop_back();
      on_leave(done);
      continue;
    }
    std::size_t field = top.next++;
    ObjectView parent = top.obj;
    visit(view_field(parent, field), stack);
  }
}

}  // namespace

std::string print_value(Value v) {
  std::string out;
  // Separators depend on whether a sibling was already printed at this level.
  std::vector<bool> first;
  auto separate = [&] {
    if (first.empty()) return;
    if (!first.back()) out += ", ";
    first.back() = false;
  };
  walk(
      v,
      [&](std::int64_t i) {
        separate();
        out += std::to_string(i);
      },
      [&](const ObjectView& o) {
        separate();
        out += o.cls().name();
        out += '[';
        first.push_back(true);
      },
      [&](const ObjectView&) {
        out += ']';
        first.pop_back();
      });
  return out;
}

__extension__ typedef __int128 i128;
__extension__ typedef unsigned __int128 u128;

std::uint64_t checksum(Value v) {
  u128 h = 0;
  walk(
      v,
      [&](std::int64_t i) {
        auto p = static_cast<i128>(kChecksumModulus);
        i128 r = static_cast<i128>(i) % p;
        if (r < 0) r += p;
        h = (h * 1000003 + static_cast<u128>(r)) % kChecksumModulus;
      },
      [](const ObjectView&) {}, [](const ObjectView&) {});
  return static_cast<std::uint64_t>(h);
}

}  // namespace vshape
