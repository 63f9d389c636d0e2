/**
 * Immutable value objects.
 *
 * A boxed object is a shape plus a flat storage whose length equals the
 * shape's width. Objects are allocated in their runtime's arena and live as
 * long as the runtime; a Value must not outlive the Runtime that made it.
 *
 * Construction runs the inlining loop (`inline_fields`), so referenced objects
 * whose shapes match a transformation rule are copied into the new object's
 * storage. Reading a field whose sub-shape is compound reifies a fresh object
 * for that storage region. Neither is observable at the language level.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vshape/runtime.hpp"
#include "vshape/shapes.hpp"

namespace vshape {

class Object;

/// Primitive integer or reference to a boxed object.
class Value {
 public:
  constexpr Value() = default;
  static constexpr Value integer(std::int64_t v) { return Value(v); }
  static Value boxed(const Object& obj) { return Value(&obj); }

  bool is_int() const { return object_ == nullptr; }
  bool is_boxed() const { return object_ != nullptr; }
  std::int64_t as_int() const { return int_; }
  const Object& object() const { return *object_; }

 private:
  constexpr explicit Value(std::int64_t v) : int_(v) {}
  explicit Value(const Object* obj) : object_(obj) {}

  std::int64_t int_ = 0;
  const Object* object_ = nullptr;
};

class Object {
 public:
  Object(const Shape& shape, std::span<const Value> storage) : shape_(&shape), storage_(storage) {}

  const Shape& shape() const { return *shape_; }
  const ClassDescriptor& cls() const { return *shape_->cls(); }
  std::span<const Value> storage() const { return storage_; }

 private:
  const Shape* shape_;
  std::span<const Value> storage_;
};

struct MemoryStats {
  std::uint64_t boxed_objects = 0;
  std::uint64_t storage_slots = 0;
  std::uint64_t shape_refs = 0;
  std::uint64_t total_cells = 0;

  bool operator==(const MemoryStats&) const = default;
};

struct InlineResult {
  const Shape* shape;
  std::vector<Value> fields;
  std::size_t restarts = 0;
};

/// The inlining loop: determines the shape and storage of a new object.
InlineResult inline_fields(Runtime& rt, const Shape& s, std::span<const Value> fields);

/// Allocates a boxed object of `cls`; throws std::invalid_argument on arity mismatch.
Value construct(Runtime& rt, const ClassDescriptor& cls, std::span<const Value> fields);

/// Allocates an object with exactly this shape and storage, without inlining.
const Object& allocate_object(Runtime& rt, const Shape& shape, std::span<const Value> storage);

/// Language-level field read; reifies inlined regions.
Value get_field(Runtime& rt, Value v, std::size_t field);

/// Value equality over language-level fields, independent of shapes and runtimes.
bool structural_eq(Value a, Value b);

/// Cells reachable from `root`, counting each boxed object once.
MemoryStats measure(Value root);

/// `Name[f0, f1]` using language-level fields; integers in decimal.
std::string print_value(Value v);

/// Fold of the integers in pre-order over language-level fields, mod 2^61-1.
std::uint64_t checksum(Value v);

inline constexpr std::uint64_t kChecksumModulus = (std::uint64_t{1} << 61) - 1;

/// A language-level view of a possibly inlined object: its sub-shape and the
/// slots that sub-shape covers. Lets traversals read fields without reifying.
struct ObjectView {
  const Shape* shape;
  std::span<const Value> slots;

  const ClassDescriptor& cls() const { return *shape->cls(); }
};

using ValueView = std::variant<std::int64_t, ObjectView>;

ValueView view_of(Value v);
ValueView view_field(const ObjectView& obj, std::size_t field);

}  // namespace vshape
