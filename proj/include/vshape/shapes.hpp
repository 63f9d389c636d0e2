/**
 * Value classes and shapes.
 *
 * A shape replaces the class pointer of a value object. It is a tree: the
 * root names the object's class and has one sub-shape per language-level
 * field. A sub-shape is either the direct-access leaf (the slot holds a
 * primitive or a reference) or a compound shape, meaning the referenced
 * object has been inlined and its storage occupies consecutive slots.
 *
 * Shapes are interned per registry, so two structurally equal shapes are the
 * same object and can be compared and hashed by address.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vshape {

class Shape;

/// A value class, identified by name and arity (`Node/2`).
class ClassDescriptor {
 public:
  ClassDescriptor(std::string name, std::size_t arity, std::uint32_t index)
      : name_(std::move(name)), arity_(arity), index_(index) {}

  const std::string& name() const { return name_; }
  std::size_t arity() const { return arity_; }
  /// Registration order within the owning registry.
  std::uint32_t index() const { return index_; }
  const Shape& default_shape() const { return *default_shape_; }

  /// `Name/arity`
  std::string qualified_name() const;

  /// Same class iff same name and arity, also across registries.
  friend bool operator==(const ClassDescriptor& a, const ClassDescriptor& b) {
    return &a == &b || (a.arity_ == b.arity_ && a.name_ == b.name_);
  }

 private:
  friend class ShapeRegistry;

  std::string name_;
  std::size_t arity_;
  std::uint32_t index_;
  const Shape* default_shape_ = nullptr;
};

/// Interned shape tree node. Instances are owned by a ShapeRegistry.
class Shape {
 public:
  bool is_leaf() const { return cls_ == nullptr; }
  bool is_compound() const { return cls_ != nullptr; }

  /// Root class; null for the leaf.
  const ClassDescriptor* cls() const { return cls_; }
  std::span<const Shape* const> children() const { return children_; }

  /// Number of storage slots covered by this shape.
  std::size_t width() const { return width_; }
  /// Nesting count of compound shapes; leaf 0, default shape 1.
  std::size_t depth() const { return depth_; }
  /// Number of compound nodes in the tree.
  std::size_t compound_count() const { return compound_count_; }
  /// Storage offset of the region belonging to language-level `field`.
  std::size_t offset(std::size_t field) const { return offsets_[field]; }
  /// Creation order; the leaf is 0.
  std::uint32_t index() const { return index_; }

  bool is_default() const;

  /// Structure in the form `Node/2[*, Node/2[*, *]]`, `*` marking a leaf.
  std::string describe() const;

 private:
  friend class ShapeRegistry;
  Shape() = default;

  const ClassDescriptor* cls_ = nullptr;
  std::vector<const Shape*> children_;
  std::vector<std::size_t> offsets_;
  std::size_t width_ = 1;
  std::size_t depth_ = 0;
  std::size_t compound_count_ = 0;
  std::uint32_t index_ = 0;
};

/// Where a language-level field lives in a compound shape's storage.
struct ChildRegion {
  std::size_t offset;
  const Shape* child;
};

/// Offset and sub-shape of `field`; throws std::out_of_range.
ChildRegion child_region(const Shape& s, std::size_t field);

/// Width and depth that merging `sub` at slot `pos` of `s` would produce,
/// computed without interning anything.
struct ShapeExtent {
  std::size_t width;
  std::size_t depth;
};
ShapeExtent merged_extent(const Shape& s, std::size_t pos, const Shape& sub);

/// Owns the classes and shapes of one runtime.
class ShapeRegistry {
 public:
  ShapeRegistry();
  ShapeRegistry(const ShapeRegistry&) = delete;
  ShapeRegistry& operator=(const ShapeRegistry&) = delete;

  /// Idempotent; registers the class's default shape on first use.
  const ClassDescriptor& intern_class(std::string_view name, std::size_t arity);
  const ClassDescriptor* find_class(std::string_view name, std::size_t arity) const;
  bool owns(const ClassDescriptor& cls) const;

  const Shape& leaf() const { return *shapes_.front(); }

  /// Canonical compound shape for `cls` with the given sub-shapes.
  const Shape& intern(const ClassDescriptor& cls, std::span<const Shape* const> children);

  /// Replaces the leaf at flattened slot `pos` of `s` with `sub`.
  const Shape& merge(const Shape& s, std::size_t pos, const Shape& sub);

  /// All shapes in creation order, starting with the leaf.
  std::span<const Shape* const> shapes() const { return shapes_; }
  std::span<const ClassDescriptor* const> classes() const { return class_order_; }

 private:
  struct Key {
    const ClassDescriptor* cls;
    std::vector<const Shape*> children;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };

  const Shape& merge_at(const Shape& s, std::size_t pos, const Shape& sub);

  std::deque<ClassDescriptor> class_storage_;
  std::vector<const ClassDescriptor*> class_order_;
  std::map<std::pair<std::string, std::size_t>, const ClassDescriptor*, std::less<>> classes_;

  std::deque<Shape> shape_storage_;
  std::vector<const Shape*> shapes_;
  std::unordered_map<Key, const Shape*, KeyHash> interned_;
};

}  // namespace vshape
