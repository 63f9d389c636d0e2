#include "vshape/shapes.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace vshape {

std::string ClassDescriptor::qualified_name() const {
  return name_ + "/" + std::to_string(arity_);
}

bool Shape::is_default() const {
  return is_compound() && &cls_->default_shape() == this;
}

std::string Shape::describe() const {
  if (is_leaf()) return "*";
  std::string out = cls_->qualified_name() + "[";
  for (std::size_t i = 0; i < children_.size(); ++i) {
    if (i != 0) out += ", ";
    out += children_[i]->describe();
  }
  out += "]";
  return out;
}

ChildRegion child_region(const Shape& s, std::size_t field) {
  if (s.is_leaf()) throw std::invalid_argument("child_region on a direct-access shape");
  if (field >= s.children().size()) {
    throw std::out_of_range("field " + std::to_string(field) + " out of range for " +
                            s.cls()->qualified_name());
  }
  return {s.offset(field), s.children()[field]};
}

ShapeExtent merged_extent(const Shape& s, std::size_t pos, const Shape& sub) {
  if (pos >= s.width()) throw std::out_of_range("slot out of range");
  // Number of compound ancestors of the leaf at `pos`.
  std::size_t leaf_depth = 0;
  const Shape* node = &s;
  while (node->is_compound()) {
    ++leaf_depth;
    std::size_t j = 0;
    while (!(pos >= node->offset(j) && pos < node->offset(j) + node->children()[j]->width())) ++j;
    pos -= node->offset(j);
    node = node->children()[j];
  }
  return {s.width() - 1 + sub.width(), std::max(s.depth(), leaf_depth + sub.depth())};
}

std::size_t ShapeRegistry::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<const void*>{}(k.cls);
  for (const Shape* c : k.children) {
    h ^= std::hash<const void*>{}(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

ShapeRegistry::ShapeRegistry() {
  Shape& leaf = shape_storage_.emplace_back(Shape{});
  shapes_.push_back(&leaf);
}

const ClassDescriptor& ShapeRegistry::intern_class(std::string_view name, std::size_t arity) {
  if (name.empty()) throw std::invalid_argument("class name must not be empty");
  if (const ClassDescriptor* found = find_class(name, arity)) return *found;

  auto index = static_cast<std::uint32_t>(class_storage_.size());
  ClassDescriptor& cls = class_storage_.emplace_back(std::string(name), arity, index);
  class_order_.push_back(&cls);
  classes_.emplace(std::make_pair(std::string(name), arity), &cls);

  std::vector<const Shape*> leaves(arity, &leaf());
  cls.default_shape_ = &intern(cls, leaves);
  return cls;
}

const ClassDescriptor* ShapeRegistry::find_class(std::string_view name, std::size_t arity) const {
  auto it = classes_.find(std::make_pair(std::string(name), arity));
  return it == classes_.end() ? nullptr : it->second;
}

bool ShapeRegistry::owns(const ClassDescriptor& cls) const {
  return cls.index() < class_order_.size() && class_order_[cls.index()] == &cls;
}

const Shape& ShapeRegistry::intern(const ClassDescriptor& cls,
                                   std::span<const Shape* const> children) {
  if (!owns(cls)) throw std::invalid_argument(cls.qualified_name() + " is not registered here");
  if (children.size() != cls.arity()) {
    throw std::invalid_argument("shape for " + cls.qualified_name() + " needs " +
                                std::to_string(cls.arity()) + " sub-shapes");
  }
  Key key{&cls, {children.begin(), children.end()}};
  if (auto it = interned_.find(key); it != interned_.end()) return *it->second;

  Shape& s = shape_storage_.emplace_back(Shape{});
  s.cls_ = &cls;
  s.children_ = key.children;
  s.offsets_.reserve(children.size());
  s.width_ = 0;
  s.compound_count_ = 1;
  std::size_t max_child_depth = 0;
  for (const Shape* c : children) {
    s.offsets_.push_back(s.width_);
    s.width_ += c->width();
    s.compound_count_ += c->compound_count();
    max_child_depth = std::max(max_child_depth, c->depth());
  }
  s.depth_ = 1 + max_child_depth;
  s.index_ = static_cast<std::uint32_t>(shapes_.size());
  shapes_.push_back(&s);
  interned_.emplace(std::move(key), &s);
  return s;
}

const Shape& ShapeRegistry::merge(const Shape& s, std::size_t pos, const Shape& sub) {
  if (s.is_leaf()) throw std::invalid_argument("merge target must be a compound shape");
  if (sub.is_leaf()) throw std::invalid_argument("merged sub-shape must be compound");
  if (pos >= s.width()) {
    throw std::out_of_range("slot " + std::to_string(pos) + " out of range for width " +
                            std::to_string(s.width()));
  }
  return merge_at(s, pos, sub);
}

const Shape& ShapeRegistry::merge_at(const Shape& s, std::size_t pos, const Shape& sub) {
  if (s.is_leaf()) return sub;
  std::vector<const Shape*> children(s.children().begin(), s.children().end());
  for (std::size_t j = 0; j < children.size(); ++j) {
    std::size_t begin = s.offset(j);
    if (pos >= begin && pos < begin + children[j]->width()) {
      children[j] = &merge_at(*children[j], pos - begin, sub);
      return intern(*s.cls(), children);
    }
  }
  throw std::logic_error("slot not covered by any sub-shape");
}

}  // namespace vshape
