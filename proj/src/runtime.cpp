#include "vshape/runtime.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "vshape/values.hpp"

namespace vshape {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::None:
      return "none";
    case Mode::Manual:
      return "manual";
    case Mode::Auto:
      return "auto";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "none") return Mode::None;
  if (text == "manual") return Mode::Manual;
  if (text == "auto") return Mode::Auto;
  return std::nullopt;
}

bool TransitionKey::operator<(const TransitionKey& other) const {
  auto tie = [](const TransitionKey& k) {
    return std::make_tuple(k.shape->index(), k.pos, k.sub->index());
  };
  return tie(*this) < tie(other);
}

std::size_t TransitionKeyHash::operator()(const TransitionKey& k) const {
  std::size_t h = std::hash<const void*>{}(k.shape);
  h = h * 31 + k.pos;
  h ^= std::hash<const void*>{}(k.sub) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t HistoryTable::record(const TransitionKey& key) {
  Entry& e = entries_[key];
  if (!e.frozen) ++e.count;
  return e.count;
}

void HistoryTable::freeze(const TransitionKey& key) {
  auto it = entries_.find(key);
  if (it != entries_.end()) it->second.frozen = true;
}

const HistoryTable::Entry* HistoryTable::find(const TransitionKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<TransitionKey, HistoryTable::Entry>> HistoryTable::sorted() const {
  std::vector<std::pair<TransitionKey, Entry>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

bool RuleTable::insert(const TransitionKey& key, const Shape& target) {
  return rules_.emplace(key, &target).second;
}

const Shape* RuleTable::find(const TransitionKey& key) const {
  auto it = rules_.find(key);
  return it == rules_.end() ? nullptr : it->second;
}

std::vector<std::pair<TransitionKey, const Shape*>> RuleTable::sorted() const {
  std::vector<std::pair<TransitionKey, const Shape*>> out(rules_.begin(), rules_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

Runtime::Runtime(Config config) : config_(config) {}

const ClassDescriptor& Runtime::intern_class(std::string_view name, std::size_t arity) {
  return registry_.intern_class(name, arity);
}

const Shape& Runtime::merge_shape(const Shape& s, std::size_t pos, const Shape& sub) {
  return registry_.merge(s, pos, sub);
}

const Counters& Runtime::counters() const {
  counters_.shapes_created = registry_.shapes().size() - 1;
  return counters_;
}

std::uint64_t Runtime::record_history(const Shape& s, std::size_t pos, const Shape& sub) {
  if (sub.is_leaf()) throw std::invalid_argument("history never records direct-access shapes");
  if (pos >= s.width()) throw std::out_of_range("history slot out of range");
  return history_.record({&s, pos, &sub});
}

bool Runtime::admissible(const Shape& target) const {
  return admissible({target.width(), target.depth()});
}

bool Runtime::admissible(ShapeExtent extent) const {
  return extent.width <= config_.max_size && extent.depth <= config_.max_depth;
}

bool Runtime::maybe_create_rule(const Shape& s, std::size_t pos, const Shape& sub) {
  TransitionKey key{&s, pos, &sub};
  const HistoryTable::Entry* entry = history_.find(key);
  if (entry == nullptr || entry->count < config_.threshold) return false;
  if (rules_.find(key) != nullptr) return false;
  // Checked before merging so inadmissible shapes are never interned.
  if (!admissible(merged_extent(s, pos, sub))) return false;
  const Shape& target = registry_.merge(s, pos, sub);
  rules_.insert(key, target);
  history_.freeze(key);
  ++counters_.rules_created;
  return true;
}

const Shape* Runtime::lookup_rule(const Shape& s, std::size_t pos, const Shape& sub) const {
  if (!config_.inlining_enabled()) return nullptr;
  return rules_.find({&s, pos, &sub});
}

std::size_t Runtime::seed_linear_rules(const ClassDescriptor& cls, std::size_t field,
                                       std::size_t levels) {
  if (!registry_.owns(cls)) throw std::invalid_argument(cls.qualified_name() + " is unknown");
  if (field >= cls.arity()) {
    throw std::out_of_range("field " + std::to_string(field) + " out of range for " +
                            cls.qualified_name());
  }
  const Shape& base = cls.default_shape();
  // chain[k] nests k+1 copies of the default shape through `field`;
  // hole[k] is the flattened slot of `field` in the innermost copy.
  std::vector<const Shape*> chain{&base};
  std::vector<std::size_t> hole{base.offset(field)};
  std::size_t admitted = 0;
  while (admitted < levels) {
    if (!admissible(merged_extent(*chain.back(), hole.back(), base))) break;
    const Shape& next = registry_.merge(*chain.back(), hole.back(), base);
    hole.push_back(hole.back() + base.offset(field));
    chain.push_back(&next);
    ++admitted;
  }
  // Register every decomposition of each admitted chain so the rules fire
  // regardless of whether the list is grown at the front or the back.
  for (std::size_t target = 1; target <= admitted; ++target) {
    for (std::size_t outer = 0; outer < target; ++outer) {
      std::size_t inner = target - outer - 1;
      const Shape& merged = registry_.merge(*chain[outer], hole[outer], *chain[inner]);
      if (&merged != chain[target]) throw std::logic_error("linear chain decomposition mismatch");
      if (rules_.insert({chain[outer], hole[outer], chain[inner]}, merged)) {
        ++counters_.rules_created;
      }
    }
  }
  return admitted;
}

void Runtime::note_instantiation(const Shape& s) {
  if (instantiations_.size() <= s.index()) instantiations_.resize(s.index() + 1);
  Instantiation& inst = instantiations_[s.index()];
  ++inst.objects;
  inst.slots += s.width();
}

const Object& Runtime::canonical_nullary(const ClassDescriptor& cls) {
  if (cls.arity() != 0) throw std::invalid_argument("canonical objects must have arity 0");
  auto [it, inserted] = nullary_.try_emplace(&cls, nullptr);
  if (inserted) {
    void* mem = arena_.allocate(sizeof(Object), alignof(Object));
    it->second = new (mem) Object(cls.default_shape(), {});
  }
  return *it->second;
}

}  // namespace vshape
