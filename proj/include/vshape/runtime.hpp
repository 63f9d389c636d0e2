/**
 * Shape recognition state.
 *
 * The history counts (shape, slot, sub-shape) triples seen while value
 * objects are constructed. Once a triple reaches the threshold it becomes a
 * transformation rule mapping the triple to the merged shape, provided the
 * merged shape stays within the size and depth limits. Construction consults
 * the rules to inline referenced objects.
 *
 * A Runtime owns one registry, both tables, the allocation arena and the
 * counters. It is single-threaded; distinct runtimes share nothing.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory_resource>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vshape/shapes.hpp"

namespace vshape {

class Object;

enum class Mode {
  None,    ///< optimization disabled
  Manual,  ///< only seeded rules, no history
  Auto,    ///< history-driven recognition
};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

inline constexpr std::uint64_t kInfiniteThreshold = std::numeric_limits<std::uint64_t>::max();

struct Config {
  std::size_t max_size = 7;
  std::size_t max_depth = 7;
  std::uint64_t threshold = 17;
  Mode mode = Mode::Auto;

  /// False when no rule can ever be looked up or created.
  bool inlining_enabled() const { return mode != Mode::None && max_size > 0; }
};

/// (shape, flattened slot, sub-shape); shapes compare by identity.
struct TransitionKey {
  const Shape* shape;
  std::size_t pos;
  const Shape* sub;

  bool operator==(const TransitionKey&) const = default;
  /// Orders by (shape index, pos, sub index) for stable dumps.
  bool operator<(const TransitionKey& other) const;
};

struct TransitionKeyHash {
  std::size_t operator()(const TransitionKey& k) const;
};

class HistoryTable {
 public:
  struct Entry {
    std::uint64_t count = 0;
    bool frozen = false;
  };

  /// Increments (or starts at 1) and returns the count; frozen keys are left alone.
  std::uint64_t record(const TransitionKey& key);
  void freeze(const TransitionKey& key);
  const Entry* find(const TransitionKey& key) const;
  std::size_t size() const { return entries_.size(); }

  /// Entries sorted by key.
  std::vector<std::pair<TransitionKey, Entry>> sorted() const;

 private:
  std::unordered_map<TransitionKey, Entry, TransitionKeyHash> entries_;
};

/// Append-only map from transition keys to merged shapes.
class RuleTable {
 public:
  /// Returns false (and leaves the table unchanged) if the key already has a rule.
  bool insert(const TransitionKey& key, const Shape& target);
  const Shape* find(const TransitionKey& key) const;
  std::size_t size() const { return rules_.size(); }
  std::vector<std::pair<TransitionKey, const Shape*>> sorted() const;

 private:
  std::unordered_map<TransitionKey, const Shape*, TransitionKeyHash> rules_;
};

struct Counters {
  std::uint64_t objects_allocated = 0;
  std::uint64_t slots_allocated = 0;
  std::uint64_t reifications = 0;
  std::uint64_t shapes_created = 0;
  std::uint64_t rules_created = 0;
  std::uint64_t field_reads = 0;
  std::uint64_t inline_restarts = 0;
};

/// Per-shape construction counts, indexed by Shape::index().
struct Instantiation {
  std::uint64_t objects = 0;
  std::uint64_t slots = 0;
};

class Runtime {
 public:
  explicit Runtime(Config config = {});
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  const Config& config() const { return config_; }

  ShapeRegistry& shapes() { return registry_; }
  const ShapeRegistry& shapes() const { return registry_; }
  const ClassDescriptor& intern_class(std::string_view name, std::size_t arity);
  const Shape& merge_shape(const Shape& s, std::size_t pos, const Shape& sub);

  /// Counts one occurrence of `sub` at slot `pos` of `s`.
  std::uint64_t record_history(const Shape& s, std::size_t pos, const Shape& sub);
  /// Turns the history entry into a rule if it reached the threshold and the
  /// merged shape is admissible.
  bool maybe_create_rule(const Shape& s, std::size_t pos, const Shape& sub);
  const Shape* lookup_rule(const Shape& s, std::size_t pos, const Shape& sub) const;

  /// Seeds rules that inline `cls` into itself through `field`, up to `levels`
  /// nesting levels. Returns the number of admissible levels.
  std::size_t seed_linear_rules(const ClassDescriptor& cls, std::size_t field,
                                std::size_t levels);

  /// True if a merged shape respects max_size and max_depth.
  bool admissible(const Shape& target) const;
  bool admissible(ShapeExtent extent) const;

  const HistoryTable& history() const { return history_; }
  const RuleTable& rules() const { return rules_; }
  const Counters& counters() const;
  Counters& mutable_counters() { return counters_; }

  void note_instantiation(const Shape& s);
  std::span<const Instantiation> instantiations() const { return instantiations_; }

  std::pmr::memory_resource* arena() { return &arena_; }

  /// Arity-0 object used for the results of comparisons; not counted as an allocation.
  const Object& canonical_nullary(const ClassDescriptor& cls);

 private:
  Config config_;
  ShapeRegistry registry_;
  HistoryTable history_;
  RuleTable rules_;
  mutable Counters counters_;
  std::vector<Instantiation> instantiations_;
  std::pmr::monotonic_buffer_resource arena_;
  std::unordered_map<const ClassDescriptor*, const Object*> nullary_;
};

}  // namespace vshape
