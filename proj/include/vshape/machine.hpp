#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vshape/lang.hpp"
#include "vshape/runtime.hpp"
#include "vshape/values.hpp"

namespace vshape {

/// Step guard used by the test suites.
inline constexpr std::uint64_t kTestStepLimit = 100'000'000;

struct EvalOptions {
  /// 0 means unlimited.
  std::uint64_t step_limit = 0;
};

struct EvalStats {
  std::uint64_t steps = 0;
  /// Deepest continuation seen, counting the halt frame.
  std::size_t peak_continuation_depth = 0;
};

/// Runs a validated program on `rt` with a CEK machine. Constructor
/// expressions go through construct() and constructor patterns read fields
/// through get_field(). Throws RuntimeError for match failures, bad
/// applications, non-integer primitive operands, overflow and the step limit.
Value eval(Runtime& rt, const lang::Program& program, const EvalOptions& options = {},
           EvalStats* stats = nullptr);

/// Matches `v` against `pattern`. On success the variables bound by the
/// pattern are stored in `bindings` at their slot numbers.
bool match_pattern(Runtime& rt, const lang::Program& program, const lang::Pattern& pattern,
                   Value v, std::vector<Value>& bindings);

}  // namespace vshape
