#pragma once

#include <string>

#include "vshape/runtime.hpp"

namespace vshape {

/// Text rendering of the shape registry, rule table, history and counters.
/// Shapes are listed by creation index (the direct-access leaf is implicit),
/// table rows by key.
///
///   shapes:
///     shape#1 Cons/2 width=2 depth=1 Cons/2[*, *]
///   rules:
///     (shape#1, 1, shape#1) -> shape#3
///   history:
///     (shape#1, 1, shape#1) = 17 [frozen]
std::string dump_stats(const Runtime& rt);

}  // namespace vshape
