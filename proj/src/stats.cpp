#include "vshape/stats.hpp"

#include <sstream>

namespace vshape {

namespace {

std::string ref(const Shape* s) { return "shape#" + std::to_string(s->index()); }

std::string key_text(const TransitionKey& k) {
  return "(" + ref(k.shape) + ", " + std::to_string(k.pos) + ", " + ref(k.sub) + ")";
}

}  // namespace

std::string dump_stats(const Runtime& rt) {
  std::ostringstream out;
  const Config& cfg = rt.config();
  out << "config: mode=" << to_string(cfg.mode) << " threshold=";
  if (cfg.threshold == kInfiniteThreshold) {
    out << "inf";
  } else {
    out << cfg.threshold;
  }
  out << " max_size=" << cfg.max_size << " max_depth=" << cfg.max_depth << '\n';

  const Counters& c = rt.counters();
  out << "counters: objects=" << c.objects_allocated << " slots=" << c.slots_allocated
      << " reifications=" << c.reifications << " shapes=" << c.shapes_created
      << " rules=" << c.rules_created << '\n';

  out << "shapes:\n";
  for (const Shape* s : rt.shapes().shapes()) {
    if (s->is_leaf()) continue;
    out << "  " << ref(s) << ' ' << s->cls()->qualified_name() << " width=" << s->width()
        << " depth=" << s->depth() << ' ' << s->describe() << '\n';
  }

  out << "rules:\n";
  for (const auto& [key, target] : rt.rules().sorted()) {
    out << "  " << key_text(key) << " -> " << ref(target) << '\n';
  }

  out << "history:\n";
  for (const auto& [key, entry] : rt.history().sorted()) {
    out << "  " << key_text(key) << " = " << entry.count;
    if (entry.frozen) out << " [frozen]";
    out << '\n';
  }
  return out.str();
}

}  // namespace vshape
