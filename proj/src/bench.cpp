#include "vshape/bench.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vshape/machine.hpp"

namespace vshape {

namespace {

constexpr std::string_view kListPrelude = R"(
(define (build i acc)
  (match i
    (0 acc)
    (_ (build (- i 1) (Cons i acc)))))
)";

constexpr std::string_view kAppend = R"(
(define (append xs ys)
  (match xs
    ((Nil) ys)
    ((Cons h t) (Cons h (append t ys)))))
(append (build @SIZE@ (Nil)) (build @SIZE@ (Nil)))
)";

// n mod 2 using only + - * < : r = n mod 2p, then reduce once more.
constexpr std::string_view kFilter = R"(
(define (mod-pow2 n p)
  (if (< n p)
      n
      ((lambda (r) (if (< r p) r (- r p))) (mod-pow2 n (* 2 p)))))
(define (even? n) (= (mod-pow2 n 2) 0))
(define (filter keep? xs)
  (match xs
    ((Nil) (Nil))
    ((Cons h t) (if (keep? h) (Cons h (filter keep? t)) (filter keep? t)))))
(filter even? (build @SIZE@ (Nil)))
)";

constexpr std::string_view kMap = R"(
(define (map f xs)
  (match xs
    ((Nil) (Nil))
    ((Cons h t) (Cons (f h) (map f t)))))
(map (lambda (x) (+ x 1)) (build @SIZE@ (Nil)))
)";

constexpr std::string_view kReverse = R"(
(define (reverse xs acc)
  (match xs
    ((Nil) acc)
    ((Cons h t) (reverse t (Cons h acc)))))
(reverse (build @SIZE@ (Nil)) (Nil))
)";

// Node values are the node's height, so the sum is 2^(d+1) - d - 2.
constexpr std::string_view kTree = R"(
(define (make d)
  (match d
    (0 (Leaf))
    (_ (Node d (make (- d 1)) (make (- d 1))))))
(define (sum t acc)
  (match t
    ((Leaf) acc)
    ((Node v l r) (sum r (sum l (+ acc v))))))
((lambda (t) (Result (sum t 0) t)) (make @SIZE@))
)";

constexpr std::string_view kArith = R"(
(define (loop i acc)
  (match i
    (0 acc)
    (_ (loop (- i 1) (+ acc i)))))
(loop @SIZE@ 0)
)";

std::string substitute_size(std::string_view body, std::uint64_t size) {
  constexpr std::string_view kPlaceholder = "@SIZE@";
  std::string out(body);
  std::string n = std::to_string(size);
  for (auto at = out.find(kPlaceholder); at != std::string::npos; at = out.find(kPlaceholder, at)) {
    out.replace(at, kPlaceholder.size(), n);
  }
  return out;
}

bool is_list_benchmark(std::string_view name) {
  return name == "append" || name == "filter" || name == "map" || name == "reverse";
}

std::string threshold_text(std::uint64_t t) {
  return t == kInfiniteThreshold ? "inf" : std::to_string(t);
}

}  // namespace

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{"append", "filter", "map", "reverse", "tree"};
  return names;
}

bool is_benchmark(std::string_view name) { return is_list_benchmark(name) || name == "tree" || name == "arith"; }

std::uint64_t default_benchmark_size(std::string_view name) {
  if (name == "tree") return 18;
  return 100'000;
}

std::string benchmark_text(std::string_view name, std::uint64_t size) {
  if (name == "append") return std::string(kListPrelude) + substitute_size(kAppend, size);
  if (name == "filter") return std::string(kListPrelude) + substitute_size(kFilter, size);
  if (name == "map") return std::string(kListPrelude) + substitute_size(kMap, size);
  if (name == "reverse") return std::string(kListPrelude) + substitute_size(kReverse, size);
  if (name == "tree") return substitute_size(kTree, size);
  if (name == "arith") return substitute_size(kArith, size);
  throw std::invalid_argument("unknown benchmark '" + std::string(name) + "'");
}

lang::Program benchmark_source(std::string_view name, std::uint64_t size) {
  return lang::load(benchmark_text(name, size));
}

void seed_benchmark_rules(Runtime& rt, std::string_view benchmark) {
  std::size_t levels = rt.config().max_depth;
  if (is_list_benchmark(benchmark)) {
    rt.seed_linear_rules(rt.intern_class("Cons", 2), 1, levels);
  } else if (benchmark == "tree") {
    const ClassDescriptor& node = rt.intern_class("Node", 3);
    rt.seed_linear_rules(node, 1, levels);
    rt.seed_linear_rules(node, 2, levels);
  }
}

std::optional<std::size_t> dominant_chunk_width(const Runtime& rt, const ClassDescriptor& cls) {
  std::optional<std::size_t> best;
  std::uint64_t best_slots = 0;
  auto inst = rt.instantiations();
  for (const Shape* s : rt.shapes().shapes()) {
    if (s->cls() != &cls || s->index() >= inst.size() || inst[s->index()].objects == 0) continue;
    std::uint64_t slots = inst[s->index()].slots;
    if (!best || slots > best_slots || (slots == best_slots && s->width() > *best)) {
      best = s->width();
      best_slots = slots;
    }
  }
  return best;
}

std::vector<BenchReport> run_benchmark(const BenchRequest& request) {
  if (request.size < 1) throw std::invalid_argument("benchmark size must be at least 1");
  lang::Program program = benchmark_source(request.benchmark, request.size);
  std::vector<BenchReport> reports;
  reports.reserve(request.repeats);
  for (std::uint32_t r = 0; r < request.repeats; ++r) {
    Runtime rt(request.config);
    if (request.config.mode == Mode::Manual) seed_benchmark_rules(rt, request.benchmark);

    EvalStats stats;
    auto start = std::chrono::steady_clock::now();
    Value result = eval(rt, program, {request.step_limit}, &stats);
    auto stop = std::chrono::steady_clock::now();

    BenchReport rep;
    rep.benchmark = request.benchmark;
    rep.mode = request.config.mode;
    rep.size = request.size;
    rep.config = request.config;
    rep.repeat = r;
    rep.wall_time_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    const Counters& c = rt.counters();
    rep.objects_allocated = c.objects_allocated;
    rep.slots_allocated = c.slots_allocated;
    rep.reifications = c.reifications;
    rep.shapes_created = c.shapes_created;
    rep.rules_created = c.rules_created;
    rep.steps = stats.steps;
    rep.retained = measure(result);
    rep.result_checksum = checksum(result);
    const ClassDescriptor* chunk_cls = nullptr;
    if (is_list_benchmark(request.benchmark)) {
      chunk_cls = rt.shapes().find_class("Cons", 2);
    } else if (request.benchmark == "tree") {
      chunk_cls = rt.shapes().find_class("Node", 3);
    }
    if (chunk_cls != nullptr) rep.dominant_width = dominant_chunk_width(rt, *chunk_cls);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  return std::nullopt;
}

std::string format_reports(const std::vector<BenchReport>& reports, ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Csv:
      out << kCsvHeader << '\n';
      for (const BenchReport& r : reports) {
        out << r.benchmark << ',' << to_string(r.mode) << ',' << r.size << ','
            << threshold_text(r.config.threshold) << ',' << r.config.max_size << ','
            << r.config.max_depth << ',' << r.repeat << ',' << r.wall_time_ms << ','
            << r.objects_allocated << ',' << r.slots_allocated << ',' << r.reifications << ','
            << r.shapes_created << ',' << r.rules_created << ',' << r.retained.boxed_objects << ','
            << r.retained.storage_slots << ',' << r.retained.total_cells << ',' << r.result_checksum
            << '\n';
      }
      break;
    case ReportFormat::Json: {
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const BenchReport& r : reports) {
        nlohmann::ordered_json row;
        row["benchmark"] = r.benchmark;
        row["mode"] = to_string(r.mode);
        row["size"] = r.size;
        if (r.config.threshold == kInfiniteThreshold) {
          row["threshold"] = "inf";
        } else {
          row["threshold"] = r.config.threshold;
        }
        row["max_size"] = r.config.max_size;
        row["max_depth"] = r.config.max_depth;
        row["repeat"] = r.repeat;
        row["wall_ms"] = r.wall_time_ms;
        row["objects"] = r.objects_allocated;
        row["slots"] = r.slots_allocated;
        row["reifications"] = r.reifications;
        row["shapes"] = r.shapes_created;
        row["rules"] = r.rules_created;
        row["steps"] = r.steps;
        row["retained_objects"] = r.retained.boxed_objects;
        row["retained_slots"] = r.retained.storage_slots;
        row["retained_cells"] = r.retained.total_cells;
        row["checksum"] = r.result_checksum;
        if (r.dominant_width) row["dominant_width"] = *r.dominant_width;
        rows.push_back(std::move(row));
      }
      out << rows.dump(2) << '\n';
      break;
    }
    case ReportFormat::Text:
      for (const BenchReport& r : reports) {
        out << r.benchmark << " mode=" << to_string(r.mode) << " size=" << r.size
            << " repeat=" << r.repeat << " wall_ms=" << r.wall_time_ms
            << " objects=" << r.objects_allocated << " slots=" << r.slots_allocated
            << " reifications=" << r.reifications << " shapes=" << r.shapes_created
            << " rules=" << r.rules_created << " steps=" << r.steps
            << " retained_cells=" << r.retained.total_cells << " checksum=" << r.result_checksum;
        if (r.dominant_width) out << " chunk_width=" << *r.dominant_width;
        out << '\n';
      }
      break;
  }
  return out.str();
}

}  // namespace vshape
