/**
 * Micro-benchmarks: append, filter, map and reverse over Cons/Nil lists of
 * the integers 1..n, and building plus prefix-summing a complete binary tree.
 * `arith` is an extra constructor-free loop used to check that programs
 * without value objects behave identically in every mode.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vshape/lang.hpp"
#include "vshape/runtime.hpp"
#include "vshape/values.hpp"

namespace vshape {

/// The five list/tree benchmarks, in reporting order.
const std::vector<std::string>& benchmark_names();
bool is_benchmark(std::string_view name);

/// Default size: list length, or tree depth for `tree`.
std::uint64_t default_benchmark_size(std::string_view name);

/// Source text of a benchmark at the given size; throws std::invalid_argument
/// for unknown names.
std::string benchmark_text(std::string_view name, std::uint64_t size);
lang::Program benchmark_source(std::string_view name, std::uint64_t size);

struct BenchReport {
  std::string benchmark;
  Mode mode = Mode::Auto;
  std::uint64_t size = 0;
  Config config;
  std::uint32_t repeat = 0;
  double wall_time_ms = 0;
  std::uint64_t objects_allocated = 0;
  std::uint64_t slots_allocated = 0;
  std::uint64_t reifications = 0;
  std::uint64_t shapes_created = 0;
  std::uint64_t rules_created = 0;
  std::uint64_t steps = 0;
  MemoryStats retained;
  std::uint64_t result_checksum = 0;
  /// Width of the dominant Cons/2 (lists) or Node/3 (tree) shape.
  std::optional<std::size_t> dominant_width;
};

struct BenchRequest {
  std::string benchmark;
  std::uint64_t size = 0;
  Config config;  // carries the mode
  std::uint32_t repeats = 1;
  std::uint64_t step_limit = 0;
};

/// Seeds the manual-mode rules used for a benchmark.
void seed_benchmark_rules(Runtime& rt, std::string_view benchmark);

/// Runs `repeats` evaluations, each on a fresh Runtime; parsing is not timed.
std::vector<BenchReport> run_benchmark(const BenchRequest& request);

/// Width of the shape of `cls` that accounts for the most slots allocated by
/// construction; ties go to the wider shape. Empty if `cls` was never built.
std::optional<std::size_t> dominant_chunk_width(const Runtime& rt, const ClassDescriptor& cls);

enum class ReportFormat { Text, Csv, Json };
std::optional<ReportFormat> parse_report_format(std::string_view text);

inline constexpr std::string_view kCsvHeader =
    "benchmark,mode,size,threshold,max_size,max_depth,repeat,wall_ms,objects,slots,"
    "reifications,shapes,rules,retained_objects,retained_slots,retained_cells,checksum";

std::string format_reports(const std::vector<BenchReport>& reports, ReportFormat format);

}  // namespace vshape
