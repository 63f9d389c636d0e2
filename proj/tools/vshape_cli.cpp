// vshape: run programs, run benchmarks, dump shape statistics.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vshape/vshape.h"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string file;
  std::string benchmark;
  bool all = false;
  bool stats = false;
  std::string mode = "auto";
  std::string threshold = "17";
  std::uint64_t max_size = 7;
  std::uint64_t max_depth = 7;
  std::uint64_t size = 0;
  std::uint32_t repeats = 1;
  std::string format = "text";
};

using RuntimePtr = std::unique_ptr<vshape_runtime, decltype(&vshape_runtime_destroy)>;
using ProgramPtr = std::unique_ptr<vshape_program, decltype(&vshape_program_destroy)>;

struct OwnedString {
  char* text = nullptr;
  ~OwnedString() { vshape_string_free(text); }
};

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw UsageError(std::string("invalid ") + what + " '" + text + "'");
  }
  return v;
}

vshape_config make_config(const Options& o) {
  vshape_config cfg;
  vshape_config_default(&cfg);
  if (vshape_mode_parse(o.mode.c_str(), &cfg.mode) != VSHAPE_OK) throw UsageError(vshape_last_error());
  cfg.threshold = o.threshold == "inf" ? VSHAPE_THRESHOLD_INFINITE : parse_u64(o.threshold, "threshold");
  cfg.max_size = o.max_size;
  cfg.max_depth = o.max_depth;
  return cfg;
}

std::uint64_t step_limit_from_env() {
  const char* env = std::getenv("VSHAPE_STEP_LIMIT");
  if (env == nullptr || *env == '\0') return 0;
  return parse_u64(env, "VSHAPE_STEP_LIMIT");
}

int report(vshape_status status) {
  std::cerr << "vshape: " << vshape_last_error() << '\n';
  return static_cast<int>(status);
}

void add_config_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--mode", o.mode, "none, manual or auto")
      ->check(CLI::IsMember({"none", "manual", "auto"}))
      ->capture_default_str();
  cmd->add_option("--threshold", o.threshold, "rule creation threshold, or inf")->capture_default_str();
  cmd->add_option("--max-size", o.max_size, "largest inlined storage width")->capture_default_str();
  cmd->add_option("--max-depth", o.max_depth, "deepest inlined shape tree")->capture_default_str();
}

int run_program(const Options& o, bool print_result, bool print_stats) {
  vshape_config cfg = make_config(o);
  std::uint64_t limit = step_limit_from_env();

  vshape_program* prog_raw = nullptr;
  if (vshape_status s = vshape_program_load_file(o.file.c_str(), &prog_raw); s != VSHAPE_OK) return report(s);
  ProgramPtr prog(prog_raw, &vshape_program_destroy);

  vshape_runtime* rt_raw = nullptr;
  if (vshape_status s = vshape_runtime_create(&cfg, &rt_raw); s != VSHAPE_OK) return report(s);
  RuntimePtr rt(rt_raw, &vshape_runtime_destroy);

  OwnedString result;
  vshape_status status = vshape_eval(rt.get(), prog.get(), limit, &result.text, nullptr);
  if (status != VSHAPE_OK) return report(status);
  if (print_result) std::cout << result.text << '\n';
  if (print_stats) {
    OwnedString dump;
    if (vshape_status s = vshape_dump_stats(rt.get(), &dump.text); s != VSHAPE_OK) return report(s);
    std::cout << dump.text;
  }
  return 0;
}

int run_bench(const Options& o) {
  vshape_config cfg = make_config(o);
  std::uint64_t limit = step_limit_from_env();
  vshape_format format = o.format == "csv"    ? VSHAPE_FORMAT_CSV
                         : o.format == "json" ? VSHAPE_FORMAT_JSON
                                              : VSHAPE_FORMAT_TEXT;
  std::vector<const char*> names;
  if (o.all) {
    if (!o.benchmark.empty()) throw UsageError("give a benchmark name or --all, not both");
    for (std::size_t i = 0; i < vshape_benchmark_count(); ++i) names.push_back(vshape_benchmark_name(i));
  } else {
    if (o.benchmark.empty()) throw UsageError("bench needs a benchmark name or --all");
    if (!vshape_is_benchmark(o.benchmark.c_str())) throw UsageError("unknown benchmark '" + o.benchmark + "'");
    names.push_back(o.benchmark.c_str());
  }
  if (o.repeats == 0) throw UsageError("--repeats must be at least 1");

  OwnedString out;
  vshape_status status =
      vshape_bench_run(names.data(), names.size(), o.size, &cfg, o.repeats, limit, format, &out.text);
  if (status != VSHAPE_OK) return report(status);
  std::cout << out.text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive value-object inlining runtime"};
  app.require_subcommand(1);
  app.set_version_flag("--version", vshape_version());
  Options o;

  CLI::App* run = app.add_subcommand("run", "evaluate a program and print its result");
  run->add_option("FILE", o.file, "program source")->required();
  run->add_flag("--stats", o.stats, "dump shapes, rules and history after the run");
  add_config_options(run, o);

  CLI::App* stats = app.add_subcommand("stats", "evaluate a program and dump shapes, rules and history");
  stats->add_option("FILE", o.file, "program source")->required();
  add_config_options(stats, o);

  CLI::App* bench = app.add_subcommand("bench", "run micro-benchmarks");
  bench->add_option("NAME", o.benchmark, "append, filter, map, reverse, tree or arith");
  bench->add_flag("--all", o.all, "run the five list and tree benchmarks");
  bench->add_option("--size", o.size, "list length, or tree depth (default per benchmark)");
  bench->add_option("--repeats", o.repeats, "runs per benchmark")->capture_default_str();
  bench->add_option("--format", o.format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  add_config_options(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : VSHAPE_ERR_USAGE;
  }

  try {
    if (run->parsed()) return run_program(o, true, o.stats);
    if (stats->parsed()) return run_program(o, false, true);
    return run_bench(o);
  } catch (const UsageError& e) {
    std::cerr << "vshape: " << e.what() << '\n';
    return VSHAPE_ERR_USAGE;
  }
}
