#include "vshape/vshape.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vshape/bench.hpp"
#include "vshape/error.hpp"
#include "vshape/lang.hpp"
#include "vshape/machine.hpp"
#include "vshape/stats.hpp"

struct vshape_runtime {
  explicit vshape_runtime(const vshape::Config& c) : rt(c) {}
  vshape::Runtime rt;
};

struct vshape_program {
  vshape::lang::Program program;
};

namespace {

thread_local std::string last_error;

vshape_status fail(vshape_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
vshape_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const vshape::ParseError& e) {
    return fail(VSHAPE_ERR_PARSE, e.what());
  } catch (const vshape::RuntimeError& e) {
    return fail(VSHAPE_ERR_RUNTIME, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(VSHAPE_ERR_USAGE, e.what());
  } catch (const std::out_of_range& e) {
    return fail(VSHAPE_ERR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(VSHAPE_ERR_RUNTIME, "out of memory");
  } catch (const std::exception& e) {
    return fail(VSHAPE_ERR_RUNTIME, std::string("internal error: ") + e.what());
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

vshape::Config to_config(const vshape_config* c) {
  vshape::Config cfg;
  if (c == nullptr) return cfg;
  cfg.max_size = c->max_size;
  cfg.max_depth = c->max_depth;
  cfg.threshold = c->threshold;
  switch (c->mode) {
    case VSHAPE_MODE_NONE:
      cfg.mode = vshape::Mode::None;
      break;
    case VSHAPE_MODE_MANUAL:
      cfg.mode = vshape::Mode::Manual;
      break;
    case VSHAPE_MODE_AUTO:
      cfg.mode = vshape::Mode::Auto;
      break;
    default:
      throw std::invalid_argument("unknown mode " + std::to_string(static_cast<int>(c->mode)));
  }
  return cfg;
}

}  // namespace

extern "C" {

VSHAPE_API const char* vshape_version(void) { return "0.1.0"; }

VSHAPE_API const char* vshape_last_error(void) { return last_error.c_str(); }

VSHAPE_API void vshape_string_free(char* s) { std::free(s); }

VSHAPE_API void vshape_config_default(vshape_config* out) {
  if (out == nullptr) return;
  vshape::Config d;
  out->max_size = d.max_size;
  out->max_depth = d.max_depth;
  out->threshold = d.threshold;
  out->mode = VSHAPE_MODE_AUTO;
}

VSHAPE_API const char* vshape_mode_name(vshape_mode mode) {
  switch (mode) {
    case VSHAPE_MODE_NONE:
      return "none";
    case VSHAPE_MODE_MANUAL:
      return "manual";
    case VSHAPE_MODE_AUTO:
      return "auto";
  }
  return "unknown";
}

VSHAPE_API vshape_status vshape_mode_parse(const char* name, vshape_mode* out) {
  if (name == nullptr || out == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  auto mode = vshape::parse_mode(name);
  if (!mode) return fail(VSHAPE_ERR_USAGE, std::string("unknown mode '") + name + "'");
  *out = *mode == vshape::Mode::None     ? VSHAPE_MODE_NONE
         : *mode == vshape::Mode::Manual ? VSHAPE_MODE_MANUAL
                                         : VSHAPE_MODE_AUTO;
  return VSHAPE_OK;
}

VSHAPE_API vshape_status vshape_runtime_create(const vshape_config* config, vshape_runtime** out) {
  if (out == nullptr) return fail(VSHAPE_ERR_USAGE, "null output handle");
  *out = nullptr;
  return guarded([&] {
    *out = new vshape_runtime(to_config(config));
    return VSHAPE_OK;
  });
}

VSHAPE_API void vshape_runtime_destroy(vshape_runtime* rt) { delete rt; }

VSHAPE_API vshape_status vshape_runtime_counters(const vshape_runtime* rt, vshape_counters* out) {
  if (rt == nullptr || out == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  const vshape::Counters& c = rt->rt.counters();
  *out = {c.objects_allocated, c.slots_allocated, c.reifications, c.shapes_created,
          c.rules_created,     c.field_reads,     c.inline_restarts};
  return VSHAPE_OK;
}

VSHAPE_API vshape_status vshape_dump_stats(const vshape_runtime* rt, char** out_text) {
  if (rt == nullptr || out_text == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  return guarded([&] {
    *out_text = duplicate(vshape::dump_stats(rt->rt));
    return VSHAPE_OK;
  });
}

VSHAPE_API vshape_status vshape_seed_linear_rules(vshape_runtime* rt, const char* class_name,
                                                  uint64_t arity, uint64_t field,
                                                  uint64_t levels, uint64_t* out_admitted) {
  if (rt == nullptr || class_name == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  return guarded([&] {
    const vshape::ClassDescriptor& cls = rt->rt.intern_class(class_name, arity);
    std::size_t admitted = rt->rt.seed_linear_rules(cls, field, levels);
    if (out_admitted != nullptr) *out_admitted = admitted;
    return VSHAPE_OK;
  });
}

VSHAPE_API vshape_status vshape_program_parse(const char* source, size_t length,
                                              vshape_program** out) {
  if (source == nullptr || out == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new vshape_program{vshape::lang::load(std::string_view(source, length))};
    return VSHAPE_OK;
  });
}

VSHAPE_API vshape_status vshape_program_load_file(const char* path, vshape_program** out) {
  if (path == nullptr || out == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  *out = nullptr;
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(VSHAPE_ERR_PARSE, std::string(path) + ": cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  vshape_status status = vshape_program_parse(text.str().data(), text.str().size(), out);
  if (status != VSHAPE_OK) last_error = std::string(path) + ":" + last_error;
  return status;
}

VSHAPE_API void vshape_program_destroy(vshape_program* program) { delete program; }

VSHAPE_API vshape_status vshape_program_source(const vshape_program* program, char** out_text) {
  if (program == nullptr || out_text == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  return guarded([&] {
    *out_text = duplicate(vshape::lang::to_source(program->program));
    return VSHAPE_OK;
  });
}

VSHAPE_API vshape_status vshape_eval(vshape_runtime* rt, const vshape_program* program,
                                     uint64_t step_limit, char** out_result,
                                     vshape_eval_stats* out_stats) {
  if (rt == nullptr || program == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  return guarded([&] {
    vshape::EvalStats stats;
    vshape::Value result = vshape::eval(rt->rt, program->program, {step_limit}, &stats);
    if (out_stats != nullptr) {
      vshape::MemoryStats mem = vshape::measure(result);
      *out_stats = {stats.steps,        stats.peak_continuation_depth, mem.boxed_objects,
                    mem.storage_slots,  mem.total_cells,               vshape::checksum(result)};
    }
    if (out_result != nullptr) *out_result = duplicate(vshape::print_value(result));
    return VSHAPE_OK;
  });
}

VSHAPE_API size_t vshape_benchmark_count(void) { return vshape::benchmark_names().size(); }

VSHAPE_API const char* vshape_benchmark_name(size_t index) {
  const auto& names = vshape::benchmark_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

VSHAPE_API int vshape_is_benchmark(const char* name) {
  return name != nullptr && vshape::is_benchmark(name) ? 1 : 0;
}

VSHAPE_API uint64_t vshape_benchmark_default_size(const char* name) {
  return name == nullptr ? 0 : vshape::default_benchmark_size(name);
}

VSHAPE_API vshape_status vshape_bench_run(const char* const* names, size_t count, uint64_t size,
                                          const vshape_config* config, uint32_t repeats,
                                          uint64_t step_limit, vshape_format format,
                                          char** out_text) {
  if (names == nullptr || out_text == nullptr) return fail(VSHAPE_ERR_USAGE, "null argument");
  return guarded([&] {
    vshape::ReportFormat fmt = vshape::ReportFormat::Text;
    switch (format) {
      case VSHAPE_FORMAT_TEXT:
        break;
      case VSHAPE_FORMAT_CSV:
        fmt = vshape::ReportFormat::Csv;
        break;
      case VSHAPE_FORMAT_JSON:
        fmt = vshape::ReportFormat::Json;
        break;
      default:
        throw std::invalid_argument("unknown report format");
    }
    vshape::Config cfg = to_config(config);
    std::vector<vshape::BenchReport> all;
    for (size_t i = 0; i < count; ++i) {
      if (names[i] == nullptr || !vshape::is_benchmark(names[i])) {
        throw std::invalid_argument(std::string("unknown benchmark '") +
                                    (names[i] ? names[i] : "") + "'");
      }
      vshape::BenchRequest req{names[i],
                               size != 0 ? size : vshape::default_benchmark_size(names[i]), cfg,
                               repeats, step_limit};
      auto reports = vshape::run_benchmark(req);
      all.insert(all.end(), std::make_move_iterator(reports.begin()),
                 std::make_move_iterator(reports.end()));
    }
    *out_text = duplicate(vshape::format_reports(all, fmt));
    return VSHAPE_OK;
  });
}

}  // extern "C"
