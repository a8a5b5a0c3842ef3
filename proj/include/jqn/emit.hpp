#pragma once

// Report serialization. Output depends only on the report and the options;
// elapsed times appear only when asked for, so structured reports are
// byte-identical across runs.

#include <jqn/report.hpp>

#include <json.hpp>

#include <cstdio>
#include <string>

namespace jqn {

inline constexpr const char* kReportSchema = "jqn-report/1";

struct EmitOptions {
  std::string source;  // document name as shown in the report
  int gen_degree = 2;
  bool timing = false;
};

namespace detail {

inline std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

inline std::size_t failures(const CheckReport& r) {
  std::size_t n = 0;
  for (const auto& e : r.entries()) n += e.pass ? 0 : 1;
  return n;
}

}  // namespace detail

inline std::string emit_json(const CheckReport& r, const EmitOptions& o) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = kReportSchema;
  j["source"] = o.source;
  j["gen_degree"] = o.gen_degree;
  j["verdict"] = r.passed() ? "pass" : "fail";
  std::size_t failed = detail::failures(r);
  j["summary"] = {{"total", r.entries().size()}, {"passed", r.entries().size() - failed}, {"failed", failed}};
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.entries()) {
    ordered_json x;
    x["id"] = e.id;
    x["description"] = e.description;
    x["verdict"] = e.pass ? "pass" : "fail";
    if (!e.pass) x["witness"] = e.witness;
    if (o.timing) x["time"] = e.elapsed_ms;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

inline std::string emit_text(const CheckReport& r, const EmitOptions& o) {
  std::string out;
  for (const auto& e : r.entries()) {
    out += std::string(e.pass ? "PASS " : "FAIL ") + e.id + "  " + e.description;
    if (o.timing) out += "  (" + detail::format_ms(e.elapsed_ms) + " ms)";
    out += "\n";
    if (!e.pass) out += "     witness: " + e.witness + "\n";
  }
  std::size_t failed = detail::failures(r);
  out += std::to_string(r.entries().size()) + " entries, " + std::to_string(r.entries().size() - failed) +
         " passed, " + std::to_string(failed) + " failed\n";
  return out;
}

}  // namespace jqn
