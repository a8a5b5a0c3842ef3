// jqn: check definition documents and print reports.
//
//   jqn check <file> [--report <out>] [--format text|json] [--gen-degree K] [--timing]
//   jqn print <file>
//
// Exit status is 0 when every entry passes and 1 otherwise (including
// unreadable or invalid documents).

#include <jqn/emit.hpp>
#include <jqn/runner.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

/// Parses `path`, printing positioned errors to stderr.
std::optional<jqn::dsl::Document> load(const std::string& path) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << path << ": error: cannot read file\n";
    return std::nullopt;
  }
  try {
    return jqn::dsl::parse(text);
  } catch (const jqn::dsl::DslError& e) {
    std::cerr << path << ":" << e.pos.str() << ": error: " << e.message << "\n";
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact checks for Jacobi algebroids, quasi-Jacobi bialgebroids and their doubles"};
  app.require_subcommand(1);

  std::string file, report, format = "text";
  int gen_degree = 2;
  bool timing = false;
  auto* check = app.add_subcommand("check", "Run every declaration and check in a document");
  check->add_option("file", file, "Definition document")->required();
  check->add_option("--report", report, "Write the report to this file instead of stdout");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--gen-degree", gen_degree, "Degree bound of the generator family for operator checks")
      ->check(CLI::Range(0, 8));
  check->add_flag("--timing", timing, "Include elapsed times in the report");

  std::string print_file;
  auto* print = app.add_subcommand("print", "Print a document in canonical form");
  print->add_option("file", print_file, "Definition document")->required();

  CLI11_PARSE(app, argc, argv);

  if (*print) {
    auto doc = load(print_file);
    if (!doc) return 1;
    std::cout << jqn::dsl::print(*doc);
    return 0;
  }

  auto doc = load(file);
  if (!doc) return 1;
  jqn::CheckReport rep = jqn::dsl::run(*doc, jqn::dsl::RunOptions{gen_degree});
  jqn::EmitOptions eo{std::filesystem::path(file).filename().string(), gen_degree, timing};
  std::string out = format == "json" ? jqn::emit_json(rep, eo) : jqn::emit_text(rep, eo);
  if (report.empty()) {
    std::cout << out;
  } else {
    std::ofstream o(report, std::ios::binary);
    if (!o) {
      std::cerr << report << ": error: cannot write report\n";
      return 1;
    }
    o << out;
    std::cout << (rep.passed() ? "pass" : "fail") << ": " << rep.entries().size() << " entries, report written to "
              << report << "\n";
  }
  return rep.passed() ? 0 : 1;
}
