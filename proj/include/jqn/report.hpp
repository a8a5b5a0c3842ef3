#pragma once

// Check reports: ordered pass/fail entries with a residual witness on failure.

#include <chrono>
#include <string>
#include <vector>

namespace jqn {

struct CheckEntry {
  std::string id;
  std::string description;
  bool pass = true;
  std::string witness;  // empty iff pass
  double elapsed_ms = 0.0;
};

class CheckReport {
 public:
  CheckReport() = default;

  void add(std::string id, std::string description, bool pass, std::string witness = {}, double elapsed_ms = 0.0) {
    if (pass) witness.clear();
    else if (witness.empty()) witness = "violated";
    entries_.push_back({std::move(id), std::move(description), pass, std::move(witness), elapsed_ms});
  }
  void add(CheckEntry e) { entries_.push_back(std::move(e)); }

  /// Appends `other`, prefixing its ids with `prefix` + ".".
  void merge(const CheckReport& other, const std::string& prefix = {}) {
    for (auto e : other.entries_) {
      if (!prefix.empty()) e.id = prefix + "." + e.id;
      entries_.push_back(std::move(e));
    }
  }

  bool passed() const {
    for (const auto& e : entries_)
      if (!e.pass) return false;
    return true;
  }
  const std::vector<CheckEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  const CheckEntry* find(const std::string& id) const {
    for (const auto& e : entries_)
      if (e.id == id) return &e;
    return nullptr;
  }
  bool passed(const std::string& id) const {
    const auto* e = find(id);
    return e && e->pass;
  }

  /// First failing entry's witness, or empty.
  std::string first_failure() const {
    for (const auto& e : entries_)
      if (!e.pass) return e.id + ": " + e.witness;
    return {};
  }

 private:
  std::vector<CheckEntry> entries_;
};

/// Times a block and records the result as one entry.
template <typename Fn>
void timed_check(CheckReport& report, const std::string& id, const std::string& description, Fn&& fn) {
  auto start = std::chrono::steady_clock::now();
  std::string witness = fn();  // empty witness means pass
  auto stop = std::chrono::steady_clock::now();
  double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  bool ok = witness.empty();
  report.add(id, description, ok, std::move(witness), ms);
}

}  // namespace jqn
