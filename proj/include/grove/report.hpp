#pragma once

// Suite reports: named identity checks with counts, grammar-form
// counterexamples and wall times. Assembly is deterministic so text reports
// diff cleanly; the JSON mirror carries the same fields.

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

namespace grove {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct IdentityResult {
  std::string name;
  bool passed = false;
  std::size_t checked = 0;
  std::size_t skipped = 0;       // instances outside the window, not failures
  std::string counterexample;    // grammar form; a failure always carries one
  std::string note;              // window sizes, orders, other context
  double seconds = 0;
};

struct VerificationReport {
  std::string suite;
  std::string bounds;
  std::vector<IdentityResult> identities;
  double seconds = 0;

  bool passed() const {
    for (const auto& id : identities)
      if (!id.passed) return false;
    return true;
  }
};

inline std::string report_text(const VerificationReport& rep) {
  std::string out = "suite " + rep.suite + "  (" + rep.bounds + ")\n";
  char buf[64];
  for (const auto& id : rep.identities) {
    std::snprintf(buf, sizeof buf, "%8.2fs", id.seconds);
    out += std::string("  [") + (id.passed ? "PASS" : "FAIL") + "] " + id.name + "  checked " +
           std::to_string(id.checked);
    if (id.skipped) out += " skipped " + std::to_string(id.skipped);
    out += std::string("  ") + buf + "\n";
    if (!id.note.empty()) out += "         " + id.note + "\n";
    if (!id.passed && !id.counterexample.empty()) {
      out += "         counterexample: " + id.counterexample + "\n";
    }
  }
  std::snprintf(buf, sizeof buf, "%.2fs", rep.seconds);
  out += std::string("  ") + (rep.passed() ? "PASS" : "FAIL") + " in " + buf + "\n";
  return out;
}

inline nlohmann::json report_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["suite"] = rep.suite;
  j["bounds"] = rep.bounds;
  j["passed"] = rep.passed();
  j["seconds"] = rep.seconds;
  j["identities"] = nlohmann::json::array();
  for (const auto& id : rep.identities) {
    nlohmann::json ji;
    ji["name"] = id.name;
    ji["passed"] = id.passed;
    ji["checked"] = id.checked;
    ji["skipped"] = id.skipped;
    ji["seconds"] = id.seconds;
    if (!id.note.empty()) ji["note"] = id.note;
    if (!id.counterexample.empty()) ji["counterexample"] = id.counterexample;
    j["identities"].push_back(ji);
  }
  return j;
}

}  // namespace grove
