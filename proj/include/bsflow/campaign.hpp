#pragma once

// Config-driven scenarios: INI loading and validation, the runner for each
// scenario kind, campaigns over several scenarios, and convergence ladders.
// Runners return file contents instead of writing them so the caller decides
// where reports go; the same scenario and seed always produce the same bytes.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsflow {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0) : std::runtime_error(msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ScenarioKind { Geometry, Ibp, Transport, Residuals, Variation, Thermo, Bubble };
const char* to_string(ScenarioKind k);

struct ConfigValue {
  std::string text;  // unquoted
  int line = 0;      // 0 for defaults and overrides
};

/// A validated config. Sections and keys are lowercase; every key belongs to
/// the schema and every expression parses.
class Scenario {
 public:
  /// Parses INI text. Throws ConfigError (with the line when known) on syntax
  /// errors, unknown sections or keys, unparsable values, N < 8 or
  /// nonpositive tolerances.
  static Scenario parse(const std::string& text, const std::string& source = "<config>");
  static Scenario load(const std::string& path);

  /// "section.key=value", or "key=value" for a key present in exactly one
  /// section (else [scenario]). Revalidates.
  void apply_override(const std::string& assignment);

  ScenarioKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::uint64_t seed() const;
  void set_seed(std::uint64_t s);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get(const std::string& section, const std::string& key, double fallback) const;
  int get(const std::string& section, const std::string& key, int fallback) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Tolerance for a named check: [tolerances] entry, else the fallback,
  /// times the tolerance scale.
  double tol(const std::string& check, double fallback) const;
  double tol_scale = 1.0;

 private:
  void validate();
  std::map<std::string, std::map<std::string, ConfigValue>> values_;
  std::string source_;
  std::string name_;
  ScenarioKind kind_ = ScenarioKind::Geometry;
};

struct CheckRow {
  std::string check;
  std::string label;  // which case inside the check
  double gap = 0;
  double tol = 0;
  bool pass = false;
};

struct ScenarioResult {
  std::string scenario;
  ScenarioKind kind;
  std::vector<CheckRow> rows;
  /// File name (relative to the output directory) and contents.
  std::vector<std::pair<std::string, std::string>> files;
  /// Human-readable table for the terminal.
  std::string log;
  /// Set when the scenario could not run (precondition or runtime error);
  /// counted as a failure.
  std::string error;

  bool passed() const;
};

struct SummaryRow {
  std::string scenario, check;
  int pass = 0, fail = 0;
  double max_gap = 0;
};

std::vector<SummaryRow> summarize(const std::vector<ScenarioResult>& results);
/// `scenario,check,pass,fail,max_gap`, preceded by a `# generated ...` line
/// when timestamp is non-empty.
std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& timestamp = "");

/// Runs one scenario. Never throws for check failures; runtime errors are
/// recorded in ScenarioResult::error.
ScenarioResult run_scenario(const Scenario& s);

/// Runs scenarios on up to `jobs` threads; results keep the input order.
std::vector<ScenarioResult> run_campaign(const std::vector<Scenario>& scenarios, int jobs = 1);

struct LadderRow {
  std::string check;
  int N = 0;
  double max_gap = 0;
  std::optional<double> order;  // log(gap ratio) / log(N ratio) against the previous rung
  /// "roundoff" (gap <= 1e-13), "converging" (order > 0.5), "plateau"
  /// (gap stalls above roundoff, e.g. at a time-difference error) or "" on
  /// the first rung.
  std::string regime;
};

/// Repeats a verify scenario at each quadrature size. Throws ConfigError for
/// bubble scenarios.
std::vector<LadderRow> convergence_ladder(const Scenario& s, const std::vector<int>& Ns, int jobs = 1);
/// `scenario,check,N,max_gap,order,regime`.
std::string ladder_csv(const std::string& scenario, const std::vector<LadderRow>& rows);

/// Per-scenario checks file: `check,case,gap,tol,pass`.
std::string checks_csv(const ScenarioResult& r);

}  // namespace bsflow
