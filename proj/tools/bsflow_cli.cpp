// Command-line driver: verify campaigns, bubble runs and convergence ladders.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
// 3 a scenario could not run.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "bsflow/campaign.hpp"

namespace fs = std::filesystem;
using namespace bsflow;

namespace {

struct Options {
  std::vector<std::string> configs;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  double tol_scale = 1.0;
  bool no_timestamp = false;
  std::vector<std::string> overrides;
  std::vector<int> ladder_N{8, 12, 16, 24};
};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Config paths, with directories expanded to their *.cfg files in name order.
std::vector<std::string> expand(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.path().extension() == ".cfg") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<Scenario> load_all(const Options& o) {
  std::vector<Scenario> out;
  std::set<std::string> names;
  for (const std::string& path : expand(o.configs)) {
    Scenario s = Scenario::load(path);
    for (const std::string& ov : o.overrides) s.apply_override(ov);
    if (o.seed) s.set_seed(*o.seed);
    s.tol_scale = o.tol_scale;
    if (!names.insert(s.name()).second) throw ConfigError(path + ": duplicate scenario name '" + s.name() + "'");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ConfigError("no config files given");
  return out;
}

void write_file(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

int report(const Options& o, const std::vector<ScenarioResult>& results) {
  bool errors = false, failures = false;
  for (const ScenarioResult& r : results) {
    for (const auto& [name, content] : r.files) write_file(fs::path(o.out) / r.scenario / name, content);
    std::cout << r.log;
    errors |= !r.error.empty();
    failures |= !r.passed();
  }
  const auto rows = summarize(results);
  write_file(fs::path(o.out) / "summary.csv", summary_csv(rows, o.no_timestamp ? "" : utc_now()));
  int pass = 0, fail = 0;
  for (const SummaryRow& s : rows) {
    pass += s.pass;
    fail += s.fail;
  }
  std::cout << "summary: " << pass << " passed, " << fail << " failed; reports in " << o.out << "\n";
  return errors ? 3 : failures ? 1 : 0;
}

int cmd_verify(const Options& o, bool bubble_only) {
  const auto scenarios = load_all(o);
  if (bubble_only)
    for (const Scenario& s : scenarios)
      if (s.kind() != ScenarioKind::Bubble)
        throw ConfigError("scenario '" + s.name() + "' is " + to_string(s.kind()) + ", not bubble");
  return report(o, run_campaign(scenarios, o.jobs));
}

int cmd_ladder(const Options& o) {
  for (const Scenario& s : load_all(o)) {
    const auto rows = convergence_ladder(s, o.ladder_N, o.jobs);
    write_file(fs::path(o.out) / s.name() / "ladder.csv", ladder_csv(s.name(), rows));
    std::cout << "ladder " << s.name() << "\n";
    std::printf("  %-28s %5s %12s %8s  %s\n", "check", "N", "max_gap", "order", "regime");
    for (const LadderRow& r : rows) {
      const std::string ord = r.order ? std::to_string(*r.order).substr(0, 6) : "-";
      std::printf("  %-28s %5d %12.3e %8s  %s\n", r.check.c_str(), r.N, r.max_gap, ord.c_str(), r.regime.c_str());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bsflow: verification campaigns and the bubble scenario"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("configs", o.configs, "Config files or directories of *.cfg")->required();
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed for randomized suites (overrides [scenario] seed)");
    sub->add_option("--jobs", o.jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--tol-scale", o.tol_scale, "Multiplies every tolerance")->check(CLI::PositiveNumber);
    sub->add_flag("--no-timestamp", o.no_timestamp, "Omit the timestamp line from summary.csv");
    sub->add_option("--override", o.overrides, "section.key=value (repeatable)");
  };
  CLI::App* verify = app.add_subcommand("verify", "Run scenarios and write reports");
  CLI::App* bubble = app.add_subcommand("bubble", "Run bubble scenarios");
  CLI::App* ladder = app.add_subcommand("ladder", "Repeat verify scenarios over quadrature sizes");
  common(verify);
  common(bubble);
  common(ladder);
  ladder->add_option("--N", o.ladder_N, "Quadrature sizes")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (verify->parsed()) return cmd_verify(o, false);
    if (bubble->parsed()) return cmd_verify(o, true);
    return cmd_ladder(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
