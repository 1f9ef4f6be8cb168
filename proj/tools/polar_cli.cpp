// Command-line front end.
//
//   polar_cli report  [--n N --seed S | --ortho | --input FILE] [--sup]
//   polar_cli verify  --n A..B --count K --seed S [--thm2-threshold] [--oracle]
//   polar_cli search  --n N --budget B --seed S [--trace FILE]
//   polar_cli lconst  --n N --samples M --seed S
//
// Exit codes: 0 ok, 1 property failure, 2 input error, 3 numerical
// non-convergence. POLAR_OUTPUT_DIR sets the default directory for outputs.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "polar/polar.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitNoConvergence = 3;

struct RunConfig {
  std::string command;
  std::size_t n = 3;
  std::string n_range;
  std::uint64_t seed = 1;
  std::string input;
  std::string output;
  std::string format = "json";
  bool ortho = false;
  bool sup = false;
  std::size_t count = 100;
  bool thm2_threshold = false;
  bool oracle = false;
  std::size_t budget = 500;
  std::string trace;
  std::size_t samples = 1000000;
  std::size_t restarts = 0;
  int max_iterations = 500;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path output_dir() {
  const char* dir = std::getenv("POLAR_OUTPUT_DIR");
  return dir != nullptr && *dir != '\0' ? fs::path(dir) : fs::path();
}

/// Relative paths are resolved against POLAR_OUTPUT_DIR when it is set.
fs::path resolve(const std::string& path) {
  fs::path p(path);
  if (p.is_relative() && !output_dir().empty()) p = output_dir() / p;
  return p;
}

/// Explicit --output, else <POLAR_OUTPUT_DIR>/<command>.<format>, else stdout.
std::optional<fs::path> output_path(const RunConfig& rc) {
  if (!rc.output.empty()) return resolve(rc.output);
  if (!output_dir().empty()) return output_dir() / (rc.command + "." + rc.format);
  return std::nullopt;
}

void write_text(const std::optional<fs::path>& path, const std::string& text) {
  if (!path) {
    std::cout << text;
    return;
  }
  if (path->has_parent_path()) fs::create_directories(path->parent_path());
  std::ofstream out(*path);
  if (!out) throw polar::InvalidInput("cannot write '" + path->string() + "'");
  out << text;
}

polar::OptimizerSettings optimizer_settings(const RunConfig& rc) {
  polar::OptimizerSettings s;
  s.restarts = rc.restarts;
  s.max_iterations = rc.max_iterations;
  s.seed = rc.seed;
  return s;
}

int cmd_report(const RunConfig& rc) {
  const auto start = Clock::now();
  bool generated = false;
  polar::Configuration config = polar::Configuration::orthonormal(1);
  if (!rc.input.empty()) {
    config = polar::read_configuration(rc.input);
  } else if (rc.ortho) {
    config = polar::Configuration::orthonormal(rc.n);
  } else {
    polar::Rng rng = polar::make_rng(rc.seed);
    config = polar::random_configuration(rc.n, rng);
    generated = true;
  }

  polar::ReportOptions options;
  options.with_sup = rc.sup;
  options.optimizer = optimizer_settings(rc);
  const polar::BoundReport report = polar::full_report(config, options);
  polar::ReportDocument doc = polar::make_report_document(config, report, rc.seed);
  doc.timings["total_seconds"] = seconds_since(start);

  const auto path = output_path(rc);
  write_text(path, rc.format == "csv" ? polar::to_csv(doc) : polar::to_json(doc).dump(2) + "\n");
  if (generated && path) {
    fs::path instance = *path;
    instance.replace_extension(".instance.txt");
    polar::save_configuration(instance.string(), config);
  }
  return kExitOk;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text, std::size_t fallback) {
  if (text.empty()) return {fallback, fallback};
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::size_t v = std::stoul(text);
      return {v, v};
    }
    return {std::stoul(text.substr(0, dots)), std::stoul(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw polar::InvalidInput("invalid dimension range '" + text + "'");
  }
}

int cmd_verify(const RunConfig& rc) {
  const auto start = Clock::now();
  const auto [n_min, n_max] = parse_range(rc.n_range, rc.n);
  if (n_min < 1 || n_max < n_min) throw polar::InvalidInput("invalid dimension range");

  polar::PropertyOptions options;
  options.thm2_threshold = rc.thm2_threshold;
  options.oracle = rc.oracle;

  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // passed, failed
  std::vector<std::string> dumps;
  for (std::size_t n = n_min; n <= n_max; ++n) {
    for (std::size_t i = 0; i < rc.count; ++i) {
      const polar::Configuration config = polar::corpus_instance(n, rc.seed, i);
      options.seed = rc.seed ^ (n << 32) ^ i;
      bool failed = false;
      for (const polar::PropertyOutcome& o : polar::check_properties(config, options)) {
        auto& [pass, fail] = tally[o.property];
        if (o.passed) {
          ++pass;
        } else {
          ++fail;
          failed = true;
          std::cerr << "FAIL n=" << n << " instance=" << i << " " << o.property << ": " << o.detail
                    << "\n";
        }
      }
      if (failed) {
        const fs::path dump = resolve("verify_failure_n" + std::to_string(n) + "_i" +
                                      std::to_string(i) + "_seed" + std::to_string(rc.seed) + ".txt");
        if (dump.has_parent_path()) fs::create_directories(dump.parent_path());
        polar::save_configuration(dump.string(), config);
        dumps.push_back(dump.string());
      }
    }
  }

  std::size_t failures = 0;
  polar::Json checks = polar::Json::object();
  for (const auto& [name, counts] : tally) {
    checks[name] = {{"passed", counts.first}, {"failed", counts.second}};
    failures += counts.second;
  }
  polar::Json doc;
  doc["schemaVersion"] = polar::kSchemaVersion;
  doc["command"] = "verify";
  doc["seed"] = rc.seed;
  doc["n_min"] = n_min;
  doc["n_max"] = n_max;
  doc["count"] = rc.count;
  doc["checks"] = checks;
  doc["failures"] = failures;
  doc["dumped_instances"] = dumps;
  doc["timings"] = {{"total_seconds", seconds_since(start)}};

  std::string text;
  if (rc.format == "csv") {
    text = "property,passed,failed\n";
    for (const auto& [name, counts] : tally)
      text += name + "," + std::to_string(counts.first) + "," + std::to_string(counts.second) + "\n";
  } else {
    text = doc.dump(2) + "\n";
  }
  write_text(output_path(rc), text);
  std::cerr << "verify: " << failures << " failure(s)\n";
  return failures == 0 ? kExitOk : kExitPropertyFailure;
}

int cmd_search(const RunConfig& rc) {
  const auto start = Clock::now();
  const polar::SearchResult result = polar::conjecture_search(rc.n, rc.budget, rc.seed);
  polar::SearchDocument doc = polar::make_search_document(result, rc.budget);
  doc.timings["total_seconds"] = seconds_since(start);
  write_text(output_path(rc), rc.format == "csv" ? polar::trace_csv(doc) : polar::to_json(doc).dump(2) + "\n");
  if (!rc.trace.empty()) write_text(resolve(rc.trace), polar::trace_csv(doc));
  return kExitOk;
}

int cmd_lconst(const RunConfig& rc) {
  const auto start = Clock::now();
  const polar::LEstimate est = polar::estimate_L(rc.n, rc.samples, rc.seed);
  polar::LConstDocument doc;
  doc.seed = rc.seed;
  doc.n = rc.n;
  doc.samples = est.samples;
  doc.l_estimate = est.mean;
  doc.standard_error = est.standard_error;
  doc.exp_minus_l = est.constant();
  doc.timings["total_seconds"] = seconds_since(start);
  write_text(output_path(rc), rc.format == "csv" ? polar::to_csv(doc) : polar::to_json(doc).dump(2) + "\n");
  return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--seed", rc.seed, "Random seed (recorded in the output)");
  sub->add_option("--output,-o", rc.output, "Output file (default: stdout or $POLAR_OUTPUT_DIR)");
  sub->add_option("--format", rc.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_optimizer(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--restarts", rc.restarts, "Random restarts of the sup estimate (0: 32 n)");
  sub->add_option("--max-iter", rc.max_iterations, "Iteration cap per restart");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds and numerical estimates for products of linear forms on the sphere"};
  app.require_subcommand(1);
  RunConfig rc;

  auto* report = app.add_subcommand("report", "Bounds, witnesses and optional sup estimate");
  add_common(report, rc);
  add_optimizer(report, rc);
  report->add_option("--n", rc.n, "Dimension of a generated instance")->check(CLI::PositiveNumber);
  report->add_flag("--ortho", rc.ortho, "Use the orthonormal configuration");
  report->add_option("--input,-i", rc.input, "Instance file");
  report->add_flag("--sup", rc.sup, "Also estimate the supremum numerically");

  auto* verify = app.add_subcommand("verify", "Run the property suite on seeded random instances");
  add_common(verify, rc);
  verify->add_option("--n", rc.n_range, "Dimension or range A..B")->required();
  verify->add_option("--count", rc.count, "Instances per dimension");
  verify->add_flag("--thm2-threshold", rc.thm2_threshold,
                   "Check that the largest-eigenvalue witness reaches n^{-n/2}");
  verify->add_flag("--oracle", rc.oracle, "Compare the sup estimate with the grid oracle (n = 2, 3)");

  auto* search = app.add_subcommand("search", "Search configurations minimizing the supremum");
  add_common(search, rc);
  search->add_option("--n", rc.n, "Dimension")->check(CLI::Range(2, 64));
  search->add_option("--budget", rc.budget, "Outer iterations");
  search->add_option("--trace", rc.trace, "Also write the improvement trace as CSV");

  auto* lconst = app.add_subcommand("lconst", "Monte Carlo estimate of L(n) and e^{-L}");
  add_common(lconst, rc);
  lconst->add_option("--n", rc.n, "Dimension")->check(CLI::Range(2, 100000));
  lconst->add_option("--samples", rc.samples, "Sample count (>= 10^4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (report->parsed()) {
      rc.command = "report";
      return cmd_report(rc);
    }
    if (verify->parsed()) {
      rc.command = "verify";
      return cmd_verify(rc);
    }
    if (search->parsed()) {
      rc.command = "search";
      return cmd_search(rc);
    }
    rc.command = "lconst";
    return cmd_lconst(rc);
  } catch (const polar::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const polar::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const polar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
