#pragma once

// Versioned machine-readable documents emitted by the command-line tool.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polar/bounds.hpp"
#include "polar/errors.hpp"
#include "polar/linalg.hpp"
#include "polar/optimizer.hpp"

namespace polar {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<Vector> rows_of(const Matrix& m) {
  std::vector<Vector> rows;
  for (std::size_t j = 0; j < m.size(); ++j) rows.emplace_back(m.row(j).begin(), m.row(j).end());
  return rows;
}

template <typename T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

/// Log values of zero bounds are -infinity, which JSON cannot hold.
inline std::optional<double> finite_or_null(double v) {
  return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
}

inline void check_schema(const Json& j, const char* command) {
  const int version = j.at("schemaVersion").get<int>();
  if (version != kSchemaVersion)
    throw InvalidInput("unsupported schemaVersion " + std::to_string(version));
  if (j.at("command").get<std::string>() != command)
    throw InvalidInput("document is not a '" + std::string(command) + "' document");
}

}  // namespace detail

struct WitnessEntry {
  std::string construction;
  Vector y;
  double achieved = 0.0;

  friend bool operator==(const WitnessEntry&, const WitnessEntry&) = default;
};

struct ReportDocument {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::vector<Vector> instance;
  std::size_t n = 0;
  Vector lambda;
  Vector a_diag;
  std::optional<Vector> v_lengths;
  double marcus = 0.0;
  std::optional<double> harmonic;
  std::optional<double> thm1;
  std::optional<double> thm2;
  std::optional<double> thm3;
  std::map<std::string, std::optional<double>> log_bounds;
  std::vector<WitnessEntry> witnesses;
  double threshold = 0.0;
  std::optional<double> sup_estimate;
  std::map<std::string, std::string> absent;
  std::vector<std::string> winners;
  std::map<std::string, double> timings;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

inline ReportDocument make_report_document(const Configuration& config, const BoundReport& r,
                                           std::uint64_t seed) {
  ReportDocument d;
  d.seed = seed;
  d.instance = detail::rows_of(config.matrix());
  d.n = r.n;
  d.lambda = r.eigenvalues;
  d.a_diag = r.a_diag;
  d.v_lengths = r.v_lengths;
  d.marcus = r.marcus.value;
  auto value_of = [](const std::optional<Bound>& b) {
    return b ? std::optional<double>(b->value) : std::nullopt;
  };
  d.harmonic = value_of(r.harmonic);
  d.thm1 = value_of(r.thm1);
  d.thm2 = value_of(r.thm2);
  d.thm3 = value_of(r.thm3);
  d.log_bounds["marcus"] = detail::finite_or_null(r.marcus.log_value);
  auto put_log = [&](const char* key, const std::optional<Bound>& b) {
    if (b) d.log_bounds[key] = detail::finite_or_null(b->log_value);
  };
  put_log("harmonic", r.harmonic);
  put_log("thm1", r.thm1);
  put_log("thm2", r.thm2);
  put_log("thm3", r.thm3);
  d.log_bounds["threshold"] = r.threshold.log_value;
  for (const Witness& w : r.witnesses) d.witnesses.push_back({to_string(w.construction), w.y, w.achieved});
  d.threshold = r.threshold.value;
  d.sup_estimate = r.sup_estimate;
  d.absent = r.absent;
  d.winners = r.winners();
  return d;
}

inline Json to_json(const ReportDocument& d) {
  Json j;
  j["schemaVersion"] = d.schema_version;
  j["command"] = "report";
  j["seed"] = d.seed;
  j["instance"] = d.instance;
  j["n"] = d.n;
  j["lambda"] = d.lambda;
  j["a_diag"] = d.a_diag;
  j["v_lengths"] = detail::optional_to_json(d.v_lengths);
  j["marcus"] = d.marcus;
  j["harmonic"] = detail::optional_to_json(d.harmonic);
  j["thm1"] = detail::optional_to_json(d.thm1);
  j["thm2"] = detail::optional_to_json(d.thm2);
  j["thm3"] = detail::optional_to_json(d.thm3);
  Json logs = Json::object();
  for (const auto& [k, v] : d.log_bounds) logs[k] = detail::optional_to_json(v);
  j["log_bounds"] = logs;
  Json ws = Json::array();
  for (const WitnessEntry& w : d.witnesses)
    ws.push_back({{"construction", w.construction}, {"y", w.y}, {"achieved", w.achieved}});
  j["witnesses"] = ws;
  j["threshold"] = d.threshold;
  j["sup_estimate"] = detail::optional_to_json(d.sup_estimate);
  j["absent"] = d.absent;
  j["winners"] = d.winners;
  j["timings"] = d.timings;
  return j;
}

inline ReportDocument report_from_json(const Json& j) {
  detail::check_schema(j, "report");
  ReportDocument d;
  d.seed = j.at("seed").get<std::uint64_t>();
  d.instance = j.at("instance").get<std::vector<Vector>>();
  d.n = j.at("n").get<std::size_t>();
  d.lambda = j.at("lambda").get<Vector>();
  d.a_diag = j.at("a_diag").get<Vector>();
  d.v_lengths = detail::optional_from_json<Vector>(j, "v_lengths");
  d.marcus = j.at("marcus").get<double>();
  d.harmonic = detail::optional_from_json<double>(j, "harmonic");
  d.thm1 = detail::optional_from_json<double>(j, "thm1");
  d.thm2 = detail::optional_from_json<double>(j, "thm2");
  d.thm3 = detail::optional_from_json<double>(j, "thm3");
  for (const auto& [k, v] : j.at("log_bounds").items())
    d.log_bounds[k] = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
  for (const Json& w : j.at("witnesses"))
    d.witnesses.push_back({w.at("construction").get<std::string>(), w.at("y").get<Vector>(),
                           w.at("achieved").get<double>()});
  d.threshold = j.at("threshold").get<double>();
  d.sup_estimate = detail::optional_from_json<double>(j, "sup_estimate");
  d.absent = j.at("absent").get<std::map<std::string, std::string>>();
  d.winners = j.at("winners").get<std::vector<std::string>>();
  d.timings = j.at("timings").get<std::map<std::string, double>>();
  return d;
}

namespace detail {

inline std::string join(const Vector& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ";" : "") << v[i];
  return out.str();
}

inline std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream out;
  out.precision(17);
  out << *v;
  return out.str();
}

}  // namespace detail

/// One header line and one data row; vector fields are ';'-joined, absent
/// fields empty.
inline std::string to_csv(const ReportDocument& d) {
  std::ostringstream out;
  out << "n,seed,lambda,a_diag,v_lengths,marcus,harmonic,thm1,thm2,thm3,threshold,sup_estimate";
  for (const WitnessEntry& w : d.witnesses) out << ',' << w.construction << "_y," << w.construction << "_achieved";
  out << '\n';
  out << d.n << ',' << d.seed << ',' << detail::join(d.lambda) << ',' << detail::join(d.a_diag) << ','
      << (d.v_lengths ? detail::join(*d.v_lengths) : "") << ',' << detail::csv_cell(d.marcus) << ','
      << detail::csv_cell(d.harmonic) << ',' << detail::csv_cell(d.thm1) << ','
      << detail::csv_cell(d.thm2) << ',' << detail::csv_cell(d.thm3) << ','
      << detail::csv_cell(d.threshold) << ',' << detail::csv_cell(d.sup_estimate);
  for (const WitnessEntry& w : d.witnesses)
    out << ',' << detail::join(w.y) << ',' << detail::csv_cell(w.achieved);
  out << '\n';
  return out.str();
}

struct SearchDocument {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t budget = 0;
  std::size_t iterations = 0;
  std::vector<Vector> worst_config;
  double worst_sup = 0.0;
  double threshold = 0.0;
  double gap = 0.0;
  std::vector<SearchTraceEntry> trace;
  std::map<std::string, double> timings;

  friend bool operator==(const SearchDocument& a, const SearchDocument& b) {
    auto same_trace = [&] {
      if (a.trace.size() != b.trace.size()) return false;
      for (std::size_t i = 0; i < a.trace.size(); ++i)
        if (a.trace[i].iteration != b.trace[i].iteration || a.trace[i].value != b.trace[i].value ||
            a.trace[i].gap != b.trace[i].gap)
          return false;
      return true;
    };
    return a.schema_version == b.schema_version && a.seed == b.seed && a.n == b.n &&
           a.budget == b.budget && a.iterations == b.iterations && a.worst_config == b.worst_config &&
           a.worst_sup == b.worst_sup && a.threshold == b.threshold && a.gap == b.gap && same_trace() &&
           a.timings == b.timings;
  }
};

inline SearchDocument make_search_document(const SearchResult& r, std::size_t budget) {
  SearchDocument d;
  d.seed = r.seed;
  d.n = r.worst_config.dimension();
  d.budget = budget;
  d.iterations = r.iterations;
  d.worst_config = detail::rows_of(r.worst_config.matrix());
  d.worst_sup = r.worst_sup;
  d.threshold = r.threshold;
  d.gap = r.gap();
  d.trace = r.trace;
  return d;
}

inline Json to_json(const SearchDocument& d) {
  Json j;
  j["schemaVersion"] = d.schema_version;
  j["command"] = "search";
  j["seed"] = d.seed;
  j["n"] = d.n;
  j["budget"] = d.budget;
  j["iterations"] = d.iterations;
  j["worst_config"] = d.worst_config;
  j["worst_sup"] = d.worst_sup;
  j["threshold"] = d.threshold;
  j["gap"] = d.gap;
  Json trace = Json::array();
  for (const SearchTraceEntry& e : d.trace)
    trace.push_back({{"iteration", e.iteration}, {"value", e.value}, {"gap", e.gap}});
  j["trace"] = trace;
  j["timings"] = d.timings;
  return j;
}

inline SearchDocument search_from_json(const Json& j) {
  detail::check_schema(j, "search");
  SearchDocument d;
  d.seed = j.at("seed").get<std::uint64_t>();
  d.n = j.at("n").get<std::size_t>();
  d.budget = j.at("budget").get<std::size_t>();
  d.iterations = j.at("iterations").get<std::size_t>();
  d.worst_config = j.at("worst_config").get<std::vector<Vector>>();
  d.worst_sup = j.at("worst_sup").get<double>();
  d.threshold = j.at("threshold").get<double>();
  d.gap = j.at("gap").get<double>();
  for (const Json& e : j.at("trace"))
    d.trace.push_back({e.at("iteration").get<std::size_t>(), e.at("value").get<double>(),
                       e.at("gap").get<double>()});
  d.timings = j.at("timings").get<std::map<std::string, double>>();
  return d;
}

/// Improvement trace with columns iteration,value,gap,seed.
inline std::string trace_csv(const SearchDocument& d) {
  std::ostringstream out;
  out.precision(17);
  out << "iteration,value,gap,seed\n";
  for (const SearchTraceEntry& e : d.trace)
    out << e.iteration << ',' << e.value << ',' << e.gap << ',' << d.seed << '\n';
  return out.str();
}

struct LConstDocument {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t samples = 0;
  double l_estimate = 0.0;
  double standard_error = 0.0;
  double exp_minus_l = 0.0;
  std::map<std::string, double> timings;

  friend bool operator==(const LConstDocument&, const LConstDocument&) = default;
};

inline Json to_json(const LConstDocument& d) {
  Json j;
  j["schemaVersion"] = d.schema_version;
  j["command"] = "lconst";
  j["seed"] = d.seed;
  j["n"] = d.n;
  j["samples"] = d.samples;
  j["L"] = d.l_estimate;
  j["stderr"] = d.standard_error;
  j["exp_minus_L"] = d.exp_minus_l;
  j["timings"] = d.timings;
  return j;
}

inline LConstDocument lconst_from_json(const Json& j) {
  detail::check_schema(j, "lconst");
  LConstDocument d;
  d.seed = j.at("seed").get<std::uint64_t>();
  d.n = j.at("n").get<std::size_t>();
  d.samples = j.at("samples").get<std::size_t>();
  d.l_estimate = j.at("L").get<double>();
  d.standard_error = j.at("stderr").get<double>();
  d.exp_minus_l = j.at("exp_minus_L").get<double>();
  d.timings = j.at("timings").get<std::map<std::string, double>>();
  return d;
}

inline std::string to_csv(const LConstDocument& d) {
  std::ostringstream out;
  out.precision(17);
  out << "n,samples,seed,L,stderr,exp_minus_L\n"
      << d.n << ',' << d.samples << ',' << d.seed << ',' << d.l_estimate << ',' << d.standard_error
      << ',' << d.exp_minus_l << '\n';
  return out.str();
}

}  // namespace polar
