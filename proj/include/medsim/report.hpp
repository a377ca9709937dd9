#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "medsim/config.hpp"
#include "medsim/experiment.hpp"

namespace medsim {

inline constexpr std::string_view kVersionTag = "medsim 1.0.0";

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format", "expected csv or json");
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to exactly `v`.
inline std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw IoError("number formatting failed");
  return std::string(buf, end);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IoError("bad number '" + std::string(s) + "'");
  return v;
}

inline std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw IoError("bad integer '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// ---- trials table -------------------------------------------------------

inline constexpr std::string_view kTrialsHeader =
    "policy,delta,load,condition,trial,aborted,abort_cause,duration,n_high,n_censored,t_int_sum,"
    "t_int_mean,delays,served,total,rho,lambda_sw,lambda_int,W";

/// `id:delay:censored` triples joined by ';'.
inline std::string encode_delays(const std::vector<DelayRecord>& d) {
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(d[i].patient) + ':' + fmt(d[i].delay) + ':' + (d[i].censored ? '1' : '0');
  }
  return out;
}

inline std::vector<DelayRecord> decode_delays(std::string_view s) {
  std::vector<DelayRecord> out;
  if (s.empty()) return out;
  for (auto item : split(s, ';')) {
    auto parts = split(item, ':');
    if (parts.size() != 3) throw IoError("bad delay entry '" + std::string(item) + "'");
    out.push_back({static_cast<PatientId>(parse_size(parts[0])), parse_double(parts[1]), parts[2] == "1"});
  }
  return out;
}

inline std::string trial_row(const TrialRecord& r) {
  const TrialMetrics& m = r.metrics;
  double sum = 0.0;
  std::size_t censored = 0;
  for (const auto& d : m.high_severity_delays) {
    sum += d.delay;
    censored += d.censored ? 1 : 0;
  }
  const std::size_t n = m.high_severity_delays.size();
  std::string row;
  row += to_string(r.policy);
  row += ',' + fmt(r.delta) + ',' + std::to_string(r.load) + ',' + std::to_string(r.condition_index) + ',' +
         std::to_string(r.trial) + ',' + (m.aborted ? "1" : "0") + ',' + std::string(to_string(r.abort_cause)) +
         ',' + fmt(m.duration) + ',' + std::to_string(n) + ',' + std::to_string(censored) + ',' + fmt(sum) + ',' +
         (n ? fmt(sum / static_cast<double>(n)) : std::string()) + ',' + encode_delays(m.high_severity_delays) +
         ',' + std::to_string(m.served_count) + ',' + std::to_string(m.total_patients) + ',' + fmt(m.rho) + ',' +
         fmt(m.lambda_sw) + ',' + fmt(m.lambda_int) + ',' + fmt(m.workload);
  return row;
}

inline AbortCause parse_abort_cause(std::string_view s) {
  for (AbortCause c : {AbortCause::none, AbortCause::comm_loss, AbortCause::uncertainty, AbortCause::horizon,
                       AbortCause::localization_loss})
    if (to_string(c) == s) return c;
  throw IoError("unknown abort cause '" + std::string(s) + "'");
}

inline TrialRecord parse_trial_row(std::string_view line) {
  const auto f = split(line, ',');
  if (f.size() != 19) throw IoError("trials row has " + std::to_string(f.size()) + " fields, expected 19");
  TrialRecord r;
  auto p = parse_policy(f[0]);
  if (!p) throw IoError("unknown policy '" + std::string(f[0]) + "'");
  r.policy = *p;
  r.delta = parse_double(f[1]);
  r.load = parse_size(f[2]);
  r.condition_index = parse_size(f[3]);
  r.trial = parse_size(f[4]);
  r.metrics.aborted = f[5] == "1";
  r.abort_cause = parse_abort_cause(f[6]);
  r.metrics.duration = parse_double(f[7]);
  r.metrics.high_severity_delays = decode_delays(f[12]);
  r.metrics.served_count = parse_size(f[13]);
  r.metrics.total_patients = parse_size(f[14]);
  r.metrics.rho = parse_double(f[15]);
  r.metrics.lambda_sw = parse_double(f[16]);
  r.metrics.lambda_int = parse_double(f[17]);
  r.metrics.workload = parse_double(f[18]);
  return r;
}

inline std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrialsHeader) throw IoError("trials file: missing or wrong header");
  std::vector<TrialRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_trial_row(line));
  }
  return out;
}

inline json trial_json(const TrialRecord& r) {
  json delays = json::array();
  for (const auto& d : r.metrics.high_severity_delays)
    delays.push_back({{"patient", d.patient}, {"delay", d.delay}, {"censored", d.censored}});
  const auto& m = r.metrics;
  return {{"policy", std::string(to_string(r.policy))},
          {"delta", r.delta},
          {"load", r.load},
          {"condition", r.condition_index},
          {"trial", r.trial},
          {"aborted", m.aborted},
          {"abort_cause", std::string(to_string(r.abort_cause))},
          {"duration", m.duration},
          {"delays", delays},
          {"served", m.served_count},
          {"total", m.total_patients},
          {"rho", m.rho},
          {"lambda_sw", m.lambda_sw},
          {"lambda_int", m.lambda_int},
          {"W", m.workload}};
}

inline TrialRecord trial_from_json(const json& j) {
  TrialRecord r;
  auto p = parse_policy(j.at("policy").get<std::string>());
  if (!p) throw IoError("unknown policy in trials file");
  r.policy = *p;
  r.delta = j.at("delta").get<double>();
  r.load = j.at("load").get<std::size_t>();
  r.condition_index = j.at("condition").get<std::size_t>();
  r.trial = j.at("trial").get<std::size_t>();
  r.abort_cause = parse_abort_cause(j.at("abort_cause").get<std::string>());
  auto& m = r.metrics;
  m.aborted = j.at("aborted").get<bool>();
  m.duration = j.at("duration").get<double>();
  for (const auto& d : j.at("delays"))
    m.high_severity_delays.push_back(
        {d.at("patient").get<PatientId>(), d.at("delay").get<double>(), d.at("censored").get<bool>()});
  m.served_count = j.at("served").get<std::size_t>();
  m.total_patients = j.at("total").get<std::size_t>();
  m.rho = j.at("rho").get<double>();
  m.lambda_sw = j.at("lambda_sw").get<double>();
  m.lambda_int = j.at("lambda_int").get<double>();
  m.workload = j.at("W").get<double>();
  return r;
}

/// Reads a trials file written by emit_reports in either format.
inline std::vector<TrialRecord> read_trials_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  if (path.extension() == ".json") {
    const json doc = json::parse(in);
    std::vector<TrialRecord> out;
    for (const auto& j : doc.at("trials")) out.push_back(trial_from_json(j));
    return out;
  }
  return read_trials_csv(in);
}

// ---- summaries, rollup, pareto -------------------------------------------

inline json to_json(const MetricSummary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"sd", s.sd}, {"ci_lo", s.ci_lo}, {"ci_hi", s.ci_hi}};
}

inline json to_json(const FiveNumber& f) {
  return {{"min", f.min}, {"q1", f.q1}, {"median", f.median}, {"q3", f.q3}, {"max", f.max}};
}

inline json to_json(const std::optional<DelayQuantiles>& q) {
  if (!q) return nullptr;
  return {{"median", q->median}, {"p90", q->p90}, {"p95", q->p95}};
}

inline json to_json(const ConditionSummary& s) {
  return {{"policy", std::string(to_string(s.policy))},
          {"condition", s.condition_index},
          {"delta", s.delta},
          {"load", s.load},
          {"trials", s.trials},
          {"T_int_mean", s.vector.T_int_mean},
          {"rho", s.vector.rho},
          {"R_fail", s.vector.R_fail},
          {"W_mean", s.vector.W_mean},
          {"delay_count", s.vector.delay_count},
          {"effective_success", effective_success(s.vector)},
          {"mean_duration", s.duration.mean},
          {"stats",
           {{"T_int", s.t_int ? to_json(*s.t_int) : json(nullptr)},
            {"rho", to_json(s.rho)},
            {"R_fail", to_json(s.failure)},
            {"W", to_json(s.workload)},
            {"duration", to_json(s.duration)}}},
          {"delay_quantiles", to_json(s.delay_quantiles)},
          {"delay_box", s.delay_box ? to_json(*s.delay_box) : json(nullptr)},
          {"workload_box", to_json(s.workload_box)}};
}

inline json to_json(const PolicyRollup& r) {
  return {{"policy", std::string(to_string(r.policy))},
          {"trials", r.trials},
          {"T_int", r.vector.T_int_mean},
          {"rho", r.vector.rho},
          {"R_fail", r.vector.R_fail},
          {"W", r.vector.W_mean},
          {"mission_time", r.mission_time},
          {"delay_quantiles", to_json(r.delay_quantiles)}};
}

inline json to_json(const ParetoEntry& e) {
  return {{"scope", e.scope_condition ? json(*e.scope_condition) : json("pooled")},
          {"policy", std::string(to_string(e.point.policy))},
          {"condition", e.point.condition_index},
          {"delta", e.point.delta},
          {"load", e.point.load},
          {"x", e.point.x},
          {"y", e.point.y},
          {"size", e.point.size},
          {"on_front", e.on_front}};
}

inline std::string opt_fmt(const std::optional<DelayQuantiles>& q, double DelayQuantiles::*field) {
  return q ? fmt((*q).*field) : std::string();
}

inline std::string rollup_csv(const std::vector<PolicyRollup>& rollup) {
  std::string out = "policy,trials,T_int,rho,R_fail,W,mission_time,delay_median,delay_p90,delay_p95\n";
  for (const auto& r : rollup) {
    out += std::string(to_string(r.policy)) + ',' + std::to_string(r.trials) + ',' + fmt(r.vector.T_int_mean) +
           ',' + fmt(r.vector.rho) + ',' + fmt(r.vector.R_fail) + ',' + fmt(r.vector.W_mean) + ',' +
           fmt(r.mission_time) + ',' + opt_fmt(r.delay_quantiles, &DelayQuantiles::median) + ',' +
           opt_fmt(r.delay_quantiles, &DelayQuantiles::p90) + ',' +
           opt_fmt(r.delay_quantiles, &DelayQuantiles::p95) + '\n';
  }
  return out;
}

inline std::string pareto_csv(const std::vector<ParetoEntry>& entries) {
  std::string out = "scope,policy,condition,delta,load,x,y,size,on_front\n";
  for (const auto& e : entries) {
    out += (e.scope_condition ? std::to_string(*e.scope_condition) : std::string("pooled")) + ',' +
           std::string(to_string(e.point.policy)) + ',' + std::to_string(e.point.condition_index) + ',' +
           fmt(e.point.delta) + ',' + std::to_string(e.point.load) + ',' + fmt(e.point.x) + ',' +
           fmt(e.point.y) + ',' + fmt(e.point.size) + ',' + (e.on_front ? "1" : "0") + '\n';
  }
  return out;
}

inline std::string trials_csv(const std::vector<TrialRecord>& trials) {
  std::string out(kTrialsHeader);
  out += '\n';
  for (const auto& t : trials) {
    out += trial_row(t);
    out += '\n';
  }
  return out;
}

struct RunInfo {
  std::optional<SweepConfig> config;  // absent for `report` runs
  double wall_time_seconds = 0.0;
};

struct EmittedFiles {
  std::filesystem::path trials, summary, rollup, pareto, manifest;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

/// Writes trials, summary, policy rollup, pareto and manifest files into `dir`.
inline EmittedFiles emit_reports(const SweepResult& r, OutputFormat format, const std::filesystem::path& dir,
                                 const RunInfo& info = {}) {
  if (r.trials.empty()) throw std::invalid_argument("emit_reports: no results");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const bool csv = format == OutputFormat::csv;
  EmittedFiles files{dir / (csv ? "trials.csv" : "trials.json"), dir / "summary.json",
                     dir / (csv ? "policy_rollup.csv" : "policy_rollup.json"),
                     dir / (csv ? "pareto.csv" : "pareto.json"), dir / "manifest.json"};

  if (csv) {
    write_file(files.trials, trials_csv(r.trials));
    write_file(files.rollup, rollup_csv(r.rollup));
    write_file(files.pareto, pareto_csv(r.pareto));
  } else {
    json t = json::array(), ro = json::array(), pa = json::array();
    for (const auto& x : r.trials) t.push_back(trial_json(x));
    for (const auto& x : r.rollup) ro.push_back(to_json(x));
    for (const auto& x : r.pareto) pa.push_back(to_json(x));
    write_file(files.trials, json{{"trials", t}}.dump(1) + '\n');
    write_file(files.rollup, json{{"policies", ro}}.dump(1) + '\n');
    write_file(files.pareto, json{{"points", pa}}.dump(1) + '\n');
  }

  json cells = json::array();
  for (const auto& s : r.summaries) cells.push_back(to_json(s));
  write_file(files.summary, json{{"cells", cells}}.dump(1) + '\n');

  json manifest = {{"version", std::string(kVersionTag)},
                   {"total_missions", r.trials.size()},
                   {"summary_rows", r.summaries.size()},
                   {"files",
                    {files.trials.filename().string(), files.summary.filename().string(),
                     files.rollup.filename().string(), files.pareto.filename().string()}},
                   {"wall_time_seconds", info.wall_time_seconds}};
  if (info.config) {
    manifest["master_seed"] = info.config->master_seed;
    manifest["config"] = to_json(*info.config);
  }
  write_file(files.manifest, manifest.dump(1) + '\n');
  return files;
}

}  // namespace medsim
