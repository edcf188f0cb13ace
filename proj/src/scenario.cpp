#include "contactlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace contactlab {

namespace {

// Shortest round-trip decimal representation, so serialized reports are
// deterministic byte for byte.
std::string dtos(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool relation_holds(const CheckRecord& c) {
  if (c.relation == "<=") return c.measured <= c.tolerance;
  if (c.relation == ">=") return c.measured >= c.tolerance;
  if (c.relation == "recorded") return true;
  throw std::logic_error("check relation '" + c.relation + "' unknown");
}

nlohmann::ordered_json to_json_doc(const Report& r) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = r.schema_version;
  doc["scenario"] = r.scenario;
  doc["anchor"] = r.anchor;
  doc["description"] = r.description;
  doc["expectation"] = outcome_label(r.expectation);
  doc["checks_pass"] = r.checks_pass();
  doc["satisfied"] = r.satisfied();
  nlohmann::ordered_json env;
  env["samples"] = r.config.samples;
  env["seed"] = r.config.seed;
  env["step"] = r.config.step;
  env["tol_scale"] = r.config.tol_scale;
  env["backend"] = r.backend;
  doc["environment"] = std::move(env);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  doc["parameters"] = std::move(params);
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["anchor"] = c.anchor;
    jc["measured"] = c.measured;
    jc["tolerance"] = c.tolerance;
    jc["relation"] = c.relation;
    jc["pass"] = c.pass;
    checks.push_back(std::move(jc));
  }
  doc["checks"] = std::move(checks);
  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& s : r.series) {
    nlohmann::ordered_json js;
    js["name"] = s.name;
    js["columns"] = s.columns;
    js["rows"] = static_cast<std::uint64_t>(s.rows.size());
    series.push_back(std::move(js));
  }
  doc["series"] = std::move(series);
  doc["wall_time_ms"] = r.wall_time_ms;
  return doc;
}

}  // namespace

std::string outcome_label(Outcome o) {
  switch (o) {
    case Outcome::pass: return "pass";
    case Outcome::expected_fail: return "expected-fail";
    case Outcome::measured: return "measured";
  }
  return "pass";
}

bool Report::checks_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.pass; });
}

bool Report::satisfied() const {
  if (expectation == Outcome::expected_fail) return !checks_pass();
  return checks_pass();
}

void CheckSet::le(const std::string& id, double measured, double tolerance) {
  CheckRecord c{id, anchor, measured, tolerance * tol_scale, "<=", false};
  c.pass = relation_holds(c);
  records.push_back(std::move(c));
}

void CheckSet::ge(const std::string& id, double measured, double bound) {
  CheckRecord c{id, anchor, measured, bound, ">=", false};
  c.pass = relation_holds(c);
  records.push_back(std::move(c));
}

void CheckSet::flag(const std::string& id, bool ok) {
  CheckRecord c{id, anchor, ok ? 1.0 : 0.0, 1.0, ">=", ok};
  records.push_back(std::move(c));
}

void CheckSet::recorded(const std::string& id, double measured) {
  records.push_back(CheckRecord{id, anchor, measured, 0.0, "recorded", true});
}

std::string report_json(const Report& r) { return to_json_doc(r).dump(2) + "\n"; }

std::string report_json_stable(const Report& r) {
  Report copy = r;
  copy.wall_time_ms = 0.0;
  return report_json(copy);
}

std::string report_csv(const Report& r) {
  std::string out = "check,anchor,measured,tolerance,relation,pass\n";
  for (const auto& c : r.checks) {
    out += c.id + "," + c.anchor + "," + dtos(c.measured) + "," + dtos(c.tolerance) +
           "," + c.relation + "," + (c.pass ? "1" : "0") + "\n";
  }
  return out;
}

void ScenarioRegistry::add(ScenarioInfo info, Runner runner) {
  if (index_.count(info.name))
    throw std::logic_error("scenario '" + info.name + "' registered twice");
  if (info.anchor.empty())
    throw std::logic_error("scenario '" + info.name + "' carries no anchor");
  if (!anchor_index().count(info.anchor))
    throw std::logic_error("scenario '" + info.name + "' anchor '" + info.anchor +
                           "' missing from the anchor index");
  index_[info.name] = infos_.size();
  infos_.push_back(std::move(info));
  runners_.push_back(std::move(runner));
}

bool ScenarioRegistry::contains(const std::string& name) const {
  return index_.count(name) > 0;
}

Report ScenarioRegistry::run(const std::string& name,
                             const ScenarioConfig& overrides) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    std::string names;
    for (const auto& info : infos_) names += "\n  " + info.name;
    throw UsageError("unknown scenario '" + name + "'; registered names:" + names);
  }
  if (overrides.samples < 0)
    throw UsageError("invalid override: samples must be >= 0 (keys: samples, seed, step, tol_scale)");
  if (overrides.step < 0.0 || overrides.step > 0.5)
    throw UsageError("invalid override: step must lie in [0, 0.5] (keys: samples, seed, step, tol_scale)");
  if (!(overrides.tol_scale > 0.0))
    throw UsageError("invalid override: tol_scale must be > 0 (keys: samples, seed, step, tol_scale)");

  const ScenarioInfo& info = infos_[it->second];
  Report r;
  r.scenario = info.name;
  r.anchor = info.anchor;
  r.description = info.description;
  r.expectation = info.expectation;
  r.config = overrides;

  auto t0 = std::chrono::steady_clock::now();
  runners_[it->second](overrides, r);
  auto t1 = std::chrono::steady_clock::now();
  r.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

  std::sort(r.checks.begin(), r.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  return r;
}

std::vector<ScenarioInfo> list_scenarios() { return default_registry().entries(); }

Report run_scenario(const std::string& name, const ScenarioConfig& overrides) {
  return default_registry().run(name, overrides);
}

std::vector<std::string> export_plotdata(const Report& r, const std::string& dir,
                                         std::ostream* warn) {
  std::vector<std::string> written;
  if (r.series.empty()) {
    if (warn) *warn << "warning: report for '" << r.scenario
                    << "' carries no plottable payload, nothing written\n";
    return written;
  }
  std::filesystem::create_directories(dir);
  for (const auto& s : r.series) {
    std::filesystem::path path =
        std::filesystem::path(dir) / (r.scenario + "-" + s.name + ".csv");
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw std::runtime_error("export_plotdata: cannot write " + path.string());
    for (size_t i = 0; i < s.columns.size(); ++i)
      out << (i ? "," : "") << s.columns[i];
    out << "\n";
    for (const auto& row : s.rows) {
      for (size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << dtos(row[i]);
      out << "\n";
    }
    written.push_back(path.string());
  }
  return written;
}

}  // namespace contactlab
