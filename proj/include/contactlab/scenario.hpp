#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace contactlab {

// Bad scenario names and malformed overrides are usage errors (CLI exit 2);
// anything thrown while a scenario evaluates is an evaluation error (exit 3).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioConfig {
  int samples = 0;        // 0 keeps the scenario default
  std::uint64_t seed = 0;
  double step = 0.0;      // integrator step in path-parameter units, 0 = default
  double tol_scale = 1.0; // multiplies upper-bound tolerances
};

struct CheckRecord {
  std::string id;
  std::string anchor;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation = "<=";  // one of <=, >=, recorded
  bool pass = false;
};

// Numeric table destined for one CSV file.
struct PlotSeries {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

enum class Outcome { pass, expected_fail, measured };

std::string outcome_label(Outcome o);

struct Report {
  int schema_version = 1;
  std::string scenario;
  std::string anchor;
  std::string description;
  Outcome expectation = Outcome::pass;
  ScenarioConfig config;                      // resolved values actually used
  std::map<std::string, double> parameters;   // provenance: builder parameters
  std::string backend = "dual";
  std::vector<CheckRecord> checks;            // sorted by id before emission
  std::vector<PlotSeries> series;
  double wall_time_ms = 0.0;

  bool checks_pass() const;
  // pass / measured expect all checks green; expected-fail expects a red one.
  bool satisfied() const;
};

// Record builder used by scenario bodies; `le` tolerances stretch with
// tol_scale, lower bounds and flags do not.
struct CheckSet {
  std::string anchor;
  double tol_scale = 1.0;
  std::vector<CheckRecord> records;

  void le(const std::string& id, double measured, double tolerance);
  void ge(const std::string& id, double measured, double bound);
  void flag(const std::string& id, bool ok);
  void recorded(const std::string& id, double measured);
};

std::string report_json(const Report& r);
// Same document with the wall-time field zeroed; two runs with identical
// config must agree byte for byte here.
std::string report_json_stable(const Report& r);
std::string report_csv(const Report& r);

struct ScenarioInfo {
  std::string name;
  std::string anchor;
  std::string description;
  Outcome expectation = Outcome::pass;
};

class ScenarioRegistry {
 public:
  using Runner = std::function<void(const ScenarioConfig&, Report&)>;

  void add(ScenarioInfo info, Runner runner);
  const std::vector<ScenarioInfo>& entries() const { return infos_; }
  bool contains(const std::string& name) const;
  Report run(const std::string& name, const ScenarioConfig& overrides) const;

 private:
  std::vector<ScenarioInfo> infos_;
  std::vector<Runner> runners_;
  std::map<std::string, std::size_t> index_;
};

// Built-in registry; construction order is the stable listing order.
const ScenarioRegistry& default_registry();

// Anchor string -> one-line locator for the statement a check targets.
const std::map<std::string, std::string>& anchor_index();

std::vector<ScenarioInfo> list_scenarios();
Report run_scenario(const std::string& name, const ScenarioConfig& overrides = {});

// One CSV per series under dir (created if missing), LF line endings.
// Returns the paths written; empty payload writes nothing and warns.
std::vector<std::string> export_plotdata(const Report& r, const std::string& dir,
                                         std::ostream* warn = nullptr);

}  // namespace contactlab
