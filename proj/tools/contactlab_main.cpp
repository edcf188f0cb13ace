#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "contactlab/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEvaluation = 3;

struct RunFlags {
  int samples = 0;
  std::uint64_t seed = 0;
  double step = 0.0;
  double tol_scale = 1.0;
  std::string config_file;
  std::string out_file;
  std::string format = "json";
  std::string plot_dir;
};

void add_override_options(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--samples", f.samples, "sample count override (0 keeps defaults)");
  cmd->add_option("--seed", f.seed, "seed for every sampler (default 0)");
  cmd->add_option("--step", f.step,
                  "integrator step in path-parameter units (0 keeps defaults)");
  cmd->add_option("--tol-scale", f.tol_scale, "stretch upper-bound tolerances");
  cmd->add_option("--config", f.config_file,
                  "JSON override file; keys mirror the flags: samples, seed, step, tol_scale");
  cmd->add_option("--out", f.out_file, "write the report here instead of stdout");
  cmd->add_option("--format", f.format, "report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--plot", f.plot_dir, "directory for CSV plot payload export");
}

// CLI flags win over config-file values, which win over defaults.
contactlab::ScenarioConfig resolve_config(const CLI::App* cmd, const RunFlags& f) {
  contactlab::ScenarioConfig cfg;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw contactlab::UsageError("cannot read config file " + f.config_file);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw contactlab::UsageError("config file is not valid JSON: " +
                                   std::string(e.what()));
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "samples") cfg.samples = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "step") cfg.step = value.get<double>();
      else if (key == "tol_scale") cfg.tol_scale = value.get<double>();
      else
        throw contactlab::UsageError(
            "unknown config key '" + key +
            "' (valid keys: samples, seed, step, tol_scale)");
    }
  }
  if (cmd->count("--samples")) cfg.samples = f.samples;
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--step")) cfg.step = f.step;
  if (cmd->count("--tol-scale")) cfg.tol_scale = f.tol_scale;
  return cfg;
}

void emit(const std::string& text, const std::string& out_file) {
  if (out_file.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_file);
  out << text;
}

int do_list() {
  size_t name_w = 4;
  for (const auto& info : contactlab::list_scenarios())
    name_w = std::max(name_w, info.name.size());
  for (const auto& info : contactlab::list_scenarios()) {
    std::string name = info.name;
    name.resize(name_w, ' ');
    std::cout << name << "  [" << info.anchor << "]  " << info.description;
    if (info.expectation != contactlab::Outcome::pass)
      std::cout << "  (" << contactlab::outcome_label(info.expectation) << ")";
    std::cout << "\n";
  }
  return kExitOk;
}

int do_run(const std::string& name, const CLI::App* cmd, const RunFlags& f) {
  contactlab::ScenarioConfig cfg = resolve_config(cmd, f);
  contactlab::Report report = contactlab::run_scenario(name, cfg);
  emit(f.format == "csv" ? contactlab::report_csv(report)
                         : contactlab::report_json(report),
       f.out_file);
  if (!f.plot_dir.empty()) contactlab::export_plotdata(report, f.plot_dir, &std::cerr);
  return report.satisfied() ? kExitOk : kExitCheckFailure;
}

int do_run_all(const CLI::App* cmd, const RunFlags& f) {
  contactlab::ScenarioConfig cfg = resolve_config(cmd, f);
  bool all_ok = true;
  nlohmann::ordered_json combined = nlohmann::ordered_json::array();
  for (const auto& info : contactlab::list_scenarios()) {
    contactlab::Report report = contactlab::run_scenario(info.name, cfg);
    all_ok = all_ok && report.satisfied();
    std::cout << (report.satisfied() ? "ok   " : "FAIL ") << info.name;
    if (info.expectation != contactlab::Outcome::pass)
      std::cout << " [" << contactlab::outcome_label(info.expectation) << "]";
    std::cout << "  (" << static_cast<long>(report.wall_time_ms) << " ms)\n";
    if (!f.out_file.empty())
      combined.push_back(nlohmann::ordered_json::parse(contactlab::report_json(report)));
    if (!f.plot_dir.empty()) contactlab::export_plotdata(report, f.plot_dir, &std::cerr);
  }
  if (!f.out_file.empty()) emit(combined.dump(2) + "\n", f.out_file);
  return all_ok ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contactlab: named verification scenarios over the form catalog"};
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "print the scenario registry");

  RunFlags run_flags;
  std::string run_name;
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and emit its report");
  run_cmd->add_option("name", run_name, "scenario name")->required();
  add_override_options(run_cmd, run_flags);

  RunFlags all_flags;
  CLI::App* all_cmd = app.add_subcommand("run-all", "run every registered scenario");
  add_override_options(all_cmd, all_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (list_cmd->parsed()) return do_list();
    if (run_cmd->parsed()) return do_run(run_name, run_cmd, run_flags);
    if (all_cmd->parsed()) return do_run_all(all_cmd, all_flags);
    std::cerr << "no subcommand\n";
    return kExitUsage;
  } catch (const contactlab::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return kExitEvaluation;
  }
}
