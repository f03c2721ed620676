// nlslab: run, sweep, verify and list the named experiments.
// Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 execution error.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nlsflow/error.hpp"
#include "nlsflow/experiments.hpp"
#include "nlsflow/io.hpp"

using namespace nlsflow;

namespace {

struct Common {
  std::string config;
  std::string experiment;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

ExperimentConfig load(const Common& o) {
  ExperimentConfig c;
  if (!o.config.empty())
    c = config_from_json(read_file(o.config));
  else if (!o.experiment.empty())
    c = default_config(o.experiment);
  else
    throw ConfigError("give --config PATH or --experiment NAME");
  if (!o.experiment.empty() && o.experiment != c.experiment)
    throw ConfigError("--experiment " + o.experiment + " disagrees with the config (" + c.experiment + ")");
  if (!o.out.empty()) c.output = o.out;
  if (o.seed) c.seed = *o.seed;
  validate(c);
  return c;
}

void print_verdicts(const std::vector<Verdict>& verdicts) {
  for (const auto& v : verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.id << " | " << v.check << " | value " << format_number(v.value)
              << " | threshold " << format_number(v.threshold) << "\n";
}

int report(const RunRecord& r) {
  if (r.status != "complete") {
    std::cerr << "run failed at stage " << r.failed_stage << ": " << r.error << "\n";
    return 2;
  }
  print_verdicts(r.verdicts);
  return r.all_pass() ? 0 : 1;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad sweep value '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void add_common(CLI::App* cmd, Common& o) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--experiment", o.experiment, "experiment name (defaults are used when no config is given)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nlslab: experiments on the rescaled and logarithmic Schrodinger flows"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run_cmd = app.add_subcommand("run", "run one experiment and write its record and tables");
  add_common(run_cmd, run_opts);
  bool print_config = false;
  run_cmd->add_flag("--print-config", print_config, "print the materialized config and exit");

  Common sweep_opts;
  std::string axis, values;
  int jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "independent runs along one parameter");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "sigma, dt, N or L")->required();
  sweep_cmd->add_option("--values", values, "comma-separated values")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs (each single-threaded)")->check(CLI::PositiveNumber);

  std::string record;
  auto* verify_cmd = app.add_subcommand("verify", "re-evaluate a run record from its stored tables");
  verify_cmd->add_option("record", record, "record.json or its run directory")->required();

  auto* list_cmd = app.add_subcommand("list", "list experiments and the checks they evaluate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      const auto c = load(run_opts);
      if (print_config) {
        std::cout << config_to_json(c);
        return 0;
      }
      return report(run(c));
    }
    if (*sweep_cmd) {
      const auto c = load(sweep_opts);
      const auto res = sweep(c, sweep_axis_from_name(axis), parse_values(values), jobs);
      int code = 0;
      for (const auto& r : res.records) {
        std::cout << "== " << r.config.output << " (" << r.status << ")\n";
        if (r.status != "complete") {
          std::cout << "   failed at " << r.failed_stage << ": " << r.error << "\n";
          code = 2;
          continue;
        }
        print_verdicts(r.verdicts);
        if (!r.all_pass() && code == 0) code = 1;
      }
      std::cout << res.table.to_string();
      return code;
    }
    if (*verify_cmd) {
      const auto s = verify(record);
      std::cout << s.to_string();
      return s.all_pass() ? 0 : 1;
    }
    if (*list_cmd) {
      for (const auto& e : experiment_catalog()) {
        std::cout << e.name << " [";
        for (std::size_t i = 0; i < e.checks.size(); ++i) std::cout << (i ? ", " : "") << e.checks[i];
        std::cout << "]  " << e.summary << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
