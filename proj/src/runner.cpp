#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nlsflow/error.hpp"
#include "nlsflow/experiments.hpp"
#include "nlsflow/kernels.hpp"

#ifndef NLSFLOW_VERSION
#define NLSFLOW_VERSION "unknown"
#endif

namespace nlsflow {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void save(const fs::path& dir, const RunRecord& r) { write_file_atomic(dir / kRecordFile, record_to_json(r)); }

}  // namespace

RunRecord run(const ExperimentConfig& config) {
  RunRecord r;
  r.status = "running";
  r.code_version = NLSFLOW_VERSION;
  r.started = utc_now();
  r.config = config;
  r.config_hash = config_hash(config);
  const fs::path dir = config.output.empty() ? fs::path("runs") / config.experiment : fs::path(config.output);
  fs::create_directories(dir);
  save(dir, r);

  std::string stage = "config";
  try {
    validate(config);
    stage = "simulate";
    const auto out = simulate(config);
    stage = "write";
    for (const auto& [name, table] : out.tables) {
      const auto file = name + ".csv";
      const auto text = table.to_string();
      write_file_atomic(dir / file, text);
      r.artifacts[name] = file;
      r.artifact_hashes[file] = fnv1a_hex(text);
    }
    r.timings = out.timings;
    stage = "evaluate";
    r.verdicts = evaluate(config, out.tables, out.timings);
    r.status = "complete";
  } catch (const Error& e) {
    r.status = "failed";
    r.failed_stage = stage + "/" + e.stage();
    r.error = e.what();
  } catch (const std::exception& e) {
    r.status = "failed";
    r.failed_stage = stage;
    r.error = e.what();
  }
  r.finished = utc_now();
  save(dir, r);
  return r;
}

SweepAxis sweep_axis_from_name(std::string_view name) {
  if (name == "sigma") return SweepAxis::Sigma;
  if (name == "dt") return SweepAxis::Dt;
  if (name == "N" || name == "points") return SweepAxis::Points;
  if (name == "L" || name == "half_length") return SweepAxis::HalfLength;
  throw ConfigError("sweep axis must be sigma, dt, N or L");
}

std::string_view sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Sigma:
      return "sigma";
    case SweepAxis::Dt:
      return "dt";
    case SweepAxis::Points:
      return "N";
    case SweepAxis::HalfLength:
      return "L";
  }
  return "?";
}

ExperimentConfig sweep_point(const ExperimentConfig& base, SweepAxis axis, double value, std::size_t index) {
  auto c = base;
  switch (axis) {
    case SweepAxis::Sigma:
      c.sigma = {value};
      break;
    case SweepAxis::Dt:
      c.time.dt = value;
      if (c.time.dt_growth > 0.0) c.time.dt_max = std::max(c.time.dt_max, value);
      break;
    case SweepAxis::Points:
      if (value != std::round(value)) throw ConfigError("N must be an integer");
      c.grid.points = static_cast<int>(value);
      break;
    case SweepAxis::HalfLength:
      c.grid.half_length = value;
      break;
  }
  c.output = (fs::path(base.output) / (std::string(sweep_axis_name(axis)) + "_" + std::to_string(index))).string();
  return c;
}

SweepResult sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values, int jobs) {
  SweepResult res;
  res.records.resize(values.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&](bool single_threaded) {
    if (single_threaded) kernels::set_thread_limit(1);
    for (std::size_t i = next++; i < values.size(); i = next++) {
      ExperimentConfig c;
      try {
        c = sweep_point(base, axis, values[i], i);
      } catch (const Error& e) {
        res.records[i].status = "failed";
        res.records[i].failed_stage = "config/" + e.stage();
        res.records[i].error = e.what();
        continue;
      }
      // run() records its own failures; one bad point never stops the others.
      res.records[i] = run(c);
    }
  };
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
  if (jobs == 1) {
    worker(false);
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker, true);
    for (auto& t : pool) t.join();
  }

  // Verdict values side by side, matched by position against the first completed run.
  std::vector<std::string> checks;
  for (const auto& r : res.records)
    if (r.status == "complete") {
      for (const auto& v : r.verdicts) checks.push_back(v.id + " " + v.check);
      break;
    }
  auto& t = res.table;
  t.columns = {"value", "ok", "passed", "failed"};
  for (std::size_t j = 0; j < checks.size(); ++j) t.columns.push_back("check_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < checks.size(); ++j) t.columns.push_back("change_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < checks.size(); ++j) t.columns.push_back("ratio_" + std::to_string(j + 1));
  std::vector<double> prev(checks.size(), NAN), prev_change(checks.size(), NAN);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& r = res.records[i];
    const bool ok = r.status == "complete" && r.verdicts.size() == checks.size();
    const auto passed = std::count_if(r.verdicts.begin(), r.verdicts.end(), [](const Verdict& v) { return v.pass; });
    std::vector<double> row{values[i], ok ? 1.0 : 0.0, double(passed), double(r.verdicts.size() - passed)};
    std::vector<double> vals(checks.size(), NAN), change(checks.size(), NAN), ratio(checks.size(), NAN);
    for (std::size_t j = 0; ok && j < checks.size(); ++j) {
      vals[j] = r.verdicts[j].value;
      change[j] = std::abs(vals[j] - prev[j]);
      // Successive changes shrink by 4 under dt halving for a second-order observable.
      ratio[j] = prev_change[j] / change[j];
    }
    row.insert(row.end(), vals.begin(), vals.end());
    row.insert(row.end(), change.begin(), change.end());
    row.insert(row.end(), ratio.begin(), ratio.end());
    t.rows.push_back(std::move(row));
    prev = vals;
    prev_change = change;
  }
  const fs::path dir(base.output);
  fs::create_directories(dir);
  write_file_atomic(dir / "sweep.csv", t.to_string());
  nlohmann::ordered_json index;
  index["experiment"] = base.experiment;
  index["axis"] = sweep_axis_name(axis);
  index["values"] = std::vector<double>(values.begin(), values.end());
  index["checks"] = checks;
  std::vector<std::string> runs;
  for (const auto& r : res.records) runs.push_back(r.config.output);
  index["runs"] = runs;
  write_file_atomic(dir / "sweep.json", index.dump(2) + "\n");
  return res;
}

bool VerifySummary::all_pass() const {
  return flipped.empty() && modified.empty() && !verdicts.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string VerifySummary::to_string() const {
  std::ostringstream os;
  for (const auto& v : verdicts)
    os << (v.pass ? "PASS " : "FAIL ") << v.id << " | " << v.check << " | value " << format_number(v.value)
       << " | threshold " << format_number(v.threshold) << "\n";
  for (const auto& f : flipped) os << "FLIPPED " << f << "\n";
  for (const auto& m : modified) os << "MODIFIED " << m << "\n";
  os << (all_pass() ? "verified: all checks pass\n" : "verified: failures present\n");
  return os.str();
}

VerifySummary verify(const fs::path& record_path) {
  const fs::path file = fs::is_directory(record_path) ? record_path / kRecordFile : record_path;
  if (!fs::exists(file)) throw VerificationError("no run record at " + file.string());
  const auto record = record_from_json(read_file(file));
  if (record.status != "complete") throw VerificationError("record status is '" + record.status + "', not complete");
  const auto dir = file.parent_path();
  Tables tables;
  VerifySummary s;
  for (const auto& [name, artifact] : record.artifacts) {
    const auto path = dir / artifact;
    if (!fs::exists(path)) throw VerificationError("missing artifact " + path.string());
    const auto text = read_file(path);
    const auto it = record.artifact_hashes.find(artifact);
    if (it == record.artifact_hashes.end() || it->second != fnv1a_hex(text)) s.modified.push_back(artifact);
    try {
      tables[name] = parse_csv(text);
    } catch (const Error& e) {
      throw VerificationError("artifact " + artifact + " unreadable: " + e.what());
    }
  }
  s.verdicts = evaluate(record.config, tables, record.timings);
  const auto n = std::max(s.verdicts.size(), record.verdicts.size());
  for (std::size_t i = 0; i < n; ++i) {
    const bool have_new = i < s.verdicts.size(), have_old = i < record.verdicts.size();
    if (have_new && have_old && s.verdicts[i].id == record.verdicts[i].id &&
        s.verdicts[i].pass == record.verdicts[i].pass)
      continue;
    const auto& v = have_new ? s.verdicts[i] : record.verdicts[i];
    s.flipped.push_back(v.id + " " + v.check + (have_old ? (record.verdicts[i].pass ? " (was PASS)" : " (was FAIL)") : " (new)"));
  }
  return s;
}

}  // namespace nlsflow
