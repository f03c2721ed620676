#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlsflow/io.hpp"

// Named experiments, their configuration documents and run records.
//
// Every experiment is split in two: simulate() produces CSV tables, evaluate()
// turns tables into verdicts. verify() re-runs only the second half on the
// stored files.
namespace nlsflow {

struct GridSpec {
  int dim = 1;
  int points = 1024;
  double half_length = 30.0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Observation times: "uniform" gives t0, 2 t0, ... and "geometric" gives
// t0 ratio^j (ratio 2 is the dyadic grid), both up to t_max. dt_growth > 0
// switches to dt_n = clamp(dt_growth t_n, dt, dt_max).
struct TimeSpec {
  double dt = 1e-3;
  double dt_growth = 0.0;
  double dt_max = 0.0;
  std::string schedule = "uniform";
  double t0 = 1.0;
  double ratio = 2.0;
  double t_max = 1.0;

  friend bool operator==(const TimeSpec&, const TimeSpec&) = default;
};

// Gaussian datum of L2 norm `amplitude` and width width (1 + width_shift sigma),
// so ||phi_sigma - phi_0|| = O(sigma) when width_shift != 0. amplitude 0 asks
// for the small-data amplitude (Picard ratio 0.1 over the free flow to t = 16).
struct DatumSpec {
  double width = 1.0;
  double amplitude = 1.0;
  double width_shift = 0.0;

  friend bool operator==(const DatumSpec&, const DatumSpec&) = default;
};

struct ExperimentConfig {
  std::string experiment;
  std::string units = "hbar = m = 1; x, t dimensionless";
  GridSpec grid;
  TimeSpec time;
  std::vector<double> sigma;
  std::vector<double> nu_offsets;
  DatumSpec datum;
  double log_floor = 1e-12;
  std::uint64_t seed = 1;
  std::int64_t samples = 0;
  // Experiment-specific lists; the allowed keys depend on the experiment.
  std::map<std::string, std::vector<double>> params;
  std::string output;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ExperimentInfo {
  std::string name;
  std::vector<std::string> checks;  // acceptance criterion IDs
  std::string summary;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& experiment_info(std::string_view name);

ExperimentConfig default_config(std::string_view experiment);

// Missing keys take the experiment's defaults; unknown keys, wrong types and
// values outside the experiment's validity window throw ConfigError.
ExperimentConfig config_from_json(std::string_view text);
// Canonical document with every default written out.
std::string config_to_json(const ExperimentConfig& config);
// FNV-1a 64 of the canonical document without its output directory, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

// Observation times of a schedule (t_max included when the schedule lands on it).
std::vector<double> schedule_times(const TimeSpec& time);

struct Verdict {
  std::string id;     // acceptance criterion, "AC-n"
  std::string check;  // what was measured
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

using Tables = std::map<std::string, CsvTable>;
using Timings = std::map<std::string, double>;

struct ExperimentOutput {
  Tables tables;
  Timings timings;  // wall-clock seconds; kept out of the CSVs so those stay byte-identical
};

ExperimentOutput simulate(const ExperimentConfig& config);
std::vector<Verdict> evaluate(const ExperimentConfig& config, const Tables& tables, const Timings& timings);

struct RunRecord {
  std::string status;  // "running", "complete" or "failed"
  std::string config_hash;
  std::string code_version;
  std::string started;
  std::string finished;
  ExperimentConfig config;
  std::map<std::string, std::string> artifacts;        // table name -> file name
  std::map<std::string, std::string> artifact_hashes;  // file name -> FNV-1a 64
  Timings timings;
  std::vector<Verdict> verdicts;
  std::string failed_stage;
  std::string error;

  bool all_pass() const;
};

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(std::string_view text);

inline constexpr const char* kRecordFile = "record.json";

// Runs the experiment into config.output. The record is written first with
// status "running" and replaced atomically at the end; failures are recorded
// with their stage instead of thrown.
RunRecord run(const ExperimentConfig& config);

enum class SweepAxis { Sigma, Dt, Points, HalfLength };
SweepAxis sweep_axis_from_name(std::string_view name);
std::string_view sweep_axis_name(SweepAxis axis);

ExperimentConfig sweep_point(const ExperimentConfig& base, SweepAxis axis, double value, std::size_t index);

struct SweepResult {
  std::vector<RunRecord> records;
  CsvTable table;  // value, ok, passed, failed, then each verdict value and its change between neighbours
};

// Independent runs in base.output/<axis>_<index>; with jobs > 1 they run
// concurrently, each single-threaded. Writes sweep.csv into base.output.
SweepResult sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values, int jobs = 1);

struct VerifySummary {
  std::vector<Verdict> verdicts;        // re-evaluated
  std::vector<std::string> flipped;     // checks whose pass/fail differs from the record
  std::vector<std::string> modified;    // artifacts whose hash differs from the record
  bool all_pass() const;
  std::string to_string() const;
};

// Re-evaluates a completed record from its CSV files. Throws VerificationError
// for missing artifacts or records that did not complete.
VerifySummary verify(const std::filesystem::path& record_path);

// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace nlsflow
