#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nlsflow/envelope.hpp"
#include "nlsflow/grid.hpp"
#include "nlsflow/propagators.hpp"

namespace nlsflow {

inline constexpr std::uint32_t kSnapshotVersion = 1;

// Little-endian binary snapshot: "NLSF", version u32, dim u32, N u32, L f64,
// t f64, sigma f64, model u32, tau f64, tau_dot f64, gauge f64, then N^dim
// interleaved (re, im) f64 pairs. The frame is stored because tracked frames
// depend on the history of the run, not only on t.
void write_snapshot(const std::filesystem::path& path, const WaveField& field);
WaveField read_snapshot(const std::filesystem::path& path);
std::string encode_snapshot(const WaveField& field);
WaveField decode_snapshot(std::string_view bytes);

// Writes through a temporary file in the same directory and renames it.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Decimal text with 17 significant digits.
std::string format_number(double x);

// Minimal CSV table: a header and numeric rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_string() const;
  std::vector<double> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// Columns x (or x, y), density.
CsvTable density_table(const Density& rho);
// Columns t, mass, energy, grad_norm, lp_norm, edge_density.
CsvTable observation_table(std::span<const Observation> log);
// Columns t, tau, tau_dot, s, invariant_residual.
CsvTable envelope_table(std::span<const EnvelopeState> states);

// Directory with snapshot_00000.nlsf, ... and pseudo_energy.csv (t, tau,
// kinetic, confinement, nonlinear_plus, nonlinear_minus, total).
void write_trajectory(const std::filesystem::path& dir, std::span<const WaveField> lens_fields);
std::vector<WaveField> read_trajectory(const std::filesystem::path& dir);

}  // namespace nlsflow
