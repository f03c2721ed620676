#include "nlsflow/io.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "nlsflow/error.hpp"
#include "nlsflow/rescaling.hpp"

namespace nlsflow {
namespace {

constexpr char kMagic[4] = {'N', 'L', 'S', 'F'};

template <typename T>
void put(std::string& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.append(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <typename T>
T take(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw FormatError("snapshot truncated");
  std::array<unsigned char, sizeof(T)> bits;
  std::memcpy(bits.data(), bytes.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  pos += sizeof(T);
  return std::bit_cast<T>(bits);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string encode_snapshot(const WaveField& field) {
  const Grid& g = field.grid;
  std::string out;
  out.reserve(68 + 16 * field.values.size());
  out.append(kMagic, 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.points_per_axis));
  put<double>(out, g.half_length);
  put<double>(out, field.time);
  put<double>(out, field.sigma);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.model));
  put<double>(out, field.tau);
  put<double>(out, field.tau_dot);
  put<double>(out, field.gauge);
  for (const cplx& z : field.values) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  return out;
}

WaveField decode_snapshot(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not an NLSF snapshot");
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));
  const auto dim = take<std::uint32_t>(bytes, pos);
  const auto n = take<std::uint32_t>(bytes, pos);
  const double half_length = take<double>(bytes, pos);
  const double t = take<double>(bytes, pos);
  const double sigma = take<double>(bytes, pos);
  const auto tag = take<std::uint32_t>(bytes, pos);
  if (tag > static_cast<std::uint32_t>(Model::TrackedLens)) throw FormatError("unknown model tag");
  const Model model = static_cast<Model>(tag);
  const double tau = take<double>(bytes, pos);
  const double tau_dot = take<double>(bytes, pos);
  const double gauge = take<double>(bytes, pos);

  WaveField f(make_grid(static_cast<int>(dim), static_cast<int>(n), half_length), sigma, model, t);
  if (bytes.size() - pos != 16 * f.values.size()) throw FormatError("snapshot payload size does not match header");
  for (auto& z : f.values) {
    const double re = take<double>(bytes, pos);
    const double im = take<double>(bytes, pos);
    z = {re, im};
  }
  f.tau = tau;
  f.tau_dot = tau_dot;
  f.gauge = gauge;
  return f;
}

void write_snapshot(const std::filesystem::path& path, const WaveField& field) {
  write_file_atomic(path, encode_snapshot(field));
}

WaveField read_snapshot(const std::filesystem::path& path) { return decode_snapshot(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static std::atomic<unsigned long> counter{0};
  const auto tag = std::hash<std::thread::id>{}(std::this_thread::get_id()) ^ (counter++ * 0x9e3779b97f4a7c15ULL);
  auto tmp = path;
  tmp += ".tmp" + std::to_string(tag);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw FormatError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw FormatError("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? "," : "") + columns[c];
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw FormatError("CSV row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
  }
  throw FormatError("CSV has no column '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t start = 0;
  bool header = true;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (header) {
      t.columns = std::move(cells);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) throw FormatError("CSV row width does not match the header");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      char* stop = nullptr;
      const double v = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || stop != cell.c_str() + cell.size()) throw FormatError("non-numeric CSV cell '" + cell + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (header) throw FormatError("empty CSV");
  return t;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_file_atomic(path, table.to_string());
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

CsvTable density_table(const Density& rho) {
  const Grid& g = rho.grid;
  CsvTable t;
  t.columns = g.dim == 1 ? std::vector<std::string>{"x", "density"} : std::vector<std::string>{"x", "y", "density"};
  const auto nx = static_cast<std::size_t>(g.points_per_axis);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    if (g.dim == 1)
      t.rows.push_back({g.coords[i], rho.values[i]});
    else
      t.rows.push_back({g.coords[i / nx], g.coords[i % nx], rho.values[i]});
  }
  return t;
}

CsvTable observation_table(std::span<const Observation> log) {
  CsvTable t;
  t.columns = {"t", "mass", "energy", "grad_norm", "lp_norm", "edge_density"};
  for (const auto& o : log) t.rows.push_back({o.t, o.mass, o.energy, o.grad_norm, o.lp_norm, o.edge_density});
  return t;
}

CsvTable envelope_table(std::span<const EnvelopeState> states) {
  CsvTable t;
  t.columns = {"t", "tau", "tau_dot", "s", "invariant_residual"};
  for (const auto& s : states)
    t.rows.push_back({s.t, s.tau, s.tau_dot, s.t > 0.0 ? time_change_s(s) : -INFINITY, first_integral_residual(s)});
  return t;
}

void write_trajectory(const std::filesystem::path& dir, std::span<const WaveField> lens_fields) {
  std::filesystem::create_directories(dir);
  CsvTable pe;
  pe.columns = {"t", "tau", "kinetic", "confinement", "nonlinear_plus", "nonlinear_minus", "total"};
  for (std::size_t k = 0; k < lens_fields.size(); ++k) {
    const WaveField& f = lens_fields[k];
    if (!is_lens(f.model)) throw FormatError("trajectory archives hold lens fields");
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%05zu.nlsf", k);
    write_snapshot(dir / name, f);
    const auto e = pseudo_energy(f, frame_of(f));
    pe.rows.push_back({f.time, f.tau, e.kinetic, e.confinement, e.nonlinear_plus, e.nonlinear_minus, e.total});
  }
  write_csv(dir / "pseudo_energy.csv", pe);
}

std::vector<WaveField> read_trajectory(const std::filesystem::path& dir) {
  std::vector<WaveField> out;
  for (std::size_t k = 0;; ++k) {
    char name[48];
    std::snprintf(name, sizeof name, "snapshot_%05zu.nlsf", k);
    const auto p = dir / name;
    if (!std::filesystem::exists(p)) break;
    out.push_back(read_snapshot(p));
  }
  if (out.empty()) throw FormatError("no snapshots in " + dir.string());
  return out;
}

}  // namespace nlsflow
