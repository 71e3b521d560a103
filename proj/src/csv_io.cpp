#include "mems/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mems {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("malformed number '" + s + "' in " + where);
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : records) {
    os << format_number(r.t) << ',' << format_number(r.dt) << ',' << format_number(r.min_u) << ','
       << format_number(r.max_u) << ',' << format_number(r.E_alpha) << ',' << format_number(r.dE_dt) << ','
       << format_number(r.F_of_E) << ',' << format_number(r.envelope) << ',' << format_number(r.sobolev_proxy)
       << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  auto os = open_output(path);
  write_trajectory_csv(os, records);
  if (!os) throw IoError("write failed: " + path);
}

std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path) {
  auto is = open_input(path);
  std::string line;
  if (!std::getline(is, line) || line != kTrajectoryHeader) {
    throw IoError(path + ": unexpected trajectory header");
  }
  std::vector<DiagnosticsRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() != 9) throw IoError(where + ": expected 9 columns");
    DiagnosticsRecord r;
    r.t = parse_double(cells[0], where);
    r.dt = parse_double(cells[1], where);
    r.min_u = parse_double(cells[2], where);
    r.max_u = parse_double(cells[3], where);
    r.E_alpha = parse_double(cells[4], where);
    r.dE_dt = parse_double(cells[5], where);
    r.F_of_E = parse_double(cells[6], where);
    r.envelope = parse_double(cells[7], where);
    r.sobolev_proxy = parse_double(cells[8], where);
    out.push_back(r);
  }
  return out;
}

void write_profile_csv(const std::string& path, std::span<const double> x, std::span<const double> u) {
  auto os = open_output(path);
  os << "x,u\n";
  for (std::size_t i = 0; i < x.size(); ++i) os << format_number(x[i]) << ',' << format_number(u[i]) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

Profile read_profile_csv(const std::string& path) {
  auto is = open_input(path);
  Profile p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line == "x,u") continue;
    const auto cells = split(line, ',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cells.size() != 2) throw IoError(where + ": expected columns x,u");
    p.x.push_back(parse_double(cells[0], where));
    p.u.push_back(parse_double(cells[1], where));
  }
  if (p.x.size() < 2) throw IoError(path + ": profile needs at least two rows");
  return p;
}

void write_snapshots(const std::string& dir, const std::vector<DeflectionState>& snapshots, const Grid1D& grid) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  auto index = open_output((fs::path(dir) / "index.csv").string());
  index << "index,t,file\n";
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "state_%06zu.csv", k);
    write_profile_csv((fs::path(dir) / name).string(), grid.nodes(), snapshots[k].u);
    index << k << ',' << format_number(snapshots[k].t) << ',' << name << '\n';
  }
  if (!index) throw IoError("write failed: " + dir + "/index.csv");
}

std::vector<DeflectionState> read_snapshots(const std::string& dir, const Grid1D& grid) {
  const fs::path index_path = fs::path(dir) / "index.csv";
  auto is = open_input(index_path.string());
  std::string line;
  if (!std::getline(is, line) || line != "index,t,file") throw IoError(index_path.string() + ": bad header");
  std::vector<DeflectionState> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) throw IoError(index_path.string() + ": expected index,t,file");
    const Profile p = read_profile_csv((fs::path(dir) / cells[2]).string());
    if (p.x.size() != grid.size()) throw IoError(cells[2] + ": snapshot does not match the grid size");
    for (std::size_t i = 0; i < p.x.size(); ++i) {
      if (std::abs(p.x[i] - grid.x(i)) > 1e-12) throw IoError(cells[2] + ": snapshot nodes differ from the grid");
    }
    out.push_back(DeflectionState{parse_double(cells[1], index_path.string()), p.u});
  }
  return out;
}

}  // namespace mems
