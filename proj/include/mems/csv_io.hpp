#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mems/grid.hpp"
#include "mems/trajectory.hpp"

namespace mems {

/// Thrown on unreadable or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe decimal form (17 significant digits).
std::string format_number(double v);

inline constexpr const char* kTrajectoryHeader = "t,dt,min_u,max_u,E_alpha,dE_dt,F_of_E,envelope,sobolev_proxy";

void write_trajectory_csv(std::ostream& os, const std::vector<DiagnosticsRecord>& records);
void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path);

/// Plate profile with columns x,u.
void write_profile_csv(const std::string& path, std::span<const double> x, std::span<const double> u);

struct Profile {
  std::vector<double> x;
  std::vector<double> u;
};

Profile read_profile_csv(const std::string& path);

/// Snapshot directory layout: index.csv (index,t,file) plus one profile per state.
void write_snapshots(const std::string& dir, const std::vector<DeflectionState>& snapshots, const Grid1D& grid);
std::vector<DeflectionState> read_snapshots(const std::string& dir, const Grid1D& grid);

}  // namespace mems
