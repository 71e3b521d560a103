#include <cmath>
#include <numbers>

#include "mems/csv_io.hpp"
#include "mems/harness/config.hpp"

namespace mems::harness {

namespace {

std::vector<double> split_numbers(const std::string& body) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const std::string cell = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(parse_number("u0", cell));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double interpolate(const Profile& p, double x) {
  if (x <= p.x.front()) return p.u.front();
  if (x >= p.x.back()) return p.u.back();
  std::size_t k = 1;
  while (p.x[k] < x) ++k;
  const double s = (x - p.x[k - 1]) / (p.x[k] - p.x[k - 1]);
  return (1.0 - s) * p.u[k - 1] + s * p.u[k];
}

}  // namespace

InitialData InitialData::parse(const std::string& text) {
  InitialData d;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? std::string() : text.substr(colon + 1);

  if (kind == "zero") {
    if (colon != std::string::npos) throw ConfigError("u0", "zero takes no arguments");
    d.kind = Kind::Zero;
    return d;
  }
  if (colon == std::string::npos || body.empty()) throw ConfigError("u0", "missing arguments in '" + text + "'");
  if (kind == "file") {
    d.kind = Kind::File;
    d.path = body;
    return d;
  }
  const std::vector<double> args = split_numbers(body);
  if (kind == "arch" && args.size() == 1) {
    d.kind = Kind::Arch;
    d.amplitude = args[0];
  } else if (kind == "eig" && args.size() == 1) {
    d.kind = Kind::Eigen;
    d.amplitude = args[0];
  } else if (kind == "bell" && args.size() == 2) {
    d.kind = Kind::Bell;
    d.amplitude = args[0];
    d.width = args[1];
    if (!(d.width > 0.0 && d.width <= 1.0)) throw ConfigError("u0", "bell width must lie in (0, 1]");
  } else {
    throw ConfigError("u0", "expected zero | arch:h | bell:a,w | eig:c | file:path, got '" + text + "'");
  }
  return d;
}

std::string InitialData::describe() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::Arch:
      return "arch:" + format_number(amplitude);
    case Kind::Bell:
      return "bell:" + format_number(amplitude) + "," + format_number(width);
    case Kind::Eigen:
      return "eig:" + format_number(amplitude);
    case Kind::File:
      return "file:" + path;
  }
  return "zero";
}

DeflectionState InitialData::evaluate(const Grid1D& grid) const {
  constexpr double pi = std::numbers::pi;
  DeflectionState s;
  s.u.assign(grid.size(), 0.0);

  Profile table;
  if (kind == Kind::File) {
    try {
      table = read_profile_csv(path);
    } catch (const IoError& e) {
      throw ConfigError("u0", e.what());
    }
    if (table.x.front() > -1.0 + 1e-12 || table.x.back() < 1.0 - 1e-12) {
      throw ConfigError("u0", "tabulated profile must cover [-1, 1]");
    }
    for (std::size_t k = 1; k < table.x.size(); ++k) {
      if (!(table.x[k] > table.x[k - 1])) throw ConfigError("u0", "tabulated x must increase strictly");
    }
    if (std::abs(interpolate(table, -1.0)) > 1e-12 || std::abs(interpolate(table, 1.0)) > 1e-12) {
      throw ConfigError("u0", "tabulated profile must vanish at x = -1 and x = 1");
    }
  }

  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double x = grid.x(i);
    switch (kind) {
      case Kind::Zero:
        break;
      case Kind::Arch:
        s.u[i] = amplitude * (1.0 + std::cos(pi * x));
        break;
      case Kind::Eigen:
        s.u[i] = amplitude * pi / 4.0 * std::cos(pi * x / 2.0);
        break;
      case Kind::Bell: {
        const double r = x / width;
        s.u[i] = std::abs(r) < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0;
        break;
      }
      case Kind::File:
        s.u[i] = interpolate(table, x);
        break;
    }
  }
  try {
    check_admissible(s, grid);
  } catch (const InvariantError& e) {
    throw ConfigError("u0", e.what());
  }
  return s;
}

}  // namespace mems::harness
