#include "emis_cli/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace emis::cli {

namespace {

constexpr const char* kDatasetHeader =
    "alpha_index,beta_index,alpha_x,alpha_y,alpha_z,beta_x,beta_y,beta_z,weight_alpha,weight_beta,f_re,f_im";
constexpr const char* kVolumeHeader = "x,y,z,re,im";
constexpr const char* kFieldHeader = "x,y,z,ex_re,ex_im,ey_re,ey_im,ez_re,ez_im";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

/// `# tag key=value key=value ...`
std::map<std::string, std::string> parse_preamble(const std::string& line, const std::string& path) {
  if (line.rfind("#", 0) != 0) throw IoError(path + ": missing '#' preamble line");
  std::map<std::string, std::string> out;
  std::istringstream words(line.substr(1));
  std::string w;
  while (words >> w) {
    const auto eq = w.find('=');
    if (eq != std::string::npos) out[w.substr(0, eq)] = w.substr(eq + 1);
  }
  return out;
}

const std::string& key(const std::map<std::string, std::string>& kv, const std::string& k,
                       const std::string& path) {
  const auto it = kv.find(k);
  if (it == kv.end()) throw IoError(path + ": preamble lacks " + k);
  return it->second;
}

double to_double(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw IoError(path + ": bad number '" + s + "'");
  return v;
}

long to_long(const std::string& s, const std::string& path) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0') throw IoError(path + ": bad integer '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

std::pair<int, int> parse_shape(const std::string& s, const std::string& path) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw IoError(path + ": bad quadrature shape '" + s + "'");
  return {static_cast<int>(to_long(s.substr(0, x), path)), static_cast<int>(to_long(s.substr(x + 1), path))};
}

std::string grid_preamble(const char* tag, const VolumeGrid& grid) {
  return std::string("# ") + tag + " radius=" + num(grid.radius()) + " n=" + std::to_string(grid.n_per_axis()) +
         " cells=" + std::to_string(grid.size());
}

template <class Row>
void read_rows(std::ifstream& in, const std::string& path, const char* header, std::size_t columns, Row&& row) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError(path + ": unexpected header");
  std::vector<double> values(columns);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) throw IoError(path + ": expected " + std::to_string(columns) + " columns");
    for (std::size_t c = 0; c < columns; ++c) values[c] = to_double(cells[c], path);
    row(values);
  }
}

}  // namespace

void write_dataset(const std::string& path, const ScatteringDataSet& data) {
  std::ofstream out = open_out(path);
  const auto& qa = data.alpha_quadrature;
  const auto& qb = data.beta_quadrature;
  out << "# k=" << num(data.wave.k) << " delta=" << num(data.noise_level)
      << " provenance=" << to_string(data.provenance) << " omega=" << num(data.wave.omega)
      << " eps0=" << num(data.wave.eps0) << " mu0=" << num(data.wave.mu0)
      << " seed=" << (data.seed ? std::to_string(*data.seed) : std::string("none"))
      << " alpha_grid=" << qa.n_polar() << 'x' << qa.n_azimuth() << " beta_grid=" << qb.n_polar() << 'x'
      << qb.n_azimuth() << '\n';
  out << kDatasetHeader << '\n';
  for (std::size_t j = 0; j < qa.size(); ++j) {
    const Vec3& a = qa.nodes()[j].vec();
    for (std::size_t i = 0; i < qb.size(); ++i) {
      const Vec3& b = qb.nodes()[i].vec();
      const Complex f = data.f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out << j << ',' << i << ',' << num(a.x()) << ',' << num(a.y()) << ',' << num(a.z()) << ','
          << num(b.x()) << ',' << num(b.y()) << ',' << num(b.z()) << ',' << num(qa.weights()[j]) << ','
          << num(qb.weights()[i]) << ',' << num(f.real()) << ',' << num(f.imag()) << '\n';
    }
  }
  finish(out, path);
}

ScatteringDataSet read_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto kv = parse_preamble(line, path);
  const auto [ap, aa] = parse_shape(key(kv, "alpha_grid", path), path);
  const auto [bp, ba] = parse_shape(key(kv, "beta_grid", path), path);
  const std::size_t na = static_cast<std::size_t>(ap) * aa;
  const std::size_t nb = static_cast<std::size_t>(bp) * ba;

  std::vector<std::optional<Direction>> alphas(na), betas(nb);
  std::vector<double> wa(na), wb(nb);
  Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(na));
  std::size_t rows = 0;
  try {
    read_rows(in, path, kDatasetHeader, 12, [&](const std::vector<double>& v) {
      const auto j = static_cast<std::size_t>(v[0]);
      const auto i = static_cast<std::size_t>(v[1]);
      if (v[0] < 0 || v[1] < 0 || j >= na || i >= nb) throw IoError(path + ": node index out of range");
      if (!alphas[j]) alphas[j] = Direction(Vec3(v[2], v[3], v[4]));
      if (!betas[i]) betas[i] = Direction(Vec3(v[5], v[6], v[7]));
      wa[j] = v[8];
      wb[i] = v[9];
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex{v[10], v[11]};
      ++rows;
    });
  } catch (const Error& e) {
    throw IoError(path + ": " + e.what());
  }
  if (rows != na * nb) throw IoError(path + ": expected " + std::to_string(na * nb) + " rows");

  auto unwrap = [](const std::vector<std::optional<Direction>>& v) {
    std::vector<Direction> out;
    for (const auto& d : v) out.push_back(*d);
    return out;
  };
  ScatteringDataSet data;
  data.alpha_quadrature = SphereQuadrature(unwrap(alphas), wa, ap, aa);
  data.beta_quadrature = SphereQuadrature(unwrap(betas), wb, bp, ba);
  data.f = std::move(f);
  data.wave = WaveParams{to_double(key(kv, "k", path), path), to_double(key(kv, "omega", path), path),
                         to_double(key(kv, "eps0", path), path), to_double(key(kv, "mu0", path), path)};
  data.noise_level = to_double(key(kv, "delta", path), path);
  const std::string& seed = key(kv, "seed", path);
  if (seed != "none") data.seed = std::stoull(seed);
  try {
    data.provenance = provenance_from_string(key(kv, "provenance", path));
    data.wave.validate();
    data.validate();
  } catch (const Error& e) {
    throw IoError(path + ": " + e.what());
  }
  return data;
}

void write_volume(const std::string& path, const VolumeGrid& grid, std::span<const Complex> values) {
  if (values.size() != grid.size()) throw IoError(path + ": value count does not match the grid");
  std::ofstream out = open_out(path);
  out << grid_preamble("grid", grid) << '\n' << kVolumeHeader << '\n';
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec3& x = grid.center(c);
    out << num(x.x()) << ',' << num(x.y()) << ',' << num(x.z()) << ',' << num(values[c].real()) << ','
        << num(values[c].imag()) << '\n';
  }
  finish(out, path);
}

VolumeData read_volume(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto kv = parse_preamble(line, path);
  VolumeData data;
  data.radius = to_double(key(kv, "radius", path), path);
  data.n_per_axis = static_cast<int>(to_long(key(kv, "n", path), path));
  const long cells = to_long(key(kv, "cells", path), path);
  read_rows(in, path, kVolumeHeader, 5, [&](const std::vector<double>& v) {
    data.points.emplace_back(v[0], v[1], v[2]);
    data.values.emplace_back(v[3], v[4]);
  });
  if (static_cast<long>(data.values.size()) != cells) throw IoError(path + ": cell count mismatch");
  return data;
}

void write_field(const std::string& path, const VolumeGrid& grid, const FieldValues& E) {
  if (static_cast<std::size_t>(E.size()) != 3 * grid.size())
    throw IoError(path + ": field size does not match the grid");
  std::ofstream out = open_out(path);
  out << grid_preamble("field", grid) << '\n' << kFieldHeader << '\n';
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec3& x = grid.center(c);
    out << num(x.x()) << ',' << num(x.y()) << ',' << num(x.z());
    for (int d = 0; d < 3; ++d) {
      const Complex v = E(static_cast<Eigen::Index>(3 * c + d));
      out << ',' << num(v.real()) << ',' << num(v.imag());
    }
    out << '\n';
  }
  finish(out, path);
}

FieldData read_field(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  const auto kv = parse_preamble(line, path);
  FieldData data;
  data.radius = to_double(key(kv, "radius", path), path);
  data.n_per_axis = static_cast<int>(to_long(key(kv, "n", path), path));
  const long cells = to_long(key(kv, "cells", path), path);
  std::vector<Complex> values;
  read_rows(in, path, kFieldHeader, 9, [&](const std::vector<double>& v) {
    data.points.emplace_back(v[0], v[1], v[2]);
    for (int d = 0; d < 3; ++d) values.emplace_back(v[3 + 2 * d], v[4 + 2 * d]);
  });
  if (static_cast<long>(data.points.size()) != cells) throw IoError(path + ": cell count mismatch");
  data.E = Eigen::Map<const FieldValues>(values.data(), static_cast<Eigen::Index>(values.size()));
  return data;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

}  // namespace emis::cli
