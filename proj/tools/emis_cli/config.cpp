#include "emis_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

#include "emis_cli/io.hpp"

namespace emis::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!keys.count(key)) throw ConfigError(join(path, key) + " is not a recognized field");
}

const json* member(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& object(const json& obj, const char* key, const std::string& path) {
  static const json empty = json::object();
  const json* v = member(obj, key);
  if (!v) return empty;
  if (!v->is_object()) throw ConfigError(join(path, key) + " must be an object");
  return *v;
}

double number(const json& obj, const char* key, const std::string& path, std::optional<double> fallback) {
  const json* v = member(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key) + " is required");
  }
  if (!v->is_number()) throw ConfigError(join(path, key) + " must be a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) throw ConfigError(join(path, key) + " must be finite");
  return x;
}

double positive(const json& obj, const char* key, const std::string& path, std::optional<double> fallback) {
  const double x = number(obj, key, path, fallback);
  if (!(x > 0.0)) throw ConfigError(join(path, key) + " must be > 0");
  return x;
}

long integer(const json& obj, const char* key, const std::string& path, std::optional<long> fallback,
             long min_value) {
  const json* v = member(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key) + " is required");
  }
  if (!v->is_number_integer()) throw ConfigError(join(path, key) + " must be an integer");
  const long x = v->get<long>();
  if (x < min_value) throw ConfigError(join(path, key) + " must be >= " + std::to_string(min_value));
  return x;
}

Vec3 vector3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ConfigError(path + " must be an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError(path + " must be an array of 3 numbers");
    out(i) = v[i].get<double>();
    if (!std::isfinite(out(i))) throw ConfigError(path + " must be finite");
  }
  return out;
}

json vector_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Complex complex_value(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path + " must be a number or a [re, im] pair");
}

WaveParams parse_wave(const json& j) {
  reject_unknown(j, "wave", {"k", "omega", "eps0", "mu0"});
  const double eps0 = positive(j, "eps0", "wave", 1.0);
  const double mu0 = positive(j, "mu0", "wave", 1.0);
  const bool has_k = member(j, "k");
  const bool has_omega = member(j, "omega");
  if (has_k == has_omega) throw ConfigError("wave: exactly one of wave.k and wave.omega is required");
  return has_k ? WaveParams::from_k(positive(j, "k", "wave", {}), eps0, mu0)
               : WaveParams::from_omega(positive(j, "omega", "wave", {}), eps0, mu0);
}

MediumSpec parse_medium(const json& j) {
  reject_unknown(j, "medium", {"domain_radius", "bumps"});
  const double radius = number(j, "domain_radius", "medium", 1.0);
  std::vector<Bump> bumps;
  if (const json* list = member(j, "bumps")) {
    if (!list->is_array()) throw ConfigError("medium.bumps must be an array");
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string path = "medium.bumps[" + std::to_string(i) + "]";
      const json& b = (*list)[i];
      if (!b.is_object()) throw ConfigError(path + " must be an object");
      reject_unknown(b, path, {"center", "radius", "amplitude", "power"});
      Bump bump;
      if (const json* c = member(b, "center")) bump.center = vector3(*c, path + ".center");
      bump.radius = number(b, "radius", path, {});
      const json* amp = member(b, "amplitude");
      if (!amp) throw ConfigError(path + ".amplitude is required");
      bump.amplitude = complex_value(*amp, path + ".amplitude");
      bump.power = static_cast<int>(integer(b, "power", path, 3, 0));
      bumps.push_back(bump);
    }
  }
  try {
    return MediumSpec(radius, std::move(bumps));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

SolverConfig parse_solver(const json& j) {
  reject_unknown(j, "solver", {"method", "dense_tolerance", "iterative_tolerance", "max_iterations",
                               "gmres_restart", "dense_cell_limit"});
  SolverConfig s;
  if (const json* m = member(j, "method")) {
    const std::string name = m->is_string() ? m->get<std::string>() : "";
    if (name == "auto") s.method = SolverMethod::Auto;
    else if (name == "dense") s.method = SolverMethod::Dense;
    else if (name == "iterative") s.method = SolverMethod::Iterative;
    else throw ConfigError("solver.method must be one of auto, dense, iterative");
  }
  s.dense_tolerance = positive(j, "dense_tolerance", "solver", s.dense_tolerance);
  s.iterative_tolerance = positive(j, "iterative_tolerance", "solver", s.iterative_tolerance);
  s.max_iterations = static_cast<int>(integer(j, "max_iterations", "solver", s.max_iterations, 1));
  s.gmres_restart = static_cast<int>(integer(j, "gmres_restart", "solver", s.gmres_restart, 1));
  s.dense_cell_limit =
      static_cast<std::size_t>(integer(j, "dense_cell_limit", "solver", static_cast<long>(s.dense_cell_limit), 0));
  return s;
}

const char* method_name(SolverMethod m) {
  switch (m) {
    case SolverMethod::Dense: return "dense";
    case SolverMethod::Iterative: return "iterative";
    default: return "auto";
  }
}

}  // namespace

const char* to_string(DataMode mode) noexcept {
  return mode == DataMode::FullSolver ? "full-solver" : "born-exact";
}

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(j, "", {"wave", "medium", "grids", "quadrature", "data", "solver", "inversion",
                         "incidence", "output"});
  RunConfig c;
  if (!member(j, "wave")) throw ConfigError("wave is required");
  c.wave = parse_wave(object(j, "wave", ""));
  if (!member(j, "medium")) throw ConfigError("medium is required");
  c.medium = parse_medium(object(j, "medium", ""));

  const json& grids = object(j, "grids", "");
  reject_unknown(grids, "grids", {"forward", "reconstruction"});
  if (member(grids, "forward")) c.forward_n = static_cast<int>(integer(grids, "forward", "grids", {}, 1));
  c.reconstruction_n = static_cast<int>(integer(grids, "reconstruction", "grids", c.reconstruction_n, 1));

  const json& quad = object(j, "quadrature", "");
  reject_unknown(quad, "quadrature", {"alpha", "beta"});
  for (const char* which : {"alpha", "beta"}) {
    const std::string path = std::string("quadrature.") + which;
    const json& q = object(quad, which, "quadrature");
    reject_unknown(q, path, {"n_polar", "n_azimuth"});
    QuadratureSpec& spec = std::string(which) == "alpha" ? c.alpha : c.beta;
    spec.n_polar = static_cast<int>(integer(q, "n_polar", path, spec.n_polar, 1));
    spec.n_azimuth = static_cast<int>(integer(q, "n_azimuth", path, spec.n_azimuth, 1));
  }

  const json& data = object(j, "data", "");
  reject_unknown(data, "data", {"mode", "noise"});
  if (const json* m = member(data, "mode")) {
    const std::string name = m->is_string() ? m->get<std::string>() : "";
    if (name == "born-exact") c.mode = DataMode::BornExact;
    else if (name == "full-solver") c.mode = DataMode::FullSolver;
    else throw ConfigError("data.mode must be born-exact or full-solver");
  }
  if (c.mode == DataMode::FullSolver && !c.forward_n)
    throw ConfigError("grids.forward is required when data.mode is full-solver");
  const json& noise = object(data, "noise", "data");
  reject_unknown(noise, "data.noise", {"delta", "relative", "seed"});
  c.noise.delta = number(noise, "delta", "data.noise", 0.0);
  if (c.noise.delta < 0.0) throw ConfigError("data.noise.delta must be >= 0");
  if (const json* r = member(noise, "relative")) {
    if (!r->is_boolean()) throw ConfigError("data.noise.relative must be true or false");
    c.noise.relative = r->get<bool>();
  }
  if (const json* s = member(noise, "seed")) {
    if (!s->is_number_integer() || (!s->is_number_unsigned() && s->get<long long>() < 0))
      throw ConfigError("data.noise.seed must be a non-negative integer");
    c.noise.seed = s->get<std::uint64_t>();
  }

  c.solver = parse_solver(object(j, "solver", ""));

  const json& inv = object(j, "inversion", "");
  reject_unknown(inv, "inversion", {"N", "R", "N_max", "radial_points"});
  c.inversion.R = positive(inv, "R", "inversion", c.medium.domain_radius());
  c.inversion.N_max = static_cast<int>(integer(inv, "N_max", "inversion", c.inversion.N_max, 1));
  c.inversion.radial_points = static_cast<int>(integer(inv, "radial_points", "inversion", 128, 32));
  if (const json* n = member(inv, "N")) {
    if (n->is_string() && n->get<std::string>() == "auto") {
      c.inversion.N.reset();
    } else {
      c.inversion.N = static_cast<int>(integer(inv, "N", "inversion", {}, 1));
      if (*c.inversion.N > c.inversion.N_max) throw ConfigError("inversion.N must be <= inversion.N_max");
    }
  }
  if (c.inversion.R < c.medium.domain_radius())
    throw ConfigError("inversion.R must be >= medium.domain_radius");

  const json& inc = object(j, "incidence", "");
  reject_unknown(inc, "incidence", {"alpha", "polarization"});
  if (const json* a = member(inc, "alpha")) {
    const Vec3 v = vector3(*a, "incidence.alpha");
    if (v.norm() == 0.0) throw ConfigError("incidence.alpha must be non-zero");
    c.incidence.alpha = v.normalized();
  }
  if (const json* p = member(inc, "polarization")) {
    const Vec3 v = vector3(*p, "incidence.polarization");
    if (v.norm() == 0.0) throw ConfigError("incidence.polarization must be non-zero");
    if (std::abs(v.normalized().dot(c.incidence.alpha)) > 1e-9)
      throw ConfigError("incidence.polarization must be orthogonal to incidence.alpha");
    c.incidence.polarization = v.normalized();
  }

  if (const json* o = member(j, "output")) {
    if (!o->is_string() || o->get<std::string>().empty())
      throw ConfigError("output must be a non-empty string");
    c.output_dir = o->get<std::string>();
  }

  try {
    validate_medium(c.medium, c.wave, build_volume_grid(c.medium.domain_radius(), c.synthesis_n()));
  } catch (const Error& e) {
    throw ConfigError(std::string("medium: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j);
}

json RunConfig::to_json() const {
  json bumps = json::array();
  for (const Bump& b : medium.bumps())
    bumps.push_back({{"center", vector_json(b.center)},
                     {"radius", b.radius},
                     {"amplitude", json::array({b.amplitude.real(), b.amplitude.imag()})},
                     {"power", b.power}});
  json grids = {{"reconstruction", reconstruction_n}};
  if (forward_n) grids["forward"] = *forward_n;
  json inc = {{"alpha", vector_json(incidence.alpha)}};
  if (incidence.polarization) inc["polarization"] = vector_json(*incidence.polarization);
  return {
      {"wave", {{"k", wave.k}, {"eps0", wave.eps0}, {"mu0", wave.mu0}}},
      {"medium", {{"domain_radius", medium.domain_radius()}, {"bumps", bumps}}},
      {"grids", grids},
      {"quadrature",
       {{"alpha", {{"n_polar", alpha.n_polar}, {"n_azimuth", alpha.n_azimuth}}},
        {"beta", {{"n_polar", beta.n_polar}, {"n_azimuth", beta.n_azimuth}}}}},
      {"data",
       {{"mode", to_string(mode)},
        {"noise", {{"delta", noise.delta}, {"relative", noise.relative}, {"seed", noise.seed}}}}},
      {"solver",
       {{"method", method_name(solver.method)},
        {"dense_tolerance", solver.dense_tolerance},
        {"iterative_tolerance", solver.iterative_tolerance},
        {"max_iterations", solver.max_iterations},
        {"gmres_restart", solver.gmres_restart},
        {"dense_cell_limit", solver.dense_cell_limit}}},
      {"inversion",
       {{"N", inversion.N ? json(*inversion.N) : json("auto")},
        {"R", inversion.R},
        {"N_max", inversion.N_max},
        {"radial_points", inversion.radial_points}}},
      {"incidence", inc},
      {"output", output_dir},
  };
}

}  // namespace emis::cli
