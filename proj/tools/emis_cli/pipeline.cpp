#include "emis_cli/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <random>

#include "emis_cli/io.hpp"

namespace emis::cli {

using nlohmann::json;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json dataset_summary(const ScatteringDataSet& d) {
  return {{"provenance", to_string(d.provenance)},
          {"n_beta", d.f.rows()},
          {"n_alpha", d.f.cols()},
          {"weighted_norm", d.weighted_norm()},
          {"noise_level", d.noise_level},
          {"seed", d.seed ? json(*d.seed) : json(nullptr)}};
}

}  // namespace

const char* to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::Config: return "config";
    case Stage::Synthesis: return "synthesis";
    case Stage::Noise: return "noise";
    case Stage::Forward: return "forward";
    case Stage::Inversion: return "inversion";
    case Stage::Scoring: return "scoring";
    case Stage::Validation: return "validation";
    case Stage::Output: return "output";
  }
  return "unknown";
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.output) config.output_dir = *o.output;
  if (o.seed) config.noise.seed = *o.seed;
  if (o.N) {
    if (*o.N < 1 || *o.N > config.inversion.N_max)
      throw ConfigError("--n must lie in [1, inversion.N_max]");
    config.inversion.N = *o.N;
  }
}

Runner::Runner(RunConfig config, bool quiet) : config_(std::move(config)), quiet_(quiet) {}

std::string Runner::path(const char* name) const {
  return (std::filesystem::path(config_.output_dir) / name).string();
}

void Runner::log(const std::string& message) const {
  if (!quiet_) std::cerr << "[emis] " << message << '\n';
}

void Runner::enter(Stage stage) {
  stage_ = stage;
  stage_start_ = now_seconds();
}

void Runner::leave() {
  const std::string key = std::string(to_string(stage_)) + "_s";
  timings_[key] = timings_.value(key, 0.0) + (now_seconds() - stage_start_);
}

ScatteringDataSet Runner::make_data(json& results) {
  const SphereQuadrature qa = build_sphere_quadrature(config_.alpha.n_polar, config_.alpha.n_azimuth);
  const SphereQuadrature qb = build_sphere_quadrature(config_.beta.n_polar, config_.beta.n_azimuth);
  const VolumeGrid grid = build_volume_grid(config_.medium.domain_radius(), config_.synthesis_n());
  ScatteringDataSet data;
  if (config_.mode == DataMode::BornExact) {
    enter(Stage::Synthesis);
    log("synthesizing born-exact data: " + std::to_string(qb.size()) + " x " + std::to_string(qa.size()) +
        " directions, " + std::to_string(grid.size()) + " cells");
    data = synthesize_dataset(config_.medium, config_.wave, qa, qb, grid);
  } else {
    enter(Stage::Forward);
    log("solving " + std::to_string(2 * qa.size()) + " forward problems on " + std::to_string(grid.size()) +
        " cells");
    SolveStats stats;
    data = build_dataset(config_.medium, config_.wave, qa, qb, grid, config_.solver, &stats);
    results["forward"] = {{"solves", stats.solves},
                          {"max_relative_residual", stats.max_residual},
                          {"max_iterations", stats.max_iterations},
                          {"method", stats.dense ? "dense" : "iterative"}};
  }
  leave();
  return data;
}

ScatteringDataSet Runner::add_configured_noise(const ScatteringDataSet& clean, json& results) {
  if (config_.noise.delta == 0.0) return clean;
  enter(Stage::Noise);
  const double delta = config_.noise.relative ? config_.noise.delta * clean.weighted_norm() : config_.noise.delta;
  ScatteringDataSet noisy = clean;
  if (delta > 0.0) noisy = add_noise(clean, delta, config_.noise.seed);
  results["noise"] = {{"delta", delta}, {"seed", config_.noise.seed}, {"relative", config_.noise.relative}};
  leave();
  return noisy;
}

void Runner::reconstruct_and_write(const ScatteringDataSet& data, json& results, json& artifacts) {
  enter(Stage::Inversion);
  const VolumeGrid grid = build_volume_grid(config_.inversion.R, config_.reconstruction_n);
  log("reconstructing on " + std::to_string(grid.size()) + " cells");
  ReconstructionResult rec = reconstruct(data, grid, config_.inversion);
  const std::vector<Complex> eps = recover_eps(rec, data.wave);
  results["inversion"] = {{"chosen_N", rec.chosen_N},
                          {"residual_history", rec.residual_history},
                          {"cells", grid.size()},
                          {"reconstruction_norm", l2_norm(grid, rec.p)}};
  leave();

  enter(Stage::Scoring);
  try {
    rec.error_vs_truth = error_metric(rec, config_.medium, data.wave, grid);
    results["error_vs_truth"] = *rec.error_vs_truth;
    log("relative L2 error " + std::to_string(*rec.error_vs_truth) + " at N = " + std::to_string(rec.chosen_N));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroTruth) throw;
    results["error_vs_truth"] = nullptr;
    results["notes"].push_back(std::string("error metric skipped: ") + e.what());
  }
  leave();

  enter(Stage::Output);
  write_volume(path("reconstruction.csv"), grid, rec.p);
  write_volume(path("eps.csv"), grid, eps);
  artifacts["reconstruction"] = "reconstruction.csv";
  artifacts["eps"] = "eps.csv";
  leave();
}

json Runner::finish(const char* command, json results, json artifacts) {
  enter(Stage::Output);
  json manifest = {{"tool", "emis"},
                   {"version", "0.1.0"},
                   {"command", command},
                   {"config", config_.to_json()},
                   {"results", std::move(results)},
                   {"artifacts", std::move(artifacts)},
                   {"timings", timings_}};
  write_json(path("manifest.json"), manifest);
  leave();
  log("wrote " + path("manifest.json"));
  return manifest;
}

json Runner::synth() {
  enter(Stage::Output);
  ensure_directory(config_.output_dir);
  json results = {{"notes", json::array()}};
  json artifacts = json::object();
  const ScatteringDataSet data = add_configured_noise(make_data(results), results);
  results["data"] = dataset_summary(data);
  enter(Stage::Output);
  write_dataset(path("dataset.csv"), data);
  artifacts["dataset"] = "dataset.csv";
  leave();
  return finish("synth", std::move(results), std::move(artifacts));
}

json Runner::forward() {
  enter(Stage::Output);
  ensure_directory(config_.output_dir);
  enter(Stage::Forward);
  const auto grid = std::make_shared<const VolumeGrid>(
      build_volume_grid(config_.medium.domain_radius(), config_.synthesis_n()));
  const Direction alpha(config_.incidence.alpha);
  const Vec3 pol = config_.incidence.polarization.value_or(polarization_pair(alpha).first);
  const IncidentWave incident(alpha, pol, config_.wave);
  log("forward solve on " + std::to_string(grid->size()) + " cells");
  ForwardOperator op(grid, config_.medium, config_.wave, config_.solver);
  const FieldSolution s = op.solve(incident);
  json results = {{"notes", json::array()}};
  results["forward"] = {{"cells", grid->size()},
                        {"method", op.uses_dense() ? "dense" : "iterative"},
                        {"relative_residual", s.solver_residual},
                        {"iterations", s.iterations},
                        {"forward_amplitude", json::array()}};
  const CVec3 A = scattering_amplitude(s, alpha);
  for (int d = 0; d < 3; ++d) results["forward"]["forward_amplitude"].push_back(complex_json(A(d)));
  try {
    results["forward"]["divergence_diagnostic"] = divergence_diagnostic(s, config_.medium);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GridTooCoarse) throw;
    results["forward"]["divergence_diagnostic"] = nullptr;
    results["notes"].push_back(std::string("divergence diagnostic skipped: ") + e.what());
  }
  leave();
  enter(Stage::Output);
  write_field(path("field.csv"), *grid, s.E);
  leave();
  return finish("forward", std::move(results), {{"field", "field.csv"}});
}

json Runner::invert(const std::string& data_path) {
  enter(Stage::Output);
  ensure_directory(config_.output_dir);
  const ScatteringDataSet data = read_dataset(data_path);
  leave();
  enter(Stage::Config);
  if (std::abs(data.wave.k - config_.wave.k) > 1e-12 * config_.wave.k)
    throw ConfigError("wave.k does not match the dataset (" + std::to_string(data.wave.k) + ")");
  json results = {{"notes", json::array()}, {"data", dataset_summary(data)}};
  json artifacts = {{"dataset", std::filesystem::absolute(data_path).string()}};
  reconstruct_and_write(data, results, artifacts);
  return finish("invert", std::move(results), std::move(artifacts));
}

json Runner::pipeline() {
  enter(Stage::Output);
  ensure_directory(config_.output_dir);
  json results = {{"notes", json::array()}};
  json artifacts = json::object();
  const ScatteringDataSet data = add_configured_noise(make_data(results), results);
  results["data"] = dataset_summary(data);
  enter(Stage::Output);
  write_dataset(path("dataset.csv"), data);
  artifacts["dataset"] = "dataset.csv";
  leave();
  reconstruct_and_write(data, results, artifacts);
  return finish("pipeline", std::move(results), std::move(artifacts));
}

bool Runner::validate() {
  enter(Stage::Validation);
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, double value) {
    ok = ok && pass;
    if (!quiet_ || !pass)
      std::cout << (pass ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
  };
  const WaveParams& w = config_.wave;
  const VolumeGrid coarse = build_volume_grid(config_.medium.domain_radius(), 8);

  for (const auto& [name, spec] : {std::pair{"alpha", config_.alpha}, std::pair{"beta", config_.beta}}) {
    const SphereQuadrature q = build_sphere_quadrature(spec.n_polar, spec.n_azimuth);
    double total = 0.0;
    for (double wt : q.weights()) total += wt;
    const double err = std::abs(total - 4.0 * kPi) / (4.0 * kPi);
    report(std::string("quadrature.") + name + " weights sum to 4pi", err <= 1e-12, err);
  }

  double worst = 0.0;
  for (const Vec3& x : coarse.centers()) {
    const Complex p = eval_p(config_.medium, w, x);
    worst = std::max(worst, std::abs(eps_to_p(p_to_eps(p, w), w) - p) / (w.k * w.k));
  }
  report("permittivity round trip", worst <= 1e-12, worst);

  std::mt19937_64 rng(config_.noise.seed);
  std::normal_distribution<double> normal;
  worst = 0.0;
  for (int t = 0; t < 5;) {
    const Direction alpha = Direction::normalized(Vec3(normal(rng), normal(rng), normal(rng)));
    const Direction beta = Direction::normalized(Vec3(normal(rng), normal(rng), normal(rng)));
    const Vec3 pol = polarization_pair(alpha).first;
    if (beta.vec().cross(pol).squaredNorm() < kMinSin2Theta) continue;
    const Complex f = born_f(config_.medium, w, alpha, beta, coarse);
    const Complex g = project_f(born_amplitude(config_.medium, w, alpha, beta, pol, coarse), beta, pol);
    worst = std::max(worst, std::abs(f - g) / std::max(std::abs(f), 1e-300));
    ++t;
  }
  if (config_.medium.is_vacuum()) worst = 0.0;
  report("projection of the Born amplitude", worst <= 1e-12, worst);

  const int N = config_.inversion.N.value_or(config_.inversion.N_max);
  const double R = config_.inversion.R;
  const double peak = std::pow(N / (4.0 * kPi * R * R), 1.5);
  const double rel = std::abs(delta_N(0.0, N, R, w.k) - peak) / peak;
  report("delta sequence peak", rel <= 1e-12, rel);
  const FilterKernel kernel(N, R, w.k, config_.inversion.radial_points);
  report("filter vanishes at zero", kernel.h(0.0) == 0.0, kernel.h(0.0));

  const VolumeGrid small = build_volume_grid(config_.medium.domain_radius(), 4);
  const Direction alpha(config_.incidence.alpha);
  const IncidentWave inc(alpha, config_.incidence.polarization.value_or(polarization_pair(alpha).first), w);
  const FieldSolution s = solve_forward(small, MediumSpec::vacuum(config_.medium.domain_radius()), inc, config_.solver);
  const FieldValues E0 = incident_field(small, inc);
  const double zero_err = (s.E - E0).norm() / E0.norm();
  report("zero scatterer leaves the incident field", zero_err <= 1e-12, zero_err);
  leave();
  return ok;
}

int run_command(const std::string& command, const std::string& config_path, const Overrides& overrides,
                const std::optional<std::string>& data_path) {
  auto fail = [](const char* stage, const std::string& message, int code) {
    std::cerr << "emis: " << stage << " failed: " << message << '\n';
    return code;
  };
  RunConfig config;
  try {
    config = load_config(config_path);
    apply_overrides(config, overrides);
  } catch (const ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const IoError& e) {
    return fail("config", e.what(), kExitIo);
  }

  Runner runner(std::move(config), overrides.quiet);
  try {
    if (command == "synth") runner.synth();
    else if (command == "forward") runner.forward();
    else if (command == "invert") runner.invert(data_path.value());
    else if (command == "pipeline") runner.pipeline();
    else if (command == "validate") return runner.validate() ? 0 : fail("validation", "invariant check failed", kExitSolver);
    else return fail("config", "unknown command " + command, kExitConfig);
  } catch (const ConfigError& e) {
    return fail(to_string(runner.stage()), e.what(), kExitConfig);
  } catch (const IoError& e) {
    return fail(to_string(runner.stage()), e.what(), kExitIo);
  } catch (const std::exception& e) {
    return fail(to_string(runner.stage()), e.what(), kExitSolver);
  }
  return 0;
}

}  // namespace emis::cli
