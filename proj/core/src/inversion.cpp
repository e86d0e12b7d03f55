#include "emis/inversion.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include <Eigen/Core>

#include "emis/error.hpp"

namespace emis {

void InversionConfig::validate() const {
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "inversion.R must be > 0");
  if (radial_points < 32)
    throw Error(ErrorCode::InvalidArgument, "inversion.radial_points must be >= 32");
  if (N_max < 1) throw Error(ErrorCode::InvalidArgument, "inversion.N_max must be >= 1");
  if (N && (*N < 1 || *N > N_max))
    throw Error(ErrorCode::InvalidArgument, "inversion.N must lie in [1, N_max]");
}

double delta_shape_factor(double b) {
  if (std::abs(b) < 0.5) {
    // 3 Σ_{m>=1} (-1)^{m+1} 2m b^{2m-2} / (2m+1)! = 1 - b²/10 + b⁴/280 - ...
    const double b2 = b * b;
    double term = 1.0;
    double sum = 0.0;
    for (int m = 1; m <= 10; ++m) {
      sum += term;
      term *= -b2 * (m + 1.0) / (m * (2.0 * m + 2.0) * (2.0 * m + 3.0));
    }
    return sum;
  }
  return (std::sin(b) - b * std::cos(b)) / (b * b * b / 3.0);
}

double delta_N(double r, int N, double R, double k) {
  if (r < 0.0 || r > 2.0 * R) return 0.0;
  const double b = 2.0 * k * r / (2.0 * N + 3.0);
  const double bump = std::pow(1.0 - r * r / (4.0 * R * R), N);
  const double scale = std::pow(N / (4.0 * kPi * R * R), 1.5);
  return bump * scale * std::pow(delta_shape_factor(b), 2 * N + 3);
}

FilterKernel::FilterKernel(int N, double R, double k, int radial_points) : N_(N), R_(R), k_(k) {
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
  if (!(R > 0.0)) throw Error(ErrorCode::InvalidArgument, "R must be > 0");
  if (radial_points < 32) throw Error(ErrorCode::InvalidArgument, "radial_points must be >= 32");
  const GaussLegendreRule rule = gauss_legendre(radial_points, 0.0, 2.0 * R);
  radii_ = rule.nodes;
  weights_.resize(rule.weights.size());
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    const double r = radii_[i];
    weights_[i] = 4.0 * kPi * rule.weights[i] * r * r * delta_N(r, N, R, k);
  }
}

double FilterKernel::a(double z_norm) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    const double x = z_norm * radii_[i];
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    sum += weights_[i] * sinc;
  }
  return sum;
}

double FilterKernel::h(double z_norm) const {
  return z_norm * a(z_norm) * k_ * k_ / (32.0 * std::pow(kPi, 4));
}

double a_N(double z_norm, int N, double R, double k, int radial_points) {
  return FilterKernel(N, R, k, radial_points).a(z_norm);
}

double h_N(double z_norm, int N, double R, double k, int radial_points) {
  return FilterKernel(N, R, k, radial_points).h(z_norm);
}

std::vector<std::vector<Complex>> reconstruct_sweep(const ScatteringDataSet& data,
                                                    std::span<const Vec3> points,
                                                    std::span<const int> orders,
                                                    const InversionConfig& config) {
  data.validate();
  config.validate();
  const double k = data.wave.k;
  const auto& alphas = data.alpha_quadrature.nodes();
  const auto& betas = data.beta_quadrature.nodes();
  const auto& wa = data.alpha_quadrature.weights();
  const auto& wb = data.beta_quadrature.weights();
  const Eigen::Index na = static_cast<Eigen::Index>(alphas.size());
  const Eigen::Index nb = static_cast<Eigen::Index>(betas.size());
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());

  // e^{-ik(α-β)·x} = e^{ikβ·x} e^{-ikα·x}
  Eigen::MatrixXcd beta_phase(np, nb);
  Eigen::MatrixXcd alpha_phase(np, na);
  for (Eigen::Index c = 0; c < np; ++c) {
    const Vec3& x = points[static_cast<std::size_t>(c)];
    for (Eigen::Index i = 0; i < nb; ++i) beta_phase(c, i) = std::exp(kI * (k * betas[i].dot(x)));
    for (Eigen::Index j = 0; j < na; ++j)
      alpha_phase(c, j) = std::exp(-kI * (k * alphas[j].dot(x)));
  }

  // |αⱼ - βᵢ| per pair, with h_N cached on that norm binned at 1e-12.
  Eigen::MatrixXd gap(nb, na);
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < na; ++j) gap(i, j) = (alphas[j].vec() - betas[i].vec()).norm();

  std::vector<std::vector<Complex>> out;
  out.reserve(orders.size());
  for (const int N : orders) {
    if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be >= 1");
    const FilterKernel kernel(N, config.R, k, config.radial_points);
    std::unordered_map<long long, double> cache;
    Eigen::MatrixXcd weighted(nb, na);
    for (Eigen::Index i = 0; i < nb; ++i)
      for (Eigen::Index j = 0; j < na; ++j) {
        const long long key = std::llround(gap(i, j) * 1e12);
        auto it = cache.find(key);
        if (it == cache.end()) it = cache.emplace(key, kernel.h(k * gap(i, j))).first;
        weighted(i, j) = kPairMeasureFactor * wb[i] * wa[j] * it->second * data.f(i, j);
      }
    const Eigen::MatrixXcd partial = beta_phase * weighted;
    std::vector<Complex> values(static_cast<std::size_t>(np));
    for (Eigen::Index c = 0; c < np; ++c)
      values[static_cast<std::size_t>(c)] = (partial.row(c).array() * alpha_phase.row(c).array()).sum();
    out.push_back(std::move(values));
  }
  return out;
}

std::vector<Complex> reconstruct_at(const ScatteringDataSet& data, std::span<const Vec3> points,
                                    int N, const InversionConfig& config) {
  const int orders[] = {N};
  return std::move(reconstruct_sweep(data, points, orders, config).front());
}

double l2_norm(const VolumeGrid& grid, std::span<const Complex> values) {
  double sum = 0.0;
  for (const Complex& v : values) sum += std::norm(v);
  return std::sqrt(sum * grid.cell_volume());
}

ParameterChoice quasi_optimal_N(const ScatteringDataSet& data, const VolumeGrid& grid,
                                const InversionConfig& config) {
  config.validate();
  ParameterChoice choice;
  if (config.N_max < 2) return choice;
  std::vector<int> orders(static_cast<std::size_t>(config.N_max));
  for (int N = 1; N <= config.N_max; ++N) orders[static_cast<std::size_t>(N - 1)] = N;
  const auto sweep = reconstruct_sweep(data, grid.centers(), orders, config);
  double best = 0.0;
  for (std::size_t n = 0; n + 1 < sweep.size(); ++n) {
    std::vector<Complex> diff(sweep[n].size());
    for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = sweep[n + 1][c] - sweep[n][c];
    const double d = l2_norm(grid, diff);
    choice.differences.push_back(d);
    if (n == 0 || d < best) {
      best = d;
      choice.N = static_cast<int>(n) + 1;
    }
  }
  return choice;
}

int choose_N(const ScatteringDataSet& data, const VolumeGrid& grid, const InversionConfig& config) {
  if (data.provenance != Provenance::Noisy || !(data.noise_level > 0.0))
    throw Error(ErrorCode::InvalidArgument, "choose_N requires noisy data with delta > 0");
  return quasi_optimal_N(data, grid, config).N;
}

ReconstructionResult reconstruct(const ScatteringDataSet& data, const VolumeGrid& grid,
                                 const InversionConfig& config) {
  config.validate();
  ReconstructionResult result;
  result.grid = grid;
  if (config.N) {
    result.chosen_N = *config.N;
  } else if (data.provenance == Provenance::Noisy) {
    const ParameterChoice choice = quasi_optimal_N(data, grid, config);
    result.chosen_N = choice.N;
    result.residual_history = choice.differences;
  } else {
    result.chosen_N = config.N_max;
  }
  result.p = reconstruct_at(data, grid.centers(), result.chosen_N, config);
  return result;
}

std::vector<Complex> recover_eps(const ReconstructionResult& result, const WaveParams& wave) {
  std::vector<Complex> eps(result.p.size());
  for (std::size_t c = 0; c < eps.size(); ++c) eps[c] = p_to_eps(result.p[c], wave);
  return eps;
}

double error_metric(const ReconstructionResult& result, const MediumSpec& medium,
                    const WaveParams& wave, const VolumeGrid& grid) {
  if (result.p.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "reconstruction does not match the grid");
  std::vector<Complex> truth(grid.size());
  std::vector<Complex> diff(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    truth[c] = eval_p(medium, wave, grid.center(c));
    diff[c] = result.p[c] - truth[c];
  }
  const double truth_norm = l2_norm(grid, truth);
  if (truth_norm == 0.0) throw Error(ErrorCode::ZeroTruth, "true contrast is identically zero");
  return l2_norm(grid, diff) / truth_norm;
}

}  // namespace emis
