#include "emis/born.hpp"

#include <cmath>
#include <random>

#include "emis/error.hpp"

namespace emis {

const char* to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::BornExact: return "born-exact";
    case Provenance::FullSolver: return "full-solver";
    case Provenance::Noisy: return "noisy";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "born-exact") return Provenance::BornExact;
  if (s == "full-solver") return Provenance::FullSolver;
  if (s == "noisy") return Provenance::Noisy;
  throw Error(ErrorCode::InvalidArgument, "unknown provenance '" + s + "'");
}

void ScatteringDataSet::validate() const {
  if (static_cast<std::size_t>(f.rows()) != beta_quadrature.size() ||
      static_cast<std::size_t>(f.cols()) != alpha_quadrature.size())
    throw Error(ErrorCode::InconsistentQuadratures,
                "data matrix is " + std::to_string(f.rows()) + "x" + std::to_string(f.cols()) +
                    " but quadratures have " + std::to_string(beta_quadrature.size()) + " beta and " +
                    std::to_string(alpha_quadrature.size()) + " alpha nodes");
  if ((noise_level != 0.0) != (provenance == Provenance::Noisy))
    throw Error(ErrorCode::InvalidArgument, "noise level must be > 0 exactly for noisy data");
  if (noise_level < 0.0) throw Error(ErrorCode::InvalidArgument, "noise level must be >= 0");
}

double ScatteringDataSet::weighted_norm(const Eigen::MatrixXcd& values) const {
  const auto& wb = beta_quadrature.weights();
  const auto& wa = alpha_quadrature.weights();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j)
      sum += wb[i] * wa[j] * std::norm(values(i, j));
  return std::sqrt(sum);
}

Complex born_f(const MediumSpec& medium, const WaveParams& wave, const Direction& alpha,
               const Direction& beta, const VolumeGrid& grid) {
  const Vec3 xi = wave.k * (alpha.vec() - beta.vec());
  const double h3 = grid.cell_volume();
  Complex sum{0.0, 0.0};
  for (const Vec3& y : grid.centers()) {
    const Complex p = eval_p(medium, wave, y);
    if (p == Complex{}) continue;
    sum += std::exp(kI * xi.dot(y)) * p;
  }
  return sum * h3;
}

CVec3 born_amplitude(const MediumSpec& medium, const WaveParams& wave, const Direction& alpha,
                     const Direction& beta, const Vec3& polarization, const VolumeGrid& grid) {
  if (std::abs(polarization.dot(alpha.vec())) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "polarization must be orthogonal to alpha");
  const Vec3 xi = wave.k * (alpha.vec() - beta.vec());
  const CVec3 pol = polarization.cast<Complex>();
  Complex p_sum{0.0, 0.0};
  Complex q_sum{0.0, 0.0};
  for (const Vec3& y : grid.centers()) {
    const Complex p = eval_p(medium, wave, y);
    const CVec3 q = eval_q(medium, wave, y);
    const Complex phase = std::exp(kI * xi.dot(y));
    p_sum += phase * p;
    q_sum += phase * bilinear_dot(q, pol);
  }
  const double h3 = grid.cell_volume();
  return (h3 / (4.0 * kPi)) * (p_sum * pol + (kI * wave.k * q_sum) * beta.vec().cast<Complex>());
}

ScatteringDataSet synthesize_dataset(const MediumSpec& medium, const WaveParams& wave,
                                     const SphereQuadrature& alpha_quad,
                                     const SphereQuadrature& beta_quad, const VolumeGrid& grid) {
  // f = B·diag(p h³)·A with B(i,c) = e^{-ikβᵢ·y_c} and A(c,j) = e^{ikαⱼ·y_c}, over active cells.
  std::vector<std::size_t> active;
  std::vector<Complex> weights;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Complex p = eval_p(medium, wave, grid.center(c));
    if (p == Complex{}) continue;
    active.push_back(c);
    weights.push_back(p * grid.cell_volume());
  }
  const Eigen::Index na = static_cast<Eigen::Index>(alpha_quad.size());
  const Eigen::Index nb = static_cast<Eigen::Index>(beta_quad.size());
  const Eigen::Index nc = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXcd B(nb, nc);
  Eigen::MatrixXcd A(nc, na);
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Vec3& y = grid.center(active[c]);
    for (Eigen::Index i = 0; i < nb; ++i)
      B(i, c) = std::exp(-kI * (wave.k * beta_quad.nodes()[i].dot(y)));
    for (Eigen::Index j = 0; j < na; ++j)
      A(c, j) = weights[c] * std::exp(kI * (wave.k * alpha_quad.nodes()[j].dot(y)));
  }
  ScatteringDataSet data;
  data.alpha_quadrature = alpha_quad;
  data.beta_quadrature = beta_quad;
  data.wave = wave;
  data.provenance = Provenance::BornExact;
  data.f = (nc == 0) ? Eigen::MatrixXcd::Zero(nb, na) : Eigen::MatrixXcd(B * A);
  return data;
}

ScatteringDataSet add_noise(const ScatteringDataSet& data, double delta, std::uint64_t seed) {
  if (data.provenance == Provenance::Noisy)
    throw Error(ErrorCode::InvalidArgument, "data set is already noisy");
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "noise level must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd noise(data.f.rows(), data.f.cols());
  for (Eigen::Index i = 0; i < noise.rows(); ++i)
    for (Eigen::Index j = 0; j < noise.cols(); ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      noise(i, j) = Complex{re, im};
    }
  const double norm = data.weighted_norm(noise);
  ScatteringDataSet out = data;
  out.f = data.f + (delta / norm) * noise;
  out.noise_level = delta;
  out.seed = seed;
  out.provenance = Provenance::Noisy;
  return out;
}

}  // namespace emis
