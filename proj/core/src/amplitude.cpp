#include "emis/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "emis/error.hpp"

namespace emis {

CVec3 scattering_amplitude(const FieldSolution& field, const Direction& beta) {
  const VolumeGrid& grid = *field.grid;
  const ScattererSamples& s = *field.samples;
  CVec3 p_sum = CVec3::Zero();
  Complex q_sum{0.0, 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!s.cell_active(j)) continue;
    const Complex phase = std::exp(-kI * (s.k * beta.dot(grid.center(j))));
    const CVec3 Ej = field.at(j);
    p_sum += (phase * s.p[j]) * Ej;
    q_sum += phase * bilinear_dot(s.q[j], Ej);
  }
  const double h3 = grid.cell_volume();
  return (h3 / (4.0 * kPi)) * (p_sum + (kI * s.k * q_sum) * beta.vec().cast<Complex>());
}

AmplitudeSample amplitude_sample(const FieldSolution& field, const Direction& beta) {
  return {field.incident.alpha(), beta, field.incident.polarization(),
          scattering_amplitude(field, beta)};
}

Complex project_f(const CVec3& A, const Direction& beta, const Vec3& polarization,
                  double min_sin2) {
  const Vec3 b_cross_e = beta.vec().cross(polarization);
  const double sin2 = b_cross_e.squaredNorm();
  if (sin2 < min_sin2)
    throw Error(ErrorCode::PolarizationDegenerate,
                "sin^2 of the angle between beta and polarization is " + std::to_string(sin2));
  // Eigen conjugates complex cross products, so spell it out.
  const Vec3& b = beta.vec();
  const CVec3 b_cross_A(b.y() * A.z() - b.z() * A.y(), b.z() * A.x() - b.x() * A.z(),
                        b.x() * A.y() - b.y() * A.x());
  return 4.0 * kPi * bilinear_dot(b_cross_A, b_cross_e.cast<Complex>()) / sin2;
}

double far_field_residual(const FieldSolution& field, const Direction& beta, double r) {
  if (!(r >= 10.0 * field.grid->radius()))
    throw Error(ErrorCode::InvalidArgument, "far_field_residual needs r >= 10 x grid radius");
  const CVec3 A = scattering_amplitude(field, beta);
  const double k = field.samples->k;
  const CVec3 far = (std::exp(kI * (k * r)) / r) * A;
  const double denom = far.norm();
  if (denom == 0.0) throw Error(ErrorCode::DegenerateAmplitude, "scattering amplitude is zero");
  const CVec3 v = scattered_field_at(field, r * beta.vec());
  return (v - far).norm() / denom;
}

namespace {

// Amplitudes for every β at once: row i of the result is A(βᵢ).
// phases(i, c) = e^{-ikβᵢ·y_c} h³/(4π) over the grid cells.
Eigen::MatrixXcd amplitudes_for_all(const Eigen::MatrixXcd& phases, const Eigen::MatrixX3d& betas,
                                    const FieldSolution& field) {
  const ScattererSamples& s = *field.samples;
  const Eigen::Index cells = phases.cols();
  Eigen::MatrixXcd sources(cells, 4);
  for (Eigen::Index c = 0; c < cells; ++c) {
    const CVec3 E = field.at(static_cast<std::size_t>(c));
    sources.block<1, 3>(c, 0) = (s.p[c] * E).transpose();
    sources(c, 3) = bilinear_dot(s.q[c], E);
  }
  const Eigen::MatrixXcd sums = phases * sources;
  Eigen::MatrixXcd A = sums.leftCols<3>();
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    A.row(i) += (kI * s.k * sums(i, 3)) * betas.row(i).cast<Complex>();
  return A;
}

}  // namespace

std::pair<Vec3, Vec3> polarization_pair(const Direction& alpha) {
  const Vec3& a = alpha.vec();
  // Cross with the coordinate axis least aligned with α.
  Eigen::Index axis = 0;
  a.cwiseAbs().minCoeff(&axis);
  const Vec3 e1 = a.cross(Vec3::Unit(axis)).normalized();
  const Vec3 e2 = a.cross(e1).normalized();
  return {e1, e2};
}

ScatteringDataSet build_dataset(const MediumSpec& medium, const WaveParams& wave,
                                const SphereQuadrature& alpha_quad,
                                const SphereQuadrature& beta_quad, const VolumeGrid& grid,
                                const SolverConfig& config, SolveStats* stats) {
  ForwardOperator op(std::make_shared<const VolumeGrid>(grid), medium, wave, config);
  SolveStats local;
  local.dense = op.uses_dense();
  auto record = [&local](const FieldSolution& s) {
    ++local.solves;
    local.max_residual = std::max(local.max_residual, s.solver_residual);
    local.max_iterations = std::max(local.max_iterations, s.iterations);
  };
  const std::size_t na = alpha_quad.size();
  const std::size_t nb = beta_quad.size();
  ScatteringDataSet data;
  data.alpha_quadrature = alpha_quad;
  data.beta_quadrature = beta_quad;
  data.wave = wave;
  data.provenance = Provenance::FullSolver;
  data.f = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(na));
  data.polarization_choice.assign(nb * na, 0);

  const Eigen::Index cells = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXcd phases(static_cast<Eigen::Index>(nb), cells);
  Eigen::MatrixX3d betas(static_cast<Eigen::Index>(nb), 3);
  const double scale = grid.cell_volume() / (4.0 * kPi);
  for (std::size_t i = 0; i < nb; ++i) {
    const Direction& beta = beta_quad.nodes()[i];
    betas.row(static_cast<Eigen::Index>(i)) = beta.vec().transpose();
    for (Eigen::Index c = 0; c < cells; ++c)
      phases(static_cast<Eigen::Index>(i), c) =
          scale * std::exp(-kI * (wave.k * beta.dot(grid.center(static_cast<std::size_t>(c)))));
  }

  for (std::size_t j = 0; j < na; ++j) {
    const Direction& alpha = alpha_quad.nodes()[j];
    const auto [e1, e2] = polarization_pair(alpha);
    const FieldSolution s1 = op.solve(IncidentWave(alpha, e1, wave));
    const FieldSolution s2 = op.solve(IncidentWave(alpha, e2, wave));
    record(s1);
    record(s2);
    const Eigen::MatrixXcd A1 = amplitudes_for_all(phases, betas, s1);
    const Eigen::MatrixXcd A2 = amplitudes_for_all(phases, betas, s2);
    for (std::size_t i = 0; i < nb; ++i) {
      const Direction& beta = beta_quad.nodes()[i];
      const double sin1 = beta.vec().cross(e1).squaredNorm();
      const double sin2 = beta.vec().cross(e2).squaredNorm();
      const bool second = sin2 > sin1;
      const CVec3 A = (second ? A2 : A1).row(static_cast<Eigen::Index>(i)).transpose();
      data.f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          project_f(A, beta, second ? e2 : e1);
      data.polarization_choice[i * na + j] = second ? 1 : 0;
    }
  }
  if (stats) *stats = local;
  return data;
}

}  // namespace emis
