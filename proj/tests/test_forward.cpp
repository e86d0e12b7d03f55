#include <cmath>
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "emis/amplitude.hpp"
#include "emis/born.hpp"
#include "emis/error.hpp"
#include "emis/forward.hpp"
#include "oracle.hpp"

using namespace emis;

namespace {

FieldValues random_field(std::size_t cells, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  FieldValues E(static_cast<Eigen::Index>(3 * cells));
  for (Eigen::Index i = 0; i < E.size(); ++i) E(i) = Complex{n(rng), n(rng)};
  return E;
}

MediumSpec smooth_bump(double c, double rho = 1.0) {
  return MediumSpec(1.0, {Bump{Vec3::Zero(), rho, {c, 0.2 * c}, 3}});
}

IncidentWave tilted_wave(const WaveParams& w) {
  const Direction alpha = Direction::normalized(Vec3(0.3, 0.2, 1.0));
  return IncidentWave(alpha, polarization_pair(alpha).first, w);
}

}  // namespace

TEST(Green, Examples) {
  const Vec3 x(0.2, 0.3, 0.4);
  const Vec3 y = x + Vec3(0.0, 1.0, 0.0);
  EXPECT_NEAR(std::abs(green(x, y, 0.0) - 1.0 / (4.0 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(green(x, y, kPi) + 1.0 / (4.0 * kPi)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(green(x, x + Vec3(2.0, 0, 0), 1.0)), 1.0 / (8.0 * kPi), 1e-15);
  EXPECT_THROW(green(x, x, 1.0), Error);
  EXPECT_THROW(grad_green(x, x, 1.0), Error);
}

TEST(GradGreen, StaticLimitAndAntisymmetry) {
  const Vec3 x(0.1, -0.2, 0.3);
  const Vec3 d = Vec3(1.0, 2.0, -2.0) / 3.0;
  const CVec3 g0 = grad_green(x, x - d, 0.0);
  EXPECT_LE((g0 + (d / (4.0 * kPi)).cast<Complex>()).norm(), 1e-15);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20; ++i) {
    const Vec3 a(u(rng), u(rng), u(rng));
    const Vec3 b(u(rng), u(rng), u(rng));
    EXPECT_LE((grad_green(a, b, 2.3) + grad_green(b, a, 2.3)).norm(), 1e-14 * grad_green(a, b, 2.3).norm());
  }
}

TEST(GradGreen, MatchesFiniteDifference) {
  const Vec3 x(0.4, -0.1, 0.7);
  const Vec3 y(-0.2, 0.3, 0.1);
  const double k = 3.0;
  const double step = 1e-5;
  const CVec3 g = grad_green(x, y, k);
  CVec3 fd;
  for (int c = 0; c < 3; ++c) {
    Vec3 dx = Vec3::Zero();
    dx(c) = step;
    fd(c) = (green(x + dx, y, k) - green(x - dx, y, k)) / (2.0 * step);
  }
  EXPECT_LE((g - fd).norm(), 1e-6 * g.norm());
}

TEST(ApplyT, ZeroMediumGivesZero) {
  const VolumeGrid g = build_volume_grid(1.0, 5);
  const FieldValues TE = apply_T(g, MediumSpec::vacuum(1.0), WaveParams::from_k(2.0), random_field(g.size(), 1));
  EXPECT_EQ(TE.norm(), 0.0);
}

TEST(ApplyT, SingleCellIsSelfTermOnly) {
  const VolumeGrid g = build_volume_grid(1.0, 1);
  const WaveParams w = WaveParams::from_k(1.3);
  const MediumSpec m = smooth_bump(0.2);
  const FieldValues E = random_field(1, 2);
  const FieldValues TE = apply_T(g, m, w, E);
  const Complex expected = self_cell_integral(g.spacing(), w.k) * eval_p(m, w, Vec3::Zero());
  EXPECT_LE((TE - expected * E).norm(), 1e-15 * TE.norm());
}

TEST(ApplyT, MatchesBruteForceOracle) {
  const WaveParams w = WaveParams::from_k(2.2);
  const MediumSpec m(1.0, {Bump{Vec3(0.2, 0, 0), 0.7, {0.3, 0.1}, 3},
                           Bump{Vec3(-0.3, 0.2, 0.1), 0.5, {0.1, 0.0}, 4}});
  for (int n = 1; n <= 6; ++n) {
    const VolumeGrid g = build_volume_grid(1.0, n);
    const FieldValues E = random_field(g.size(), 10 + n);
    const FieldValues fast = apply_T(g, m, w, E);
    const FieldValues slow = oracle::oracle_apply_T(g, m, w, E);
    EXPECT_LE((fast - slow).norm(), 1e-12 * slow.norm()) << "n = " << n;
  }
}

TEST(ApplyT, AssembledSystemMatchesMatrixFree) {
  const WaveParams w = WaveParams::from_k(2.0);
  const auto g = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, 5));
  const ForwardOperator op(g, smooth_bump(0.2, 0.9), w);
  const FieldValues E = random_field(g->size(), 4);
  const FieldValues via_matrix = op.assemble_system() * E;
  EXPECT_LE((via_matrix - (E - op.apply(E))).norm(), 1e-13 * E.norm());
}

TEST(SolveForward, ZeroMediumReturnsIncidentField) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 6);
  const IncidentWave inc = tilted_wave(w);
  const FieldSolution s = solve_forward(g, MediumSpec::vacuum(1.0), inc);
  EXPECT_EQ((s.E - incident_field(g, inc)).norm(), 0.0);
  EXPECT_EQ(s.solver_residual, 0.0);
}

TEST(SolveForward, SingleCellClosedForm) {
  const WaveParams w = WaveParams::from_k(1.7);
  const VolumeGrid g = build_volume_grid(1.0, 1);
  const MediumSpec m = smooth_bump(0.4);
  const IncidentWave inc = tilted_wave(w);
  const FieldSolution s = solve_forward(g, m, inc);
  const Complex sp = self_cell_integral(g.spacing(), w.k) * eval_p(m, w, Vec3::Zero());
  const CVec3 expected = inc.at(Vec3::Zero()) / (1.0 - sp);
  EXPECT_LE((s.at(0) - expected).norm(), 1e-14);
}

TEST(SolveForward, DenseAndIterativeAgree) {
  const WaveParams w = WaveParams::from_k(2.0);
  const auto g = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, 8));
  const MediumSpec m = smooth_bump(0.1);
  const IncidentWave inc = tilted_wave(w);
  SolverConfig dense;
  dense.method = SolverMethod::Dense;
  SolverConfig iterative;
  iterative.method = SolverMethod::Iterative;
  ForwardOperator op_dense(g, m, w, dense);
  ForwardOperator op_iter(g, m, w, iterative);
  const FieldSolution a = op_dense.solve(inc);
  const FieldSolution b = op_iter.solve(inc);
  EXPECT_LE(a.solver_residual, dense.dense_tolerance);
  EXPECT_LE(b.solver_residual, iterative.iterative_tolerance);
  EXPECT_GT(b.iterations, 0);
  EXPECT_LE((a.E - b.E).norm(), 1e-6 * a.E.norm());
  // Fredholm consistency, recomputed independently.
  EXPECT_LE(op_dense.relative_residual(a.E, incident_field(*g, inc)), dense.dense_tolerance);
}

TEST(SolveForward, IterativeNonConvergenceIsReported) {
  const WaveParams w = WaveParams::from_k(3.0);
  SolverConfig cfg;
  cfg.method = SolverMethod::Iterative;
  cfg.max_iterations = 1;
  cfg.iterative_tolerance = 1e-14;
  try {
    solve_forward(build_volume_grid(1.0, 6), smooth_bump(0.5), tilted_wave(w), cfg);
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
  }
}

TEST(SolveForward, BornRegimeDiscrepancyIsQuadratic) {
  const WaveParams w = WaveParams::from_k(2.0);
  const auto g = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, 7));
  const IncidentWave inc = tilted_wave(w);
  const FieldValues E0 = incident_field(*g, inc);
  const MediumSpec unit = smooth_bump(1.0);
  // q is not linear in the contrast, so take the derivative of T at zero contrast.
  const double eps = 1e-7;
  const FieldValues T1E0 = ForwardOperator(g, unit.scaled(eps), w).apply(E0) / eps;
  auto discrepancy = [&](double t) {
    const FieldSolution s = solve_forward(*g, unit.scaled(t), inc);
    return (s.E - E0 - t * T1E0).norm();
  };
  for (double t : {0.1, 0.05}) {
    const double ratio = discrepancy(t / 2.0) / discrepancy(t);
    EXPECT_GE(ratio, 0.15) << t;
    EXPECT_LE(ratio, 0.4) << t;
  }
}

TEST(DivergenceDiagnostic, ConstantFieldIsDivergenceFree) {
  const WaveParams w = WaveParams::from_k(1.0);
  const auto g = std::make_shared<const VolumeGrid>(build_volume_grid(1.0, 6));
  const MediumSpec vac = MediumSpec::vacuum(1.0);
  const auto samples = std::make_shared<const ScattererSamples>(sample_medium(vac, w, *g));
  const IncidentWave inc(Direction(Vec3(0, 0, 1)), Vec3(1, 0, 0), w);
  FieldValues E(3 * g->size());
  for (std::size_t c = 0; c < g->size(); ++c) E.segment<3>(3 * c) = CVec3(Complex{1, 2}, 3.0, -1.0);
  const FieldSolution s{g, samples, inc, E, 0.0, 0};
  EXPECT_LE(divergence_diagnostic(s, vac), 1e-14);
}

TEST(DivergenceDiagnostic, PlaneWaveErrorIsSecondOrder) {
  const WaveParams w = WaveParams::from_k(2.0);
  const MediumSpec vac = MediumSpec::vacuum(1.0);
  const IncidentWave inc = tilted_wave(w);
  double previous = 0.0;
  for (int n : {8, 16}) {
    const VolumeGrid g = build_volume_grid(1.0, n);
    const double kh = w.k * g.spacing();
    const double d = divergence_diagnostic(solve_forward(g, vac, inc), vac);
    EXPECT_LE(d, kh * kh);
    if (previous > 0.0) EXPECT_GE(previous / d, 3.0);
    previous = d;
  }
}

TEST(DivergenceDiagnostic, CoarseGridRejected) {
  const WaveParams w = WaveParams::from_k(1.0);
  const MediumSpec vac = MediumSpec::vacuum(1.0);
  const FieldSolution s = solve_forward(build_volume_grid(1.0, 2), vac, tilted_wave(w));
  try {
    divergence_diagnostic(s, vac);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
}

TEST(ScatteredField, ZeroMediumAndErrors) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 5);
  const FieldSolution s = solve_forward(g, MediumSpec::vacuum(1.0), tilted_wave(w));
  EXPECT_EQ(scattered_field_at(s, Vec3(3.0, 0, 0)).norm(), 0.0);
  try {
    scattered_field_at(s, Vec3(0.5, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointInsideDomain);
  }
}

TEST(ScatteredField, LinearInStoredField) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 6);
  FieldSolution s = solve_forward(g, smooth_bump(0.1), tilted_wave(w));
  const Vec3 x(4.0, -2.0, 1.0);
  const CVec3 v1 = scattered_field_at(s, x);
  s.E *= 2.0;
  EXPECT_LE((scattered_field_at(s, x) - 2.0 * v1).norm(), 1e-15 * v1.norm());
}

TEST(IncidentWave, RejectsInvalidPolarization) {
  const WaveParams w = WaveParams::from_k(1.0);
  const Direction z(Vec3(0, 0, 1));
  EXPECT_THROW(IncidentWave(z, Vec3(0, 0, 1), w), Error);
  EXPECT_THROW(IncidentWave(z, Vec3(2, 0, 0), w), Error);
  EXPECT_NO_THROW(IncidentWave(z, Vec3(0, 1, 0), w));
}
