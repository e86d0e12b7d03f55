#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "emis/amplitude.hpp"
#include "emis/born.hpp"
#include "emis/error.hpp"
#include "emis/inversion.hpp"
#include "oracle.hpp"

using namespace emis;

namespace {

Bump radial_bump(double rho, double c) { return Bump{Vec3::Zero(), rho, {c, 0.0}, 3}; }

MediumSpec offset_medium() {
  return MediumSpec(1.0, {Bump{Vec3(0.3, -0.1, 0.2), 0.6, {0.1, 0.03}, 3},
                          Bump{Vec3(-0.4, 0.2, 0.0), 0.5, {-0.05, 0.0}, 4}});
}

Direction random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Direction::normalized(Vec3(n(rng), n(rng), n(rng)));
}

}  // namespace

TEST(BornF, ForwardDirectionIsTheContrastMass) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 10);
  const MediumSpec m = offset_medium();
  const Direction d(Vec3(0, 1, 0));
  Complex mass{0.0, 0.0};
  for (const Vec3& y : g.centers()) mass += eval_p(m, w, y);
  mass *= g.cell_volume();
  EXPECT_NEAR(std::abs(born_f(m, w, d, d, g) - mass), 0.0, 1e-14 * std::abs(mass));
  EXPECT_EQ(born_f(MediumSpec::vacuum(1.0), w, d, Direction(Vec3(1, 0, 0)), g), Complex{});
}

TEST(BornF, MatchesRadialOracle) {
  const VolumeGrid g = build_volume_grid(1.0, 32);
  for (double rho : {0.8, 1.0}) {
    const Bump b = radial_bump(rho, 0.1);
    const MediumSpec m(1.0, {b});
    for (double k : {1.0, 4.0 / rho}) {
      const WaveParams w = WaveParams::from_k(k);
      const Direction alpha(Vec3(0, 0, 1));
      // Backscatter can sit near a zero of the transform; measure against the ξ = 0 scale there.
      const double scale = std::abs(oracle::oracle_born_f_radial(b, w, 0.0));
      for (const Vec3& bv : {Vec3(1, 0, 0), Vec3(0.6, 0.0, -0.8), Vec3(0, 0, -1)}) {
        const Direction beta(bv);
        const double xi = k * (alpha.vec() - beta.vec()).norm();
        const Complex ref = oracle::oracle_born_f_radial(b, w, xi);
        EXPECT_NEAR(std::abs(born_f(m, w, alpha, beta, g) - ref), 0.0, 1e-4 * std::max(std::abs(ref), 0.1 * scale))
            << "rho " << rho << " k " << k << " xi " << xi;
      }
    }
  }
}

TEST(BornF, DependsOnlyOnMomentumTransfer) {
  const WaveParams w = WaveParams::from_k(2.5);
  const VolumeGrid g = build_volume_grid(1.0, 9);
  const MediumSpec m = offset_medium();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Direction alpha = random_direction(rng);
    const Direction beta = random_direction(rng);
    // α' = -β, β' = -α keeps α - β fixed.
    const Complex f1 = born_f(m, w, alpha, beta, g);
    const Complex f2 = born_f(m, w, -beta, -alpha, g);
    EXPECT_NEAR(std::abs(f1 - f2), 0.0, 1e-12 * std::max(1.0, std::abs(f1)));
  }
}

TEST(BornAmplitude, ProjectsOntoBornF) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 8);
  const MediumSpec m = offset_medium();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  int checked = 0;
  while (checked < 20) {
    const Direction alpha = random_direction(rng);
    const Direction beta = random_direction(rng);
    const auto [e1, e2] = polarization_pair(alpha);
    const double t = angle(rng);
    const Vec3 pol = std::cos(t) * e1 + std::sin(t) * e2;
    if (beta.vec().cross(pol).squaredNorm() < kMinSin2Theta) continue;
    const CVec3 A = born_amplitude(m, w, alpha, beta, pol, g);
    const Complex f = born_f(m, w, alpha, beta, g);
    EXPECT_NEAR(std::abs(project_f(A, beta, pol) - f), 0.0, 1e-12 * std::max(1.0, std::abs(f)));
    EXPECT_LE((born_amplitude(m, w, alpha, beta, -pol, g) + A).norm(), 1e-15 * A.norm());
    ++checked;
  }
}

TEST(BornAmplitude, ZeroMediumAndBadPolarization) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 4);
  const Direction alpha(Vec3(0, 0, 1));
  EXPECT_EQ(born_amplitude(MediumSpec::vacuum(1.0), w, alpha, Direction(Vec3(1, 0, 0)), Vec3(0, 1, 0), g).norm(),
            0.0);
  EXPECT_THROW(born_amplitude(offset_medium(), w, alpha, alpha, Vec3(0, 0.6, 0.8), g), Error);
}

TEST(SynthesizeDataset, ZeroMediumAndShape) {
  const WaveParams w = WaveParams::from_k(2.0);
  const SphereQuadrature qa = build_sphere_quadrature(2, 3);
  const SphereQuadrature qb = build_sphere_quadrature(3, 5);
  const ScatteringDataSet d = synthesize_dataset(MediumSpec::vacuum(1.0), w, qa, qb, build_volume_grid(1.0, 4));
  EXPECT_EQ(d.f.rows(), 15);
  EXPECT_EQ(d.f.cols(), 6);
  EXPECT_EQ(d.f.norm(), 0.0);
  EXPECT_EQ(d.provenance, Provenance::BornExact);
  EXPECT_EQ(d.noise_level, 0.0);
  EXPECT_NO_THROW(d.validate());
}

TEST(SynthesizeDataset, RadialBumpIsRealAndRotationInvariant) {
  const WaveParams w = WaveParams::from_k(3.0);
  const SphereQuadrature q = build_sphere_quadrature(4, 8);
  const VolumeGrid g = build_volume_grid(1.0, 12);
  const ScatteringDataSet d = synthesize_dataset(MediumSpec(1.0, {radial_bump(1.0, 0.1)}), w, q, q, g);
  const double scale = d.f.cwiseAbs().maxCoeff();
  EXPECT_LE(d.f.imag().cwiseAbs().maxCoeff(), 1e-10 * scale);
  // A quarter turn about the z axis maps the node set and the cubic grid onto themselves.
  const int na = q.n_azimuth();
  auto turned = [&](std::size_t idx) {
    const std::size_t polar = idx / na;
    return polar * na + (idx % na + na / 4) % na;
  };
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      EXPECT_NEAR(std::abs(d.f(i, j) - d.f(turned(i), turned(j))), 0.0, 1e-10 * scale);
}

TEST(SynthesizeDataset, MatchesBornFPerEntry) {
  const WaveParams w = WaveParams::from_k(2.0);
  const SphereQuadrature qa = build_sphere_quadrature(2, 4);
  const SphereQuadrature qb = build_sphere_quadrature(3, 3);
  const VolumeGrid g = build_volume_grid(1.0, 7);
  const MediumSpec m = offset_medium();
  const ScatteringDataSet d = synthesize_dataset(m, w, qa, qb, g);
  for (std::size_t i = 0; i < qb.size(); ++i)
    for (std::size_t j = 0; j < qa.size(); ++j) {
      const Complex f = born_f(m, w, qa.nodes()[j], qb.nodes()[i], g);
      EXPECT_NEAR(std::abs(d.f(i, j) - f), 0.0, 1e-13 * std::abs(f));
    }
}

TEST(AddNoise, NormIsExactAndSeeded) {
  const WaveParams w = WaveParams::from_k(2.0);
  const SphereQuadrature q = build_sphere_quadrature(3, 6);
  const ScatteringDataSet d = synthesize_dataset(offset_medium(), w, q, q, build_volume_grid(1.0, 6));
  for (double delta : {1e-6, 1e-2, 3.0}) {
    const ScatteringDataSet a = add_noise(d, delta, 42);
    // a.f - d.f cancels down to δ, so the check is absolute for small δ.
    EXPECT_NEAR(d.weighted_norm(a.f - d.f), delta, 1e-12 * std::max(1.0, delta));
    EXPECT_EQ(a.provenance, Provenance::Noisy);
    EXPECT_EQ(a.noise_level, delta);
    EXPECT_EQ(a.seed, 42u);
    EXPECT_NO_THROW(a.validate());
    const ScatteringDataSet b = add_noise(d, delta, 42);
    EXPECT_TRUE(a.f == b.f);
    const ScatteringDataSet c = add_noise(d, delta, 43);
    EXPECT_FALSE(a.f == c.f);
  }
  EXPECT_THROW(add_noise(d, 0.0, 1), Error);
  EXPECT_THROW(add_noise(add_noise(d, 1e-3, 1), 1e-3, 2), Error);
}

TEST(AddNoise, TinyNoiseBarelyMovesTheReconstruction) {
  const WaveParams w = WaveParams::from_k(2.0);
  const SphereQuadrature q = build_sphere_quadrature(4, 8);
  const ScatteringDataSet d = synthesize_dataset(offset_medium(), w, q, q, build_volume_grid(1.0, 8));
  const ScatteringDataSet noisy = add_noise(d, 1e-30, 5);
  InversionConfig cfg;
  cfg.N = 4;
  const VolumeGrid g = build_volume_grid(1.0, 5);
  const ReconstructionResult a = reconstruct(d, g, cfg);
  const ReconstructionResult b = reconstruct(noisy, g, cfg);
  for (std::size_t c = 0; c < a.p.size(); ++c) EXPECT_LE(std::abs(a.p[c] - b.p[c]), 1e-20);
}

TEST(DataSet, ValidateAndProvenanceNames) {
  for (Provenance p : {Provenance::BornExact, Provenance::FullSolver, Provenance::Noisy})
    EXPECT_EQ(provenance_from_string(to_string(p)), p);
  EXPECT_STREQ(to_string(Provenance::BornExact), "born-exact");
  EXPECT_THROW(provenance_from_string("exact"), Error);

  ScatteringDataSet d;
  d.alpha_quadrature = build_sphere_quadrature(2, 2);
  d.beta_quadrature = build_sphere_quadrature(2, 3);
  d.wave = WaveParams::from_k(1.0);
  d.f = Eigen::MatrixXcd::Zero(4, 6);
  try {
    d.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InconsistentQuadratures);
  }
  d.f = Eigen::MatrixXcd::Zero(6, 4);
  EXPECT_NO_THROW(d.validate());
  d.noise_level = 0.1;
  EXPECT_THROW(d.validate(), Error);
  d.provenance = Provenance::Noisy;
  EXPECT_NO_THROW(d.validate());
  d.noise_level = 0.0;
  EXPECT_THROW(d.validate(), Error);
}
