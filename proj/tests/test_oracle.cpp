#include <cmath>

#include <gtest/gtest.h>

#include "emis/born.hpp"
#include "emis/error.hpp"
#include "oracle.hpp"

using namespace emis;

TEST(OracleApplyT, ZeroMediumAndSizeGuard) {
  const WaveParams w = WaveParams::from_k(2.0);
  const VolumeGrid g = build_volume_grid(1.0, 4);
  const FieldValues E = FieldValues::Ones(static_cast<Eigen::Index>(3 * g.size()));
  EXPECT_EQ(oracle::oracle_apply_T(g, MediumSpec::vacuum(1.0), w, E).norm(), 0.0);

  const VolumeGrid big = build_volume_grid(1.0, 10);
  ASSERT_GT(big.size(), oracle::kMaxApplyCells);
  try {
    oracle::oracle_apply_T(big, MediumSpec::vacuum(1.0), w,
                           FieldValues::Zero(static_cast<Eigen::Index>(3 * big.size())));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InstanceTooLarge);
  }
}

TEST(OracleBornF, MassAndDecay) {
  const WaveParams w = WaveParams::from_k(2.0);
  const Bump b{Vec3::Zero(), 0.9, {0.1, 0.0}, 3};
  // 4π ∫₀^ρ r² (1 - r²/ρ²)³ dr = 4π ρ³ · 16/315, times k² c.
  const double mass = 4.0 * kPi * std::pow(0.9, 3) * 16.0 / 315.0 * w.k * w.k * 0.1;
  EXPECT_NEAR(std::abs(oracle::oracle_born_f_radial(b, w, 0.0) - mass), 0.0, 1e-12);
  const double at2k = std::abs(oracle::oracle_born_f_radial(b, w, 2.0 * w.k));
  const double at4k = std::abs(oracle::oracle_born_f_radial(b, w, 4.0 * w.k));
  EXPECT_LT(at2k, mass);
  EXPECT_LT(at4k, at2k);
}

TEST(OracleReconstruct, ZeroDataAndSizeGuard) {
  ScatteringDataSet d;
  d.alpha_quadrature = build_sphere_quadrature(4, 4);
  d.beta_quadrature = build_sphere_quadrature(4, 4);
  d.wave = WaveParams::from_k(2.0);
  d.f = Eigen::MatrixXcd::Zero(16, 16);
  const std::vector<Vec3> few(3, Vec3(0.1, 0.2, 0.3));
  for (const Complex& v : oracle::oracle_reconstruct(d, few, 2, InversionConfig{})) EXPECT_EQ(v, Complex{});
  const std::vector<Vec3> many(4, Vec3::Zero());
  try {
    oracle::oracle_reconstruct(d, many, 2, InversionConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InstanceTooLarge);
  }
}

TEST(OracleKernels, RadialSelfIntegralClosedForm) {
  for (double a : {0.1, 0.7}) {
    for (double k : {0.5, 3.0}) {
      const Complex expected = (std::exp(kI * k * a) * (1.0 - kI * k * a) - 1.0) / (k * k);
      EXPECT_NEAR(std::abs(oracle::oracle_radial_self_integral(a, k) - expected), 0.0, 1e-12);
    }
  }
}
