#pragma once

// Brute-force reference implementations for tests. Nothing here calls the
// production evaluation paths: the bump profile, kernels, filter and
// quadratures are re-derived from their definitions. Only the domain types
// (grids, quadratures, data sets, configs) are shared.

#include <span>
#include <vector>

#include "emis/dataset.hpp"
#include "emis/geometry.hpp"
#include "emis/inversion.hpp"
#include "emis/medium.hpp"
#include "emis/types.hpp"

namespace emis::oracle {

inline constexpr std::size_t kMaxApplyCells = 512;    // 8³
inline constexpr std::size_t kMaxReconstructTerms = 1000;

/// Nested-loop T·E. Throws InstanceTooLarge above kMaxApplyCells cells.
FieldValues oracle_apply_T(const VolumeGrid& grid, const MediumSpec& medium,
                           const WaveParams& wave, const FieldValues& E);

/// 4π ∫₀^ρ r² p(r) sin(ξr)/(ξr) dr for one centered-at-its-own-center bump, adaptive to 1e-10.
Complex oracle_born_f_radial(const Bump& bump, const WaveParams& wave, double xi_norm);

/// Triple loop over (β, α, point) with a fresh h_N per term.
/// Throws InstanceTooLarge above kMaxReconstructTerms pair×point terms.
std::vector<Complex> oracle_reconstruct(const ScatteringDataSet& data,
                                        std::span<const Vec3> points, int N,
                                        const InversionConfig& config);

// Independent pieces, exposed for kernel tests.
double oracle_delta_N(double r, int N, double R, double k);
/// ∫_{|x|<=2R} δ_N(|x|) e^{-iz·x} dx by a spherical product rule with its pole on the z-axis.
Complex oracle_a_N_3d(const Vec3& z, int N, double R, double k);
/// Adaptive 1D radial form of a_N.
double oracle_a_N_radial(double z_norm, int N, double R, double k);
/// ∫₀^a r e^{ikr} dr by adaptive quadrature.
Complex oracle_radial_self_integral(double a, double k);

}  // namespace emis::oracle
