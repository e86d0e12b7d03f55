#pragma once

#include <cstdint>

#include "emis/dataset.hpp"
#include "emis/geometry.hpp"
#include "emis/medium.hpp"

namespace emis {

/// Σⱼ e^{ik(α-β)·yⱼ} p(yⱼ) h³, the grid form of ∫ e^{ik(α-β)·y} p(y) dy.
Complex born_f(const MediumSpec& medium, const WaveParams& wave, const Direction& alpha,
               const Direction& beta, const VolumeGrid& grid);

/// Scattering amplitude with the total field replaced by ℰe^{ikα·y}.
CVec3 born_amplitude(const MediumSpec& medium, const WaveParams& wave, const Direction& alpha,
                     const Direction& beta, const Vec3& polarization, const VolumeGrid& grid);

/// f(βᵢ, αⱼ) = born_f for every node pair; provenance BornExact.
ScatteringDataSet synthesize_dataset(const MediumSpec& medium, const WaveParams& wave,
                                     const SphereQuadrature& alpha_quad,
                                     const SphereQuadrature& beta_quad, const VolumeGrid& grid);

/// Adds seeded complex Gaussian noise rescaled to weighted norm exactly `delta`.
ScatteringDataSet add_noise(const ScatteringDataSet& data, double delta, std::uint64_t seed);

}  // namespace emis
