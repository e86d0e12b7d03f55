#pragma once

#include <utility>

#include "emis/dataset.hpp"
#include "emis/forward.hpp"

namespace emis {

struct AmplitudeSample {
  Direction alpha;
  Direction beta;
  Vec3 polarization;
  CVec3 A;
};

/// Default admissibility threshold for project_f: sin²θ >= 0.4.
inline constexpr double kMinSin2Theta = 0.4;

/// A(β, α, k) = (1/4π) Σ e^{-ikβ·y} p E h³ + (ikβ/4π) Σ e^{-ikβ·y} (q·E) h³.
CVec3 scattering_amplitude(const FieldSolution& field, const Direction& beta);

AmplitudeSample amplitude_sample(const FieldSolution& field, const Direction& beta);

/// f = 4π ([β,A]·[β,ℰ]) / sin²θ with an unconjugated dot product.
/// Throws PolarizationDegenerate when sin²θ < min_sin2.
Complex project_f(const CVec3& A, const Direction& beta, const Vec3& polarization,
                  double min_sin2 = kMinSin2Theta);

/// ‖v(rβ) - (e^{ikr}/r)A‖ / ‖(e^{ikr}/r)A‖. Requires r >= 10 × grid radius;
/// throws DegenerateAmplitude when A = 0.
double far_field_residual(const FieldSolution& field, const Direction& beta, double r);

/// Orthonormal (ℰ₁, ℰ₂) with ℰ₁ × ℰ₂ = α.
std::pair<Vec3, Vec3> polarization_pair(const Direction& alpha);

struct SolveStats {
  std::size_t solves = 0;
  double max_residual = 0.0;
  int max_iterations = 0;
  bool dense = false;
};

/// Full-solver data: two forward solves per α, per-sample polarization with the larger |[β,ℰ]|.
ScatteringDataSet build_dataset(const MediumSpec& medium, const WaveParams& wave,
                                const SphereQuadrature& alpha_quad,
                                const SphereQuadrature& beta_quad, const VolumeGrid& grid,
                                const SolverConfig& config = {}, SolveStats* stats = nullptr);

}  // namespace emis
