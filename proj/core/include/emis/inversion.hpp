#pragma once

#include <optional>
#include <span>
#include <vector>

#include "emis/dataset.hpp"
#include "emis/geometry.hpp"
#include "emis/medium.hpp"

namespace emis {

struct InversionConfig {
  /// Regularization index; unset means automatic (quasi-optimality for noisy data, N_max otherwise).
  std::optional<int> N;
  /// Radius of the ball B_R containing the scatterer.
  double R = 1.0;
  int radial_points = 128;
  int N_max = 12;

  void validate() const;
};

struct ReconstructionResult {
  VolumeGrid grid;
  std::vector<Complex> p;
  int chosen_N = 1;
  /// ‖p_{N+1} - p_N‖ for N = 1..N_max-1 when N was chosen automatically from noisy data.
  std::vector<double> residual_history;
  std::optional<double> error_vs_truth;
};

/// The delta sequence δ_N(r), truncated to 0 outside 0 <= r <= 2R.
double delta_N(double r, int N, double R, double k);

/// (sin b - b cos b)/(b³/3), from its power series for b < 0.5.
double delta_shape_factor(double b);

/// Radial Fourier transform a_N and filter h_N of the delta sequence, sharing one
/// Gauss–Legendre rule on [0, 2R].
class FilterKernel {
 public:
  FilterKernel(int N, double R, double k, int radial_points = 128);

  /// a_N(|z|) = 4π ∫₀^{2R} r² δ_N(r) sin(|z|r)/(|z|r) dr.
  double a(double z_norm) const;
  /// h_N(|z|) = |z| a_N(|z|) k² / (32π⁴).
  double h(double z_norm) const;

  int N() const noexcept { return N_; }

 private:
  int N_;
  double R_;
  double k_;
  std::vector<double> radii_;
  std::vector<double> weights_;  // 4π wᵢ rᵢ² δ_N(rᵢ)
};

double a_N(double z_norm, int N, double R, double k, int radial_points = 128);
double h_N(double z_norm, int N, double R, double k, int radial_points = 128);

/// With the S²×S² pair measure, ∫∫ h_N(k|s'-s|) e^{ik(s'-s)·z} ds ds' reproduces
/// δ_N(z)/2 (band-limited to |ξ| <= 2k); the reconstruction sum carries this factor.
inline constexpr double kPairMeasureFactor = 2.0;

/// p_N(x) = 2 Σᵢⱼ w^β_i w^α_j f(βᵢ, αⱼ) h_N(k|αⱼ-βᵢ|) e^{-ik(αⱼ-βᵢ)·x} at each point, for
/// every N in `orders`. Throws InconsistentQuadratures on malformed data.
std::vector<std::vector<Complex>> reconstruct_sweep(const ScatteringDataSet& data,
                                                    std::span<const Vec3> points,
                                                    std::span<const int> orders,
                                                    const InversionConfig& config);

std::vector<Complex> reconstruct_at(const ScatteringDataSet& data, std::span<const Vec3> points,
                                    int N, const InversionConfig& config);

ReconstructionResult reconstruct(const ScatteringDataSet& data, const VolumeGrid& grid,
                                 const InversionConfig& config);

struct ParameterChoice {
  int N = 1;
  std::vector<double> differences;  // ‖p_{N+1} - p_N‖, N = 1..N_max-1
};

/// Quasi-optimality: the N in [1, N_max-1] minimizing ‖p_{N+1} - p_N‖_{L²(B_R)}, ties to smaller N.
ParameterChoice quasi_optimal_N(const ScatteringDataSet& data, const VolumeGrid& grid,
                                const InversionConfig& config);

/// quasi_optimal_N restricted to noisy data (provenance Noisy, δ > 0).
int choose_N(const ScatteringDataSet& data, const VolumeGrid& grid, const InversionConfig& config);

std::vector<Complex> recover_eps(const ReconstructionResult& result, const WaveParams& wave);

/// Midpoint-rule L² norm over the grid cells.
double l2_norm(const VolumeGrid& grid, std::span<const Complex> values);

/// ‖p_N - p‖ / ‖p‖ over the grid. Throws ZeroTruth when ‖p‖ = 0.
double error_metric(const ReconstructionResult& result, const MediumSpec& medium,
                    const WaveParams& wave, const VolumeGrid& grid);

}  // namespace emis
