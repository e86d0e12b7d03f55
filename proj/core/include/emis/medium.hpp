#pragma once

#include <vector>

#include "emis/geometry.hpp"
#include "emis/types.hpp"

namespace emis {

/// Background wave parameters. k² = ω²ε₀μ₀.
struct WaveParams {
  double k = 1.0;
  double omega = 1.0;
  double eps0 = 1.0;
  double mu0 = 1.0;

  static WaveParams from_k(double k, double eps0 = 1.0, double mu0 = 1.0);
  static WaveParams from_omega(double omega, double eps0 = 1.0, double mu0 = 1.0);

  /// Throws InvalidArgument if a parameter is non-positive or k² ≠ ω²ε₀μ₀.
  void validate() const;
};

/// Radial bump c·(1 - |x - center|²/ρ²)^m, supported in |x - center| < ρ.
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Complex amplitude{0.0, 0.0};
  int power = 3;
};

/// Dimensionless contrast p/k² as a sum of radial bumps inside a ball of radius R_D.
class MediumSpec {
 public:
  MediumSpec() = default;

  /// Validates geometry: radius > 0, power >= 3, every bump ball inside the domain.
  /// The absorption sign is checked by validate_medium, not here.
  MediumSpec(double domain_radius, std::vector<Bump> bumps);

  static MediumSpec vacuum(double domain_radius);

  double domain_radius() const noexcept { return domain_radius_; }
  const std::vector<Bump>& bumps() const noexcept { return bumps_; }
  bool is_vacuum() const noexcept { return bumps_.empty(); }

  /// Same geometry with every amplitude multiplied by t.
  MediumSpec scaled(double t) const;

  /// Σ c·profile(x), dimensionless.
  Complex contrast(const Vec3& x) const;
  CVec3 contrast_gradient(const Vec3& x) const;

 private:
  double domain_radius_ = 1.0;
  std::vector<Bump> bumps_;
};

/// p(x) = K²(x) - k².
Complex eval_p(const MediumSpec& spec, const WaveParams& wave, const Vec3& x);
CVec3 eval_grad_p(const MediumSpec& spec, const WaveParams& wave, const Vec3& x);

/// q(x) = ∇K²/K². Throws DegenerateMedium when |K²(x)| < 1e-12·k².
CVec3 eval_q(const MediumSpec& spec, const WaveParams& wave, const Vec3& x);

/// ε′ = (k² + p)/(ω²μ₀) and its inverse.
Complex p_to_eps(Complex p, const WaveParams& wave);
Complex eps_to_p(Complex eps, const WaveParams& wave);

struct MediumReport {
  double min_abs_K2 = 0.0;   // min |k² + p| over cells
  double min_imag_p = 0.0;   // min Im p over cells
  double max_rel_p = 0.0;    // max |p|/k², the Born smallness indicator
  std::size_t cells = 0;
};

/// Samples the medium on every cell. Throws DegenerateMedium or NegativeAbsorption.
MediumReport validate_medium(const MediumSpec& spec, const WaveParams& wave,
                             const VolumeGrid& grid);

}  // namespace emis
