#include "emis/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "emis/error.hpp"

namespace emis {

WaveParams WaveParams::from_k(double k, double eps0, double mu0) {
  WaveParams w{k, k / std::sqrt(eps0 * mu0), eps0, mu0};
  w.validate();
  return w;
}

WaveParams WaveParams::from_omega(double omega, double eps0, double mu0) {
  WaveParams w{omega * std::sqrt(eps0 * mu0), omega, eps0, mu0};
  w.validate();
  return w;
}

void WaveParams::validate() const {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave.k must be > 0");
  if (!(omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave.omega must be > 0");
  if (!(eps0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave.eps0 must be > 0");
  if (!(mu0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "wave.mu0 must be > 0");
  const double k2 = omega * omega * eps0 * mu0;
  if (std::abs(k * k - k2) > 1e-12 * k2)
    throw Error(ErrorCode::InvalidArgument, "wave: k^2 must equal omega^2 eps0 mu0");
}

MediumSpec::MediumSpec(double domain_radius, std::vector<Bump> bumps)
    : domain_radius_(domain_radius), bumps_(std::move(bumps)) {
  if (!(domain_radius_ > 0.0))
    throw Error(ErrorCode::InvalidArgument, "medium.domain_radius must be > 0");
  for (std::size_t b = 0; b < bumps_.size(); ++b) {
    const Bump& bump = bumps_[b];
    const std::string field = "medium.bumps[" + std::to_string(b) + "]";
    if (!(bump.radius > 0.0))
      throw Error(ErrorCode::InvalidArgument, field + ".radius must be > 0");
    if (bump.power < 3) throw Error(ErrorCode::InvalidArgument, field + ".power must be >= 3");
    if (!std::isfinite(bump.amplitude.real()) || !std::isfinite(bump.amplitude.imag()))
      throw Error(ErrorCode::InvalidArgument, field + ".amplitude must be finite");
    if (bump.center.norm() + bump.radius > domain_radius_ * (1.0 + 1e-12))
      throw Error(ErrorCode::InvalidArgument,
                  field + " must lie inside the ball of radius medium.domain_radius");
  }
}

MediumSpec MediumSpec::vacuum(double domain_radius) { return MediumSpec(domain_radius, {}); }

MediumSpec MediumSpec::scaled(double t) const {
  MediumSpec out = *this;
  for (Bump& b : out.bumps_) b.amplitude *= t;
  return out;
}

Complex MediumSpec::contrast(const Vec3& x) const {
  Complex sum{0.0, 0.0};
  for (const Bump& b : bumps_) {
    const double s = 1.0 - (x - b.center).squaredNorm() / (b.radius * b.radius);
    if (s > 0.0) sum += b.amplitude * std::pow(s, b.power);
  }
  return sum;
}

CVec3 MediumSpec::contrast_gradient(const Vec3& x) const {
  CVec3 grad = CVec3::Zero();
  for (const Bump& b : bumps_) {
    const Vec3 d = x - b.center;
    const double rho2 = b.radius * b.radius;
    const double s = 1.0 - d.squaredNorm() / rho2;
    if (s > 0.0) {
      // d/dx (1 - |d|²/ρ²)^m = -2m/ρ² (1 - |d|²/ρ²)^{m-1} d
      const double factor = -2.0 * b.power / rho2 * std::pow(s, b.power - 1);
      grad += b.amplitude * (factor * d).cast<Complex>();
    }
  }
  return grad;
}

Complex eval_p(const MediumSpec& spec, const WaveParams& wave, const Vec3& x) {
  return wave.k * wave.k * spec.contrast(x);
}

CVec3 eval_grad_p(const MediumSpec& spec, const WaveParams& wave, const Vec3& x) {
  return wave.k * wave.k * spec.contrast_gradient(x);
}

CVec3 eval_q(const MediumSpec& spec, const WaveParams& wave, const Vec3& x) {
  const double k2 = wave.k * wave.k;
  const Complex K2 = k2 + eval_p(spec, wave, x);
  if (std::abs(K2) < 1e-12 * k2)
    throw Error(ErrorCode::DegenerateMedium, "K^2(x) = k^2 + p(x) vanishes");
  return eval_grad_p(spec, wave, x) / K2;
}

Complex p_to_eps(Complex p, const WaveParams& wave) {
  return (wave.k * wave.k + p) / (wave.omega * wave.omega * wave.mu0);
}

Complex eps_to_p(Complex eps, const WaveParams& wave) {
  return wave.omega * wave.omega * wave.mu0 * eps - wave.k * wave.k;
}

MediumReport validate_medium(const MediumSpec& spec, const WaveParams& wave,
                             const VolumeGrid& grid) {
  const double k2 = wave.k * wave.k;
  MediumReport report;
  report.cells = grid.size();
  report.min_abs_K2 = std::numeric_limits<double>::infinity();
  report.min_imag_p = std::numeric_limits<double>::infinity();
  for (const Vec3& x : grid.centers()) {
    const Complex p = eval_p(spec, wave, x);
    report.min_abs_K2 = std::min(report.min_abs_K2, std::abs(k2 + p));
    report.min_imag_p = std::min(report.min_imag_p, p.imag());
    report.max_rel_p = std::max(report.max_rel_p, std::abs(p) / k2);
  }
  if (grid.empty()) {
    report.min_abs_K2 = k2;
    report.min_imag_p = 0.0;
  }
  for (const Bump& b : spec.bumps())
    if (b.amplitude.imag() < 0.0)
      throw Error(ErrorCode::NegativeAbsorption, "bump amplitude has negative imaginary part");
  if (report.min_imag_p < 0.0)
    throw Error(ErrorCode::NegativeAbsorption, "Im p(x) < 0 on the grid");
  if (report.min_abs_K2 < 1e-12 * k2)
    throw Error(ErrorCode::DegenerateMedium, "k^2 + p(x) vanishes on the grid");
  return report;
}

}  // namespace emis
