#include "emis/geometry.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "emis/error.hpp"

namespace emis {

Direction::Direction(const Vec3& v) : v_(v) {
  if (!std::isfinite(v.norm()) || std::abs(v.norm() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "direction must have unit norm");
}

Direction Direction::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero or non-finite vector");
  return Direction(Vec3(v / n));
}

Direction Direction::from_angles(double polar, double azimuth) {
  return normalized(Vec3(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                         std::cos(polar)));
}

Direction Direction::operator-() const { return Direction(Vec3(-v_)); }

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p_prev = 1.0;
  double p = x;
  for (int j = 2; j <= n; ++j) {
    const double p_next = ((2.0 * j - 1.0) * x * p - (j - 1.0) * p_prev) / j;
    p_prev = p;
    p = p_next;
  }
  return {p, n * (x * p - p_prev) / (x * x - 1.0)};
}

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

GaussLegendreRule gauss_legendre(int n, double lower, double upper) {
  GaussLegendreRule rule = gauss_legendre(n);
  const double half = 0.5 * (upper - lower);
  const double mid = 0.5 * (upper + lower);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

SphereQuadrature::SphereQuadrature(std::vector<Direction> nodes, std::vector<double> weights,
                                   int n_polar, int n_azimuth)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), n_polar_(n_polar),
      n_azimuth_(n_azimuth) {
  if (nodes_.size() != weights_.size())
    throw Error(ErrorCode::InvalidArgument, "sphere quadrature: node/weight count mismatch");
}

SphereQuadrature build_sphere_quadrature(int n_polar, int n_azimuth) {
  if (n_polar < 1 || n_azimuth < 1)
    throw Error(ErrorCode::InvalidArgument, "sphere quadrature sizes must be >= 1");
  const GaussLegendreRule gl = gauss_legendre(n_polar);
  const double dphi = 2.0 * kPi / n_azimuth;
  std::vector<Direction> nodes;
  std::vector<double> weights;
  nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  weights.reserve(nodes.capacity());
  for (int i = 0; i < n_polar; ++i) {
    const double mu = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
    for (int j = 0; j < n_azimuth; ++j) {
      const double phi = j * dphi;
      nodes.push_back(Direction::normalized(Vec3(s * std::cos(phi), s * std::sin(phi), mu)));
      weights.push_back(gl.weights[i] * dphi);
    }
  }
  return SphereQuadrature(std::move(nodes), std::move(weights), n_polar, n_azimuth);
}

std::optional<std::size_t> VolumeGrid::find(int i, int j, int k) const {
  if (i < 0 || j < 0 || k < 0 || i >= n_ || j >= n_ || k >= n_) return std::nullopt;
  const long c = lookup_[(static_cast<std::size_t>(i) * n_ + j) * n_ + k];
  if (c < 0) return std::nullopt;
  return static_cast<std::size_t>(c);
}

VolumeGrid build_volume_grid(double radius, int n_per_axis) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid radius must be > 0");
  if (n_per_axis < 1) throw Error(ErrorCode::InvalidArgument, "n_per_axis must be >= 1");
  VolumeGrid g;
  g.n_ = n_per_axis;
  g.radius_ = radius;
  g.h_ = 2.0 * radius / n_per_axis;
  const std::size_t n = static_cast<std::size_t>(n_per_axis);
  g.lookup_.assign(n * n * n, -1);
  auto coord = [&](int i) { return (i + 0.5) * g.h_ - radius; };
  for (int i = 0; i < n_per_axis; ++i)
    for (int j = 0; j < n_per_axis; ++j)
      for (int k = 0; k < n_per_axis; ++k) {
        const Vec3 x(coord(i), coord(j), coord(k));
        if (x.norm() < radius) {
          g.lookup_[(i * n + j) * n + k] = static_cast<long>(g.centers_.size());
          g.centers_.push_back(x);
          g.indices_.push_back({i, j, k});
        }
      }
  return g;
}

Complex self_cell_integral(double h, double k) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "cell spacing must be > 0");
  if (k < 0.0) throw Error(ErrorCode::InvalidArgument, "wavenumber must be >= 0");
  // Radius of the sphere with the cell's volume.
  const double a = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
  const double ka = k * a;
  if (ka < 0.1) {
    // Σ_{n>=2} (1 - n)(ix)^n / (n! x²) = 1/2 + ix/3 - x²/8 - ...; the closed form cancels badly here.
    Complex series = 0.0;
    Complex term = 0.5;
    for (int n = 2; n <= 16; ++n) {
      series += term;
      term *= kI * ka * (static_cast<double>(n) / (static_cast<double>(n + 1) * (n - 1)));
    }
    return a * a * series;
  }
  return (std::exp(kI * ka) * (1.0 - kI * ka) - 1.0) / (k * k);
}

}  // namespace emis
