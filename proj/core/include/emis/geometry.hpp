#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "emis/types.hpp"

namespace emis {

/// A point on the unit sphere S².
class Direction {
 public:
  Direction() = default;

  /// Throws InvalidArgument unless |v| = 1 to within 1e-12.
  explicit Direction(const Vec3& v);

  static Direction normalized(const Vec3& v);
  static Direction from_angles(double polar, double azimuth);

  const Vec3& vec() const noexcept { return v_; }
  double operator[](int i) const noexcept { return v_(i); }
  double dot(const Vec3& other) const noexcept { return v_.dot(other); }

  Direction operator-() const;

 private:
  Vec3 v_{0.0, 0.0, 1.0};
};

/// Gauss–Legendre nodes and weights, on [-1, 1] unless mapped.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);
GaussLegendreRule gauss_legendre(int n, double lower, double upper);

/// Product rule on S²: Gauss–Legendre in cos(polar) times a uniform azimuth grid.
class SphereQuadrature {
 public:
  SphereQuadrature() = default;
  SphereQuadrature(std::vector<Direction> nodes, std::vector<double> weights, int n_polar,
                   int n_azimuth);

  const std::vector<Direction>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  int n_polar() const noexcept { return n_polar_; }
  int n_azimuth() const noexcept { return n_azimuth_; }

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(nodes_.front()));
    R sum{};
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
    return sum;
  }

 private:
  std::vector<Direction> nodes_;
  std::vector<double> weights_;
  int n_polar_ = 0;
  int n_azimuth_ = 0;
};

SphereQuadrature build_sphere_quadrature(int n_polar, int n_azimuth);

/// Cells of a uniform Cartesian grid over [-R, R]³ whose centers lie in the open ball |x| < R.
class VolumeGrid {
 public:
  using Index = std::array<int, 3>;

  VolumeGrid() = default;

  const std::vector<Vec3>& centers() const noexcept { return centers_; }
  const Vec3& center(std::size_t c) const { return centers_[c]; }
  const Index& index(std::size_t c) const { return indices_[c]; }
  std::size_t size() const noexcept { return centers_.size(); }
  bool empty() const noexcept { return centers_.empty(); }

  double spacing() const noexcept { return h_; }
  double cell_volume() const noexcept { return h_ * h_ * h_; }
  double radius() const noexcept { return radius_; }
  int n_per_axis() const noexcept { return n_; }

  /// Cell number for lattice index (i, j, k), if that cell was retained.
  std::optional<std::size_t> find(int i, int j, int k) const;

  friend VolumeGrid build_volume_grid(double radius, int n_per_axis);

 private:
  std::vector<Vec3> centers_;
  std::vector<Index> indices_;
  std::vector<long> lookup_;
  double h_ = 0.0;
  double radius_ = 0.0;
  int n_ = 0;
};

VolumeGrid build_volume_grid(double radius, int n_per_axis);

/// ∫ e^{ik|y|}/(4π|y|) dy over the ball of volume h³ centered at the singularity.
Complex self_cell_integral(double h, double k);

}  // namespace emis
