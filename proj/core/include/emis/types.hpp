#pragma once

#include <complex>

#include <Eigen/Core>

namespace emis {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// Vector field sampled on grid cells, stored as [cell * 3 + component].
using FieldValues = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

/// Bilinear (unconjugated) dot product.
inline Complex bilinear_dot(const CVec3& a, const CVec3& b) {
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

}  // namespace emis
