#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "emis/geometry.hpp"
#include "emis/medium.hpp"

namespace emis {

enum class Provenance { BornExact, FullSolver, Noisy };

const char* to_string(Provenance p) noexcept;
Provenance provenance_from_string(const std::string& s);

/// Scalar data f(β, α, k) on S² × S². Rows index β nodes, columns α nodes.
struct ScatteringDataSet {
  SphereQuadrature alpha_quadrature;
  SphereQuadrature beta_quadrature;
  Eigen::MatrixXcd f;
  WaveParams wave;
  double noise_level = 0.0;
  std::optional<std::uint64_t> seed;
  Provenance provenance = Provenance::BornExact;
  /// Full-solver data only: polarization used per (β, α), 0 or 1, row-major in β.
  std::vector<std::uint8_t> polarization_choice;

  /// Throws InconsistentQuadratures on shape mismatch, InvalidArgument when the
  /// noise level and provenance disagree.
  void validate() const;

  /// Quadrature-weighted L²(S²×S²) norm of `values` (same shape as f).
  double weighted_norm(const Eigen::MatrixXcd& values) const;
  double weighted_norm() const { return weighted_norm(f); }
};

}  // namespace emis
