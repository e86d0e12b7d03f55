#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "emis/geometry.hpp"
#include "emis/medium.hpp"
#include "emis/types.hpp"

namespace emis {

/// Plane wave E₀(x) = ℰ e^{ikα·x} with ℰ·α = 0 and |ℰ| = 1.
class IncidentWave {
 public:
  IncidentWave(Direction alpha, const Vec3& polarization, WaveParams wave);

  const Direction& alpha() const noexcept { return alpha_; }
  const Vec3& polarization() const noexcept { return polarization_; }
  const WaveParams& wave() const noexcept { return wave_; }

  CVec3 at(const Vec3& x) const;

 private:
  Direction alpha_;
  Vec3 polarization_;
  WaveParams wave_;
};

enum class SolverMethod { Auto, Dense, Iterative };

struct SolverConfig {
  SolverMethod method = SolverMethod::Auto;
  double dense_tolerance = 1e-10;
  double iterative_tolerance = 1e-8;
  int max_iterations = 500;
  int gmres_restart = 60;
  /// Auto picks the dense path up to this many cells (3 unknowns per cell).
  std::size_t dense_cell_limit = 4096;
};

/// p and q sampled at every grid cell.
struct ScattererSamples {
  double k = 0.0;
  std::vector<Complex> p;
  std::vector<CVec3> q;

  bool cell_active(std::size_t c) const { return p[c] != Complex{} || !q[c].isZero(0.0); }
};

ScattererSamples sample_medium(const MediumSpec& medium, const WaveParams& wave,
                               const VolumeGrid& grid);

struct FieldSolution {
  std::shared_ptr<const VolumeGrid> grid;
  std::shared_ptr<const ScattererSamples> samples;
  IncidentWave incident;
  FieldValues E;
  double solver_residual = 0.0;
  int iterations = 0;  // 0 for the dense path

  CVec3 at(std::size_t cell) const { return E.segment<3>(3 * cell); }
};

/// g(x,y) = e^{ik|x-y|}/(4π|x-y|). Throws SingularPoint if |x-y| < 1e-14.
Complex green(const Vec3& x, const Vec3& y, double k);

/// ∇ₓg(x,y) = g·(ik - 1/|x-y|)·(x-y)/|x-y|.
CVec3 grad_green(const Vec3& x, const Vec3& y, double k);

/// E₀ sampled on the grid.
FieldValues incident_field(const VolumeGrid& grid, const IncidentWave& incident);

/// Discretized integral operator T of E = E₀ + TE on a fixed grid and medium.
///
/// Cell-center collocation with midpoint quadrature. The kernel depends only on
/// the lattice offset between cells, so g·h³ and ∇g·h³ are tabulated once per
/// offset. The diagonal of the scalar part uses the equal-volume-sphere
/// self-cell integral; the diagonal of the gradient part is zero.
class ForwardOperator {
 public:
  ForwardOperator(std::shared_ptr<const VolumeGrid> grid, const MediumSpec& medium,
                  const WaveParams& wave, SolverConfig config = {});

  const VolumeGrid& grid() const noexcept { return *grid_; }
  const ScattererSamples& samples() const noexcept { return *samples_; }
  const SolverConfig& config() const noexcept { return config_; }
  std::size_t unknowns() const noexcept { return 3 * grid_->size(); }
  bool uses_dense() const noexcept;

  FieldValues apply(const FieldValues& E) const;

  /// Dense I - T.
  Eigen::MatrixXcd assemble_system() const;

  /// ‖(I-T)E - E₀‖ / ‖E₀‖.
  double relative_residual(const FieldValues& E, const FieldValues& E0) const;

  /// Solves (I-T)E = E₀. The dense factorization is computed on first use and reused.
  FieldSolution solve(const IncidentWave& incident);

 private:
  std::size_t offset_index(const VolumeGrid::Index& a, const VolumeGrid::Index& b) const;
  long lattice_key(const VolumeGrid::Index& a) const;
  FieldValues solve_dense(const FieldValues& E0, double& residual);
  FieldValues solve_iterative(const FieldValues& E0, int& iterations, double& residual) const;

  std::shared_ptr<const VolumeGrid> grid_;
  std::shared_ptr<const ScattererSamples> samples_;
  WaveParams wave_;
  SolverConfig config_;
  std::vector<std::size_t> active_;
  std::vector<long> active_keys_;  // flattened lattice index of each active cell
  int table_width_ = 0;
  std::vector<Complex> weight_table_;    // g·h³ off the diagonal, self-cell integral at offset 0
  std::vector<CVec3> gradient_table_;    // ∇ₓg·h³, zero at offset 0
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_;
};

/// Applies T for a medium on a grid (convenience wrapper around ForwardOperator).
FieldValues apply_T(const VolumeGrid& grid, const MediumSpec& medium, const WaveParams& wave,
                    const FieldValues& E);

/// Throws NonConvergence (iterative) or SingularSystem (dense).
FieldSolution solve_forward(const VolumeGrid& grid, const MediumSpec& medium,
                            const IncidentWave& incident, const SolverConfig& config = {});

/// ‖∇·(K²E)‖ / (k‖K²E‖) over cells whose six neighbors are all in the grid.
/// Throws GridTooCoarse below 3 cells per axis or without interior cells.
double divergence_diagnostic(const FieldSolution& field, const MediumSpec& medium);

/// Scattered field v(x) = E(x) - E₀(x) at a point outside the grid's ball.
/// Throws PointInsideDomain when |x| <= grid radius.
CVec3 scattered_field_at(const FieldSolution& field, const Vec3& x);

}  // namespace emis
