#include "emis/forward.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "emis/error.hpp"

namespace emis {

namespace {

constexpr double kSingularDistance = 1e-14;

// Restarted GMRES with modified Gram-Schmidt and Givens rotations. Returns the
// number of iterations; `relative` receives the last recurrence residual.
template <class ApplyFn>
int gmres(const ApplyFn& apply, const Eigen::VectorXcd& b, Eigen::VectorXcd& x, double tol,
          int max_iterations, int restart, double& relative) {
  using Vec = Eigen::VectorXcd;
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    x.setZero();
    relative = 0.0;
    return 0;
  }
  const int m = std::max(1, restart);
  int iterations = 0;
  Vec r = b - apply(x);
  double beta = r.norm();
  relative = beta / b_norm;
  while (relative > tol && iterations < max_iterations) {
    std::vector<Vec> basis;
    basis.reserve(m + 1);
    basis.push_back(r / beta);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    std::vector<Complex> cs(m), sn(m);
    Vec g = Vec::Zero(m + 1);
    g(0) = beta;
    int j = 0;
    for (; j < m && iterations < max_iterations; ++j, ++iterations) {
      Vec w = apply(basis[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = basis[i].dot(w);
        w -= H(i, j) * basis[i];
      }
      const double h_next = w.norm();
      H(j + 1, j) = h_next;
      for (int i = 0; i < j; ++i) {
        const Complex t = std::conj(cs[i]) * H(i, j) + std::conj(sn[i]) * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double denom = std::hypot(std::abs(H(j, j)), h_next);
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = H(j, j) / denom;
        sn[j] = h_next / denom;
      }
      H(j, j) = std::conj(cs[j]) * H(j, j) + std::conj(sn[j]) * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = std::conj(cs[j]) * g(j);
      relative = std::abs(g(j + 1)) / b_norm;
      if (h_next == 0.0) {
        ++j;
        ++iterations;
        break;
      }
      basis.push_back(w / h_next);
      if (relative <= tol) {
        ++j;
        ++iterations;
        break;
      }
    }
    const Vec y = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x += y(i) * basis[i];
    r = b - apply(x);
    beta = r.norm();
    relative = beta / b_norm;
  }
  return iterations;
}

}  // namespace

IncidentWave::IncidentWave(Direction alpha, const Vec3& polarization, WaveParams wave)
    : alpha_(alpha), polarization_(polarization), wave_(wave) {
  if (std::abs(polarization_.norm() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "polarization must have unit norm");
  if (std::abs(polarization_.dot(alpha_.vec())) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "polarization must be orthogonal to alpha");
  wave_.validate();
}

CVec3 IncidentWave::at(const Vec3& x) const {
  return std::exp(kI * (wave_.k * alpha_.dot(x))) * polarization_.cast<Complex>();
}

ScattererSamples sample_medium(const MediumSpec& medium, const WaveParams& wave,
                               const VolumeGrid& grid) {
  ScattererSamples s;
  s.k = wave.k;
  s.p.resize(grid.size());
  s.q.resize(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    s.p[c] = eval_p(medium, wave, grid.center(c));
    s.q[c] = eval_q(medium, wave, grid.center(c));
  }
  return s;
}

Complex green(const Vec3& x, const Vec3& y, double k) {
  const double r = (x - y).norm();
  if (r < kSingularDistance) throw Error(ErrorCode::SingularPoint, "green: x == y");
  return std::exp(kI * (k * r)) / (4.0 * kPi * r);
}

CVec3 grad_green(const Vec3& x, const Vec3& y, double k) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (r < kSingularDistance) throw Error(ErrorCode::SingularPoint, "grad_green: x == y");
  const Complex g = std::exp(kI * (k * r)) / (4.0 * kPi * r);
  return (g * (kI * k - 1.0 / r) / r) * d.cast<Complex>();
}

FieldValues incident_field(const VolumeGrid& grid, const IncidentWave& incident) {
  FieldValues E0(3 * grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) E0.segment<3>(3 * c) = incident.at(grid.center(c));
  return E0;
}

ForwardOperator::ForwardOperator(std::shared_ptr<const VolumeGrid> grid,
                                 const MediumSpec& medium, const WaveParams& wave,
                                 SolverConfig config)
    : grid_(std::move(grid)), wave_(wave), config_(config) {
  if (!grid_ || grid_->empty()) throw Error(ErrorCode::InvalidArgument, "forward: empty grid");
  wave_.validate();
  validate_medium(medium, wave_, *grid_);
  samples_ = std::make_shared<const ScattererSamples>(sample_medium(medium, wave_, *grid_));
  for (std::size_t c = 0; c < grid_->size(); ++c)
    if (samples_->cell_active(c)) active_.push_back(c);

  const int n = grid_->n_per_axis();
  const double h = grid_->spacing();
  const double h3 = grid_->cell_volume();
  table_width_ = 2 * n - 1;
  const std::size_t w = static_cast<std::size_t>(table_width_);
  weight_table_.assign(w * w * w, Complex{});
  gradient_table_.assign(w * w * w, CVec3::Zero());
  const Vec3 origin = Vec3::Zero();
  for (int di = -(n - 1); di <= n - 1; ++di)
    for (int dj = -(n - 1); dj <= n - 1; ++dj)
      for (int dk = -(n - 1); dk <= n - 1; ++dk) {
        const std::size_t idx =
            (static_cast<std::size_t>(di + n - 1) * w + (dj + n - 1)) * w + (dk + n - 1);
        if (di == 0 && dj == 0 && dk == 0) {
          weight_table_[idx] = self_cell_integral(h, wave_.k);
          continue;
        }
        const Vec3 d(di * h, dj * h, dk * h);
        weight_table_[idx] = green(d, origin, wave_.k) * h3;
        gradient_table_[idx] = grad_green(d, origin, wave_.k) * h3;
      }
  active_keys_.reserve(active_.size());
  for (const std::size_t j : active_) active_keys_.push_back(lattice_key(grid_->index(j)));
}

long ForwardOperator::lattice_key(const VolumeGrid::Index& a) const {
  const long w = table_width_;
  return (static_cast<long>(a[0]) * w + a[1]) * w + a[2];
}

bool ForwardOperator::uses_dense() const noexcept {
  switch (config_.method) {
    case SolverMethod::Dense: return true;
    case SolverMethod::Iterative: return false;
    case SolverMethod::Auto: return grid_->size() <= config_.dense_cell_limit;
  }
  return true;
}

std::size_t ForwardOperator::offset_index(const VolumeGrid::Index& a,
                                          const VolumeGrid::Index& b) const {
  const int n = grid_->n_per_axis();
  const std::size_t w = static_cast<std::size_t>(table_width_);
  return (static_cast<std::size_t>(a[0] - b[0] + n - 1) * w + (a[1] - b[1] + n - 1)) * w +
         (a[2] - b[2] + n - 1);
}

FieldValues ForwardOperator::apply(const FieldValues& E) const {
  const std::size_t cells = grid_->size();
  if (static_cast<std::size_t>(E.size()) != 3 * cells)
    throw Error(ErrorCode::InvalidArgument, "apply_T: field size does not match grid");
  const ScattererSamples& s = *samples_;
  // Source densities p·E and q·E on the active cells.
  std::vector<CVec3> pE(active_.size());
  std::vector<Complex> qE(active_.size());
  for (std::size_t a = 0; a < active_.size(); ++a) {
    const std::size_t j = active_[a];
    const CVec3 Ej = E.segment<3>(3 * j);
    pE[a] = s.p[j] * Ej;
    qE[a] = bilinear_dot(s.q[j], Ej);
  }
  FieldValues out(3 * cells);
  const long n_cells = static_cast<long>(cells);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n_cells; ++i) {
    // offset_index(x_i, y_j) = base - key(y_j)
    const int n = grid_->n_per_axis();
    const VolumeGrid::Index& xi = grid_->index(static_cast<std::size_t>(i));
    const long base = lattice_key({xi[0] + n - 1, xi[1] + n - 1, xi[2] + n - 1});
    CVec3 acc = CVec3::Zero();
    for (std::size_t a = 0; a < active_.size(); ++a) {
      const std::size_t idx = static_cast<std::size_t>(base - active_keys_[a]);
      acc += weight_table_[idx] * pE[a] + gradient_table_[idx] * qE[a];
    }
    out.segment<3>(3 * i) = acc;
  }
  return out;
}

Eigen::MatrixXcd ForwardOperator::assemble_system() const {
  const std::size_t cells = grid_->size();
  const Eigen::Index n = static_cast<Eigen::Index>(3 * cells);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
  const ScattererSamples& s = *samples_;
  const long n_active = static_cast<long>(active_.size());
#pragma omp parallel for schedule(static)
  for (long a = 0; a < n_active; ++a) {
    const std::size_t j = active_[static_cast<std::size_t>(a)];
    const VolumeGrid::Index& yj = grid_->index(j);
    for (std::size_t i = 0; i < cells; ++i) {
      const std::size_t idx = offset_index(grid_->index(i), yj);
      // T block (i, j) = w_ij p_j I + ∇g_ij h³ q_jᵀ.
      Eigen::Matrix3cd block = gradient_table_[idx] * s.q[j].transpose();
      block.diagonal().array() += weight_table_[idx] * s.p[j];
      A.block<3, 3>(3 * static_cast<Eigen::Index>(i), 3 * static_cast<Eigen::Index>(j)) -= block;
    }
  }
  return A;
}

double ForwardOperator::relative_residual(const FieldValues& E, const FieldValues& E0) const {
  const double denom = E0.norm();
  const double num = (E - apply(E) - E0).norm();
  return denom > 0.0 ? num / denom : num;
}

FieldValues ForwardOperator::solve_dense(const FieldValues& E0, double& residual) {
  if (!lu_) {
    lu_.emplace(assemble_system());
    const double rcond = lu_->rcond();
    if (!(rcond > 1e-14)) {
      lu_.reset();
      throw Error(ErrorCode::SingularSystem,
                  "dense factorization is numerically singular (rcond " + std::to_string(rcond) +
                      ")");
    }
  }
  FieldValues E = lu_->solve(E0);
  const double e0_norm = E0.norm();
  // Residual against the matrix-free operator, with up to two refinement steps.
  for (int step = 0;; ++step) {
    const FieldValues r = E0 - (E - apply(E));
    residual = e0_norm > 0.0 ? r.norm() / e0_norm : r.norm();
    if (residual <= config_.dense_tolerance || step == 2) break;
    E += lu_->solve(r);
  }
  return E;
}

FieldValues ForwardOperator::solve_iterative(const FieldValues& E0, int& iterations,
                                             double& residual) const {
  FieldValues E = E0;
  auto op = [this](const FieldValues& v) -> FieldValues { return v - apply(v); };
  iterations = gmres(op, E0, E, config_.iterative_tolerance, config_.max_iterations,
                     config_.gmres_restart, residual);
  return E;
}

FieldSolution ForwardOperator::solve(const IncidentWave& incident) {
  if (std::abs(incident.wave().k - wave_.k) > 1e-12 * wave_.k)
    throw Error(ErrorCode::InvalidArgument, "incident wave k differs from the operator's k");
  const FieldValues E0 = incident_field(*grid_, incident);
  FieldValues E;
  int iterations = 0;
  double tol = 0.0;
  double residual = 0.0;
  if (active_.empty()) {
    E = E0;
    tol = uses_dense() ? config_.dense_tolerance : config_.iterative_tolerance;
  } else if (uses_dense()) {
    E = solve_dense(E0, residual);
    tol = config_.dense_tolerance;
  } else {
    // GMRES ends every cycle with an explicit residual b - (I-T)x.
    E = solve_iterative(E0, iterations, residual);
    tol = config_.iterative_tolerance;
  }
  if (!(residual <= tol)) {
    if (uses_dense())
      throw Error(ErrorCode::SingularSystem,
                  "dense solve residual " + std::to_string(residual) + " exceeds tolerance");
    throw Error(ErrorCode::NonConvergence, "GMRES did not reach tolerance in " +
                                               std::to_string(iterations) + " iterations");
  }
  return FieldSolution{grid_, samples_, incident, std::move(E), residual, iterations};
}

FieldValues apply_T(const VolumeGrid& grid, const MediumSpec& medium, const WaveParams& wave,
                    const FieldValues& E) {
  const ForwardOperator op(std::make_shared<const VolumeGrid>(grid), medium, wave);
  return op.apply(E);
}

FieldSolution solve_forward(const VolumeGrid& grid, const MediumSpec& medium,
                            const IncidentWave& incident, const SolverConfig& config) {
  ForwardOperator op(std::make_shared<const VolumeGrid>(grid), medium, incident.wave(), config);
  return op.solve(incident);
}

double divergence_diagnostic(const FieldSolution& field, const MediumSpec& medium) {
  const VolumeGrid& grid = *field.grid;
  if (grid.n_per_axis() < 3)
    throw Error(ErrorCode::GridTooCoarse, "divergence diagnostic needs >= 3 cells per axis");
  const WaveParams& wave = field.incident.wave();
  const double k2 = wave.k * wave.k;
  const double h = grid.spacing();
  std::vector<CVec3> flux(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c)
    flux[c] = (k2 + eval_p(medium, wave, grid.center(c))) * field.at(c);

  double div_sq = 0.0;
  double flux_sq = 0.0;
  std::size_t interior = 0;
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const auto& [i, j, k] = grid.index(c);
    const std::array<std::optional<std::size_t>, 6> nb = {
        grid.find(i + 1, j, k), grid.find(i - 1, j, k), grid.find(i, j + 1, k),
        grid.find(i, j - 1, k), grid.find(i, j, k + 1), grid.find(i, j, k - 1)};
    bool complete = true;
    for (const auto& n : nb) complete = complete && n.has_value();
    if (!complete) continue;
    ++interior;
    const Complex div = (flux[*nb[0]](0) - flux[*nb[1]](0) + flux[*nb[2]](1) - flux[*nb[3]](1) +
                         flux[*nb[4]](2) - flux[*nb[5]](2)) /
                        (2.0 * h);
    div_sq += std::norm(div);
    flux_sq += flux[c].squaredNorm();
  }
  if (interior == 0) throw Error(ErrorCode::GridTooCoarse, "grid has no interior cells");
  if (flux_sq == 0.0) return 0.0;
  return std::sqrt(div_sq) / (wave.k * std::sqrt(flux_sq));
}

CVec3 scattered_field_at(const FieldSolution& field, const Vec3& x) {
  const VolumeGrid& grid = *field.grid;
  if (x.norm() <= grid.radius())
    throw Error(ErrorCode::PointInsideDomain, "scattered_field_at needs |x| > grid radius");
  const ScattererSamples& s = *field.samples;
  const double h3 = grid.cell_volume();
  CVec3 v = CVec3::Zero();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!s.cell_active(j)) continue;
    const CVec3 Ej = field.at(j);
    const Vec3& y = grid.center(j);
    v += (green(x, y, s.k) * h3 * s.p[j]) * Ej + grad_green(x, y, s.k) * (h3 * bilinear_dot(s.q[j], Ej));
  }
  return v;
}

}  // namespace emis
