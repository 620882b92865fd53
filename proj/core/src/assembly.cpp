#include "polystokes/assembly.hpp"

#include "polystokes/error.hpp"
#include "polystokes/parallel.hpp"
#include "polystokes/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/CholmodSupport>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <umfpack.h>

#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

namespace polystokes {

namespace {

using Triplet = Eigen::Triplet<double, int>;

struct LocalSystem {
  Eigen::MatrixXd stiffness;  // scalar (S n_k) x (S n_k), shared by all velocity components
  Eigen::MatrixXd coupling;   // n_{k-1} x (S d n_k)
  Eigen::MatrixXd momentum;   // d x (S n_k): -(G^g, grad_w phi) for each component
  Eigen::VectorXd continuity;
  Eigen::VectorXd forcing;    // (f, phi) for the element's own block
};

LocalSystem local_system(const Discretization& disc, int e, const ProblemData& problem, const BoundaryLift* lift) {
  const int d = disc.dim();
  const ElementData& data = disc.element(e);
  const int nj = data.gradient_basis.size();
  const int nk = data.velocity_basis.size();
  const Eigen::MatrixXd& mj = data.gradient_mass.entries();
  const Eigen::MatrixXd& g = data.grad.coeffs;
  const auto cols = g.cols();

  LocalSystem out;
  out.stiffness = Eigen::MatrixXd::Zero(cols, cols);
  for (int c = 0; c < d; ++c) {
    const auto gc = g.middleRows(c * nj, nj);
    out.stiffness.noalias() += gc.transpose() * (mj * gc);
  }
  out.coupling = data.pressure_mass.entries() * data.div.coeffs;

  out.momentum = Eigen::MatrixXd::Zero(d, cols);
  out.continuity = Eigen::VectorXd::Zero(data.pressure_basis.size());
  if (lift && !lift->elements[e].empty()) {
    const ElementLift& l = lift->elements[e];
    for (int i = 0; i < d; ++i) {
      for (int c = 0; c < d; ++c) {
        const Eigen::VectorXd li = l.grad.row(i).segment(c * nj, nj).transpose();
        out.momentum.row(i).noalias() -= (g.middleRows(c * nj, nj).transpose() * (mj * li)).transpose();
      }
    }
    out.continuity = -(data.pressure_mass.entries() * l.div);
  }

  const int fdeg = problem.forcing_degree.value_or(disc.k() + 4);
  const QuadratureRule rule = quad_element(disc.mesh(), e, disc.k() + fdeg);
  out.forcing = Eigen::VectorXd::Zero(d * nk);
  Eigen::VectorXd phi(nk);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    data.velocity_basis.eval_into(rule.points[q], phi);
    const Point f = problem.forcing(rule.points[q]);
    for (int c = 0; c < d; ++c) out.forcing.segment(c * nk, nk) += rule.weights[q] * f(c) * phi;
  }
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Owns the UMFPACK symbolic and numeric objects of one factorization.
class UmfpackLU {
 public:
  explicit UmfpackLU(const SparseMatrix& m) : m_(m) {
    umfpack_di_defaults(control_.data());
    // Lets UMFPACK fall back to nested dissection when AMD/COLAMD fill is high.
    control_[UMFPACK_ORDERING] = UMFPACK_ORDERING_CHOLMOD;
    const int n = static_cast<int>(m.rows());
    int status = umfpack_di_symbolic(n, n, m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr(), &symbolic_,
                                     control_.data(), info_.data());
    if (status != UMFPACK_OK) fail("symbolic analysis", status);
    status = umfpack_di_numeric(m.outerIndexPtr(), m.innerIndexPtr(), m.valuePtr(), symbolic_, &numeric_,
                                control_.data(), info_.data());
    if (status != UMFPACK_OK) fail("numeric factorization", status);
  }
  UmfpackLU(const UmfpackLU&) = delete;
  UmfpackLU& operator=(const UmfpackLU&) = delete;
  ~UmfpackLU() { release(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(b.size());
    std::array<double, UMFPACK_INFO> info{};
    const int status = umfpack_di_solve(UMFPACK_A, m_.outerIndexPtr(), m_.innerIndexPtr(), m_.valuePtr(), x.data(),
                                        b.data(), numeric_, control_.data(), info.data());
    if (status != UMFPACK_OK) throw SolverError("sparse LU solve failed (UMFPACK status " + std::to_string(status) + ")");
    return x;
  }

 private:
  [[noreturn]] void fail(const char* stage, int status) {
    const double peak_mb = info_[UMFPACK_PEAK_MEMORY] * info_[UMFPACK_SIZE_OF_UNIT] / 1e6;
    release();
    std::string what = std::string("sparse LU ") + stage + " failed: ";
    if (status == UMFPACK_WARNING_singular_matrix) {
      what += "matrix is singular";
    } else if (status == UMFPACK_ERROR_out_of_memory) {
      what += "out of memory";
    } else {
      what += "UMFPACK status " + std::to_string(status);
    }
    what += " (n=" + std::to_string(m_.rows()) + ", nnz=" + std::to_string(m_.nonZeros());
    if (peak_mb > 0.0) what += ", estimated peak " + std::to_string(static_cast<long>(peak_mb)) + " MB";
    throw SolverError(what + ")");
  }

  void release() {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
    if (symbolic_) umfpack_di_free_symbolic(&symbolic_);
  }

  const SparseMatrix& m_;
  std::array<double, UMFPACK_CONTROL> control_{};
  mutable std::array<double, UMFPACK_INFO> info_{};
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
};

// Iterative refinement against the exact matrix; `inverse` applies an approximate inverse.
template <class Inverse>
Eigen::VectorXd refine(const SparseMatrix& m, const Eigen::VectorXd& rhs, const Inverse& inverse,
                       const SolverConfig& config, double& relative_residual) {
  const double bnorm = rhs.norm();
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  Eigen::VectorXd x = inverse(rhs);
  Eigen::VectorXd r = rhs - m * x;
  double rel = r.norm() / scale;
  for (int step = 0; step < config.refinement_steps && std::isfinite(rel) && rel > 0.01 * config.tolerance; ++step) {
    const Eigen::VectorXd candidate = x + inverse(r);
    const Eigen::VectorXd rc = rhs - m * candidate;
    const double relc = rc.norm() / scale;
    if (!(relc < rel)) break;
    x = candidate;
    r = rc;
    rel = relc;
  }
  relative_residual = rel;
  return x;
}

// Solves [[A B^T 0], [B 0 c], [0 c^T 0]] (u, y, lambda) = (f, g, h) by eliminating u.
// The constant pressure 1 satisfies B^T 1 = 0, so S = B A^-1 B^T is singular
// only along it: lambda comes from testing with 1, and y from preconditioned CG
// on the mean-zero subspace, shifted afterwards to satisfy c . y = h.
class BlockSchurSolver {
 public:
  BlockSchurSolver(const SaddleSystem& sys, const SolverConfig& config) : sys_(sys), config_(config) {
    const DofMap& dofs = sys.dofs;
    const int nk = dofs.velocity_basis_size();
    component_index_.resize(static_cast<std::size_t>(dofs.dim));
    std::vector<int> local(static_cast<std::size_t>(dofs.n_velocity()), -1);
    for (int c = 0; c < dofs.dim; ++c) {
      auto& idx = component_index_[c];
      idx.reserve(static_cast<std::size_t>(dofs.n_elements) * nk);
      for (int e = 0; e < dofs.n_elements; ++e) {
        for (int b = 0; b < nk; ++b) idx.push_back(dofs.velocity_index(e, c, b));
      }
    }
    for (std::size_t i = 0; i < component_index_[0].size(); ++i) local[component_index_[0][i]] = static_cast<int>(i);

    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(sys.A.nonZeros() / dofs.dim));
    for (int col = 0; col < sys.A.outerSize(); ++col) {
      if (local[col] < 0) continue;
      for (SparseMatrix::InnerIterator it(sys.A, col); it; ++it) {
        if (local[it.row()] >= 0) t.emplace_back(local[it.row()], local[col], it.value());
      }
    }
    const auto n = static_cast<int>(component_index_[0].size());
    SparseMatrix block(n, n);
    block.setFromTriplets(t.begin(), t.end());
    velocity_.compute(block);
    if (velocity_.info() != Eigen::Success) throw SolverError("velocity block is not positive definite");
    mass_.compute(sys.pressure_mass);
    if (mass_.info() != Eigen::Success) throw SolverError("pressure mass matrix is not positive definite");

    ones_ = Eigen::VectorXd::Zero(dofs.n_pressure());
    for (int e = 0; e < dofs.n_elements; ++e) ones_(dofs.pressure_offset(e)) = 1.0;
    measure_ = sys.constraint.dot(ones_);
  }

  int iterations() const { return iterations_; }

  Eigen::VectorXd operator()(const Eigen::VectorXd& rhs) const {
    const auto nu = sys_.A.rows();
    const auto np = sys_.B.rows();
    const Eigen::VectorXd f = rhs.head(nu);
    const double h = rhs(nu + np);

    Eigen::VectorXd r = sys_.B * velocity_solve(f) - rhs.segment(nu, np);
    const double lambda = -ones_.dot(r) / measure_;
    r += lambda * sys_.constraint;

    Eigen::VectorXd y = Eigen::VectorXd::Zero(np);
    const double r0 = r.norm();
    if (r0 > 0.0) {
      Eigen::VectorXd z = mass_.solve(r);
      Eigen::VectorXd p = z;
      double rz = r.dot(z);
      int it = 0;
      while (r.norm() > config_.schur_tolerance * r0) {
        if (++it > config_.schur_max_iterations) {
          throw SolverError("pressure Schur complement CG did not converge in " +
                            std::to_string(config_.schur_max_iterations) + " iterations");
        }
        const Eigen::VectorXd sp = sys_.B * velocity_solve(sys_.B.transpose() * p);
        const double alpha = rz / p.dot(sp);
        y += alpha * p;
        r -= alpha * sp;
        z = mass_.solve(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
      }
      iterations_ += it;
    }
    y += (h / measure_) * ones_;

    Eigen::VectorXd x(rhs.size());
    x.head(nu) = velocity_solve(f - sys_.B.transpose() * y);
    x.segment(nu, np) = y;
    x(nu + np) = lambda;
    return x;
  }

 private:
  Eigen::VectorXd velocity_solve(const Eigen::VectorXd& f) const {
    Eigen::VectorXd u(f.size());
    const auto n = static_cast<Eigen::Index>(component_index_[0].size());
    Eigen::VectorXd fc(n);
    for (const auto& idx : component_index_) {
      for (Eigen::Index i = 0; i < n; ++i) fc(i) = f(idx[i]);
      const Eigen::VectorXd uc = velocity_.solve(fc);
      for (Eigen::Index i = 0; i < n; ++i) u(idx[i]) = uc(i);
    }
    return u;
  }

  const SaddleSystem& sys_;
  const SolverConfig& config_;
  std::vector<std::vector<int>> component_index_;
  Eigen::CholmodSupernodalLLT<SparseMatrix> velocity_;
  Eigen::SimplicialLLT<SparseMatrix> mass_;
  Eigen::VectorXd ones_;
  double measure_ = 1.0;
  mutable int iterations_ = 0;
};

SolveResult finish(const Eigen::VectorXd& x, double rel, int n_velocity, int n_pressure, const SolverConfig& config,
                   SolveResult result) {
  if (!x.allFinite() || !std::isfinite(rel)) throw SolverError("linear solve produced non-finite values");
  if (rel > config.tolerance) {
    throw SolverError("relative residual " + std::to_string(rel) + " exceeds tolerance " +
                      std::to_string(config.tolerance));
  }
  result.relative_residual = rel;
  result.u = x.head(n_velocity);
  result.p = -x.segment(n_velocity, n_pressure);
  result.multiplier = x(n_velocity + n_pressure);
  return result;
}

}  // namespace

SaddleSystem assemble(const Discretization& disc, const ProblemData& problem) {
  if (problem.dim != disc.dim()) {
    throw ConfigError("problem '" + problem.name + "' is " + std::to_string(problem.dim) + "D but the mesh is " +
                      std::to_string(disc.dim()) + "D");
  }
  const DofMap& dofs = disc.dofs();
  const int d = disc.dim();
  const int nk = dofs.velocity_basis_size();
  const int np = dofs.pressure_block_size();

  std::optional<BoundaryLift> lift;
  if (!problem.homogeneous) lift = lift_boundary_data(disc, problem.boundary);

  std::vector<LocalSystem> locals(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(locals.size(), [&](std::size_t i) {
    locals[i] = local_system(disc, static_cast<int>(i), problem, lift ? &*lift : nullptr);
  });

  SaddleSystem sys;
  sys.dofs = dofs;
  sys.rhs_momentum = Eigen::VectorXd::Zero(dofs.n_velocity());
  sys.rhs_continuity = Eigen::VectorXd::Zero(dofs.n_pressure());
  sys.constraint = Eigen::VectorXd::Zero(dofs.n_pressure());

  std::size_t n_upper = 0;
  std::size_t n_coupling = 0;
  for (const auto& l : locals) {
    n_upper += static_cast<std::size_t>(d) * (l.stiffness.size() + l.stiffness.rows()) / 2;
    n_coupling += static_cast<std::size_t>(l.coupling.size());
  }
  std::vector<Triplet> upper;
  upper.reserve(n_upper);
  std::vector<Triplet> coupling;
  coupling.reserve(n_coupling);

  for (int e = 0; e < disc.n_elements(); ++e) {
    const LocalSystem& l = locals[e];
    const auto& stencil = disc.element(e).grad.stencil;
    const int ns = static_cast<int>(stencil.size());
    for (int i = 0; i < d; ++i) {
      for (int t = 0; t < ns; ++t) {
        for (int bt = 0; bt < nk; ++bt) {
          const int col = dofs.velocity_index(stencil[t], i, bt);
          for (int s = 0; s < ns; ++s) {
            for (int bs = 0; bs < nk; ++bs) {
              const int row = dofs.velocity_index(stencil[s], i, bs);
              if (row <= col) upper.emplace_back(row, col, l.stiffness(s * nk + bs, t * nk + bt));
            }
          }
        }
        for (int bs = 0; bs < nk; ++bs) {
          sys.rhs_momentum(dofs.velocity_index(stencil[t], i, bs)) += l.momentum(i, t * nk + bs);
        }
      }
    }
    const int prow = dofs.pressure_offset(e);
    for (int s = 0; s < ns; ++s) {
      const int vcol = dofs.velocity_offset(stencil[s]);
      for (int c = 0; c < d * nk; ++c) {
        for (int m = 0; m < np; ++m) coupling.emplace_back(prow + m, vcol + c, l.coupling(m, s * d * nk + c));
      }
    }
    sys.rhs_momentum.segment(dofs.velocity_offset(e), d * nk) += l.forcing;
    sys.rhs_continuity.segment(prow, np) += l.continuity;
    sys.constraint.segment(prow, np) = disc.element(e).pressure_mass.entries().col(0);
  }

  SparseMatrix up(dofs.n_velocity(), dofs.n_velocity());
  up.setFromTriplets(upper.begin(), upper.end());
  upper.clear();
  upper.shrink_to_fit();
  SparseMatrix strict = up.triangularView<Eigen::StrictlyUpper>();
  sys.A = up + SparseMatrix(strict.transpose());
  sys.B.resize(dofs.n_pressure(), dofs.n_velocity());
  sys.B.setFromTriplets(coupling.begin(), coupling.end());
  sys.A.makeCompressed();
  sys.B.makeCompressed();
  sys.pressure_mass = pressure_mass_matrix(disc);
  return sys;
}

AugmentedSystem constrain_pressure(const SaddleSystem& system) {
  const int nu = static_cast<int>(system.A.rows());
  const int np = static_cast<int>(system.B.rows());
  const int n = nu + np + 1;

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(system.A.nonZeros() + 2 * system.B.nonZeros() + 2 * np));
  for (int col = 0; col < system.A.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(system.A, col); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int col = 0; col < system.B.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(system.B, col); it; ++it) {
      t.emplace_back(nu + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), nu + it.row(), it.value());
    }
  }
  for (int b = 0; b < np; ++b) {
    if (system.constraint(b) == 0.0) continue;
    t.emplace_back(nu + b, n - 1, system.constraint(b));
    t.emplace_back(n - 1, nu + b, system.constraint(b));
  }

  AugmentedSystem out;
  out.n_velocity = nu;
  out.n_pressure = np;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(t.begin(), t.end());
  out.matrix.makeCompressed();
  out.rhs = Eigen::VectorXd::Zero(n);
  out.rhs.head(nu) = system.rhs_momentum;
  out.rhs.segment(nu, np) = system.rhs_continuity;
  return out;
}

SolveResult solve(const AugmentedSystem& system, const SolverConfig& config) {
  const auto n = system.matrix.rows();
  if (n != system.matrix.cols() || n != system.rhs.size() || n != system.n_velocity + system.n_pressure + 1) {
    throw SolverError("augmented system has inconsistent dimensions");
  }
  if (!system.matrix.isCompressed()) throw SolverError("augmented matrix must be compressed");
  SolveResult result;
  result.method = SolverMethod::direct;
  result.nnz = system.matrix.nonZeros();

  auto t0 = std::chrono::steady_clock::now();
  const UmfpackLU lu(system.matrix);
  result.factor_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  double rel = 0.0;
  const Eigen::VectorXd x =
      refine(system.matrix, system.rhs, [&](const Eigen::VectorXd& b) { return lu.solve(b); }, config, rel);
  result.solve_seconds = seconds_since(t0);
  return finish(x, rel, system.n_velocity, system.n_pressure, config, std::move(result));
}

SolveResult solve(const SaddleSystem& system, const SolverConfig& config) {
  const AugmentedSystem aug = constrain_pressure(system);
  const bool direct = config.method == SolverMethod::direct ||
                      (config.method == SolverMethod::automatic && aug.matrix.rows() <= config.direct_limit);
  if (direct) return solve(aug, config);

  SolveResult result;
  result.method = SolverMethod::schur;
  result.nnz = aug.matrix.nonZeros();
  auto t0 = std::chrono::steady_clock::now();
  const BlockSchurSolver schur(system, config);
  result.factor_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  double rel = 0.0;
  const Eigen::VectorXd x = refine(aug.matrix, aug.rhs, schur, config, rel);
  result.solve_seconds = seconds_since(t0);
  result.iterations = schur.iterations();
  return finish(x, rel, aug.n_velocity, aug.n_pressure, config, std::move(result));
}

SparseMatrix pressure_mass_matrix(const Discretization& disc) {
  const DofMap& dofs = disc.dofs();
  const int np = dofs.pressure_block_size();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(disc.n_elements()) * np * np);
  for (int e = 0; e < disc.n_elements(); ++e) {
    const Eigen::MatrixXd& m = disc.element(e).pressure_mass.entries();
    const int off = dofs.pressure_offset(e);
    for (int a = 0; a < np; ++a) {
      for (int b = 0; b < np; ++b) t.emplace_back(off + a, off + b, m(a, b));
    }
  }
  SparseMatrix out(dofs.n_pressure(), dofs.n_pressure());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double infsup_probe(const Discretization& disc, int max_pressure_dofs) {
  const int np = disc.dofs().n_pressure();
  if (np > max_pressure_dofs) {
    throw CapabilityError("inf-sup probe needs a dense " + std::to_string(np) + "x" + std::to_string(np) +
                          " eigenproblem; limit is " + std::to_string(max_pressure_dofs) + " pressure unknowns");
  }
  if (np < 2) throw PreconditionError("inf-sup probe needs at least two pressure unknowns");

  const SaddleSystem sys = assemble(disc, builtin_problem(disc.dim() == 2 ? "zero" : "zero3"));
  Eigen::SimplicialLDLT<SparseMatrix> chol(sys.A);
  if (chol.info() != Eigen::Success) throw SolverError("velocity stiffness matrix is not positive definite");

  const Eigen::MatrixXd bt = Eigen::MatrixXd(sys.B.transpose());
  const Eigen::MatrixXd x = chol.solve(bt);
  Eigen::MatrixXd s = sys.B * x;
  s = 0.5 * (s + s.transpose()).eval();
  const Eigen::MatrixXd m = Eigen::MatrixXd(pressure_mass_matrix(disc));

  // Orthonormal basis of the mean-zero subspace {q : c . q = 0}.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(sys.constraint));
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(np - 1);

  const Eigen::MatrixXd sr = q.transpose() * s * q;
  const Eigen::MatrixXd mr = q.transpose() * m * q;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (sr + sr.transpose()),
                                                                0.5 * (mr + mr.transpose()), Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw SolverError("generalized eigenvalue solve failed in inf-sup probe");
  return std::sqrt(std::max(eig.eigenvalues().minCoeff(), 0.0));
}

}  // namespace polystokes
