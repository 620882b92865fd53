#pragma once

#include "polystokes/dofmap.hpp"
#include "polystokes/problem.hpp"
#include "polystokes/weakcalc.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace polystokes {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Discrete Stokes system before the pressure mean-zero constraint.
///
/// The pressure unknown is y = -p, which makes the block system symmetric:
///   A u + B^T y = rhs_momentum,   B u = rhs_continuity,
/// with constraint . y = 0 expressing a mean-zero pressure.
struct SaddleSystem {
  DofMap dofs;
  SparseMatrix A;  // n_velocity x n_velocity, symmetric
  SparseMatrix B;  // n_pressure x n_velocity
  Eigen::VectorXd rhs_momentum;
  Eigen::VectorXd rhs_continuity;
  Eigen::VectorXd constraint;  // entry b is the integral of pressure basis b
  SparseMatrix pressure_mass;  // block diagonal, used to precondition the pressure Schur complement
};

/// Assembles A from the weak gradients and B from the weak divergences of all
/// elements. Non-homogeneous boundary data enters through its lift. Local
/// matrices are computed in parallel and scattered serially in element order,
/// so the result does not depend on the worker count.
SaddleSystem assemble(const Discretization& disc, const ProblemData& problem);

/// [[A B^T 0], [B 0 c], [0 c^T 0]] with unknowns (u, y, multiplier).
struct AugmentedSystem {
  int n_velocity = 0;
  int n_pressure = 0;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

AugmentedSystem constrain_pressure(const SaddleSystem& system);

enum class SolverMethod {
  automatic,  // direct up to direct_limit unknowns, block Schur above
  direct,     // sparse LU of the augmented matrix
  schur,      // Cholesky of the velocity block, CG on the pressure Schur complement
};

struct SolverConfig {
  double tolerance = 1e-10;
  int refinement_steps = 3;
  SolverMethod method = SolverMethod::automatic;
  long direct_limit = 5000;
  double schur_tolerance = 1e-14;  // relative, on the pressure Schur residual
  int schur_max_iterations = 1000;
};

struct SolveResult {
  Eigen::VectorXd u;
  Eigen::VectorXd p;  // already converted back from y = -p
  double multiplier = 0.0;
  double relative_residual = 0.0;
  long nnz = 0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  SolverMethod method = SolverMethod::direct;
  int iterations = 0;  // pressure CG iterations, summed over refinement steps
};

/// Sparse LU (UMFPACK) with a few steps of iterative refinement. Throws
/// SolverError when the factorization breaks down, the solution is not
/// finite, or the relative residual exceeds the tolerance.
SolveResult solve(const AugmentedSystem& system, const SolverConfig& config = {});

/// Solves the constrained system by the configured method. The block Schur
/// path relies on the velocity block being the same SPD matrix for every
/// component; either way the residual is checked on the full augmented system.
SolveResult solve(const SaddleSystem& system, const SolverConfig& config = {});

/// Block-diagonal pressure mass matrix over all elements.
SparseMatrix pressure_mass_matrix(const Discretization& disc);

/// Discrete inf-sup constant: sqrt of the smallest eigenvalue of B A^-1 B^T
/// against the pressure mass matrix on mean-zero pressures. Dense in the
/// pressure space; throws CapabilityError above max_pressure_dofs.
double infsup_probe(const Discretization& disc, int max_pressure_dofs = 4000);

}  // namespace polystokes
