#pragma once

#include "polystokes/assembly.hpp"
#include "polystokes/problem.hpp"
#include "polystokes/weakcalc.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace polystokes {

/// |||v|||: L2 norm of the weak gradient over all elements (boundary average zero unless a lift is given).
double triple_norm(const Discretization& disc, const Eigen::VectorXd& v, const BoundaryLift* lift = nullptr);

/// Broken H1 seminorm plus h_e^-1 weighted face jumps; on boundary faces the jump is the trace itself.
double h1_discrete_norm(const Discretization& disc, const Eigen::VectorXd& v);

/// max_T || div_w u_h ||_T, including the boundary lift when given.
double weak_div_residual(const Discretization& disc, const Eigen::VectorXd& u, const BoundaryLift* lift = nullptr);

struct LevelErrors {
  int level = 0;
  double h = 0.0;
  long ndof_u = 0;
  long ndof_p = 0;
  double err_u_l2 = 0.0;      // || u - u_h ||
  double err_u_energy = 0.0;  // ||| Q_h u - u_h |||, the energy column of the tables
  double err_u_grad = 0.0;    // || grad u - grad_w u_h ||, elementwise
  double err_p_l2 = 0.0;      // || p - p_h ||
  double err_p_proj = 0.0;    // || Q_h p - p_h ||
  double weak_div_residual = 0.0;
  double pressure_mean = 0.0;  // integral of p_h
};

/// Errors of a solved level against the problem's exact fields.
LevelErrors compute_errors(const Discretization& disc, const ProblemData& problem, const SolveResult& solution,
                           int level);

/// log2(e_coarse / e_fine) for consecutive entries; empty for fewer than two.
std::vector<double> convergence_rates(const std::vector<double>& errors);

struct ErrorReport {
  std::string problem;
  std::string family;
  int k = 1;
  std::optional<int> explicit_j;
  std::vector<LevelErrors> levels;

  std::vector<double> column(double LevelErrors::*member) const;
  std::vector<double> rates(double LevelErrors::*member) const { return convergence_rates(column(member)); }
};

}  // namespace polystokes
