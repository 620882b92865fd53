#pragma once

#include "polystokes/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polystokes {

/// A manufactured Stokes problem on the unit square or unit cube.
struct ProblemData {
  std::string name;
  int dim = 2;
  VectorField velocity;
  TensorField velocity_gradient;  // (i, c) = d u_i / d x_c
  ScalarField pressure;           // mean zero over the domain
  VectorField forcing;            // -lap u + grad p
  VectorField boundary;           // Dirichlet trace, here the exact velocity
  bool homogeneous = false;       // boundary data vanishes identically

  // Total degrees for polynomial fields; empty means smooth, non-polynomial.
  std::optional<int> velocity_degree;
  std::optional<int> pressure_degree;
  std::optional<int> forcing_degree;
};

/// ex1, ex2, poly2 and zero are two-dimensional; ex3 and zero3 live on the unit cube.
ProblemData builtin_problem(std::string_view name);
std::vector<std::string> builtin_problem_names();

}  // namespace polystokes
