#pragma once

#include <Eigen/Core>

#include <functional>

namespace polystokes {

/// Point or vector in R^2 or R^3. Fixed capacity, so no heap allocation.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// d x d matrix; entry (i, c) holds d u_i / d x_c for a velocity gradient.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;
using TensorField = std::function<Tensor(const Point&)>;

/// Number of polynomials of total degree <= degree in dim variables; 0 for negative degree.
constexpr int polynomial_space_dim(int dim, int degree) {
  if (degree < 0) return 0;
  long num = 1;
  long den = 1;
  for (int i = 1; i <= dim; ++i) {
    num *= degree + i;
    den *= i;
  }
  return static_cast<int>(num / den);
}

}  // namespace polystokes
