#pragma once

#include "polystokes/mesh.hpp"
#include "polystokes/quadrature.hpp"
#include "polystokes/types.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <array>
#include <vector>

namespace polystokes {

/// Scaled monomials ((x - x_T) / h_T)^alpha, |alpha| <= degree, in graded
/// lexicographic order: degree 0 first, and within one degree the exponent of
/// x descends (then y in 3D). The first function is the constant 1.
class MonomialBasis {
 public:
  MonomialBasis(int dim, int degree, Point center, double scale);

  /// Basis on an element, centered at its centroid and scaled by its diameter.
  static MonomialBasis on_element(const PolytopalMesh& mesh, int element, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<std::array<int, 3>>& exponents() const { return exponents_; }

  Eigen::VectorXd eval(const Point& x) const;
  /// size() x dim matrix of gradients, including the 1/h_T chain factor.
  Eigen::MatrixXd eval_grad(const Point& x) const;

  /// Allocation-free variants; `values` must have size() entries, `grads` size() x dim.
  void eval_into(const Point& x, Eigen::Ref<Eigen::VectorXd> values) const;
  void eval_grad_into(const Point& x, Eigen::Ref<Eigen::MatrixXd> grads) const;

 private:
  void powers(const Point& x, std::array<std::array<double, 32>, 3>& pw) const;

  int dim_;
  int degree_;
  Point center_;
  double scale_;
  std::vector<std::array<int, 3>> exponents_;
};

/// Gram matrix of a MonomialBasis on one element, with its Cholesky factor.
class MassMatrix {
 public:
  /// Throws AssemblyError naming `element` if the matrix is not numerically SPD.
  MassMatrix(Eigen::MatrixXd entries, int degree, int element);

  const Eigen::MatrixXd& entries() const { return entries_; }
  int degree() const { return degree_; }
  int element() const { return element_; }
  int size() const { return static_cast<int>(entries_.rows()); }

  /// Solves entries() * X = rhs, column by column.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  int degree_;
  int element_;
};

/// Mass matrix of `basis` on `element`, using a rule exact to 2 * degree + 2.
MassMatrix mass_matrix(const PolytopalMesh& mesh, int element, const MonomialBasis& basis);
MassMatrix mass_matrix(const PolytopalMesh& mesh, int element, int degree);

/// Coefficients of the L2 projection of a scalar field onto `basis` on one element.
Eigen::VectorXd project_scalar(const MassMatrix& mass, const MonomialBasis& basis, const QuadratureRule& rule,
                               const ScalarField& field);

}  // namespace polystokes
