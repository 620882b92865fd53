#pragma once

#include "polystokes/dofmap.hpp"
#include "polystokes/mesh.hpp"
#include "polystokes/polybasis.hpp"
#include "polystokes/types.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <vector>

namespace polystokes {

/// Degree j of the tensor space holding the weak gradient.
///
/// Automatic choice: j = k + 1 on triangles and tetrahedra, j = n + k - 1 on
/// other polytopes with n faces. An explicit j overrides it everywhere.
struct JPolicy {
  std::optional<int> explicit_j;

  int resolve(const PolytopalMesh& mesh, int element, int k) const;
  std::string describe() const;
};

/// Weak gradient of scalar basis functions on one element.
///
/// The stencil lists the element itself followed by its face neighbours.
/// Column s * n_k + b is the basis function b of stencil element s; rows
/// c * n_j + m hold the coefficient of the P_j basis function m in the c-th
/// component of the weak gradient. A vector field's weak gradient applies
/// this matrix to each velocity component, giving one tensor row each.
struct WeakGradOp {
  int element = -1;
  int k_degree = 1;
  int j_degree = 2;
  std::vector<int> stencil;
  Eigen::MatrixXd coeffs;
};

/// Weak divergence of vector basis functions on one element, in P_{k-1}.
/// Column (s * d + c) * n_k + b is component c of basis b on stencil element s,
/// which matches the velocity block layout of DofMap.
struct WeakDivOp {
  int element = -1;
  int k_degree = 1;
  std::vector<int> stencil;
  Eigen::MatrixXd coeffs;
};

/// Known terms from a prescribed boundary trace g, replacing the zero
/// boundary average in the weak gradient and weak divergence.
struct ElementLift {
  Eigen::MatrixXd grad;  // d x (d * n_j): row i is the weak-gradient lift of velocity component i
  Eigen::VectorXd div;   // n_{k-1} coefficients
  bool empty() const { return grad.size() == 0; }
};

struct BoundaryLift {
  std::vector<ElementLift> elements;  // empty entries for elements without boundary faces
  bool is_zero() const;
};

WeakGradOp weak_gradient_op(const PolytopalMesh& mesh, int element, int k, int j);
WeakDivOp weak_divergence_op(const PolytopalMesh& mesh, int element, int k);

/// Everything the scheme needs on one element.
struct ElementData {
  MonomialBasis velocity_basis;  // P_k
  MonomialBasis gradient_basis;  // P_j
  MonomialBasis pressure_basis;  // P_{k-1}
  MassMatrix velocity_mass;
  MassMatrix gradient_mass;
  MassMatrix pressure_mass;
  WeakGradOp grad;
  WeakDivOp div;
};

/// Weak operators for every element of a mesh at velocity degree k.
///
/// Holds a reference to the mesh, which must outlive this object. Element
/// data is built in parallel; each slot is written by exactly one worker.
class Discretization {
 public:
  Discretization(const PolytopalMesh& mesh, int k, JPolicy policy = {});

  const PolytopalMesh& mesh() const { return *mesh_; }
  int k() const { return k_; }
  int dim() const { return mesh_->dim(); }
  const JPolicy& policy() const { return policy_; }
  const DofMap& dofs() const { return dofs_; }
  int n_elements() const { return mesh_->n_elements(); }
  const ElementData& element(int e) const { return data_[e]; }
  int j(int e) const { return data_[e].grad.j_degree; }

  /// Gathers component `component` of the stencil unknowns of element e.
  Eigen::VectorXd gather_component(const Eigen::VectorXd& u, int e, int component) const;
  /// Gathers all stencil velocity unknowns of element e in WeakDivOp column order.
  Eigen::VectorXd gather_velocity(const Eigen::VectorXd& u, int e) const;

  /// d x (d * n_j) weak-gradient coefficients of a discrete velocity on e, plus
  /// the boundary lift when given.
  Eigen::MatrixXd weak_gradient(const Eigen::VectorXd& u, int e, const BoundaryLift* lift = nullptr) const;
  Eigen::VectorXd weak_divergence(const Eigen::VectorXd& u, int e, const BoundaryLift* lift = nullptr) const;

  Point eval_velocity(const Eigen::VectorXd& u, int e, const Point& x) const;
  double eval_pressure(const Eigen::VectorXd& p, int e, const Point& x) const;
  /// Tensor value at x of coefficients laid out as returned by weak_gradient().
  Tensor eval_tensor(const Eigen::MatrixXd& coeffs, int e, const Point& x) const;

  /// L2 norm on e of tensor coefficients laid out as returned by weak_gradient().
  double tensor_norm(const Eigen::MatrixXd& coeffs, int e) const;

 private:
  const PolytopalMesh* mesh_;
  int k_;
  JPolicy policy_;
  DofMap dofs_;
  std::vector<ElementData> data_;
};

/// Lifts Dirichlet data g: on boundary faces the trace g enters the weak
/// operators in place of the zero boundary average. Face rules are exact to
/// j + k + 2 for polynomial g.
BoundaryLift lift_boundary_data(const Discretization& disc, const VectorField& g);

/// Element-wise L2 projections onto [P_k]^d, P_{k-1} and [P_j]^{d x d}.
/// `field_degree` sets quadrature exactness (2 * max(field_degree, space degree) + 2);
/// pass a generous value for non-polynomial fields.
Eigen::VectorXd project_velocity(const Discretization& disc, const VectorField& u, int field_degree);
Eigen::VectorXd project_pressure(const Discretization& disc, const ScalarField& p, int field_degree);
std::vector<Eigen::MatrixXd> project_tensor(const Discretization& disc, const TensorField& grad, int field_degree);

/// Weak gradient / divergence of a continuous field phi on element e, using
/// phi's own traces: {phi} = phi on interior faces and 0 on boundary faces.
Eigen::MatrixXd weak_gradient_of_field(const Discretization& disc, int e, const VectorField& phi, int field_degree);
Eigen::VectorXd weak_divergence_of_field(const Discretization& disc, int e, const VectorField& phi, int field_degree);

struct IdentityDiscrepancy {
  double gradient = 0.0;    // max_T || grad_w phi - Q_h grad phi ||_T
  double divergence = 0.0;  // max_T || div_w phi - Q_h div phi ||_T
};

/// Compares the weak operators of phi with the projections of its classical
/// derivatives. Requires phi to vanish on the boundary (PreconditionError
/// otherwise); for polynomial phi of degree field_degree the quadrature is exact.
IdentityDiscrepancy check_projection_identity(const Discretization& disc, const VectorField& phi,
                                              const TensorField& grad_phi, int field_degree);

}  // namespace polystokes
