#include "polystokes/polybasis.hpp"

#include "polystokes/error.hpp"

#include <cmath>
#include <string>

namespace polystokes {

namespace {

constexpr int kMaxBasisDegree = 30;

}  // namespace

MonomialBasis::MonomialBasis(int dim, int degree, Point center, double scale)
    : dim_(dim), degree_(degree), center_(std::move(center)), scale_(scale) {
  if (dim != 2 && dim != 3) throw ConfigError("basis dimension must be 2 or 3");
  if (degree < 0 || degree > kMaxBasisDegree) {
    throw CapabilityError("monomial basis degree " + std::to_string(degree) + " out of range");
  }
  if (!(scale > 0.0)) throw AssemblyError("monomial basis scale must be positive");
  exponents_.reserve(static_cast<std::size_t>(polynomial_space_dim(dim, degree)));
  for (int m = 0; m <= degree; ++m) {
    if (dim == 2) {
      for (int a = m; a >= 0; --a) exponents_.push_back({a, m - a, 0});
    } else {
      for (int a = m; a >= 0; --a) {
        for (int b = m - a; b >= 0; --b) exponents_.push_back({a, b, m - a - b});
      }
    }
  }
}

MonomialBasis MonomialBasis::on_element(const PolytopalMesh& mesh, int element, int degree) {
  const Element& e = mesh.element(element);
  return MonomialBasis(mesh.dim(), degree, e.centroid, e.diameter);
}

void MonomialBasis::powers(const Point& x, std::array<std::array<double, 32>, 3>& pw) const {
  for (int c = 0; c < dim_; ++c) {
    const double xi = (x(c) - center_(c)) / scale_;
    pw[c][0] = 1.0;
    for (int p = 1; p <= degree_; ++p) pw[c][p] = pw[c][p - 1] * xi;
  }
}

void MonomialBasis::eval_into(const Point& x, Eigen::Ref<Eigen::VectorXd> values) const {
  std::array<std::array<double, 32>, 3> pw;
  powers(x, pw);
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    const auto& a = exponents_[i];
    double v = pw[0][a[0]] * pw[1][a[1]];
    if (dim_ == 3) v *= pw[2][a[2]];
    values(static_cast<Eigen::Index>(i)) = v;
  }
}

void MonomialBasis::eval_grad_into(const Point& x, Eigen::Ref<Eigen::MatrixXd> grads) const {
  std::array<std::array<double, 32>, 3> pw;
  powers(x, pw);
  const double inv = 1.0 / scale_;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    const auto& a = exponents_[i];
    const auto row = static_cast<Eigen::Index>(i);
    if (dim_ == 2) {
      grads(row, 0) = a[0] > 0 ? a[0] * pw[0][a[0] - 1] * pw[1][a[1]] * inv : 0.0;
      grads(row, 1) = a[1] > 0 ? a[1] * pw[0][a[0]] * pw[1][a[1] - 1] * inv : 0.0;
    } else {
      grads(row, 0) = a[0] > 0 ? a[0] * pw[0][a[0] - 1] * pw[1][a[1]] * pw[2][a[2]] * inv : 0.0;
      grads(row, 1) = a[1] > 0 ? a[1] * pw[0][a[0]] * pw[1][a[1] - 1] * pw[2][a[2]] * inv : 0.0;
      grads(row, 2) = a[2] > 0 ? a[2] * pw[0][a[0]] * pw[1][a[1]] * pw[2][a[2] - 1] * inv : 0.0;
    }
  }
}

Eigen::VectorXd MonomialBasis::eval(const Point& x) const {
  Eigen::VectorXd v(size());
  eval_into(x, v);
  return v;
}

Eigen::MatrixXd MonomialBasis::eval_grad(const Point& x) const {
  Eigen::MatrixXd g(size(), dim_);
  eval_grad_into(x, g);
  return g;
}

MassMatrix::MassMatrix(Eigen::MatrixXd entries, int degree, int element)
    : entries_(std::move(entries)), degree_(degree), element_(element) {
  factor_.compute(entries_);
  bool ok = factor_.info() == Eigen::Success;
  if (ok) {
    const Eigen::VectorXd diag = factor_.matrixLLT().diagonal();
    const double dmax = diag.maxCoeff();
    // A vanishing Cholesky pivot relative to the largest one means the element is degenerate.
    ok = diag.minCoeff() > 1e-10 * dmax && std::isfinite(dmax);
  }
  if (!ok) {
    throw AssemblyError("singular mass matrix (degree " + std::to_string(degree) + ") on element " +
                        std::to_string(element));
  }
}

Eigen::MatrixXd MassMatrix::solve(const Eigen::MatrixXd& rhs) const { return factor_.solve(rhs); }

Eigen::VectorXd MassMatrix::solve(const Eigen::VectorXd& rhs) const { return factor_.solve(rhs); }

MassMatrix mass_matrix(const PolytopalMesh& mesh, int element, const MonomialBasis& basis) {
  const QuadratureRule rule = quad_element(mesh, element, 2 * basis.degree() + 2);
  const int n = basis.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd phi(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.eval_into(rule.points[q], phi);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(phi, rule.weights[q]);
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return MassMatrix(std::move(gram), basis.degree(), element);
}

MassMatrix mass_matrix(const PolytopalMesh& mesh, int element, int degree) {
  return mass_matrix(mesh, element, MonomialBasis::on_element(mesh, element, degree));
}

Eigen::VectorXd project_scalar(const MassMatrix& mass, const MonomialBasis& basis, const QuadratureRule& rule,
                               const ScalarField& field) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(basis.size());
  Eigen::VectorXd phi(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    basis.eval_into(rule.points[q], phi);
    rhs += rule.weights[q] * field(rule.points[q]) * phi;
  }
  return mass.solve(rhs);
}

}  // namespace polystokes
