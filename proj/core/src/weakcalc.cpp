#include "polystokes/weakcalc.hpp"

#include "polystokes/error.hpp"
#include "polystokes/parallel.hpp"
#include "polystokes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace polystokes {

namespace {

std::vector<int> stencil_of(const PolytopalMesh& mesh, int e) {
  std::vector<int> stencil{e};
  for (int fid : mesh.element(e).faces) {
    const int nb = mesh.face(fid).neighbor_of(e);
    if (nb >= 0 && std::find(stencil.begin(), stencil.end(), nb) == stencil.end()) stencil.push_back(nb);
  }
  return stencil;
}

int stencil_index(const std::vector<int>& stencil, int element) {
  return static_cast<int>(std::find(stencil.begin(), stencil.end(), element) - stencil.begin());
}

void check_degrees(int k, int j) {
  if (k < 1) throw ConfigError("velocity degree k must be >= 1, got " + std::to_string(k));
  if (j < k) {
    throw ConfigError("weak gradient degree j must be >= k (got j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                      ")");
  }
}

// Assembles the right-hand sides of the weak gradient and weak divergence
// definitions for every stencil basis function, then solves the element
// mass systems. One pass over the element and face rules serves both.
std::pair<WeakGradOp, WeakDivOp> build_operators(const PolytopalMesh& mesh, int e, int k, int j,
                                                 const MonomialBasis& gbasis, const MassMatrix& gmass,
                                                 const MonomialBasis& pbasis, const MassMatrix& pmass) {
  const int d = mesh.dim();
  const std::vector<int> stencil = stencil_of(mesh, e);
  const int ns = static_cast<int>(stencil.size());
  std::vector<MonomialBasis> vbases;
  vbases.reserve(stencil.size());
  for (int s : stencil) vbases.push_back(MonomialBasis::on_element(mesh, s, k));

  const int nk = vbases.front().size();
  const int nj = gbasis.size();
  const int np = pbasis.size();

  Eigen::MatrixXd rg = Eigen::MatrixXd::Zero(d * nj, ns * nk);
  Eigen::MatrixXd rd = Eigen::MatrixXd::Zero(np, ns * d * nk);

  // Volume terms: (v, -div tau)_T and (v, -grad q)_T; only T's own functions are nonzero on T.
  {
    const QuadratureRule rule = quad_element(mesh, e, 2 * j + 2);
    Eigen::VectorXd phi(nk);
    Eigen::MatrixXd gpsi(nj, d);
    Eigen::MatrixXd gq(np, d);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double w = rule.weights[q];
      vbases[0].eval_into(x, phi);
      gbasis.eval_grad_into(x, gpsi);
      pbasis.eval_grad_into(x, gq);
      for (int c = 0; c < d; ++c) {
        rg.block(c * nj, 0, nj, nk).noalias() -= (w * gpsi.col(c)) * phi.transpose();
        rd.block(0, c * nk, np, nk).noalias() -= (w * gq.col(c)) * phi.transpose();
      }
    }
  }

  // Trace terms with the average {v} = (v|_T + v|_T') / 2 on interior faces; zero on the boundary.
  Eigen::VectorXd phi_own(nk);
  Eigen::VectorXd phi_nb(nk);
  Eigen::VectorXd psi(nj);
  Eigen::VectorXd qv(np);
  for (int fid : mesh.element(e).faces) {
    const Face& face = mesh.face(fid);
    if (face.is_boundary()) continue;
    const int s = stencil_index(stencil, face.neighbor_of(e));
    const Point n = mesh.outward_normal(e, fid);
    const QuadratureRule rule = quad_face(mesh, fid, j + k + 2);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      vbases[0].eval_into(x, phi_own);
      vbases[s].eval_into(x, phi_nb);
      gbasis.eval_into(x, psi);
      pbasis.eval_into(x, qv);
      for (int c = 0; c < d; ++c) {
        const double a = 0.5 * rule.weights[q] * n(c);
        rg.block(c * nj, 0, nj, nk).noalias() += (a * psi) * phi_own.transpose();
        rg.block(c * nj, s * nk, nj, nk).noalias() += (a * psi) * phi_nb.transpose();
        rd.block(0, c * nk, np, nk).noalias() += (a * qv) * phi_own.transpose();
        rd.block(0, (s * d + c) * nk, np, nk).noalias() += (a * qv) * phi_nb.transpose();
      }
    }
  }

  WeakGradOp grad;
  grad.element = e;
  grad.k_degree = k;
  grad.j_degree = j;
  grad.stencil = stencil;
  grad.coeffs.resize(d * nj, ns * nk);
  for (int c = 0; c < d; ++c) grad.coeffs.middleRows(c * nj, nj) = gmass.solve(Eigen::MatrixXd(rg.middleRows(c * nj, nj)));

  WeakDivOp div;
  div.element = e;
  div.k_degree = k;
  div.stencil = stencil;
  div.coeffs = pmass.solve(rd);
  return {std::move(grad), std::move(div)};
}

double max_abs_component(const Point& p) { return p.cwiseAbs().maxCoeff(); }

}  // namespace

int JPolicy::resolve(const PolytopalMesh& mesh, int element, int k) const {
  if (explicit_j) return *explicit_j;
  const int n = mesh.element(element).n_faces();
  if (n == mesh.dim() + 1) return k + 1;
  return n + k - 1;
}

std::string JPolicy::describe() const { return explicit_j ? "j=" + std::to_string(*explicit_j) : "auto"; }

bool BoundaryLift::is_zero() const {
  for (const auto& l : elements) {
    if (l.empty()) continue;
    if (!l.grad.isZero(0.0) || !l.div.isZero(0.0)) return false;
  }
  return true;
}

WeakGradOp weak_gradient_op(const PolytopalMesh& mesh, int element, int k, int j) {
  check_degrees(k, j);
  const MonomialBasis gbasis = MonomialBasis::on_element(mesh, element, j);
  const MonomialBasis pbasis = MonomialBasis::on_element(mesh, element, k - 1);
  const MassMatrix gmass = mass_matrix(mesh, element, gbasis);
  const MassMatrix pmass = mass_matrix(mesh, element, pbasis);
  return build_operators(mesh, element, k, j, gbasis, gmass, pbasis, pmass).first;
}

WeakDivOp weak_divergence_op(const PolytopalMesh& mesh, int element, int k) {
  check_degrees(k, k);
  const MonomialBasis gbasis = MonomialBasis::on_element(mesh, element, k);
  const MonomialBasis pbasis = MonomialBasis::on_element(mesh, element, k - 1);
  const MassMatrix gmass = mass_matrix(mesh, element, gbasis);
  const MassMatrix pmass = mass_matrix(mesh, element, pbasis);
  return build_operators(mesh, element, k, k, gbasis, gmass, pbasis, pmass).second;
}

Discretization::Discretization(const PolytopalMesh& mesh, int k, JPolicy policy)
    : mesh_(&mesh), k_(k), policy_(std::move(policy)) {
  if (k < 1) throw ConfigError("velocity degree k must be >= 1, got " + std::to_string(k));
  dofs_.dim = mesh.dim();
  dofs_.k = k;
  dofs_.n_elements = mesh.n_elements();

  std::vector<std::optional<ElementData>> slots(static_cast<std::size_t>(mesh.n_elements()));
  parallel_for(slots.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const int j = policy_.resolve(mesh, e, k);
    check_degrees(k, j);
    MonomialBasis vbasis = MonomialBasis::on_element(mesh, e, k);
    MonomialBasis gbasis = MonomialBasis::on_element(mesh, e, j);
    MonomialBasis pbasis = MonomialBasis::on_element(mesh, e, k - 1);
    MassMatrix vmass = mass_matrix(mesh, e, vbasis);
    MassMatrix gmass = mass_matrix(mesh, e, gbasis);
    MassMatrix pmass = mass_matrix(mesh, e, pbasis);
    auto [grad, div] = build_operators(mesh, e, k, j, gbasis, gmass, pbasis, pmass);
    slots[i].emplace(ElementData{std::move(vbasis), std::move(gbasis), std::move(pbasis), std::move(vmass),
                                 std::move(gmass), std::move(pmass), std::move(grad), std::move(div)});
  });
  data_.reserve(slots.size());
  for (auto& s : slots) data_.push_back(std::move(*s));
}

Eigen::VectorXd Discretization::gather_component(const Eigen::VectorXd& u, int e, int component) const {
  const auto& stencil = data_[e].grad.stencil;
  const int nk = dofs_.velocity_basis_size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(stencil.size()) * nk);
  for (std::size_t s = 0; s < stencil.size(); ++s) {
    out.segment(static_cast<Eigen::Index>(s) * nk, nk) = u.segment(dofs_.velocity_index(stencil[s], component, 0), nk);
  }
  return out;
}

Eigen::VectorXd Discretization::gather_velocity(const Eigen::VectorXd& u, int e) const {
  const auto& stencil = data_[e].div.stencil;
  const int nb = dofs_.velocity_block_size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(stencil.size()) * nb);
  for (std::size_t s = 0; s < stencil.size(); ++s) {
    out.segment(static_cast<Eigen::Index>(s) * nb, nb) = u.segment(dofs_.velocity_offset(stencil[s]), nb);
  }
  return out;
}

Eigen::MatrixXd Discretization::weak_gradient(const Eigen::VectorXd& u, int e, const BoundaryLift* lift) const {
  const int d = dim();
  const auto& op = data_[e].grad;
  Eigen::MatrixXd out(d, op.coeffs.rows());
  for (int i = 0; i < d; ++i) out.row(i) = (op.coeffs * gather_component(u, e, i)).transpose();
  if (lift && !lift->elements[e].empty()) out += lift->elements[e].grad;
  return out;
}

Eigen::VectorXd Discretization::weak_divergence(const Eigen::VectorXd& u, int e, const BoundaryLift* lift) const {
  Eigen::VectorXd out = data_[e].div.coeffs * gather_velocity(u, e);
  if (lift && !lift->elements[e].empty()) out += lift->elements[e].div;
  return out;
}

Point Discretization::eval_velocity(const Eigen::VectorXd& u, int e, const Point& x) const {
  const Eigen::VectorXd phi = data_[e].velocity_basis.eval(x);
  const int nk = dofs_.velocity_basis_size();
  Point out(dim());
  for (int i = 0; i < dim(); ++i) out(i) = u.segment(dofs_.velocity_index(e, i, 0), nk).dot(phi);
  return out;
}

double Discretization::eval_pressure(const Eigen::VectorXd& p, int e, const Point& x) const {
  const Eigen::VectorXd q = data_[e].pressure_basis.eval(x);
  return p.segment(dofs_.pressure_offset(e), dofs_.pressure_block_size()).dot(q);
}

Tensor Discretization::eval_tensor(const Eigen::MatrixXd& coeffs, int e, const Point& x) const {
  const Eigen::VectorXd psi = data_[e].gradient_basis.eval(x);
  const int nj = static_cast<int>(psi.size());
  Tensor t(dim(), dim());
  for (int i = 0; i < dim(); ++i) {
    for (int c = 0; c < dim(); ++c) t(i, c) = coeffs.row(i).segment(c * nj, nj).dot(psi);
  }
  return t;
}

double Discretization::tensor_norm(const Eigen::MatrixXd& coeffs, int e) const {
  const Eigen::MatrixXd& m = data_[e].gradient_mass.entries();
  const int nj = static_cast<int>(m.rows());
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    for (int c = 0; c < dim(); ++c) {
      const Eigen::VectorXd v = coeffs.row(i).segment(c * nj, nj).transpose();
      s += v.dot(m * v);
    }
  }
  return std::sqrt(std::max(s, 0.0));
}

BoundaryLift lift_boundary_data(const Discretization& disc, const VectorField& g) {
  const PolytopalMesh& mesh = disc.mesh();
  const int d = disc.dim();
  BoundaryLift lift;
  lift.elements.resize(static_cast<std::size_t>(disc.n_elements()));

  parallel_for(lift.elements.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const Element& elem = mesh.element(e);
    const bool touches = std::any_of(elem.faces.begin(), elem.faces.end(),
                                     [&](int f) { return mesh.face(f).is_boundary(); });
    if (!touches) return;
    const ElementData& data = disc.element(e);
    const int nj = data.gradient_basis.size();
    const int np = data.pressure_basis.size();
    Eigen::MatrixXd rg = Eigen::MatrixXd::Zero(d, d * nj);
    Eigen::VectorXd rd = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd psi(nj);
    Eigen::VectorXd qv(np);
    for (int fid : elem.faces) {
      const Face& face = mesh.face(fid);
      if (!face.is_boundary()) continue;
      const Point n = mesh.outward_normal(e, fid);
      const QuadratureRule rule = quad_face(mesh, fid, disc.j(e) + disc.k() + 2);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point gx = g(rule.points[q]);
        const double w = rule.weights[q];
        data.gradient_basis.eval_into(rule.points[q], psi);
        data.pressure_basis.eval_into(rule.points[q], qv);
        for (int r = 0; r < d; ++r) {
          for (int c = 0; c < d; ++c) rg.row(r).segment(c * nj, nj) += (w * gx(r) * n(c)) * psi.transpose();
        }
        rd += (w * gx.dot(n)) * qv;
      }
    }
    ElementLift& out = lift.elements[i];
    out.grad.resize(d, d * nj);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        out.grad.row(r).segment(c * nj, nj) =
            data.gradient_mass.solve(Eigen::VectorXd(rg.row(r).segment(c * nj, nj).transpose())).transpose();
      }
    }
    out.div = data.pressure_mass.solve(rd);
  });
  return lift;
}

Eigen::VectorXd project_velocity(const Discretization& disc, const VectorField& u, int field_degree) {
  const DofMap& dofs = disc.dofs();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_velocity());
  const int nk = dofs.velocity_basis_size();
  parallel_for(static_cast<std::size_t>(disc.n_elements()), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    const QuadratureRule rule = quad_element(disc.mesh(), e, 2 * std::max(field_degree, disc.k()) + 2);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nk, disc.dim());
    Eigen::VectorXd phi(nk);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      data.velocity_basis.eval_into(rule.points[q], phi);
      const Point ux = u(rule.points[q]);
      for (int c = 0; c < disc.dim(); ++c) rhs.col(c) += rule.weights[q] * ux(c) * phi;
    }
    const Eigen::MatrixXd coeffs = data.velocity_mass.solve(rhs);
    for (int c = 0; c < disc.dim(); ++c) out.segment(dofs.velocity_index(e, c, 0), nk) = coeffs.col(c);
  });
  return out;
}

Eigen::VectorXd project_pressure(const Discretization& disc, const ScalarField& p, int field_degree) {
  const DofMap& dofs = disc.dofs();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dofs.n_pressure());
  parallel_for(static_cast<std::size_t>(disc.n_elements()), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    const QuadratureRule rule = quad_element(disc.mesh(), e, 2 * std::max(field_degree, disc.k() - 1) + 2);
    out.segment(dofs.pressure_offset(e), dofs.pressure_block_size()) =
        project_scalar(data.pressure_mass, data.pressure_basis, rule, p);
  });
  return out;
}

std::vector<Eigen::MatrixXd> project_tensor(const Discretization& disc, const TensorField& grad, int field_degree) {
  const int d = disc.dim();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(out.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    const int nj = data.gradient_basis.size();
    const QuadratureRule rule = quad_element(disc.mesh(), e, 2 * std::max(field_degree, disc.j(e)) + 2);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nj, d * d);
    Eigen::VectorXd psi(nj);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      data.gradient_basis.eval_into(rule.points[q], psi);
      const Tensor gx = grad(rule.points[q]);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) rhs.col(r * d + c) += rule.weights[q] * gx(r, c) * psi;
      }
    }
    const Eigen::MatrixXd coeffs = data.gradient_mass.solve(rhs);
    out[i].resize(d, d * nj);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) out[i].row(r).segment(c * nj, nj) = coeffs.col(r * d + c).transpose();
    }
  });
  return out;
}

Eigen::MatrixXd weak_gradient_of_field(const Discretization& disc, int e, const VectorField& phi, int field_degree) {
  const PolytopalMesh& mesh = disc.mesh();
  const int d = disc.dim();
  const ElementData& data = disc.element(e);
  const int nj = data.gradient_basis.size();
  const int degree = std::max(field_degree, 0) + disc.j(e);

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d, d * nj);
  Eigen::MatrixXd gpsi(nj, d);
  Eigen::VectorXd psi(nj);
  const QuadratureRule rule = quad_element(mesh, e, degree);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point v = phi(rule.points[q]);
    data.gradient_basis.eval_grad_into(rule.points[q], gpsi);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) rhs.row(r).segment(c * nj, nj) -= (rule.weights[q] * v(r)) * gpsi.col(c).transpose();
    }
  }
  for (int fid : mesh.element(e).faces) {
    if (mesh.face(fid).is_boundary()) continue;
    const Point n = mesh.outward_normal(e, fid);
    const QuadratureRule frule = quad_face(mesh, fid, degree);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      const Point v = phi(frule.points[q]);
      data.gradient_basis.eval_into(frule.points[q], psi);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) rhs.row(r).segment(c * nj, nj) += (frule.weights[q] * v(r) * n(c)) * psi.transpose();
      }
    }
  }
  Eigen::MatrixXd out(d, d * nj);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      out.row(r).segment(c * nj, nj) =
          data.gradient_mass.solve(Eigen::VectorXd(rhs.row(r).segment(c * nj, nj).transpose())).transpose();
    }
  }
  return out;
}

Eigen::VectorXd weak_divergence_of_field(const Discretization& disc, int e, const VectorField& phi, int field_degree) {
  const PolytopalMesh& mesh = disc.mesh();
  const int d = disc.dim();
  const ElementData& data = disc.element(e);
  const int np = data.pressure_basis.size();
  const int degree = std::max(field_degree, 0) + disc.k() - 1;

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
  Eigen::MatrixXd gq(np, d);
  Eigen::VectorXd qv(np);
  const QuadratureRule rule = quad_element(mesh, e, degree);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point v = phi(rule.points[q]);
    data.pressure_basis.eval_grad_into(rule.points[q], gq);
    rhs -= rule.weights[q] * (gq * Eigen::VectorXd(v));
  }
  for (int fid : mesh.element(e).faces) {
    if (mesh.face(fid).is_boundary()) continue;
    const Point n = mesh.outward_normal(e, fid);
    const QuadratureRule frule = quad_face(mesh, fid, degree);
    for (std::size_t q = 0; q < frule.size(); ++q) {
      data.pressure_basis.eval_into(frule.points[q], qv);
      rhs += (frule.weights[q] * phi(frule.points[q]).dot(n)) * qv;
    }
  }
  return data.pressure_mass.solve(rhs);
}

IdentityDiscrepancy check_projection_identity(const Discretization& disc, const VectorField& phi,
                                              const TensorField& grad_phi, int field_degree) {
  const PolytopalMesh& mesh = disc.mesh();
  const int d = disc.dim();

  double scale = 1.0;
  for (const auto& e : mesh.elements()) scale = std::max(scale, max_abs_component(phi(e.centroid)));
  for (int fid : mesh.boundary_face_ids()) {
    const QuadratureRule rule = quad_face(mesh, fid, std::max(field_degree, 1));
    for (const auto& x : rule.points) {
      if (max_abs_component(phi(x)) > 1e-12 * scale) {
        throw PreconditionError("field does not vanish on boundary face " + std::to_string(fid) +
                                " (identity requires a field in H^1_0)");
      }
    }
  }

  std::vector<IdentityDiscrepancy> per_element(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(per_element.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    const int nj = data.gradient_basis.size();

    const Eigen::MatrixXd weak = weak_gradient_of_field(disc, e, phi, field_degree);
    const QuadratureRule rule = quad_element(mesh, e, std::max(field_degree - 1, 0) + disc.j(e));
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(d, d * nj);
    Eigen::VectorXd psi(nj);
    const int np = data.pressure_basis.size();
    Eigen::VectorXd rhs_div = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd qv(np);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Tensor g = grad_phi(rule.points[q]);
      data.gradient_basis.eval_into(rule.points[q], psi);
      data.pressure_basis.eval_into(rule.points[q], qv);
      for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) rhs.row(r).segment(c * nj, nj) += (rule.weights[q] * g(r, c)) * psi.transpose();
      }
      rhs_div += (rule.weights[q] * g.trace()) * qv;
    }
    Eigen::MatrixXd projected(d, d * nj);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        projected.row(r).segment(c * nj, nj) =
            data.gradient_mass.solve(Eigen::VectorXd(rhs.row(r).segment(c * nj, nj).transpose())).transpose();
      }
    }
    per_element[i].gradient = disc.tensor_norm(weak - projected, e);

    const Eigen::VectorXd delta =
        weak_divergence_of_field(disc, e, phi, field_degree) - data.pressure_mass.solve(rhs_div);
    per_element[i].divergence = std::sqrt(std::max(0.0, delta.dot(data.pressure_mass.entries() * delta)));
  });

  IdentityDiscrepancy out;
  for (const auto& p : per_element) {
    out.gradient = std::max(out.gradient, p.gradient);
    out.divergence = std::max(out.divergence, p.divergence);
  }
  return out;
}

}  // namespace polystokes
