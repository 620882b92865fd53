#include "polystokes/analysis.hpp"

#include "polystokes/parallel.hpp"
#include "polystokes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polystokes {

namespace {

double ordered_sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

double triple_norm(const Discretization& disc, const Eigen::VectorXd& v, const BoundaryLift* lift) {
  std::vector<double> sq(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(sq.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const double n = disc.tensor_norm(disc.weak_gradient(v, e, lift), e);
    sq[i] = n * n;
  });
  return std::sqrt(ordered_sum(sq));
}

double h1_discrete_norm(const Discretization& disc, const Eigen::VectorXd& v) {
  const PolytopalMesh& mesh = disc.mesh();
  const int d = disc.dim();
  const int k = disc.k();

  std::vector<double> vol(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(vol.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    const int nk = data.velocity_basis.size();
    const QuadratureRule rule = quad_element(mesh, e, 2 * k);
    Eigen::MatrixXd grads(nk, d);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      data.velocity_basis.eval_grad_into(rule.points[q], grads);
      for (int c = 0; c < d; ++c) {
        const Eigen::VectorXd g = grads.transpose() * v.segment(disc.dofs().velocity_index(e, c, 0), nk);
        s += rule.weights[q] * g.squaredNorm();
      }
    }
    vol[i] = s;
  });

  std::vector<double> jumps(static_cast<std::size_t>(mesh.n_faces()));
  parallel_for(jumps.size(), [&](std::size_t i) {
    const Face& f = mesh.face(static_cast<int>(i));
    const QuadratureRule rule = quad_face(mesh, static_cast<int>(i), 2 * k);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Point jump = disc.eval_velocity(v, f.owner1, rule.points[q]);
      if (!f.is_boundary()) jump -= disc.eval_velocity(v, f.owner2, rule.points[q]);
      s += rule.weights[q] * jump.squaredNorm();
    }
    jumps[i] = s / f.diameter;
  });
  return std::sqrt(ordered_sum(vol) + ordered_sum(jumps));
}

double weak_div_residual(const Discretization& disc, const Eigen::VectorXd& u, const BoundaryLift* lift) {
  std::vector<double> r(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(r.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const Eigen::VectorXd dv = disc.weak_divergence(u, e, lift);
    r[i] = std::sqrt(std::max(0.0, dv.dot(disc.element(e).pressure_mass.entries() * dv)));
  });
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

LevelErrors compute_errors(const Discretization& disc, const ProblemData& problem, const SolveResult& solution,
                           int level) {
  const PolytopalMesh& mesh = disc.mesh();
  const DofMap& dofs = disc.dofs();
  const int k = disc.k();

  std::optional<BoundaryLift> lift;
  if (!problem.homogeneous) lift = lift_boundary_data(disc, problem.boundary);
  const BoundaryLift* lp = lift ? &*lift : nullptr;

  const int vdeg = problem.velocity_degree.value_or(k + 2);
  const int pdeg = problem.pressure_degree.value_or(k + 2);
  const Eigen::VectorXd qu = project_velocity(disc, problem.velocity, vdeg);
  const Eigen::VectorXd qp = project_pressure(disc, problem.pressure, pdeg);
  const Eigen::VectorXd eu = qu - solution.u;

  struct Local {
    double u_l2 = 0.0;
    double u_grad = 0.0;
    double u_energy = 0.0;
    double p_l2 = 0.0;
    double p_proj = 0.0;
    double p_mean = 0.0;
    double div = 0.0;
  };
  std::vector<Local> loc(static_cast<std::size_t>(disc.n_elements()));
  parallel_for(loc.size(), [&](std::size_t i) {
    const int e = static_cast<int>(i);
    const ElementData& data = disc.element(e);
    Local& out = loc[i];

    const QuadratureRule ru = quad_element(mesh, e, 2 * std::max(k, vdeg));
    for (std::size_t q = 0; q < ru.size(); ++q) {
      out.u_l2 += ru.weights[q] * (problem.velocity(ru.points[q]) - disc.eval_velocity(solution.u, e, ru.points[q]))
                                      .squaredNorm();
    }

    const Eigen::MatrixXd gw = disc.weak_gradient(solution.u, e, lp);
    const QuadratureRule rg = quad_element(mesh, e, 2 * std::max(disc.j(e), std::max(vdeg - 1, 0)));
    for (std::size_t q = 0; q < rg.size(); ++q) {
      out.u_grad += rg.weights[q] *
                    (problem.velocity_gradient(rg.points[q]) - disc.eval_tensor(gw, e, rg.points[q])).squaredNorm();
    }
    const double t = disc.tensor_norm(disc.weak_gradient(eu, e), e);
    out.u_energy = t * t;

    const QuadratureRule rp = quad_element(mesh, e, 2 * std::max(k - 1, pdeg));
    for (std::size_t q = 0; q < rp.size(); ++q) {
      const double diff = problem.pressure(rp.points[q]) - disc.eval_pressure(solution.p, e, rp.points[q]);
      out.p_l2 += rp.weights[q] * diff * diff;
    }
    const auto np = dofs.pressure_block_size();
    const Eigen::VectorXd dp = qp.segment(dofs.pressure_offset(e), np) - solution.p.segment(dofs.pressure_offset(e), np);
    out.p_proj = dp.dot(data.pressure_mass.entries() * dp);
    out.p_mean = data.pressure_mass.entries().col(0).dot(solution.p.segment(dofs.pressure_offset(e), np));

    const Eigen::VectorXd dv = disc.weak_divergence(solution.u, e, lp);
    out.div = std::sqrt(std::max(0.0, dv.dot(data.pressure_mass.entries() * dv)));
  });

  LevelErrors r;
  r.level = level;
  r.h = mesh.max_element_diameter();
  r.ndof_u = dofs.n_velocity();
  r.ndof_p = dofs.n_pressure();
  for (const auto& l : loc) {
    r.err_u_l2 += l.u_l2;
    r.err_u_energy += l.u_energy;
    r.err_u_grad += l.u_grad;
    r.err_p_l2 += l.p_l2;
    r.err_p_proj += l.p_proj;
    r.pressure_mean += l.p_mean;
    r.weak_div_residual = std::max(r.weak_div_residual, l.div);
  }
  r.err_u_l2 = std::sqrt(r.err_u_l2);
  r.err_u_energy = std::sqrt(r.err_u_energy);
  r.err_u_grad = std::sqrt(r.err_u_grad);
  r.err_p_l2 = std::sqrt(r.err_p_l2);
  r.err_p_proj = std::sqrt(r.err_p_proj);
  return r;
}

std::vector<double> convergence_rates(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(std::log2(errors[i - 1] / errors[i]));
  return out;
}

std::vector<double> ErrorReport::column(double LevelErrors::*member) const {
  std::vector<double> out;
  out.reserve(levels.size());
  for (const auto& l : levels) out.push_back(l.*member);
  return out;
}

}  // namespace polystokes
