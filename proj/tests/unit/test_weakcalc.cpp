#include "polystokes/error.hpp"
#include "polystokes/problem.hpp"
#include "polystokes/weakcalc.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace polystokes;

namespace {

bool touches_boundary(const PolytopalMesh& m, int e) {
  for (int f : m.element(e).faces)
    if (m.face(f).is_boundary()) return true;
  return false;
}

// Velocity dofs of the constant field `value` (each component's constant coefficient).
Eigen::VectorXd constant_velocity(const Discretization& disc, const Point& value) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(disc.dofs().n_velocity());
  for (int e = 0; e < disc.n_elements(); ++e)
    for (int c = 0; c < disc.dim(); ++c) u(disc.dofs().velocity_index(e, c, 0)) = value(c);
  return u;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

std::vector<PolytopalMesh> sample_meshes() {
  return {gen_uniform_triangular(3), gen_polygonal(2), gen_uniform_tetrahedral(2)};
}

TEST(JPolicy, AutomaticDegrees) {
  const auto tri = gen_uniform_triangular(2);
  const auto hex = gen_polygonal(2);
  const auto tet = gen_uniform_tetrahedral(1);
  EXPECT_EQ(JPolicy{}.resolve(tri, 0, 2), 3);
  EXPECT_EQ(JPolicy{}.resolve(tet, 0, 2), 3);
  for (int e = 0; e < hex.n_elements(); ++e) EXPECT_EQ(JPolicy{}.resolve(hex, e, 1), hex.element(e).n_faces());
  EXPECT_EQ(JPolicy{5}.resolve(tri, 0, 2), 5);
  EXPECT_EQ(JPolicy{}.describe(), "auto");
  EXPECT_EQ(JPolicy{4}.describe(), "j=4");
}

TEST(JPolicy, RejectsTooSmallDegrees) {
  const auto mesh = gen_uniform_triangular(1);
  EXPECT_THROW(Discretization(mesh, 2, JPolicy{1}), ConfigError);
  EXPECT_THROW(Discretization(mesh, 0), ConfigError);
}

TEST(WeakGradient, ConstantVanishesOnlyAwayFromBoundary) {
  for (const auto& mesh : sample_meshes()) {
    const Discretization disc(mesh, 2);
    Point one = Point::Ones(mesh.dim());
    const Eigen::VectorXd u = constant_velocity(disc, one);
    int interior = 0;
    for (int e = 0; e < disc.n_elements(); ++e) {
      const double n = disc.tensor_norm(disc.weak_gradient(u, e), e);
      const double dv = disc.weak_divergence(u, e).norm();
      if (touches_boundary(mesh, e)) {
        EXPECT_GT(n, 1e-3);
      } else {
        ++interior;
        EXPECT_LT(n, 1e-12);
        EXPECT_LT(dv, 1e-12);
      }
    }
    EXPECT_GT(interior, 0);
  }
}

TEST(WeakGradient, StencilLocality) {
  const auto mesh = gen_polygonal(2);
  const Discretization disc(mesh, 1);
  const int e = 7;
  const auto& op = disc.element(e).grad;
  ASSERT_EQ(op.stencil.front(), e);
  EXPECT_EQ(static_cast<int>(op.stencil.size()) - 1, [&] {
    int n = 0;
    for (int f : mesh.element(e).faces) n += !mesh.face(f).is_boundary();
    return n;
  }());
  EXPECT_EQ(op.coeffs.cols(), static_cast<long>(op.stencil.size()) * disc.element(e).velocity_basis.size());

  Eigen::VectorXd u = random_vector(disc.dofs().n_velocity(), 1);
  const Eigen::MatrixXd before = disc.weak_gradient(u, e);
  for (int other = 0; other < disc.n_elements(); ++other) {
    if (std::find(op.stencil.begin(), op.stencil.end(), other) != op.stencil.end()) continue;
    u.segment(disc.dofs().velocity_offset(other), disc.dofs().velocity_block_size()).setRandom();
  }
  EXPECT_EQ((disc.weak_gradient(u, e) - before).norm(), 0.0);
}

TEST(WeakOperators, Linearity) {
  for (const auto& mesh : sample_meshes()) {
    const Discretization disc(mesh, 2);
    const int n = disc.dofs().n_velocity();
    const Eigen::VectorXd v1 = random_vector(n, 2), v2 = random_vector(n, 3);
    const double a = 0.37, b = -1.9;
    for (int e = 0; e < disc.n_elements(); e += 5) {
      const Eigen::MatrixXd g = disc.weak_gradient(a * v1 + b * v2, e);
      const Eigen::MatrixXd gl = a * disc.weak_gradient(v1, e) + b * disc.weak_gradient(v2, e);
      EXPECT_LT((g - gl).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, g.cwiseAbs().maxCoeff()));
      const Eigen::VectorXd d = disc.weak_divergence(a * v1 + b * v2, e);
      const Eigen::VectorXd dl = a * disc.weak_divergence(v1, e) + b * disc.weak_divergence(v2, e);
      EXPECT_LT((d - dl).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(WeakOperators, DivergenceIsTraceOfGradientProjection) {
  // For k-1 <= j, (div_w v, q) = (tr grad_w v, q) for q in P_{k-1}: both equal the same boundary form.
  const auto mesh = gen_polygonal(2);
  const Discretization disc(mesh, 2);
  const Eigen::VectorXd u = random_vector(disc.dofs().n_velocity(), 4);
  for (int e = 0; e < disc.n_elements(); ++e) {
    const ElementData& data = disc.element(e);
    const QuadratureRule rule = quad_element(mesh, e, disc.j(e) + 1);
    const Eigen::MatrixXd g = disc.weak_gradient(u, e);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(data.pressure_basis.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
      rhs += rule.weights[q] * disc.eval_tensor(g, e, rule.points[q]).trace() * data.pressure_basis.eval(rule.points[q]);
    const Eigen::VectorXd dv = disc.weak_divergence(u, e);
    EXPECT_LT((data.pressure_mass.entries() * dv - rhs).norm(), 1e-11 * std::max(1.0, rhs.norm()));
  }
}

TEST(WeakDivergence, GlobalCompatibility) {
  for (const auto& mesh : sample_meshes()) {
    const Discretization disc(mesh, 2);
    const Eigen::VectorXd u = random_vector(disc.dofs().n_velocity(), 5);
    double total = 0.0;
    for (int e = 0; e < disc.n_elements(); ++e)
      total += disc.element(e).pressure_mass.entries().col(0).dot(disc.weak_divergence(u, e));
    EXPECT_LT(std::abs(total), 1e-11);
  }
}

TEST(Identity, BubbleWithHighDegree) {
  const auto mesh = gen_uniform_triangular(3);
  const Discretization disc(mesh, 4);
  const VectorField phi = [](const Point& x) {
    Point r(2);
    r << x(0) * (1 - x(0)) * x(1) * (1 - x(1)), 0.0;
    return r;
  };
  const TensorField grad = [](const Point& x) {
    Tensor t = Tensor::Zero(2, 2);
    t(0, 0) = (1 - 2 * x(0)) * x(1) * (1 - x(1));
    t(0, 1) = x(0) * (1 - x(0)) * (1 - 2 * x(1));
    return t;
  };
  const IdentityDiscrepancy d = check_projection_identity(disc, phi, grad, 4);
  EXPECT_LE(d.gradient, 1e-10);
  EXPECT_LE(d.divergence, 1e-10);
}

TEST(Identity, ZeroField) {
  const auto mesh = gen_polygonal(2);
  const Discretization disc(mesh, 2);
  const IdentityDiscrepancy d = check_projection_identity(
      disc, [](const Point&) { return Point(Point::Zero(2)); }, [](const Point&) { return Tensor(Tensor::Zero(2, 2)); },
      0);
  EXPECT_EQ(d.gradient, 0.0);
  EXPECT_EQ(d.divergence, 0.0);
}

TEST(Identity, TetrahedralBubble) {
  const auto mesh = gen_uniform_tetrahedral(2);
  const Discretization disc(mesh, 2);
  auto b = [](const Point& x) { return x(0) * (1 - x(0)) * x(1) * (1 - x(1)) * x(2) * (1 - x(2)); };
  auto db = [&](const Point& x) {
    Point g(3);
    g << (1 - 2 * x(0)) * x(1) * (1 - x(1)) * x(2) * (1 - x(2)), x(0) * (1 - x(0)) * (1 - 2 * x(1)) * x(2) * (1 - x(2)),
        x(0) * (1 - x(0)) * x(1) * (1 - x(1)) * (1 - 2 * x(2));
    return g;
  };
  const VectorField phi = [&](const Point& x) {
    Point r(3);
    r << b(x), -b(x), 0.0;
    return r;
  };
  const TensorField grad = [&](const Point& x) {
    Tensor t = Tensor::Zero(3, 3);
    t.row(0) = db(x).transpose();
    t.row(1) = -db(x).transpose();
    return t;
  };
  const IdentityDiscrepancy d = check_projection_identity(disc, phi, grad, 6);
  EXPECT_LE(d.gradient, 1e-9);
  EXPECT_LE(d.divergence, 1e-9);
}

TEST(Identity, RejectsNonzeroTrace) {
  const auto mesh = gen_uniform_triangular(2);
  const Discretization disc(mesh, 1);
  EXPECT_THROW(check_projection_identity(
                   disc, [](const Point& x) { return Point(x); },
                   [](const Point&) { return Tensor(Tensor::Identity(2, 2)); }, 1),
               PreconditionError);
}

TEST(Projection, ReproducesGlobalPolynomials) {
  const auto mesh = gen_polygonal(2);
  const Discretization disc(mesh, 2);
  const VectorField u = [](const Point& x) {
    Point r(2);
    r << x(1) * x(1) - x(0), 3.0 * x(0) * x(1) + 1.0;
    return r;
  };
  const Eigen::VectorXd qu = project_velocity(disc, u, 2);
  const Eigen::VectorXd qp = project_pressure(disc, [](const Point& x) { return x(0) + x(1) - 1.0; }, 1);
  for (int e = 0; e < disc.n_elements(); ++e) {
    const Point& c = mesh.element(e).centroid;
    const Point x = 0.7 * c + 0.3 * mesh.vertex(mesh.element(e).vertices[0]);
    EXPECT_LT((disc.eval_velocity(qu, e, x) - u(x)).norm(), 1e-10);
    EXPECT_NEAR(disc.eval_pressure(qp, e, x), x(0) + x(1) - 1.0, 1e-10);
  }
}

TEST(Projection, TensorOfPolynomialGradient) {
  const auto mesh = gen_uniform_triangular(2);
  const Discretization disc(mesh, 1);
  const TensorField g = [](const Point& x) {
    Tensor t(2, 2);
    t << x(0), 1.0, x(1) * x(1), -x(0) * x(1);
    return t;
  };
  const auto coeffs = project_tensor(disc, g, 2);
  for (int e = 0; e < disc.n_elements(); ++e) {
    const Point& x = mesh.element(e).centroid;
    EXPECT_LT((disc.eval_tensor(coeffs[e], e, x) - g(x)).norm(), 1e-10);
  }
}

TEST(Lift, ZeroData) {
  const auto mesh = gen_uniform_triangular(3);
  const Discretization disc(mesh, 2);
  const BoundaryLift lift = lift_boundary_data(disc, [](const Point&) { return Point(Point::Zero(2)); });
  EXPECT_TRUE(lift.is_zero());
}

TEST(Lift, SupportedOnBoundaryElements) {
  const auto mesh = gen_uniform_triangular(5);
  const Discretization disc(mesh, 1);
  const ProblemData pd = builtin_problem("ex1");
  const BoundaryLift lift = lift_boundary_data(disc, pd.boundary);
  EXPECT_FALSE(lift.is_zero());
  ASSERT_EQ(static_cast<int>(lift.elements.size()), disc.n_elements());
  for (int e = 0; e < disc.n_elements(); ++e) {
    const ElementLift& l = lift.elements[e];
    if (touches_boundary(mesh, e)) {
      EXPECT_FALSE(l.empty());
      EXPECT_GT(l.grad.norm(), 0.0);
    } else {
      EXPECT_TRUE(l.empty() || (l.grad.isZero(0.0) && l.div.isZero(0.0)));
    }
  }
}

}  // namespace
