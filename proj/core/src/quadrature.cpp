#include "polystokes/quadrature.hpp"

#include "polystokes/error.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace polystokes {

namespace {

constexpr int kMaxGaussPoints = 64;

struct GaussTable {
  std::array<std::vector<double>, kMaxGaussPoints + 1> nodes;
  std::array<std::vector<double>, kMaxGaussPoints + 1> weights;

  GaussTable() {
    for (int n = 1; n <= kMaxGaussPoints; ++n) {
      nodes[n].resize(n);
      weights[n].resize(n);
      for (int i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0;
          double p1 = x;
          for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
          }
          const double pn = n == 1 ? x : p1;
          const double pnm1 = n == 1 ? 1.0 : p0;
          dp = n * (x * pn - pnm1) / (x * x - 1.0);
          const double dx = pn / dp;
          x -= dx;
          if (std::abs(dx) < 1e-16) break;
        }
        // Map [-1, 1] -> [0, 1]; store in increasing order.
        nodes[n][n - 1 - i] = 0.5 * (x + 1.0);
        weights[n][n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
      }
    }
  }
};

const GaussTable& gauss_table() {
  static const GaussTable table;
  return table;
}

int points_for(int degree) { return degree / 2 + 1; }

void check_degree(int degree) {
  if (degree < 0) throw CapabilityError("negative quadrature degree " + std::to_string(degree));
  if (degree > kMaxQuadratureDegree) {
    throw CapabilityError("quadrature degree " + std::to_string(degree) + " exceeds supported maximum " +
                          std::to_string(kMaxQuadratureDegree));
  }
}

}  // namespace

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1 || n > kMaxGaussPoints) {
    throw CapabilityError("Gauss-Legendre rule with " + std::to_string(n) + " points is not available");
  }
  const auto& t = gauss_table();
  return {t.nodes[n], t.weights[n]};
}

QuadratureRule segment_rule(const Point& a, const Point& b, int degree) {
  check_degree(degree);
  const auto g = gauss_legendre(points_for(degree));
  const double len = (b - a).norm();
  QuadratureRule rule;
  rule.exact_degree = degree;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    rule.points.push_back(a + g.nodes[i] * (b - a));
    rule.weights.push_back(len * g.weights[i]);
  }
  return rule;
}

QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree) {
  check_degree(degree);
  // (s, t) = (u, (1 - u) v); Jacobian (1 - u) raises the u-degree by one.
  const auto gu = gauss_legendre(points_for(degree + 1));
  const auto gv = gauss_legendre(points_for(degree));
  const Point e1 = b - a;
  const Point e2 = c - a;
  double twice_area = 0.0;
  if (a.size() == 2) {
    twice_area = std::abs(e1(0) * e2(1) - e1(1) * e2(0));
  } else {
    twice_area = Eigen::Vector3d(e1).cross(Eigen::Vector3d(e2)).norm();
  }
  QuadratureRule rule;
  rule.exact_degree = degree;
  rule.points.reserve(gu.nodes.size() * gv.nodes.size());
  rule.weights.reserve(gu.nodes.size() * gv.nodes.size());
  for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
    const double u = gu.nodes[i];
    for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
      const double s = u;
      const double t = (1.0 - u) * gv.nodes[j];
      rule.points.push_back(a + s * e1 + t * e2);
      rule.weights.push_back(twice_area * (1.0 - u) * gu.weights[i] * gv.weights[j]);
    }
  }
  return rule;
}

QuadratureRule tetrahedron_rule(const Point& a, const Point& b, const Point& c, const Point& d, int degree) {
  check_degree(degree);
  // (s, t, r) = (u, (1-u) v, (1-u)(1-v) w); Jacobian (1-u)^2 (1-v).
  const auto gu = gauss_legendre(points_for(degree + 2));
  const auto gv = gauss_legendre(points_for(degree + 1));
  const auto gw = gauss_legendre(points_for(degree));
  const Eigen::Vector3d e1 = b - a;
  const Eigen::Vector3d e2 = c - a;
  const Eigen::Vector3d e3 = d - a;
  const double six_volume = std::abs(e1.dot(e2.cross(e3)));
  QuadratureRule rule;
  rule.exact_degree = degree;
  const std::size_t total = gu.nodes.size() * gv.nodes.size() * gw.nodes.size();
  rule.points.reserve(total);
  rule.weights.reserve(total);
  for (std::size_t i = 0; i < gu.nodes.size(); ++i) {
    const double u = gu.nodes[i];
    for (std::size_t j = 0; j < gv.nodes.size(); ++j) {
      const double v = gv.nodes[j];
      for (std::size_t k = 0; k < gw.nodes.size(); ++k) {
        const double s = u;
        const double t = (1.0 - u) * v;
        const double r = (1.0 - u) * (1.0 - v) * gw.nodes[k];
        rule.points.push_back(a + s * Point(e1) + t * Point(e2) + r * Point(e3));
        rule.weights.push_back(six_volume * (1.0 - u) * (1.0 - u) * (1.0 - v) * gu.weights[i] * gv.weights[j] *
                               gw.weights[k]);
      }
    }
  }
  return rule;
}

QuadratureRule quad_element(const PolytopalMesh& mesh, int element, int degree) {
  check_degree(degree);
  const Element& elem = mesh.element(element);
  QuadratureRule rule;
  rule.exact_degree = degree;

  if (mesh.dim() == 2) {
    const auto& v = elem.vertices;
    if (v.size() == 3) return triangle_rule(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]), degree);
    for (std::size_t i = 0; i < v.size(); ++i) {
      rule.append(triangle_rule(elem.centroid, mesh.vertex(v[i]), mesh.vertex(v[(i + 1) % v.size()]), degree));
    }
    return rule;
  }

  if (elem.vertices.size() == 4 && elem.n_faces() == 4) {
    const auto& v = elem.vertices;
    return tetrahedron_rule(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]), mesh.vertex(v[3]), degree);
  }
  for (int fid : elem.faces) {
    const Face& f = mesh.face(fid);
    const auto& v = f.vertices;
    if (v.size() == 3) {
      rule.append(tetrahedron_rule(elem.centroid, mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]), degree));
      continue;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      rule.append(tetrahedron_rule(elem.centroid, f.centroid, mesh.vertex(v[i]), mesh.vertex(v[(i + 1) % v.size()]),
                                   degree));
    }
  }
  return rule;
}

QuadratureRule quad_face(const PolytopalMesh& mesh, int face, int degree) {
  check_degree(degree);
  const Face& f = mesh.face(face);
  const auto& v = f.vertices;
  if (mesh.dim() == 2) return segment_rule(mesh.vertex(v[0]), mesh.vertex(v[1]), degree);
  if (v.size() == 3) return triangle_rule(mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]), degree);
  QuadratureRule rule;
  rule.exact_degree = degree;
  for (std::size_t i = 0; i < v.size(); ++i) {
    rule.append(triangle_rule(f.centroid, mesh.vertex(v[i]), mesh.vertex(v[(i + 1) % v.size()]), degree));
  }
  return rule;
}

}  // namespace polystokes
