#pragma once

#include "polystokes/mesh.hpp"
#include "polystokes/types.hpp"

#include <span>
#include <vector>

namespace polystokes {

/// Points and positive weights; integrates polynomials up to exact_degree exactly.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;

  std::size_t size() const { return weights.size(); }
  double total_weight() const;
  void append(const QuadratureRule& other);
};

/// Highest polynomial degree the simplex rules support.
inline constexpr int kMaxQuadratureDegree = 60;

/// Gauss-Legendre nodes and weights on [0, 1] with n points (exact to degree 2n - 1).
/// Tables are computed once and shared; n must be in [1, 64].
struct GaussLegendre {
  std::span<const double> nodes;
  std::span<const double> weights;
};
GaussLegendre gauss_legendre(int n);

/// Rules on straight simplices, built from Gauss-Legendre rules by the
/// collapsed-coordinate (Duffy) map. All weights are positive.
QuadratureRule segment_rule(const Point& a, const Point& b, int degree);
QuadratureRule triangle_rule(const Point& a, const Point& b, const Point& c, int degree);
QuadratureRule tetrahedron_rule(const Point& a, const Point& b, const Point& c, const Point& d, int degree);

/// Element rule exact to `degree`. Simplices use a direct rule; other
/// polytopes are fanned into simplices from the element centroid (and, in 3D,
/// from each face centroid). Throws CapabilityError above kMaxQuadratureDegree.
QuadratureRule quad_element(const PolytopalMesh& mesh, int element, int degree);

/// Face rule exact to `degree` in the face plane: Gauss rule on edges (2D),
/// fan-triangulated rule on polygonal faces (3D).
QuadratureRule quad_face(const PolytopalMesh& mesh, int face, int degree);

}  // namespace polystokes
