#include "polystokes/error.hpp"
#include "polystokes/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

using namespace polystokes;

namespace {

Point p2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

double total_measure(const PolytopalMesh& m) {
  double s = 0.0;
  for (const auto& e : m.elements()) s += e.measure;
  return s;
}

double shoelace(const PolytopalMesh& m, const Element& e) {
  double a = 0.0;
  for (std::size_t i = 0; i < e.vertices.size(); ++i) {
    const Point& p = m.vertex(e.vertices[i]);
    const Point& q = m.vertex(e.vertices[(i + 1) % e.vertices.size()]);
    a += p(0) * q(1) - q(0) * p(1);
  }
  return a / 2.0;
}

TEST(TriangularGenerator, Counts) {
  const auto m1 = gen_uniform_triangular(1);
  EXPECT_EQ(m1.n_elements(), 2);
  EXPECT_EQ(m1.n_vertices(), 4);
  EXPECT_EQ(m1.n_faces(), 5);

  const auto m3 = gen_uniform_triangular(3);
  EXPECT_EQ(m3.n_elements(), 2 * 4 * 4);
  EXPECT_EQ(m3.n_vertices(), 5 * 5);
}

TEST(TriangularGenerator, CongruentDiameters) {
  for (const auto& e : gen_uniform_triangular(2).elements()) EXPECT_NEAR(e.diameter, std::sqrt(2.0) / 2.0, 1e-15);
}

TEST(TriangularGenerator, DiagonalRunsFromTopLeftToBottomRight) {
  const auto m = gen_uniform_triangular(1);
  int diagonal = -1;
  for (int f = 0; f < m.n_faces(); ++f)
    if (!m.face(f).is_boundary()) diagonal = f;
  ASSERT_GE(diagonal, 0);
  const Face& d = m.face(diagonal);
  const Point& a = m.vertex(d.vertices[0]);
  const Point& b = m.vertex(d.vertices[1]);
  EXPECT_NEAR(a(0) + a(1), 1.0, 1e-15);
  EXPECT_NEAR(b(0) + b(1), 1.0, 1e-15);
}

TEST(TetrahedralGenerator, CountsAndVolume) {
  const auto m1 = gen_uniform_tetrahedral(1);
  EXPECT_EQ(m1.n_elements(), 6);
  EXPECT_NEAR(total_measure(m1), 1.0, 1e-14);
  for (const auto& e : m1.elements()) EXPECT_NEAR(e.measure, 1.0 / 6.0, 1e-15);
  EXPECT_EQ(gen_uniform_tetrahedral(2).n_elements(), 48);
}

TEST(TetrahedralGenerator, Level2IsValid) { EXPECT_TRUE(validate_mesh(gen_uniform_tetrahedral(2)).empty()); }

TEST(PolygonalGenerator, PartitionOfUnitSquare) {
  for (int level = 1; level <= 5; ++level) {
    const auto m = gen_polygonal(level);
    EXPECT_NEAR(total_measure(m), 1.0, 1e-10) << "level " << level;
    for (const auto& e : m.elements()) EXPECT_NEAR(e.measure, shoelace(m, e), 1e-14);
  }
}

TEST(PolygonalGenerator, InteriorElementsAreHexagons) {
  const auto m = gen_polygonal(2);
  int interior = 0;
  for (const auto& e : m.elements()) {
    bool touches = false;
    for (int f : e.faces) touches |= m.face(f).is_boundary();
    if (touches) continue;
    ++interior;
    EXPECT_EQ(e.n_faces(), 6);
  }
  EXPECT_GT(interior, 0);
}

TEST(Generators, DiameterHalvesPerLevel) {
  for (int level = 1; level < 5; ++level) {
    for (auto gen : {gen_uniform_triangular, gen_polygonal}) {
      const double r = gen(level).max_element_diameter() / gen(level + 1).max_element_diameter();
      EXPECT_GE(r, 1.9);
      EXPECT_LE(r, 2.1);
    }
  }
  for (int level = 1; level < 3; ++level) {
    const double r =
        gen_uniform_tetrahedral(level).max_element_diameter() / gen_uniform_tetrahedral(level + 1).max_element_diameter();
    EXPECT_NEAR(r, 2.0, 0.1);
  }
}

TEST(Generators, MeasureSumsAndValidity) {
  for (int level = 1; level <= 6; ++level) {
    EXPECT_NEAR(total_measure(gen_uniform_triangular(level)), 1.0, 1e-10);
    EXPECT_NEAR(total_measure(gen_polygonal(level)), 1.0, 1e-10);
  }
  for (int level = 1; level <= 4; ++level) EXPECT_NEAR(total_measure(gen_uniform_tetrahedral(level)), 1.0, 1e-10);
  EXPECT_TRUE(validate_mesh(gen_uniform_triangular(4)).empty());
  EXPECT_TRUE(validate_mesh(gen_polygonal(4)).empty());
}

TEST(Generators, Deterministic) {
  const auto a = gen_polygonal(3);
  const auto b = gen_polygonal(3);
  ASSERT_EQ(a.n_faces(), b.n_faces());
  for (int f = 0; f < a.n_faces(); ++f) {
    EXPECT_EQ(a.face(f).vertices, b.face(f).vertices);
    EXPECT_EQ(a.face(f).owner1, b.face(f).owner1);
    EXPECT_EQ(a.face(f).owner2, b.face(f).owner2);
    EXPECT_EQ(a.face(f).normal, b.face(f).normal);
  }
  EXPECT_EQ(save_mesh(gen_uniform_tetrahedral(2)), save_mesh(gen_uniform_tetrahedral(2)));
}

TEST(Generators, RejectBadLevels) {
  EXPECT_THROW(gen_uniform_triangular(0), ConfigError);
  EXPECT_THROW(gen_polygonal(-1), ConfigError);
}

TEST(Faces, OrientationConventions) {
  for (const auto& m : {gen_uniform_triangular(3), gen_polygonal(2), gen_uniform_tetrahedral(2)}) {
    for (int f = 0; f < m.n_faces(); ++f) {
      const Face& face = m.face(f);
      if (!face.is_boundary()) EXPECT_LT(face.owner1, face.owner2);
      // Normal points away from owner1's centroid.
      EXPECT_GT((face.centroid - m.element(face.owner1).centroid).dot(face.normal), 0.0);
      EXPECT_NEAR(face.normal.norm(), 1.0, 1e-14);
    }
  }
}

TEST(MeshIO, RoundTrip2D) {
  const auto m = gen_uniform_triangular(1);
  const std::string text = save_mesh(m);
  const auto r = load_mesh(text);
  ASSERT_EQ(r.n_vertices(), 4);
  ASSERT_EQ(r.n_elements(), 2);
  for (int v = 0; v < 4; ++v) EXPECT_EQ(r.vertex(v), m.vertex(v));
  for (int e = 0; e < 2; ++e) EXPECT_EQ(r.element(e).vertices, m.element(e).vertices);
  EXPECT_EQ(save_mesh(r), text);
}

TEST(MeshIO, RoundTrip3D) {
  const auto m = gen_uniform_tetrahedral(2);
  const auto r = load_mesh(save_mesh(m));
  EXPECT_EQ(r.n_faces(), m.n_faces());
  EXPECT_EQ(save_mesh(r), save_mesh(m));
}

TEST(MeshIO, VertexOutOfRange) {
  const std::string text =
      "dim 2\nvertices 4\n0 0\n1 0\n1 1\n0 1\nelements 2\n3 0 1 99\n3 0 2 3\n";
  try {
    load_mesh(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8);
    EXPECT_NE(std::string(e.what()).find("vertex id out of range"), std::string::npos);
  }
}

TEST(MeshIO, MalformedHeader) {
  try {
    load_mesh("dim 4\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_NE(std::string(e.what()).find("malformed header"), std::string::npos);
  }
}

TEST(MeshIO, BentQuadFace) {
  // Unit cube with the (1,1,1) corner lifted, so three quad faces bend.
  const std::string text =
      "dim 3\nvertices 8\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1.2\n0 1 1\n"
      "faces 6\n4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n"
      "elements 1\n6 0 1 2 3 4 5\n";
  try {
    load_mesh(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 13);
    EXPECT_NE(std::string(e.what()).find("face not planar"), std::string::npos);
  }
}

TEST(Validate, FaceOwnedByThreeElements) {
  const auto m = PolytopalMesh::from_polygons({p2(0, 0), p2(1, 0), p2(0.5, 1), p2(0.5, -1), p2(0.5, 2)},
                                              {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
  const auto v = validate_mesh(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "face");
  EXPECT_NE(v[0].check.find("owned by 3"), std::string::npos);
}

TEST(Validate, InvertedElement) {
  const auto m = PolytopalMesh::from_polygons({p2(0, 0), p2(1, 0), p2(1, 1), p2(0, 1)}, {{0, 1, 3}, {1, 3, 2}});
  const auto v = validate_mesh(m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "element");
  EXPECT_EQ(v[0].id, 1);
}

TEST(Validate, ViolationText) {
  const Violation v{"face", 3, "face not planar"};
  EXPECT_NE(v.to_string().find("face 3"), std::string::npos);
}

}  // namespace
