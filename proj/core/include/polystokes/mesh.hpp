#pragma once

#include "polystokes/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace polystokes {

/// Flat edge (2D) or planar polygonal face (3D).
///
/// The unit normal points from owner1 toward owner2, or outward on the
/// boundary. owner1 < owner2 always, which fixes the sign of jumps.
struct Face {
  std::vector<int> vertices;
  int owner1 = -1;
  int owner2 = -1;  // -1 on the boundary
  Point normal;
  Point centroid;
  double measure = 0.0;   // length (2D) or area (3D)
  double diameter = 0.0;  // h_e

  bool is_boundary() const { return owner2 < 0; }
  /// The owner across this face from `element`, or -1 on the boundary.
  int neighbor_of(int element) const { return element == owner1 ? owner2 : owner1; }
};

struct Element {
  std::vector<int> faces;
  std::vector<int> vertices;  // counter-clockwise in 2D, sorted ids in 3D
  Point centroid;
  double measure = 0.0;   // signed area in 2D (negative if clockwise), volume in 3D
  double diameter = 0.0;  // h_T

  int n_faces() const { return static_cast<int>(faces.size()); }
};

/// Partition of a polygonal or polyhedral domain into star-shaped polytopes.
///
/// Immutable after construction. Derived geometry (normals, centroids,
/// measures, diameters) is always recomputed from vertices and topology.
class PolytopalMesh {
 public:
  /// 2D mesh from polygons given as counter-clockwise vertex loops. Faces
  /// (edges) are derived and numbered in order of first appearance.
  static PolytopalMesh from_polygons(std::vector<Point> vertices,
                                     const std::vector<std::vector<int>>& polygons);

  /// 3D mesh from explicit polygonal faces and elements listing face ids.
  static PolytopalMesh from_polyhedra(std::vector<Point> vertices,
                                      const std::vector<std::vector<int>>& faces,
                                      const std::vector<std::vector<int>>& elements);

  int dim() const { return dim_; }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_faces() const { return static_cast<int>(faces_.size()); }
  int n_elements() const { return static_cast<int>(elements_.size()); }

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<int>& boundary_face_ids() const { return boundary_faces_; }

  const Point& vertex(int id) const { return vertices_[id]; }
  const Face& face(int id) const { return faces_[id]; }
  const Element& element(int id) const { return elements_[id]; }

  /// +1 if the stored face normal is outward for `element`, -1 otherwise.
  double outward_sign(int element, int face) const {
    return faces_[face].owner1 == element ? 1.0 : -1.0;
  }
  Point outward_normal(int element, int face) const {
    return outward_sign(element, face) * faces_[face].normal;
  }

  /// Number of elements referencing each face, as listed in element face lists.
  const std::vector<int>& face_reference_counts() const { return face_refs_; }

  double max_element_diameter() const;
  double total_measure() const;

 private:
  PolytopalMesh() = default;
  void finish_2d();
  void finish_3d();

  int dim_ = 2;
  std::vector<Point> vertices_;
  std::vector<Face> faces_;
  std::vector<Element> elements_;
  std::vector<int> boundary_faces_;
  std::vector<int> face_refs_;
};

/// Unit square split into 2^(level-1) x 2^(level-1) cells, each cut by the
/// diagonal from its top-left to its bottom-right corner.
PolytopalMesh gen_uniform_triangular(int level);

/// Unit cube split into 2^(level-1)^3 subcubes, each cut into six tetrahedra
/// sharing the (0,0,0)-(1,1,1) diagonal (Kuhn subdivision).
PolytopalMesh gen_uniform_tetrahedral(int level);

/// Honeycomb partition of the unit square: hexagons in the interior, clipped
/// pentagons and quadrilaterals along the boundary. Uses 2^level hexagon
/// columns and 2^level + 1 rows, so h halves exactly per level.
PolytopalMesh gen_polygonal(int level);

/// Mesh text format (whitespace separated):
///   dim <2|3>
///   vertices <N>   followed by N lines of d coordinates
///   2D: elements <M>  followed by M lines `<n> v_0 ... v_{n-1}` (counter-clockwise)
///   3D: faces <F>     followed by F lines `<n> v_0 ... v_{n-1}`
///       elements <M>  followed by M lines `<n> f_0 ... f_{n-1}`
/// Throws ParseError with the offending line number.
PolytopalMesh load_mesh(std::string_view text);
std::string save_mesh(const PolytopalMesh& mesh);

PolytopalMesh load_mesh_file(const std::string& path);
void save_mesh_file(const PolytopalMesh& mesh, const std::string& path);

struct Violation {
  std::string entity;  // "element", "face" or "mesh"
  int id = -1;
  std::string check;

  std::string to_string() const;
};

/// Checks every mesh invariant; returns an empty list iff all hold.
///
/// An element with non-positive measure is reported once and excluded from
/// its remaining checks; mesh-wide checks run only when no element or face
/// check failed.
std::vector<Violation> validate_mesh(const PolytopalMesh& mesh);

}  // namespace polystokes
