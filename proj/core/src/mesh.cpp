#include "polystokes/mesh.hpp"

#include "polystokes/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <unordered_map>

namespace polystokes {

namespace {

double max_pairwise_distance(const std::vector<Point>& vertices, const std::vector<int>& ids) {
  double d = 0.0;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      d = std::max(d, (vertices[ids[a]] - vertices[ids[b]]).norm());
    }
  }
  return d;
}

Point vertex_mean(const std::vector<Point>& vertices, const std::vector<int>& ids) {
  Point m = Point::Zero(vertices[ids.front()].size());
  for (int id : ids) m += vertices[id];
  return m / static_cast<double>(ids.size());
}

void check_vertex_ids(const std::vector<int>& ids, int n_vertices, const char* what, int index) {
  for (int v : ids) {
    if (v < 0 || v >= n_vertices) {
      throw MeshError(std::string(what) + " " + std::to_string(index) + ": vertex id out of range (" +
                      std::to_string(v) + " of " + std::to_string(n_vertices) + ")");
    }
  }
}

void check_dimension(const std::vector<Point>& vertices, int dim) {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].size() != dim) {
      throw MeshError("vertex " + std::to_string(i) + " has " + std::to_string(vertices[i].size()) +
                      " coordinates, expected " + std::to_string(dim));
    }
  }
}

}  // namespace

PolytopalMesh PolytopalMesh::from_polygons(std::vector<Point> vertices,
                                           const std::vector<std::vector<int>>& polygons) {
  PolytopalMesh mesh;
  mesh.dim_ = 2;
  check_dimension(vertices, 2);
  mesh.vertices_ = std::move(vertices);
  const int nv = mesh.n_vertices();

  std::unordered_map<std::int64_t, int> edge_ids;
  mesh.elements_.reserve(polygons.size());
  for (std::size_t e = 0; e < polygons.size(); ++e) {
    const auto& poly = polygons[e];
    if (poly.size() < 3) {
      throw MeshError("element " + std::to_string(e) + " has fewer than 3 vertices");
    }
    check_vertex_ids(poly, nv, "element", static_cast<int>(e));

    Element elem;
    elem.vertices = poly;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const int a = poly[i];
      const int b = poly[(i + 1) % poly.size()];
      const std::int64_t key = static_cast<std::int64_t>(std::min(a, b)) * nv + std::max(a, b);
      auto [it, inserted] = edge_ids.try_emplace(key, mesh.n_faces());
      if (inserted) {
        Face f;
        f.vertices = {a, b};
        f.owner1 = static_cast<int>(e);
        mesh.faces_.push_back(std::move(f));
        mesh.face_refs_.push_back(0);
      } else {
        Face& f = mesh.faces_[it->second];
        if (f.owner2 < 0 && f.owner1 != static_cast<int>(e)) f.owner2 = static_cast<int>(e);
      }
      ++mesh.face_refs_[it->second];
      elem.faces.push_back(it->second);
    }
    mesh.elements_.push_back(std::move(elem));
  }
  mesh.finish_2d();
  return mesh;
}

void PolytopalMesh::finish_2d() {
  for (auto& f : faces_) {
    const Point& a = vertices_[f.vertices[0]];
    const Point& b = vertices_[f.vertices[1]];
    const Point t = b - a;
    f.measure = t.norm();
    f.diameter = f.measure;
    f.centroid = 0.5 * (a + b);
    f.normal = Point(2);
    // Owner1 traverses a -> b counter-clockwise, so (t_y, -t_x) points out of it.
    f.normal << t(1), -t(0);
    if (f.measure > 0.0) f.normal /= f.measure;
  }

  for (auto& elem : elements_) {
    const auto& ids = elem.vertices;
    const std::size_t n = ids.size();
    double area2 = 0.0;
    Point c = Point::Zero(2);
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = vertices_[ids[i]];
      const Point& q = vertices_[ids[(i + 1) % n]];
      const double cross = p(0) * q(1) - q(0) * p(1);
      area2 += cross;
      c += cross * (p + q);
    }
    elem.measure = 0.5 * area2;
    elem.centroid = std::abs(area2) > 0.0 ? Point(c / (3.0 * area2)) : vertex_mean(vertices_, ids);
    elem.diameter = max_pairwise_distance(vertices_, ids);
  }

  boundary_faces_.clear();
  for (int f = 0; f < n_faces(); ++f) {
    if (faces_[f].is_boundary()) boundary_faces_.push_back(f);
  }
}

PolytopalMesh PolytopalMesh::from_polyhedra(std::vector<Point> vertices,
                                            const std::vector<std::vector<int>>& faces,
                                            const std::vector<std::vector<int>>& elements) {
  PolytopalMesh mesh;
  mesh.dim_ = 3;
  check_dimension(vertices, 3);
  mesh.vertices_ = std::move(vertices);
  const int nv = mesh.n_vertices();

  mesh.faces_.resize(faces.size());
  mesh.face_refs_.assign(faces.size(), 0);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (faces[f].size() < 3) {
      throw MeshError("face " + std::to_string(f) + " has fewer than 3 vertices");
    }
    check_vertex_ids(faces[f], nv, "face", static_cast<int>(f));
    mesh.faces_[f].vertices = faces[f];
  }

  const int nf = mesh.n_faces();
  mesh.elements_.reserve(elements.size());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    Element elem;
    for (int f : elements[e]) {
      if (f < 0 || f >= nf) {
        throw MeshError("element " + std::to_string(e) + ": face id out of range (" + std::to_string(f) +
                        " of " + std::to_string(nf) + ")");
      }
      Face& face = mesh.faces_[f];
      if (face.owner1 < 0) {
        face.owner1 = static_cast<int>(e);
      } else if (face.owner2 < 0 && face.owner1 != static_cast<int>(e)) {
        face.owner2 = static_cast<int>(e);
      }
      ++mesh.face_refs_[f];
      elem.faces.push_back(f);
      elem.vertices.insert(elem.vertices.end(), face.vertices.begin(), face.vertices.end());
    }
    std::sort(elem.vertices.begin(), elem.vertices.end());
    elem.vertices.erase(std::unique(elem.vertices.begin(), elem.vertices.end()), elem.vertices.end());
    mesh.elements_.push_back(std::move(elem));
  }
  mesh.finish_3d();
  return mesh;
}

void PolytopalMesh::finish_3d() {
  std::vector<Point> reference(elements_.size());
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    reference[e] = elements_[e].vertices.empty() ? Point(Point::Zero(3))
                                                 : vertex_mean(vertices_, elements_[e].vertices);
  }

  for (auto& f : faces_) {
    const auto& ids = f.vertices;
    const std::size_t n = ids.size();
    // Newell's method: robust normal for planar (and nearly planar) polygons.
    Eigen::Vector3d newell = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& p = vertices_[ids[i]];
      const Point& q = vertices_[ids[(i + 1) % n]];
      newell(0) += (p(1) - q(1)) * (p(2) + q(2));
      newell(1) += (p(2) - q(2)) * (p(0) + q(0));
      newell(2) += (p(0) - q(0)) * (p(1) + q(1));
    }
    const double len = newell.norm();
    f.measure = 0.5 * len;
    f.normal = len > 0.0 ? Point(newell / len) : Point(newell);
    f.diameter = max_pairwise_distance(vertices_, ids);

    const Point m = vertex_mean(vertices_, ids);
    Point c = Point::Zero(3);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector3d u = vertices_[ids[i]] - m;
      const Eigen::Vector3d w = vertices_[ids[(i + 1) % n]] - m;
      const double a = 0.5 * u.cross(w).norm();
      c += a * (m + vertices_[ids[i]] + vertices_[ids[(i + 1) % n]]) / 3.0;
      total += a;
    }
    f.centroid = total > 0.0 ? Point(c / total) : m;

    if (f.owner1 >= 0 && (f.centroid - reference[f.owner1]).dot(f.normal) < 0.0) {
      f.normal = -f.normal;
    }
  }

  for (std::size_t e = 0; e < elements_.size(); ++e) {
    Element& elem = elements_[e];
    const Point& c0 = reference[e];
    double volume = 0.0;
    Point c = Point::Zero(3);
    for (int fid : elem.faces) {
      const Face& f = faces_[fid];
      const Point n_out = outward_normal(static_cast<int>(e), fid);
      const std::size_t n = f.vertices.size();
      for (std::size_t i = 0; i < n; ++i) {
        const Point& p = vertices_[f.vertices[i]];
        const Point& q = vertices_[f.vertices[(i + 1) % n]];
        const double tri_area = 0.5 * Eigen::Vector3d(p - f.centroid).cross(Eigen::Vector3d(q - f.centroid)).norm();
        const double v = tri_area * (f.centroid - c0).dot(n_out) / 3.0;
        volume += v;
        c += v * (c0 + f.centroid + p + q) / 4.0;
      }
    }
    elem.measure = volume;
    elem.centroid = volume != 0.0 ? Point(c / volume) : c0;
    elem.diameter = max_pairwise_distance(vertices_, elem.vertices);
  }

  boundary_faces_.clear();
  for (int f = 0; f < n_faces(); ++f) {
    if (faces_[f].is_boundary() && face_refs_[f] > 0) boundary_faces_.push_back(f);
  }
}

double PolytopalMesh::max_element_diameter() const {
  double h = 0.0;
  for (const auto& e : elements_) h = std::max(h, e.diameter);
  return h;
}

double PolytopalMesh::total_measure() const {
  double m = 0.0;
  for (const auto& e : elements_) m += e.measure;
  return m;
}

std::string Violation::to_string() const {
  std::ostringstream os;
  os << entity;
  if (id >= 0) os << ' ' << id;
  os << ": " << check;
  return os.str();
}

std::vector<Violation> validate_mesh(const PolytopalMesh& mesh) {
  std::vector<Violation> out;
  const int d = mesh.dim();

  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (!mesh.vertex(v).allFinite()) out.push_back({"vertex", v, "non-finite coordinates"});
  }

  const auto& refs = mesh.face_reference_counts();
  std::vector<char> bad_owner(mesh.n_faces(), 0);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (refs[f] == 0) {
      out.push_back({"face", f, "not referenced by any element"});
      continue;
    }
    if (refs[f] > 2) {
      bad_owner[f] = 1;
      out.push_back({"face", f, "owned by " + std::to_string(refs[f]) + " elements (at most 2 allowed)"});
      continue;
    }
    if (refs[f] == 2 && face.owner2 < 0) {
      bad_owner[f] = 1;
      out.push_back({"face", f, "referenced twice by the same element"});
      continue;
    }
    if (!face.is_boundary() && !(face.owner1 < face.owner2)) {
      out.push_back({"face", f, "owner ordering violates T1 < T2"});
    }
    if (!(face.diameter > 0.0)) {
      out.push_back({"face", f, "degenerate (zero diameter)"});
      continue;
    }
    if (std::abs(face.normal.norm() - 1.0) > 1e-14) {
      out.push_back({"face", f, "normal is not unit length"});
    }
    if (d == 3) {
      double dev = 0.0;
      for (int v : face.vertices) dev = std::max(dev, std::abs((mesh.vertex(v) - face.centroid).dot(face.normal)));
      if (dev > 1e-12 * face.diameter) out.push_back({"face", f, "face not planar"});
    }
  }

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& elem = mesh.element(e);
    if (!(elem.measure > 0.0)) {
      out.push_back({"element", e, "non-positive measure (inverted or degenerate)"});
      continue;
    }
    if (!(elem.diameter > 0.0)) out.push_back({"element", e, "non-positive diameter"});
    if (elem.n_faces() < d + 1) {
      out.push_back({"element", e, "fewer than " + std::to_string(d + 1) + " faces"});
    }
    // Outward normals are undefined across a face whose ownership is already reported.
    if (std::any_of(elem.faces.begin(), elem.faces.end(), [&](int fid) { return bad_owner[fid] != 0; })) continue;
    Point closure = Point::Zero(d);
    double scale = 0.0;
    bool inside = true;
    for (int fid : elem.faces) {
      const Face& face = mesh.face(fid);
      const Point n_out = mesh.outward_normal(e, fid);
      closure += face.measure * n_out;
      scale += face.measure;
      if ((elem.centroid - face.centroid).dot(n_out) >= -1e-12 * elem.diameter) inside = false;
    }
    if (closure.norm() > 1e-12 * std::max(1.0, scale)) {
      out.push_back({"element", e, "face normals do not close (sum of area-weighted normals is nonzero)"});
    }
    if (!inside) out.push_back({"element", e, "centroid not strictly inside (element not star-shaped about it)"});
  }

  if (out.empty()) {
    // Domain measure from the boundary by the divergence theorem: |Omega| = (1/d) sum_e |e| (x_e . n_e).
    double domain = 0.0;
    for (int f : mesh.boundary_face_ids()) {
      const Face& face = mesh.face(f);
      domain += face.measure * face.centroid.dot(face.normal);
    }
    domain /= d;
    const double total = mesh.total_measure();
    if (std::abs(total - domain) > 1e-10 * std::max(1.0, domain)) {
      std::ostringstream os;
      os.precision(17);
      os << "element measures sum to " << total << " but the boundary encloses " << domain;
      out.push_back({"mesh", -1, os.str()});
    }
  }
  return out;
}

}  // namespace polystokes
