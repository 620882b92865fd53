#include "polystokes/error.hpp"
#include "polystokes/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

namespace polystokes {

namespace {

int cells_per_axis(int level) {
  if (level < 1) throw ConfigError("mesh level must be >= 1, got " + std::to_string(level));
  if (level > 12) throw CapabilityError("mesh level " + std::to_string(level) + " is too large");
  return 1 << (level - 1);
}

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point make_point(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

using LatticePoint = std::array<double, 2>;

// Sutherland-Hodgman clip against the half-plane {p : sign * (p[axis] - bound) >= 0}.
std::vector<LatticePoint> clip(const std::vector<LatticePoint>& poly, int axis, double bound, double sign) {
  std::vector<LatticePoint> out;
  const auto inside = [&](const LatticePoint& p) { return sign * (p[axis] - bound) >= 0.0; };
  const auto cross = [&](const LatticePoint& s, const LatticePoint& e) {
    const double t = (bound - s[axis]) / (e[axis] - s[axis]);
    return LatticePoint{s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])};
  };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const LatticePoint& s = poly[(i + poly.size() - 1) % poly.size()];
    const LatticePoint& e = poly[i];
    if (inside(e)) {
      if (!inside(s)) out.push_back(cross(s, e));
      out.push_back(e);
    } else if (inside(s)) {
      out.push_back(cross(s, e));
    }
  }
  return out;
}

}  // namespace

PolytopalMesh gen_uniform_triangular(int level) {
  const int n = cells_per_axis(level);
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) vertices.push_back(make_point(double(i) / n, double(j) / n));
  }
  const auto id = [n](int i, int j) { return j * (n + 1) + i; };

  std::vector<std::vector<int>> triangles;
  triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int bl = id(i, j), br = id(i + 1, j), tl = id(i, j + 1), tr = id(i + 1, j + 1);
      triangles.push_back({bl, br, tl});
      triangles.push_back({br, tr, tl});
    }
  }
  return PolytopalMesh::from_polygons(std::move(vertices), triangles);
}

PolytopalMesh gen_uniform_tetrahedral(int level) {
  const int n = cells_per_axis(level);
  const int np = n + 1;
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(np) * np * np);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      for (int i = 0; i <= n; ++i) vertices.push_back(make_point(double(i) / n, double(j) / n, double(k) / n));
    }
  }
  const auto id = [np](const std::array<int, 3>& c) { return (c[2] * np + c[1]) * np + c[0]; };

  std::map<std::array<int, 3>, int> face_ids;
  std::vector<std::vector<int>> faces;
  std::vector<std::vector<int>> elements;
  elements.reserve(static_cast<std::size_t>(6) * n * n * n);

  const auto face_of = [&](int a, int b, int c) {
    std::array<int, 3> key{a, b, c};
    std::sort(key.begin(), key.end());
    auto [it, inserted] = face_ids.try_emplace(key, static_cast<int>(faces.size()));
    if (inserted) faces.push_back({a, b, c});
    return it->second;
  };

  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        std::array<int, 3> axes{0, 1, 2};
        do {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> v{};
          v[0] = id(c);
          for (int s = 0; s < 3; ++s) {
            ++c[axes[s]];
            v[s + 1] = id(c);
          }
          elements.push_back({face_of(v[1], v[2], v[3]), face_of(v[0], v[2], v[3]), face_of(v[0], v[1], v[3]),
                              face_of(v[0], v[1], v[2])});
        } while (std::next_permutation(axes.begin(), axes.end()));
      }
    }
  }
  return PolytopalMesh::from_polyhedra(std::move(vertices), faces, elements);
}

PolytopalMesh gen_polygonal(int level) {
  if (level < 1) throw ConfigError("mesh level must be >= 1, got " + std::to_string(level));
  if (level > 11) throw CapabilityError("mesh level " + std::to_string(level) + " is too large");
  const int n = 1 << level;  // hexagon columns
  const int m = n;           // row spacing count; rows r = 0..m

  // Lattice units: x in steps of w/2 = 1/(2n), y in steps of dy/3 = 1/(3m).
  const double x_max = 2.0 * n;
  const double y_max = 3.0 * m;

  std::map<std::pair<long, long>, int> vertex_ids;
  std::vector<Point> vertices;
  std::vector<std::vector<int>> polygons;

  for (int r = 0; r <= m; ++r) {
    const double cy = 3.0 * r;
    const bool odd = (r % 2) == 1;
    const int count = odd ? n : n + 1;
    for (int i = 0; i < count; ++i) {
      const double cx = odd ? 2.0 * i + 1.0 : 2.0 * i;
      std::vector<LatticePoint> hex = {{cx, cy - 2}, {cx + 1, cy - 1}, {cx + 1, cy + 1},
                                       {cx, cy + 2}, {cx - 1, cy + 1}, {cx - 1, cy - 1}};
      hex = clip(hex, 0, 0.0, 1.0);
      hex = clip(hex, 0, x_max, -1.0);
      hex = clip(hex, 1, 0.0, 1.0);
      hex = clip(hex, 1, y_max, -1.0);

      std::vector<int> poly;
      for (const auto& p : hex) {
        const std::pair<long, long> key{std::lround(p[0]), std::lround(p[1])};
        auto [it, inserted] = vertex_ids.try_emplace(key, static_cast<int>(vertices.size()));
        if (inserted) vertices.push_back(make_point(key.first / (2.0 * n), key.second / (3.0 * m)));
        if (poly.empty() || poly.back() != it->second) poly.push_back(it->second);
      }
      while (poly.size() > 1 && poly.front() == poly.back()) poly.pop_back();
      if (poly.size() >= 3) polygons.push_back(std::move(poly));
    }
  }
  return PolytopalMesh::from_polygons(std::move(vertices), polygons);
}

}  // namespace polystokes
