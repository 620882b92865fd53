#include "polystokes/error.hpp"
#include "polystokes/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace polystokes {

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next non-blank, non-comment line split into tokens. Throws at EOF.
  std::vector<std::string_view> next(const char* expecting) {
    while (pos_ <= text_.size()) {
      if (pos_ == text_.size()) break;
      const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      std::vector<std::string_view> tokens;
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) tokens.push_back(line.substr(i, j - i));
        i = j;
      }
      if (!tokens.empty()) return tokens;
    }
    throw ParseError(line_, std::string("unexpected end of input, expecting ") + expecting);
  }

  bool at_end() {
    std::size_t p = pos_;
    while (p < text_.size()) {
      const std::size_t end = std::min(text_.find('\n', p), text_.size());
      std::string_view line = text_.substr(p, end - p);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      for (char c : line) {
        if (!is_space(c)) return false;
      }
      p = end + 1;
    }
    return true;
  }

  int line() const { return line_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

long parse_int(std::string_view tok, int line, const char* what) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
  }
  return value;
}

double parse_real(std::string_view tok, int line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line, "expected real coordinate, got '" + std::string(tok) + "'");
  }
  return value;
}

long parse_section(LineReader& in, const char* keyword) {
  const auto tokens = in.next(keyword);
  if (tokens.size() != 2 || tokens[0] != keyword) {
    throw ParseError(in.line(), std::string("malformed header: expected '") + keyword + " <count>'");
  }
  const long n = parse_int(tokens[1], in.line(), "count");
  if (n < 0) throw ParseError(in.line(), std::string("malformed header: negative ") + keyword + " count");
  return n;
}

struct IdList {
  std::vector<int> ids;
  int line;
};

std::vector<IdList> parse_id_lists(LineReader& in, long count, long max_id, const char* what,
                                   const char* range_error) {
  std::vector<IdList> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    const auto tokens = in.next(what);
    const long n = parse_int(tokens[0], in.line(), "entry count");
    if (n < 1 || static_cast<std::size_t>(n) + 1 != tokens.size()) {
      throw ParseError(in.line(), std::string(what) + " line declares " + std::to_string(n) + " entries but has " +
                                      std::to_string(tokens.size() - 1));
    }
    IdList list{{}, in.line()};
    for (long k = 1; k <= n; ++k) {
      const long id = parse_int(tokens[k], in.line(), "id");
      if (id < 0 || id >= max_id) {
        throw ParseError(in.line(), std::string(range_error) + " (" + std::to_string(id) + " of " +
                                        std::to_string(max_id) + ")");
      }
      list.ids.push_back(static_cast<int>(id));
    }
    out.push_back(std::move(list));
  }
  return out;
}

}  // namespace

PolytopalMesh load_mesh(std::string_view text) {
  LineReader in(text);
  const auto header = in.next("dim header");
  if (header.size() != 2 || header[0] != "dim" || (header[1] != "2" && header[1] != "3")) {
    throw ParseError(in.line(), "malformed header: expected 'dim <2|3>'");
  }
  const int dim = header[1] == "2" ? 2 : 3;

  const long nv = parse_section(in, "vertices");
  std::vector<Point> vertices;
  vertices.reserve(static_cast<std::size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    const auto tokens = in.next("vertex coordinates");
    if (static_cast<int>(tokens.size()) != dim) {
      throw ParseError(in.line(), "vertex line must have " + std::to_string(dim) + " coordinates");
    }
    Point p(dim);
    for (int c = 0; c < dim; ++c) p(c) = parse_real(tokens[c], in.line());
    vertices.push_back(p);
  }

  PolytopalMesh mesh = [&] {
    if (dim == 2) {
      const long ne = parse_section(in, "elements");
      const auto elements = parse_id_lists(in, ne, nv, "element", "vertex id out of range");
      std::vector<std::vector<int>> polygons;
      for (const auto& e : elements) {
        if (e.ids.size() < 3) throw ParseError(e.line, "element needs at least 3 vertices");
        polygons.push_back(e.ids);
      }
      return PolytopalMesh::from_polygons(std::move(vertices), polygons);
    }
    const long nf = parse_section(in, "faces");
    const auto faces = parse_id_lists(in, nf, nv, "face", "vertex id out of range");
    const long ne = parse_section(in, "elements");
    const auto elements = parse_id_lists(in, ne, nf, "element", "face id out of range");
    std::vector<std::vector<int>> face_lists;
    std::vector<std::vector<int>> element_lists;
    for (const auto& f : faces) {
      if (f.ids.size() < 3) throw ParseError(f.line, "face needs at least 3 vertices");
      face_lists.push_back(f.ids);
    }
    for (const auto& e : elements) element_lists.push_back(e.ids);
    PolytopalMesh m = PolytopalMesh::from_polyhedra(std::move(vertices), face_lists, element_lists);
    for (int f = 0; f < m.n_faces(); ++f) {
      const Face& face = m.face(f);
      double dev = 0.0;
      for (int v : face.vertices) dev = std::max(dev, std::abs((m.vertex(v) - face.centroid).dot(face.normal)));
      if (dev > 1e-12 * face.diameter) throw ParseError(faces[f].line, "face not planar");
    }
    return m;
  }();

  if (!in.at_end()) throw ParseError(in.line() + 1, "trailing content after last section");
  return mesh;
}

std::string save_mesh(const PolytopalMesh& mesh) {
  std::string out;
  char buf[64];
  const auto append_list = [&](const std::vector<int>& ids) {
    out += std::to_string(ids.size());
    for (int id : ids) {
      out += ' ';
      out += std::to_string(id);
    }
    out += '\n';
  };

  out += "dim " + std::to_string(mesh.dim()) + "\n";
  out += "vertices " + std::to_string(mesh.n_vertices()) + "\n";
  for (const auto& v : mesh.vertices()) {
    for (int c = 0; c < mesh.dim(); ++c) {
      std::snprintf(buf, sizeof buf, c == 0 ? "%.17g" : " %.17g", v(c));
      out += buf;
    }
    out += '\n';
  }
  if (mesh.dim() == 3) {
    out += "faces " + std::to_string(mesh.n_faces()) + "\n";
    for (const auto& f : mesh.faces()) append_list(f.vertices);
    out += "elements " + std::to_string(mesh.n_elements()) + "\n";
    for (const auto& e : mesh.elements()) append_list(e.faces);
  } else {
    out += "elements " + std::to_string(mesh.n_elements()) + "\n";
    for (const auto& e : mesh.elements()) append_list(e.vertices);
  }
  return out;
}

PolytopalMesh load_mesh_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_mesh(ss.str());
}

void save_mesh_file(const PolytopalMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write mesh file '" + path + "'");
  out << save_mesh(mesh);
}

}  // namespace polystokes
