#include "polystokes/study.hpp"

#include "polystokes/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

namespace polystokes {

namespace {

constexpr std::string_view kCsvHeader =
    "level,h,ndof_u,ndof_p,err_u_l2,rate_u_l2,err_u_energy,rate_u_energy,err_p_l2,rate_p_l2";

std::string format_error(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string format_h(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(line, "invalid number '" + std::string(s) + "'");
  return v;
}

// Product of a boundary bubble and a random polynomial: vanishes on the boundary of the unit box.
class RandomBubbleField {
 public:
  RandomBubbleField(int dim, int degree, std::mt19937_64& rng) : dim_(dim) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int c = 0; c < dim; ++c) {
      for (int m = 0; m <= degree; ++m) {
        for (int a = m; a >= 0; --a) {
          if (dim == 2) {
            terms_[c].push_back({{a, m - a, 0}, coef(rng)});
          } else {
            for (int b = m - a; b >= 0; --b) terms_[c].push_back({{a, b, m - a - b}, coef(rng)});
          }
        }
      }
    }
  }

  Point value(const Point& x) const {
    Point out(dim_);
    const double b = bubble(x);
    for (int c = 0; c < dim_; ++c) out(c) = b * poly(c, x, -1);
    return out;
  }

  Tensor gradient(const Point& x) const {
    Tensor g(dim_, dim_);
    const double b = bubble(x);
    for (int i = 0; i < dim_; ++i) {
      const double p = poly(i, x, -1);
      for (int c = 0; c < dim_; ++c) g(i, c) = bubble_derivative(x, c) * p + b * poly(i, x, c);
    }
    return g;
  }

 private:
  struct Term {
    std::array<int, 3> exp;
    double coef;
  };

  double bubble(const Point& x) const {
    double b = 1.0;
    for (int c = 0; c < dim_; ++c) b *= x(c) * (1.0 - x(c));
    return b;
  }

  double bubble_derivative(const Point& x, int dir) const {
    double b = 1.0;
    for (int c = 0; c < dim_; ++c) b *= c == dir ? 1.0 - 2.0 * x(c) : x(c) * (1.0 - x(c));
    return b;
  }

  // Component `comp` of the polynomial factor, or its derivative along `dir` when dir >= 0.
  double poly(int comp, const Point& x, int dir) const {
    double s = 0.0;
    for (const auto& t : terms_[comp]) {
      double v = t.coef;
      for (int c = 0; c < dim_; ++c) {
        int e = t.exp[c];
        if (c == dir) {
          if (e == 0) {
            v = 0.0;
            break;
          }
          v *= e;
          --e;
        }
        v *= std::pow(x(c), e);
      }
      s += v;
    }
    return s;
  }

  int dim_;
  std::array<std::vector<Term>, 3> terms_;
};

}  // namespace

TableFormat parse_format(std::string_view name) {
  if (name == "csv") return TableFormat::csv;
  if (name == "markdown" || name == "md") return TableFormat::markdown;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or markdown)");
}

std::pair<int, int> parse_level_range(std::string_view text) {
  const auto pos = text.find("..");
  if (pos == std::string_view::npos) {
    const int l = parse_int(text, "levels");
    return {l, l};
  }
  return {parse_int(text.substr(0, pos), "levels"), parse_int(text.substr(pos + 2), "levels")};
}

void StudyConfig::validate() const {
  if (problem.empty()) throw ConfigError("missing required key 'problem'");
  builtin_problem(problem);
  if (k < 1) throw ConfigError("key 'k' must be >= 1, got " + std::to_string(k));
  if (j && *j < k) throw ConfigError("key 'j' must be >= k, got j=" + std::to_string(*j));
  if (!(tolerance > 0.0)) throw ConfigError("key 'tol' must be positive");
  if (family == "file") {
    if (mesh_files.empty()) throw ConfigError("family 'file' needs at least one 'mesh-file'");
    return;
  }
  if (family != "triangular" && family != "tetrahedral" && family != "polygonal") {
    throw ConfigError("unknown family '" + family + "' (expected triangular, tetrahedral, polygonal or file)");
  }
  if (level_from < 1 || level_to < level_from) {
    throw ConfigError("key 'levels' must be a nonempty ascending range of levels >= 1");
  }
}

PolytopalMesh make_mesh(std::string_view family, int level) {
  if (family == "triangular") return gen_uniform_triangular(level);
  if (family == "tetrahedral") return gen_uniform_tetrahedral(level);
  if (family == "polygonal") return gen_polygonal(level);
  throw ConfigError("unknown family '" + std::string(family) + "'");
}

StudyOutcome run_study(const StudyConfig& config, std::ostream* log) {
  StudyOutcome outcome;
  outcome.report.problem = config.problem;
  outcome.report.family = config.family;
  outcome.report.k = config.k;
  outcome.report.explicit_j = config.j;
  try {
    config.validate();
    const ProblemData problem = builtin_problem(config.problem);
    const bool from_files = config.family == "file";
    const int count = from_files ? static_cast<int>(config.mesh_files.size()) : config.level_to - config.level_from + 1;
    for (int i = 0; i < count; ++i) {
      const int level = config.level_from + i;
      const auto t0 = std::chrono::steady_clock::now();
      const PolytopalMesh mesh = from_files ? load_mesh_file(config.mesh_files[i]) : make_mesh(config.family, level);
      if (mesh.dim() != problem.dim) {
        throw ConfigError("problem '" + problem.name + "' needs a " + std::to_string(problem.dim) + "D mesh");
      }
      const Discretization disc(mesh, config.k, JPolicy{config.j});
      const SaddleSystem sys = assemble(disc, problem);
      const SolveResult sol = solve(sys, SolverConfig{config.tolerance});
      outcome.report.levels.push_back(compute_errors(disc, problem, sol, level));
      if (log) {
        const LevelErrors& le = outcome.report.levels.back();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        *log << "level " << level << ": " << mesh.n_elements() << " elements, " << sys.dofs.n_velocity() << "+"
             << sys.dofs.n_pressure() << " unknowns, residual " << sol.relative_residual << ", " << secs << " s\n"
             << "  |grad u - grad_w u_h| " << le.err_u_grad << ", |Q_h p - p_h| " << le.err_p_proj << '\n';
      }
    }
  } catch (const SolverError& e) {
    outcome.exit_code = 2;
    outcome.message = std::string("solver failure: ") + e.what();
  } catch (const ConfigError& e) {
    outcome.exit_code = 3;
    outcome.message = std::string("configuration error: ") + e.what();
  } catch (const ParseError& e) {
    outcome.exit_code = 3;
    outcome.message = std::string("mesh file: ") + e.what();
  } catch (const CapabilityError& e) {
    outcome.exit_code = 3;
    outcome.message = std::string("unsupported configuration: ") + e.what();
  }
  return outcome;
}

std::string emit_table(const ErrorReport& report, TableFormat format) {
  const auto ru = report.rates(&LevelErrors::err_u_l2);
  const auto re = report.rates(&LevelErrors::err_u_energy);
  const auto rp = report.rates(&LevelErrors::err_p_l2);
  const bool md = format == TableFormat::markdown;
  const std::string empty = md ? "—" : "";
  auto rate = [&](const std::vector<double>& r, std::size_t i) { return i == 0 ? empty : format_rate(r[i - 1]); };

  std::ostringstream os;
  if (md) {
    os << "**" << report.problem << ", " << report.family << ", k=" << report.k << ", j="
       << (report.explicit_j ? std::to_string(*report.explicit_j) : std::string("auto")) << "**\n\n";
    os << "| level | h | ndof_u | ndof_p | ‖u−u_h‖ | rate | \\|\\|\\|Q_h u−u_h\\|\\|\\| | rate | "
          "‖p−p_h‖ | rate |\n";
    os << "|---|---|---|---|---|---|---|---|---|---|\n";
  } else {
    os << kCsvHeader << '\n';
  }
  for (std::size_t i = 0; i < report.levels.size(); ++i) {
    const LevelErrors& l = report.levels[i];
    const std::vector<std::string> cells = {std::to_string(l.level),   format_h(l.h),
                                            std::to_string(l.ndof_u),  std::to_string(l.ndof_p),
                                            format_error(l.err_u_l2),  rate(ru, i),
                                            format_error(l.err_u_energy), rate(re, i),
                                            format_error(l.err_p_l2),  rate(rp, i)};
    if (md) os << "| ";
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0) os << (md ? " | " : ",");
      os << cells[c];
    }
    if (md) os << " |";
    os << '\n';
  }
  return os.str();
}

ErrorReport parse_csv(std::string_view text) {
  ErrorReport report;
  int line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError(line_no, "unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 10) throw ParseError(line_no, "expected 10 columns, got " + std::to_string(cells.size()));
    LevelErrors l;
    l.level = static_cast<int>(parse_double(cells[0], line_no));
    l.h = parse_double(cells[1], line_no);
    l.ndof_u = static_cast<long>(parse_double(cells[2], line_no));
    l.ndof_p = static_cast<long>(parse_double(cells[3], line_no));
    l.err_u_l2 = parse_double(cells[4], line_no);
    l.err_u_energy = parse_double(cells[6], line_no);
    l.err_p_l2 = parse_double(cells[8], line_no);
    report.levels.push_back(l);
  }
  if (!header_seen) throw ParseError(line_no, "empty CSV");
  return report;
}

bool CheckResult::passed() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
}

CheckResult check_lemma(std::string_view family, int k, int level, std::optional<int> j, int samples,
                        std::uint64_t seed, double threshold) {
  const PolytopalMesh mesh = make_mesh(family, level);
  const Discretization disc(mesh, k, JPolicy{j});
  const int d = mesh.dim();
  const int degree = std::max(k, 1);
  std::mt19937_64 rng(seed);
  double grad = 0.0;
  double div = 0.0;
  for (int s = 0; s < samples; ++s) {
    const RandomBubbleField field(d, degree, rng);
    const IdentityDiscrepancy r = check_projection_identity(
        disc, [&](const Point& x) { return field.value(x); }, [&](const Point& x) { return field.gradient(x); },
        2 * d + degree);
    grad = std::max(grad, r.gradient);
    div = std::max(div, r.divergence);
  }
  CheckResult out;
  out.lines.push_back({"weak gradient vs projected gradient", grad, threshold, grad <= threshold});
  out.lines.push_back({"weak divergence vs projected divergence", div, threshold, div <= threshold});
  return out;
}

CheckResult check_mesh(const PolytopalMesh& mesh) {
  CheckResult out;
  const auto violations = validate_mesh(mesh);
  for (const auto& v : violations) out.notes.push_back(v.to_string());
  out.lines.push_back({"violations", static_cast<double>(violations.size()), 0.0, violations.empty()});
  return out;
}

CheckResult check_infsup(std::string_view family, int k, int level_from, int level_to, std::optional<int> j,
                         double threshold) {
  CheckResult out;
  for (int level = level_from; level <= level_to; ++level) {
    const PolytopalMesh mesh = make_mesh(family, level);
    const Discretization disc(mesh, k, JPolicy{j});
    const double beta = infsup_probe(disc);
    out.lines.push_back({"beta_h level " + std::to_string(level), beta, threshold, beta > threshold});
  }
  return out;
}

}  // namespace polystokes
