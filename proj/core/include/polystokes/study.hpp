#pragma once

#include "polystokes/analysis.hpp"
#include "polystokes/mesh.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polystokes {

enum class TableFormat { csv, markdown };

TableFormat parse_format(std::string_view name);

/// One refinement study: a problem on a mesh family over a range of levels.
/// The `file` family reads one mesh per entry of mesh_files instead of
/// generating levels; the level numbers then count from level_from.
struct StudyConfig {
  std::string problem;
  std::string family = "triangular";
  int k = 1;
  std::optional<int> j;
  int level_from = 1;
  int level_to = 1;
  double tolerance = 1e-10;
  TableFormat format = TableFormat::csv;
  std::string out;
  std::vector<std::string> mesh_files;

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Parses "A..B" (or a single level "A"). Throws ConfigError.
std::pair<int, int> parse_level_range(std::string_view text);

/// triangular, tetrahedral or polygonal (honeycomb) mesh of the unit square/cube.
PolytopalMesh make_mesh(std::string_view family, int level);

struct StudyOutcome {
  ErrorReport report;
  int exit_code = 0;  // 0 success, 2 solver failure, 3 configuration error
  std::string message;
};

/// Runs every level sequentially. Progress goes to `log` when given.
StudyOutcome run_study(const StudyConfig& config, std::ostream* log = nullptr);

/// Error table: CSV with a fixed header, or markdown in the same column order.
std::string emit_table(const ErrorReport& report, TableFormat format);

/// Reads the CSV produced by emit_table back into a report. Throws ParseError.
ErrorReport parse_csv(std::string_view text);

struct CheckLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct CheckResult {
  std::vector<CheckLine> lines;
  std::vector<std::string> notes;
  bool passed() const;
};

/// Weak operators of random polynomials vanishing on the boundary against
/// the projections of their classical derivatives.
CheckResult check_lemma(std::string_view family, int k, int level, std::optional<int> j = std::nullopt,
                        int samples = 10, std::uint64_t seed = 20240611, double threshold = 1e-9);

CheckResult check_mesh(const PolytopalMesh& mesh);

/// Discrete inf-sup constant per level; each must exceed `threshold`.
CheckResult check_infsup(std::string_view family, int k, int level_from, int level_to,
                         std::optional<int> j = std::nullopt, double threshold = 1e-3);

}  // namespace polystokes
