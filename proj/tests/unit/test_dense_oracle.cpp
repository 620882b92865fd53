// Library operators and assembled systems against the brute-force dense assembler.

#include "oracle_compare.hpp"

#include <gtest/gtest.h>

using namespace polystokes;

namespace {

struct Case {
  const char* problem;
  int level;
  int k;
};

std::string label(const Case& c) {
  return std::string(c.problem) + "_L" + std::to_string(c.level) + "_k" + std::to_string(c.k);
}

void PrintTo(const Case& c, std::ostream* os) { *os << label(c); }

class DenseOracle : public ::testing::TestWithParam<Case> {};

TEST_P(DenseOracle, MatchesLibrary) {
  const Case c = GetParam();
  const oracle::DenseComparison r =
      oracle::compare_with_dense(gen_uniform_triangular(c.level), builtin_problem(c.problem), c.k);
  EXPECT_LT(r.weak_gradient, 1e-10);
  EXPECT_LT(r.stiffness, 1e-10);
  EXPECT_LT(r.divergence, 1e-10);
  EXPECT_LT(r.rhs, 1e-10);
  EXPECT_LT(r.constraint, 1e-10);
  EXPECT_LT(r.solution, 1e-10);
}

// Polynomial data only, so both sides integrate the right-hand sides exactly.
INSTANTIATE_TEST_SUITE_P(Triangles, DenseOracle,
                         ::testing::Values(Case{"poly2", 1, 1}, Case{"poly2", 1, 2}, Case{"ex2", 1, 2},
                                           Case{"ex2", 2, 1}, Case{"poly2", 2, 3}, Case{"ex2", 2, 3}),
                         [](const ::testing::TestParamInfo<Case>& info) { return label(info.param); });

TEST(DenseOracleSelf, QuadratureAgainstClosedForm) {
  const auto r = oracle::triangle_rule({0, 0}, {1, 0}, {0, 1}, 8);
  double s = 0.0;
  for (std::size_t q = 0; q < r.w.size(); ++q) s += r.w[q] * std::pow(r.x[q].x(), 3) * std::pow(r.x[q].y(), 5);
  EXPECT_NEAR(s, oracle::simplex_monomial_integral(2, 3, 5), 1e-15);
}

}  // namespace
