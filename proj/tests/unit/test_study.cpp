#include "polystokes/error.hpp"
#include "polystokes/study.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace polystokes;

namespace {

const std::string kHeader =
    "level,h,ndof_u,ndof_p,err_u_l2,rate_u_l2,err_u_energy,rate_u_energy,err_p_l2,rate_p_l2";

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

StudyConfig config(const char* problem, int k, int from, int to) {
  StudyConfig c;
  c.problem = problem;
  c.k = k;
  c.level_from = from;
  c.level_to = to;
  return c;
}

TEST(Table, CsvHeaderAndRows) {
  const StudyOutcome o = run_study(config("ex1", 1, 2, 4));
  ASSERT_EQ(o.exit_code, 0) << o.message;
  const auto rows = lines(emit_table(o.report, TableFormat::csv));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], kHeader);
  EXPECT_EQ(rows[1].rfind("2,", 0), 0u);
  // First data row has empty rate cells.
  EXPECT_NE(rows[1].find(",,"), std::string::npos);
  EXPECT_EQ(std::count(rows[2].begin(), rows[2].end(), ','), 9);
}

TEST(Table, NumberFormats) {
  ErrorReport r;
  r.problem = "ex1";
  r.family = "triangular";
  LevelErrors a;
  a.level = 1;
  a.h = 1.0;
  a.ndof_u = 12;
  a.ndof_p = 2;
  a.err_u_l2 = 0.123456;
  a.err_u_energy = 2.0;
  a.err_p_l2 = 4.0;
  LevelErrors b = a;
  b.level = 2;
  b.h = 0.5;
  b.err_u_l2 = 0.123456 / 4.0;
  b.err_u_energy = 1.0;
  b.err_p_l2 = 1.0;
  r.levels = {a, b};
  const auto rows = lines(emit_table(r, TableFormat::csv));
  EXPECT_EQ(rows[1], "1,1.000000e+00,12,2,1.235e-01,,2.000e+00,,4.000e+00,");
  EXPECT_EQ(rows[2], "2,5.000000e-01,12,2,3.086e-02,2.00,1.000e+00,1.00,1.000e+00,2.00");
}

TEST(Table, SingleLevelMarkdownUsesDash) {
  const StudyOutcome o = run_study(config("ex1", 1, 3, 3));
  ASSERT_EQ(o.exit_code, 0);
  const std::string md = emit_table(o.report, TableFormat::markdown);
  EXPECT_NE(md.find("**ex1, triangular, k=1, j=auto**"), std::string::npos);
  const auto rows = lines(md);
  const std::string& data = rows.back();
  EXPECT_EQ(data.rfind("| 3 |", 0), 0u);
  EXPECT_EQ(std::count(data.begin(), data.end(), '|'), 11);
  int dashes = 0;
  for (std::size_t p = data.find("—"); p != std::string::npos; p = data.find("—", p + 1)) ++dashes;
  EXPECT_EQ(dashes, 3);
}

TEST(Table, MarkdownRecordsExplicitJ) {
  StudyConfig c = config("ex1", 1, 2, 2);
  c.j = 3;
  const StudyOutcome o = run_study(c);
  ASSERT_EQ(o.exit_code, 0);
  EXPECT_NE(emit_table(o.report, TableFormat::markdown).find("j=3"), std::string::npos);
}

TEST(Table, CsvRoundTrip) {
  const StudyOutcome o = run_study(config("ex2", 2, 2, 4));
  ASSERT_EQ(o.exit_code, 0);
  const std::string csv = emit_table(o.report, TableFormat::csv);
  const ErrorReport back = parse_csv(csv);
  ASSERT_EQ(back.levels.size(), 3u);
  EXPECT_EQ(emit_table(back, TableFormat::csv), csv);
}

TEST(Table, RejectsForeignCsv) {
  EXPECT_THROW(parse_csv("a,b,c\n1,2,3\n"), ParseError);
  EXPECT_THROW(parse_csv(kHeader + "\n1,2,3\n"), ParseError);
}

TEST(Study, Deterministic) {
  const std::string a = emit_table(run_study(config("ex1", 2, 2, 3)).report, TableFormat::csv);
  const std::string b = emit_table(run_study(config("ex1", 2, 2, 3)).report, TableFormat::csv);
  EXPECT_EQ(a, b);
}

TEST(Study, LogsEachLevel) {
  std::ostringstream log;
  const StudyOutcome o = run_study(config("ex1", 1, 1, 2), &log);
  ASSERT_EQ(o.exit_code, 0);
  EXPECT_NE(log.str().find("level 1"), std::string::npos);
  EXPECT_NE(log.str().find("level 2"), std::string::npos);
}

TEST(Study, ConfigErrorsExitThree) {
  StudyConfig missing = config("", 1, 1, 1);
  StudyOutcome o = run_study(missing);
  EXPECT_EQ(o.exit_code, 3);
  EXPECT_NE(o.message.find("problem"), std::string::npos);

  EXPECT_EQ(run_study(config("nope", 1, 1, 1)).exit_code, 3);
  EXPECT_EQ(run_study(config("ex1", 0, 1, 1)).exit_code, 3);
  EXPECT_EQ(run_study(config("ex1", 1, 3, 2)).exit_code, 3);
  EXPECT_EQ(run_study(config("ex3", 1, 1, 1)).exit_code, 3);  // 3D problem on a 2D family

  StudyConfig bad_family = config("ex1", 1, 1, 1);
  bad_family.family = "quads";
  EXPECT_EQ(run_study(bad_family).exit_code, 3);

  StudyConfig bad_j = config("ex1", 2, 1, 1);
  bad_j.j = 1;
  EXPECT_EQ(run_study(bad_j).exit_code, 3);
}

TEST(Study, SolverFailureExitsTwo) {
  StudyConfig c = config("ex1", 1, 2, 2);
  c.tolerance = 1e-300;
  const StudyOutcome o = run_study(c);
  EXPECT_EQ(o.exit_code, 2);
  EXPECT_FALSE(o.message.empty());
}

TEST(Study, LevelRangeParsing) {
  EXPECT_EQ(parse_level_range("4..6"), std::make_pair(4, 6));
  EXPECT_EQ(parse_level_range("3"), std::make_pair(3, 3));
  EXPECT_THROW(parse_level_range("a..b"), ConfigError);
  EXPECT_THROW(parse_level_range("4.."), ConfigError);
  EXPECT_EQ(parse_format("md"), TableFormat::markdown);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(Checks, ProjectionIdentityPassesOnEveryFamily) {
  EXPECT_TRUE(check_lemma("triangular", 3, 3).passed());
  EXPECT_TRUE(check_lemma("polygonal", 2, 2).passed());
  EXPECT_TRUE(check_lemma("tetrahedral", 2, 2, std::nullopt, 3).passed());
}

TEST(Checks, MeshAndInfSup) {
  EXPECT_TRUE(check_mesh(gen_polygonal(3)).passed());
  const CheckResult r = check_infsup("triangular", 2, 2, 3);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.lines.size(), 2u);
  for (const auto& l : r.lines) EXPECT_GT(l.value, 1e-3);
}

}  // namespace
