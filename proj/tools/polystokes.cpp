// Command line driver: refinement studies, table conversion, property checks and mesh utilities.

#include "polystokes/error.hpp"
#include "polystokes/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

namespace ps = polystokes;

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;

struct Options {
  std::string problem;
  std::string family = "triangular";
  int k = 1;
  int j = 0;
  std::string levels = "1..1";
  int level = 1;
  double tol = 1e-10;
  std::string format = "csv";
  std::string out;
  std::vector<std::string> mesh_files;
  std::string config;
  std::string input;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ps::ConfigError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ps::ConfigError(path + ":" + std::to_string(n) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int r = std::stoi(v, &pos);
    if (pos == v.size()) return r;
  } catch (const std::exception&) {
  }
  throw ps::ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double r = std::stod(v, &pos);
    if (pos == v.size()) return r;
  } catch (const std::exception&) {
  }
  throw ps::ConfigError("key '" + key + "' expects a number, got '" + v + "'");
}

// Values from --config fill only the options that were not given as flags.
void apply_config_file(CLI::App& cmd, Options& o) {
  if (o.config.empty()) return;
  for (const auto& [key, value] : read_config_file(o.config)) {
    const CLI::Option* flag = nullptr;
    try {
      flag = cmd.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw ps::ConfigError("unknown config key '" + key + "'");
    }
    if (flag->count() > 0) continue;
    if (key == "problem") o.problem = value;
    else if (key == "family") o.family = value;
    else if (key == "k") o.k = to_int(key, value);
    else if (key == "j") o.j = to_int(key, value);
    else if (key == "levels") o.levels = value;
    else if (key == "level") o.level = to_int(key, value);
    else if (key == "tol") o.tol = to_double(key, value);
    else if (key == "format") o.format = value;
    else if (key == "out") o.out = value;
    else if (key == "mesh-file") o.mesh_files = {value};
    else throw ps::ConfigError("config key '" + key + "' is not supported here");
  }
}

std::optional<int> explicit_j(const Options& o) {
  if (o.j == 0) return std::nullopt;
  return o.j;
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ps::ConfigError("cannot write output file '" + path + "'");
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ps::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report_checks(const std::string& title, const ps::CheckResult& r) {
  for (const auto& n : r.notes) std::cout << "  " << n << '\n';
  for (const auto& l : r.lines) {
    std::printf("%s %s: %s = %.3e (limit %.1e)\n", l.pass ? "[ok]  " : "[FAIL]", title.c_str(), l.name.c_str(),
                l.value, l.threshold);
  }
  return r.passed() ? 0 : kExitCheckFailed;
}

ps::PolytopalMesh mesh_from(const Options& o) {
  if (!o.mesh_files.empty()) return ps::load_mesh_file(o.mesh_files.front());
  return ps::make_mesh(o.family, o.level);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stabilizer-free weak Galerkin Stokes solver on polytopal meshes"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", o.config, "key=value file; explicit flags take precedence");
    cmd->add_option("--family", o.family, "triangular | tetrahedral | polygonal | file");
    cmd->add_option("--k", o.k, "velocity degree (>= 1)");
    cmd->add_option("--j", o.j, "weak gradient degree (default: automatic)");
  };

  auto* run = app.add_subcommand("run", "run a refinement study and print the error table");
  add_common(run);
  run->add_option("--problem", o.problem, "ex1 | ex2 | ex3 | poly2 | zero | zero3");
  run->add_option("--levels", o.levels, "level range A..B");
  run->add_option("--tol", o.tol, "relative residual tolerance of the linear solve");
  run->add_option("--format", o.format, "csv | markdown");
  run->add_option("--out", o.out, "write the table to this file instead of stdout");
  run->add_option("--mesh-file", o.mesh_files, "mesh files, one per level (family 'file')");

  auto* table = app.add_subcommand("table", "re-emit a CSV error table, recomputing rates");
  table->add_option("--in", o.input, "CSV produced by 'run'")->required();
  table->add_option("--format", o.format, "csv | markdown");
  table->add_option("--out", o.out, "output file");

  auto* check = app.add_subcommand("check", "property checks");
  check->require_subcommand(1);
  auto* lemma = check->add_subcommand("lemma", "weak operators of H1_0 polynomials match projected derivatives");
  add_common(lemma);
  lemma->add_option("--level", o.level, "mesh level");
  auto* cmesh = check->add_subcommand("mesh", "validate a mesh");
  cmesh->add_option("--file,--mesh-file", o.mesh_files, "mesh file");
  cmesh->add_option("--family", o.family, "generated family when no file is given");
  cmesh->add_option("--level", o.level, "generated level");
  auto* infsup = check->add_subcommand("infsup", "discrete inf-sup constant per level");
  add_common(infsup);
  infsup->add_option("--levels", o.levels, "level range A..B");

  auto* mesh = app.add_subcommand("mesh", "mesh utilities");
  mesh->require_subcommand(1);
  auto* gen = mesh->add_subcommand("gen", "write a generated mesh");
  gen->add_option("--family", o.family, "triangular | tetrahedral | polygonal");
  gen->add_option("--level", o.level, "level");
  gen->add_option("--out", o.out, "output file (stdout if omitted)");
  auto* validate = mesh->add_subcommand("validate", "validate a mesh file");
  validate->add_option("--file,--mesh-file", o.mesh_files, "mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) {
      apply_config_file(*run, o);
      ps::StudyConfig cfg;
      cfg.problem = o.problem;
      cfg.family = o.family;
      cfg.k = o.k;
      cfg.j = explicit_j(o);
      std::tie(cfg.level_from, cfg.level_to) = ps::parse_level_range(o.levels);
      cfg.tolerance = o.tol;
      cfg.format = ps::parse_format(o.format);
      cfg.out = o.out;
      cfg.mesh_files = o.mesh_files;
      if (!cfg.mesh_files.empty() && run->get_option("--family")->count() == 0) cfg.family = "file";
      const ps::StudyOutcome outcome = ps::run_study(cfg, &std::cerr);
      if (outcome.exit_code != 0) {
        std::cerr << "polystokes: " << outcome.message << '\n';
        return outcome.exit_code;
      }
      write_output(ps::emit_table(outcome.report, cfg.format), cfg.out);
      return 0;
    }
    if (table->parsed()) {
      const ps::ErrorReport report = ps::parse_csv(read_file(o.input));
      write_output(ps::emit_table(report, ps::parse_format(o.format)), o.out);
      return 0;
    }
    if (lemma->parsed()) {
      apply_config_file(*lemma, o);
      return report_checks("lemma", ps::check_lemma(o.family, o.k, o.level, explicit_j(o)));
    }
    if (cmesh->parsed()) return report_checks("mesh", ps::check_mesh(mesh_from(o)));
    if (infsup->parsed()) {
      apply_config_file(*infsup, o);
      const auto [from, to] = ps::parse_level_range(o.levels);
      return report_checks("infsup", ps::check_infsup(o.family, o.k, from, to, explicit_j(o)));
    }
    if (gen->parsed()) {
      write_output(ps::save_mesh(ps::make_mesh(o.family, o.level)), o.out);
      return 0;
    }
    if (validate->parsed()) return report_checks("mesh", ps::check_mesh(mesh_from(o)));
  } catch (const ps::SolverError& e) {
    std::cerr << "polystokes: solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const ps::ConfigError& e) {
    std::cerr << "polystokes: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ps::ParseError& e) {
    std::cerr << "polystokes: " << e.what() << '\n';
    return check->parsed() || mesh->parsed() ? kExitCheckFailed : kExitConfig;
  } catch (const ps::MeshError& e) {
    std::cerr << "polystokes: invalid mesh: " << e.what() << '\n';
    return check->parsed() || mesh->parsed() ? kExitCheckFailed : kExitConfig;
  } catch (const ps::Error& e) {
    std::cerr << "polystokes: " << e.what() << '\n';
    return check->parsed() ? kExitCheckFailed : kExitConfig;
  }
  return 0;
}
