// heatmom: moment relaxations of the heat equation on the circle.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "heatmom/heatmom.hpp"

namespace fs = std::filesystem;
using namespace heatmom;

namespace {

constexpr int kExitNonOptimal = 1;
constexpr int kExitConfig = 2;

const std::vector<TruncationDegrees> kTable1 = {
    {2, 2, 2}, {4, 2, 2}, {6, 2, 2}, {6, 2, 4}, {2, 4, 2}, {4, 4, 2},
    {6, 4, 2}, {4, 4, 4}, {6, 4, 4}, {6, 4, 6}, {6, 6, 4}, {6, 6, 6},
};

TruncationDegrees parse_degrees(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoi(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("degrees must look like 4,2,2, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw ConfigError("degrees must have three entries, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? parse_config(nlohmann::json::object()) : load_config(path);
}

nlohmann::json report_json(const SolveReport& r, const Relaxation& rel) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["message"] = r.message;
  j["primal_objective"] = r.primal_objective;
  j["max_equality_residual"] = r.max_equality_residual;
  j["min_block_eigenvalue"] = r.min_block_eigenvalue;
  j["iterations"] = r.iterations;
  j["primal_residual"] = r.primal_residual;
  j["dual_residual"] = r.dual_residual;
  j["penalty"] = r.penalty;
  j["polished"] = r.polished;
  j["variables"] = rel.problem.num_vars;
  j["equalities"] = rel.problem.equalities.size();
  std::vector<int> sizes;
  for (const auto& b : rel.problem.blocks) sizes.push_back(b.size);
  j["block_sizes"] = sizes;
  j["model"] = model_name(rel.model);
  j["epsilon"] = model_epsilon(rel.model);
  j["degrees"] = {rel.degrees.time, rel.degrees.algebraic, rel.degrees.harmonic};
  j["seconds"] = r.seconds;
  return j;
}

struct SolveOutcome {
  Relaxation relaxation;
  SolveResult result;
};

SolveOutcome run_solve(const RunConfig& cfg) {
  SolveOutcome o{build_problem(cfg.model, cfg.degrees, cfg.initial), {}};
  o.result = solve(o.relaxation.problem, cfg.solver);
  return o;
}

// Local model: twice the harmonic degree, so convolution truncation shows up
// in the constraint residuals instead of being hidden.
int default_cutoff(const RunConfig& cfg, int requested) {
  if (requested > 0) return requested;
  return std::holds_alternative<LocalQuadratic>(cfg.model) ? 2 * cfg.degrees.harmonic : cfg.degrees.harmonic;
}

MeasureTables reference_tables(const RunConfig& cfg, const std::string& which, double step, int cutoff) {
  if (which == "analytic") return analytic_tables(cfg.initial, cfg.degrees);
  if (which == "galerkin") {
    return trajectory_moments(integrate(cfg.model, cfg.initial, step, default_cutoff(cfg, cutoff)), cfg.degrees);
  }
  std::ifstream in(which);
  if (!in) throw ConfigError("reference must be analytic, galerkin or a readable CSV path, got '" + which + "'");
  MeasureTables t;
  t.occupation = read_occupation_csv(in);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment relaxations of the heat equation on the circle"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* sub) { sub->add_option("-c,--config", config_path, "JSON run configuration"); };

  // sizes
  auto* sizes = app.add_subcommand("sizes", "Moment vector and matrix sizes");
  std::vector<std::string> degree_args;
  sizes->add_option("-d,--degrees", degree_args, "Degrees d_t,d_a,d_h (repeatable); default: the 12 reference rows");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve the relaxation; write pseudo-moments and a report");
  add_config(solve_cmd);
  std::string out_dir;
  solve_cmd->add_option("-o,--output-dir", out_dir, "Overrides output_dir of the config");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Accuracy histogram of pseudo-moments against a reference");
  add_config(compare_cmd);
  std::string reference = "analytic";
  std::string pseudo_path;
  double step = 1e-3;
  int cutoff = 0;
  compare_cmd->add_option("-r,--reference", reference, "analytic, galerkin or a moment CSV path");
  compare_cmd->add_option("-p,--pseudomoments", pseudo_path, "Pseudo-moment CSV; solves the relaxation if omitted");
  compare_cmd->add_option("--step", step, "Galerkin time step");
  compare_cmd->add_option("--cutoff", cutoff, "Galerkin mode cutoff (default d_h, 2 d_h for the local model)");
  compare_cmd->add_option("-o,--output-dir", out_dir, "Overrides output_dir of the config");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Reference moment tables");
  add_config(oracle_cmd);
  std::string which = "analytic";
  oracle_cmd->add_option("-w,--which", which, "analytic or galerkin")->check(CLI::IsMember({"analytic", "galerkin"}));
  oracle_cmd->add_option("--step", step, "Galerkin time step");
  oracle_cmd->add_option("--cutoff", cutoff, "Galerkin mode cutoff (default d_h, 2 d_h for the local model)");
  std::string traj_path;
  oracle_cmd->add_option("--trajectory", traj_path, "Also write the Galerkin trajectory CSV here");
  oracle_cmd->add_option("-o,--output-dir", out_dir, "Overrides output_dir of the config");

  // export-sdpa
  auto* export_cmd = app.add_subcommand("export-sdpa", "Write the relaxation in SDPA sparse format");
  add_config(export_cmd);
  std::string sdpa_path;
  export_cmd->add_option("-o,--output", sdpa_path, "Target .dat-s file")->required();

  // import-solution
  auto* import_cmd = app.add_subcommand("import-solution", "Read an external solution vector and check it");
  add_config(import_cmd);
  std::string solution_path;
  import_cmd->add_option("-s,--solution", solution_path, "One value per line, problem variable order")->required();
  import_cmd->add_option("-o,--output-dir", out_dir, "Overrides output_dir of the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sizes) {
      std::vector<TruncationDegrees> rows;
      for (const auto& d : degree_args) rows.push_back(parse_degrees(d));
      if (rows.empty()) rows = kTable1;
      std::cout << "d_t,d_a,d_h,vector_size,matrix_size\n";
      for (const auto& d : rows) {
        try {
          require_enumerable(d);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        std::cout << d.time << ',' << d.algebraic << ',' << d.harmonic << ',' << moment_vector_size(d) << ','
                  << matrix_basis_size(d) << '\n';
      }
      return 0;
    }

    RunConfig cfg = config_or_default(config_path);
    const fs::path dir = out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(out_dir);

    if (*solve_cmd) {
      auto o = run_solve(cfg);
      const auto tables = extract_pseudomoments(o.relaxation, o.result.x);
      auto csv = open_out(dir / "pseudomoments.csv");
      write_pseudomoment_csv(csv, tables);
      auto rep = open_out(dir / "report.json");
      rep << report_json(o.result.report, o.relaxation).dump(2) << '\n';
      std::cerr << "status " << to_string(o.result.report.status) << ", objective "
                << format_double(o.result.report.primal_objective) << ", " << o.result.report.iterations
                << " iterations\n";
      return o.result.report.status == SolveStatus::Optimal ? 0 : kExitNonOptimal;
    }

    if (*compare_cmd) {
      MomentTable computed;
      int rc = 0;
      if (pseudo_path.empty()) {
        auto o = run_solve(cfg);
        computed = extract_pseudomoments(o.relaxation, o.result.x).occupation;
        if (o.result.report.status != SolveStatus::Optimal) rc = kExitNonOptimal;
      } else {
        std::ifstream in(pseudo_path);
        if (!in) throw ConfigError("cannot open " + pseudo_path);
        computed = read_occupation_csv(in);
      }
      // The analytic reference is the unperturbed flow whatever the model.
      const auto ref = reference_tables(cfg, reference, step, cutoff);
      const auto bins = accuracy_histogram(computed, ref.occupation);
      auto out = open_out(dir / "histogram.csv");
      write_histogram_csv(out, bins);
      write_histogram_csv(std::cout, bins);
      return rc;
    }

    if (*oracle_cmd) {
      MeasureTables tables;
      if (which == "analytic") {
        if (model_epsilon(cfg.model) != 0.0)
          throw ConfigError("the analytic oracle only covers epsilon = 0");
        tables = analytic_tables(cfg.initial, cfg.degrees);
      } else {
        const auto traj = integrate(cfg.model, cfg.initial, step, default_cutoff(cfg, cutoff));
        tables = trajectory_moments(traj, cfg.degrees);
        if (!traj_path.empty()) {
          auto t = open_out(traj_path);
          write_trajectory_csv(t, traj);
        }
      }
      auto out = open_out(dir / (which + "_moments.csv"));
      write_pseudomoment_csv(out, tables, true);
      return 0;
    }

    if (*export_cmd) {
      const auto rel = build_problem(cfg.model, cfg.degrees, cfg.initial);
      if (fs::path(sdpa_path).has_parent_path()) fs::create_directories(fs::path(sdpa_path).parent_path());
      export_sdpa(rel.problem, sdpa_path);
      return 0;
    }

    if (*import_cmd) {
      const auto rel = build_problem(cfg.model, cfg.degrees, cfg.initial);
      const auto x = import_solution(solution_path, rel.problem);
      const auto tables = extract_pseudomoments(rel, x);
      auto csv = open_out(dir / "pseudomoments.csv");
      write_pseudomoment_csv(csv, tables);
      nlohmann::json j;
      j["primal_objective"] = evaluate_objective(rel.problem, x);
      j["max_equality_residual"] = equality_residual(rel.problem, x);
      j["min_block_eigenvalue"] = min_block_eigenvalue(rel.problem, x);
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonOptimal;
  }
  return 0;
}
