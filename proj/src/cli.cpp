#include "palm/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "palm/algorithm.hpp"
#include "palm/io.hpp"
#include "palm/oracle.hpp"
#include "palm/reformulation.hpp"

namespace palm::cli {

using nlohmann::json;

namespace {

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

int input_error(std::ostream& out, std::ostream& err, const std::string& mode,
                const std::vector<std::string>& errors) {
  json report;
  report["mode"] = mode;
  report["status"] = "InputError";
  report["errors"] = errors;
  out << report.dump(2) << "\n";
  for (const auto& e : errors) err << "error: " << e << "\n";
  return kInputError;
}

int oracle_threads() {
  const char* env = std::getenv("PALM_BILEVEL_THREADS");
  if (!env || !*env) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;
}

struct SolveOptions {
  std::string instance;
  std::string trace;
  PalmConfig cfg;
  std::string u0;
};

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  BilevelInstance inst;
  PalmConfig cfg = opt.cfg;
  try {
    inst = load_instance(opt.instance);
    if (!opt.u0.empty()) cfg.u0 = parse_vector(opt.u0);
    if (cfg.u0.size() != 0 && cfg.u0.size() != inst.r)
      throw InputError({"--u0 has " + std::to_string(cfg.u0.size()) + " entries, instance has r=" +
                        std::to_string(inst.r)});
    cfg.check();
  } catch (const InputError& e) {
    return input_error(out, err, "palm", e.violations());
  } catch (const std::invalid_argument& e) {
    return input_error(out, err, "palm", {e.what()});
  }

  const auto t0 = std::chrono::steady_clock::now();
  const PalmResult res = run_palm(inst, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json report;
  report["instance"] = inst.name;
  report["mode"] = "palm";
  report["status"] = to_string(res.status);
  report["certified"] = res.certified;
  report["objective"] = res.upper_objective;
  report["u"] = to_json(res.iterate.u_bar);
  report["y"] = to_json(res.iterate.y_bar);
  report["lambda"] = to_json(res.iterate.lambda_bar);
  report["gap"] = res.gap;
  report["outer_iterations"] = res.outer_iterations;
  report["inner_iterations"] = res.trace.size();
  if (res.iterate.u_bar.size() == inst.r && res.iterate.y_bar.size() == inst.n) {
    const FeasibilityReport fr = check_bilevel_feasibility(inst, res.iterate);
    report["feasibility"] = {{"primal_violation", fr.primal_violation},
                             {"dual_violation", fr.dual_violation},
                             {"upper_violation", fr.upper_violation}};
  }
  if (!res.detail.empty()) report["detail"] = res.detail;
  report["wall_time_s"] = wall;
  report["files"] = json::object();

  if (!opt.trace.empty()) {
    std::ofstream csv(opt.trace);
    if (!csv) {
      err << "error: cannot write trace file '" << opt.trace << "'\n";
      return input_error(out, err, "palm", {"cannot write trace file '" + opt.trace + "'"});
    }
    write_trace_csv(csv, res.trace, inst.r, inst.n);
    report["files"]["trace"] = opt.trace;
  }
  out << report.dump(2) << "\n";
  if (!res.detail.empty()) err << to_string(res.status) << ": " << res.detail << "\n";

  switch (res.status) {
    case PalmStatus::Converged:
      return kOk;
    case PalmStatus::MaxOuterExceeded:
      return kMaxOuterExceeded;
    default:
      return kSolverFailure;
  }
}

struct OracleOptions {
  std::string instance;
  std::string grid;
  double tol_lex = kTolLex;
};

int cmd_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err) {
  BilevelInstance inst;
  GridSpec grid;
  try {
    inst = load_instance(opt.instance);
    grid = parse_grid(opt.grid, inst.r);
    check_grid(inst, grid);
  } catch (const InputError& e) {
    return input_error(out, err, "oracle", e.violations());
  } catch (const std::invalid_argument& e) {
    return input_error(out, err, "oracle", {e.what()});
  }

  const auto t0 = std::chrono::steady_clock::now();
  OracleResult res;
  try {
    res = run_oracle(inst, grid, opt.tol_lex, oracle_threads());
  } catch (const OracleError& e) {
    return input_error(out, err, "oracle", {e.what()});
  } catch (const NumericalFailure& e) {
    json report{{"instance", inst.name}, {"mode", "oracle"}, {"status", "NumericalFailure"},
                {"detail", e.what()}};
    out << report.dump(2) << "\n";
    err << "NumericalFailure: " << e.what() << "\n";
    return kSolverFailure;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json report;
  report["instance"] = inst.name;
  report["mode"] = "oracle";
  report["status"] = to_string(res.status);
  report["evaluated_points"] = res.evaluated_points;
  report["feasible_points"] = res.feasible_points;
  if (res.status == OracleStatus::Optimal) {
    // Lower-level multipliers at the certified point, for the report only.
    const LpSolution dual = solve_lp(build_subproblem_dual(inst, res.best_u));
    report["objective"] = res.best_objective;
    report["u"] = to_json(res.best_u);
    report["y"] = to_json(res.best_y);
    if (dual.optimal()) {
      report["lambda"] = to_json(dual.w);
      report["gap"] = inst.e.dot(res.best_y) - inst.b.dot(dual.w);
    }
  }
  report["wall_time_s"] = wall;
  report["files"] = json::object();
  out << report.dump(2) << "\n";
  return res.status == OracleStatus::Optimal ? kOk : kNoFeasiblePoint;
}

int cmd_example(const std::string& path, std::ostream& out, std::ostream& err) {
  const std::string text = dump_instance(example_instance());
  if (path.empty() || path == "-") {
    out << text;
    return kOk;
  }
  std::ofstream f(path);
  if (!f || !(f << text)) {
    err << "error: cannot write '" << path << "'\n";
    return kInputError;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalty adaptive linearization for bilevel programs with bilinear lower levels",
               "palm-bilevel"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* sub_solve = app.add_subcommand("solve", "Run the penalty/linearization method on an instance");
  sub_solve->add_option("instance", solve.instance, "Instance JSON file")->required();
  sub_solve->add_option("--trace", solve.trace, "Write the per-iteration trace CSV here");
  sub_solve->add_option("--mu0", solve.cfg.mu0, "Initial penalty weight")->capture_default_str();
  sub_solve->add_option("--growth", solve.cfg.growth, "Penalty growth factor per outer iteration")
      ->capture_default_str();
  sub_solve->add_option("--eps-opt", solve.cfg.eps_opt, "Outer tolerance on the duality gap")
      ->capture_default_str();
  sub_solve->add_option("--eps-apx", solve.cfg.eps_apx, "Inner tolerance on |dX|_inf")->capture_default_str();
  sub_solve->add_option("--max-outer", solve.cfg.max_outer, "Outer iteration cap")->capture_default_str();
  sub_solve->add_option("--max-inner", solve.cfg.max_inner, "Inner iteration cap")->capture_default_str();
  sub_solve->add_option("--u0", solve.u0, "Starting upper decision, comma separated (default 0)");

  OracleOptions oracle;
  auto* sub_oracle = app.add_subcommand("oracle", "Brute-force grid search with exact lower-level responses");
  sub_oracle->add_option("instance", oracle.instance, "Instance JSON file")->required();
  sub_oracle->add_option("--grid", oracle.grid, "u<i>=lo:hi:step | u<i>=value | u<i>=free, comma separated")
      ->required();
  sub_oracle->add_option("--tol-lex", oracle.tol_lex, "Slack on the lower-level value")->capture_default_str();

  std::string example_out;
  auto* sub_example = app.add_subcommand("example", "Print the built-in minimal example instance");
  sub_example->add_option("--out", example_out, "Write to this file instead of stdout");

  std::vector<std::string> argv_store{"palm-bilevel"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kInputError;
  }

  try {
    if (*sub_solve) return cmd_solve(solve, out, err);
    if (*sub_oracle) return cmd_oracle(oracle, out, err);
    if (*sub_example) return cmd_example(example_out, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverFailure;
  }
  return kInputError;
}

}  // namespace palm::cli
