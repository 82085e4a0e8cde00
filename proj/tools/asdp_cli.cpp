// asdp: solve sparse SDPA / JSON conic problems with inexact ADMM.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asdp/admm.hpp"
#include "asdp/errors.hpp"
#include "asdp/lowering.hpp"
#include "asdp/operator_sim.hpp"
#include "asdp/problem_io.hpp"
#include "asdp/report.hpp"
#include "asdp/sdpa.hpp"
#include "asdp/toys.hpp"

namespace {

using namespace asdp;

struct CommonFlags {
  std::string mode = "lobpcg";
  std::string backend = "ldl";
  std::string out;
  Settings settings;
};

void add_settings_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--mode", f.mode, "Projection mode")->check(CLI::IsMember({"exact", "lobpcg"}));
  app->add_option("--rho", f.settings.rho, "ADMM penalty rho");
  app->add_option("--sigma", f.settings.sigma, "Proximal weight sigma");
  app->add_option("--alpha", f.settings.alpha, "Relaxation alpha in (0, 2)");
  app->add_option("--eps-abs", f.settings.eps_abs, "Absolute termination tolerance");
  app->add_option("--eps-rel", f.settings.eps_rel, "Relative termination tolerance");
  app->add_option("--eps-pinf", f.settings.eps_pinf, "Primal infeasibility tolerance");
  app->add_option("--eps-dinf", f.settings.eps_dinf, "Dual infeasibility tolerance");
  app->add_option("--max-iter", f.settings.max_iter, "Iteration cap");
  app->add_option("--proj-tol-c", f.settings.proj_tol_c, "Projection tolerance constant c in c / k^p");
  app->add_option("--proj-tol-exp", f.settings.proj_tol_exponent, "Projection tolerance exponent p");
  app->add_option("--seed", f.settings.seed, "Random seed");
  app->add_option("--backend", f.backend, "Linear system backend")
      ->check(CLI::IsMember({"ldl", "cg", "structured-bo"}));
  app->add_option("--out", f.out, "Output file (default: stdout)");
}

Settings resolve(const CommonFlags& f) {
  Settings s = f.settings;
  s.projection_mode = f.mode == "exact" ? ProjectionKind::Exact : ProjectionKind::Lobpcg;
  if (f.backend == "cg")
    s.linsys_backend = LinsysBackend::Cg;
  else if (f.backend == "structured-bo")
    s.linsys_backend = LinsysBackend::StructuredBo;
  else
    s.linsys_backend = LinsysBackend::Ldl;
  return s;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ConicProblem<double> load_problem(const std::string& path, int* n_max = nullptr) {
  if (ends_with(path, ".json")) {
    auto prob = read_problem_json_file(path);
    if (n_max) {
      *n_max = 0;
      for (const auto& blk : prob.cones.blocks())
        *n_max = std::max(*n_max, static_cast<int>(blk.matrix_dim));
    }
    return prob;
  }
  auto bp = read_sdpa_file(path);
  if (n_max) *n_max = bp.max_block_dim();
  return split_and_lower(bp).problem;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

std::string base_name(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

int cmd_solve(const std::string& path, const CommonFlags& flags, bool include_solution) {
  const Settings settings = resolve(flags);
  auto prob = load_problem(path);
  auto result = solve(prob, settings);
  ResultDumpOptions opts;
  opts.include_solution = include_solution;
  emit(flags.out, result_to_json(result, settings, base_name(path), opts));
  return exit_code(result.status);
}

int cmd_compare(const std::vector<std::string>& paths, const CommonFlags& flags, bool omit_timings) {
  Settings exact = resolve(flags);
  exact.projection_mode = ProjectionKind::Exact;
  Settings approx = exact;
  approx.projection_mode = ProjectionKind::Lobpcg;
  std::vector<ReportRow> rows;
  for (const auto& path : paths) {
    ReportRow row;
    row.name = base_name(path);
    try {
      auto prob = load_problem(path, &row.n_max);
      const auto re = solve(prob, exact);
      const auto ra = solve(prob, approx);
      row.rank = static_cast<int>(ra.final_ritz_count);
      row.t_exact = re.timings.total;
      row.speedup = ra.timings.total > 0 ? re.timings.total / ra.timings.total : 0.0;
      row.t_proj_exact = re.timings.projection;
      row.speedup_proj = ra.timings.projection > 0 ? re.timings.projection / ra.timings.projection : 0.0;
      row.iter_exact = re.iterations;
      row.iter = ra.iterations;
      row.f_exact = re.objective;
      row.f = ra.objective;
      if (re.status != SolveStatus::Solved || ra.status != SolveStatus::Solved)
        row.status = std::string("exact:") + to_string(re.status) + " lobpcg:" + to_string(ra.status);
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  ReportOptions ropts;
  ropts.omit_timings = omit_timings;
  emit(flags.out, write_report(rows, ropts));
  return 0;
}

int cmd_infeas_demo(const std::string& kind, const CommonFlags& flags, bool rho_given) {
  const bool primal = kind == "primal";
  const auto prob = primal ? toys::primal_infeasible() : toys::dual_infeasible();
  Settings base = resolve(flags);
  if (!rho_given) base.rho = primal ? 1e3 : 1e-3;

  std::ostringstream out;
  out << "# kind=" << kind << " rho=" << base.rho << " sigma=" << base.sigma << " alpha=" << base.alpha << "\n";
  if (primal)
    out << "mode,iteration,at_y_norm_inf,dist_polar,b_dot_y\n";
  else
    out << "mode,iteration,dist_recession,q_dot_x\n";
  bool all_detected = true;
  for (ProjectionKind mode : {ProjectionKind::Exact, ProjectionKind::Lobpcg}) {
    Settings s = base;
    s.projection_mode = mode;
    CheckCallback<double> trace = [&](const AdmmState<double>& st, const Residuals<double>&) {
      char buf[160];
      if (primal) {
        const Vector<double> dy = st.delta_y();
        if (dy.norm() <= 1e-12) return;
        const auto c = primal_certificate_quantities(prob, dy);
        std::snprintf(buf, sizeof buf, "%s,%d,%.10e,%.10e,%.10e\n", to_string(mode), st.k, c.at_y_norm,
                      c.dist_polar, c.b_dot_y);
      } else {
        const Vector<double> dx = st.delta_x();
        if (dx.norm() <= 1e-12) return;
        const auto c = dual_certificate_quantities(prob, dx);
        std::snprintf(buf, sizeof buf, "%s,%d,%.10e,%.10e\n", to_string(mode), st.k, c.dist_recession, c.q_dot_x);
      }
      out << buf;
    };
    const auto result = solve(prob, s, AdmmState<double>::zeros(prob), trace);
    const auto expected = primal ? SolveStatus::PrimalInfeasible : SolveStatus::DualInfeasible;
    if (result.status != expected) all_detected = false;
  }
  emit(flags.out, out.str());
  return all_detected ? 0 : 1;
}

int cmd_operator_sim(const std::string& scenario, const std::string& schedule_name, const opsim::Options& options,
                     const std::string& out_path) {
  if (scenario == "admm-equivalence") {
    const auto r = opsim::run_admm_equivalence(100, options.seed);
    emit(out_path, opsim::trace_csv(r));
    std::cerr << (r.passed ? "PASS" : "FAIL") << " admm-equivalence max violation " << r.max_violation << "\n";
    return r.passed ? 0 : 1;
  }
  const auto schedule = opsim::parse_schedule(schedule_name);
  if (!schedule) throw CLI::ValidationError("--schedule", "unknown schedule " + schedule_name);
  const auto r = scenario == "translation" ? opsim::run_translation(*schedule, options)
                                           : opsim::run_rotation_translation(*schedule, options);
  emit(out_path, opsim::trace_csv(r));
  if (!r.passed) {
    std::cerr << "INFO " << scenario << " " << schedule_name << " final error " << r.final_error << "\n";
    return 0;
  }
  std::cerr << (*r.passed ? "PASS" : "FAIL") << " " << scenario << " " << schedule_name << " final error "
            << r.final_error << "\n";
  return *r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conic solver using ADMM with LOBPCG-based approximate PSD projections"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string solve_path;
  bool include_solution = false;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one .dat-s or .json problem and print a JSON result");
  solve_cmd->add_option("path", solve_path, "Problem file")->required();
  solve_cmd->add_flag("--solution", include_solution, "Include x, z, y in the JSON output");
  add_settings_flags(solve_cmd, solve_flags);

  CommonFlags compare_flags;
  std::vector<std::string> compare_paths;
  bool omit_timings = false;
  auto* compare_cmd = app.add_subcommand("compare", "Run exact and LOBPCG projections and write a CSV report");
  compare_cmd->add_option("paths", compare_paths, "Problem files")->required();
  compare_cmd->add_flag("--omit-timings", omit_timings, "Write zeros in the timing columns");
  add_settings_flags(compare_cmd, compare_flags);

  CommonFlags demo_flags;
  std::string demo_kind = "dual";
  auto* demo_cmd = app.add_subcommand("infeas-demo", "Trace infeasibility certificates on the built-in toys");
  demo_cmd->add_option("--kind", demo_kind, "Toy problem")->check(CLI::IsMember({"primal", "dual"}));
  add_settings_flags(demo_cmd, demo_flags);

  std::string scenario = "translation";
  std::string schedule = "summable";
  std::string sim_out;
  opsim::Options sim_options;
  auto* sim_cmd = app.add_subcommand("operator-sim", "Fixed-point iteration with injected errors");
  sim_cmd->add_option("--scenario", scenario, "Scenario")
      ->check(CLI::IsMember({"translation", "rotation-translation", "admm-equivalence"}));
  sim_cmd->add_option("--schedule", schedule, "Error schedule")
      ->check(CLI::IsMember({"zero", "summable", "nonsummable"}));
  sim_cmd->add_option("--iterations", sim_options.iterations, "Iteration count");
  sim_cmd->add_option("--c", sim_options.c, "Error magnitude constant");
  sim_cmd->add_option("--seed", sim_options.seed, "Random seed");
  sim_cmd->add_option("--out", sim_out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) return cmd_solve(solve_path, solve_flags, include_solution);
    if (*compare_cmd) return cmd_compare(compare_paths, compare_flags, omit_timings);
    if (*demo_cmd) return cmd_infeas_demo(demo_kind, demo_flags, demo_cmd->count("--rho") > 0);
    if (*sim_cmd) return cmd_operator_sim(scenario, schedule, sim_options, sim_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
