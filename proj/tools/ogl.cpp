#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "ogl/data_io.hpp"
#include "ogl/solver.hpp"
#include "ogl/version.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitNotConverged = 3;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// OGL_THREADS is reserved; core loops stay single-threaded so identical
// inputs give identical outputs.
int effective_threads() {
  const char* env = std::getenv("OGL_THREADS");
  if (env == nullptr) return 1;
  try {
    const int requested = std::stoi(env);
    if (requested < 1) throw std::invalid_argument("nonpositive");
    if (requested > 1) {
      std::cerr << "ogl: OGL_THREADS=" << requested
                << " accepted; using 1 effective thread\n";
    }
  } catch (const std::exception&) {
    std::cerr << "ogl: ignoring invalid OGL_THREADS value `" << env << "`\n";
  }
  return 1;
}

ogl::Vector load_vector_flexible(const std::string& path) {
  const ogl::Matrix m = ogl::load_matrix_csv(path);
  if (m.rows() == 1) return m.row(0).transpose();
  if (m.cols() == 1) return m.col(0);
  throw ogl::DimensionMismatch(path + " holds a " + std::to_string(m.rows()) +
                               "x" + std::to_string(m.cols()) +
                               " matrix, expected a single row or column");
}

void write_solution_csv(std::ostream& out, const ogl::Vector& x) {
  out << "index,value\n";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) {
      out << i << ',' << ogl::format_double(x[i]) << '\n';
    }
  }
}

void write_solution(const std::string& path, const ogl::Vector& x) {
  if (path.empty()) {
    write_solution_csv(std::cout, x);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ogl::Error("cannot write file: " + path);
  write_solution_csv(out, x);
}

long count_nonzeros(const ogl::Vector& x) {
  long count = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) count += x[i] != 0.0;
  return count;
}

long count_nonzero_groups(const ogl::Vector& x, const ogl::GroupStructure& gs) {
  long count = 0;
  for (const auto& group : gs.groups) {
    for (int idx : group) {
      if (x[idx] != 0.0) {
        ++count;
        break;
      }
    }
  }
  return count;
}

json telemetry_json(const ogl::SolverResult& result) {
  json t;
  auto& objective = t["objective"] = json::array();
  auto& L = t["L"] = json::array();
  auto& trials = t["line_search_trials"] = json::array();
  auto& inner = t["inner_iterations"] = json::array();
  auto& zero_fraction = t["zero_group_fraction"] = json::array();
  auto& gap = t["gap"] = json::array();
  auto& alpha = t["alpha"] = json::array();
  for (const auto& rec : result.telemetry) {
    objective.push_back(rec.objective);
    L.push_back(rec.L);
    trials.push_back(rec.line_search_trials);
    inner.push_back(rec.inner_iterations);
    zero_fraction.push_back(rec.zero_group_fraction);
    gap.push_back(rec.gap);
    alpha.push_back(rec.alpha);
  }
  return t;
}

json solution_json(const ogl::Vector& x, const ogl::GroupStructure& gs,
                   const ogl::SolverResult& result) {
  json s;
  s["nonzeros"] = count_nonzeros(x);
  s["nonzero_groups"] = count_nonzero_groups(x, gs);
  s["objective"] = result.objective;
  s["iterations"] = result.iterations;
  s["converged"] = result.converged;
  return s;
}

void write_report(const std::string& path, const json& report) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw ogl::Error("cannot write report: " + path);
  out << report.dump(1) << '\n';
}

json base_report(const std::string& command) {
  json report;
  report["version"] = ogl::kVersion;
  report["command"] = command;
  return report;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ogl::LineSearchOverflow*>(&e) != nullptr) {
    return kExitNotConverged;
  }
  if (dynamic_cast<const ogl::InfeasibleDual*>(&e) != nullptr) {
    return kExitInternal;
  }
  if (dynamic_cast<const ogl::Error*>(&e) != nullptr) {
    return kExitInput;
  }
  return kExitInternal;
}

struct ProxArgs {
  std::string input, groups, report, out;
  double l1 = 0.0, l2 = 0.0, gap_tol = 1e-10;
  long max_inner = 100000;
};

int run_prox(const ProxArgs& args) {
  Timer total;
  json report = base_report("prox");

  Timer load;
  const ogl::Vector v = load_vector_flexible(args.input);
  const ogl::GroupStructure gs =
      ogl::load_groups(args.groups, static_cast<int>(v.size()));
  const double load_ms = load.ms();

  Timer solve;
  const ogl::ProxSolution solution =
      ogl::prox(v, gs, {args.l1, args.l2}, {args.gap_tol, args.max_inner});
  const double solve_ms = solve.ms();

  write_solution(args.out, solution.x);

  long zeroed = 0;
  for (char flag : solution.zero_group_mask) zeroed += flag;
  report["options"] = {{"input", args.input}, {"groups", args.groups},
                       {"l1", args.l1},       {"l2", args.l2},
                       {"gap_tol", args.gap_tol}, {"max_inner", args.max_inner},
                       {"out", args.out}};
  report["prox"] = {{"gap", solution.gap},
                    {"inner_iterations", solution.inner_iterations},
                    {"identified_zero_groups", zeroed},
                    {"converged", solution.converged}};
  report["solution"] = {{"nonzeros", count_nonzeros(solution.x)},
                        {"nonzero_groups", count_nonzero_groups(solution.x, gs)},
                        {"objective", ogl::prox_objective(solution.x, v, gs,
                                                          {args.l1, args.l2})}};
  report["timings_ms"] = {{"load", load_ms}, {"solve", solve_ms},
                          {"total", total.ms()}};
  write_report(args.report, report);
  return solution.converged ? kExitOk : kExitNotConverged;
}

struct SolveArgs {
  std::string matrix, labels, groups, report, out;
  std::optional<double> rho;
  std::optional<double> l1, l2;
  double tol = 1e-5, gap_tol = 1e-10;
  long max_outer = 10000, max_inner = 100000;
};

int run_solve(const SolveArgs& args) {
  Timer total;
  json report = base_report("solve");

  Timer load;
  ogl::Matrix A = ogl::load_matrix_csv(args.matrix);
  ogl::Vector b = ogl::load_vector(args.labels);
  const ogl::GroupStructure gs =
      ogl::load_groups(args.groups, static_cast<int>(A.cols()));
  const double load_ms = load.ms();

  const double l1max = ogl::lambda_max(A, b);
  double lambda1, lambda2;
  if (args.rho) {
    lambda1 = lambda2 = *args.rho * l1max;
  } else {
    lambda1 = *args.l1;
    lambda2 = *args.l2;
  }

  ogl::LeastSquaresLoss loss(std::move(A), std::move(b));
  ogl::SolverOptions options;
  options.outer_tol = args.tol;
  options.gap_tol = args.gap_tol;
  options.max_outer = args.max_outer;
  options.max_inner = args.max_inner;

  Timer solve;
  const ogl::SolverResult result =
      ogl::foglasso_solve(loss, gs, {lambda1, lambda2}, options);
  const double solve_ms = solve.ms();

  write_solution(args.out, result.x);

  report["options"] = {{"matrix", args.matrix},   {"labels", args.labels},
                       {"groups", args.groups},   {"tol", args.tol},
                       {"gap_tol", args.gap_tol}, {"max_outer", args.max_outer},
                       {"max_inner", args.max_inner}, {"out", args.out}};
  if (args.rho) report["options"]["rho"] = *args.rho;
  report["lambda"] = {{"lambda1", lambda1},
                      {"lambda2", lambda2},
                      {"lambda1_max", l1max}};
  report["telemetry"] = telemetry_json(result);
  report["solution"] = solution_json(result.x, gs, result);
  report["timings_ms"] = {{"load", load_ms}, {"solve", solve_ms},
                          {"total", total.ms()}};
  write_report(args.report, report);
  return result.converged ? kExitOk : kExitNotConverged;
}

struct PathArgs {
  std::string matrix, labels, groups, report, out_dir = ".";
  std::vector<double> rho_grid;
  double tol = 1e-5, gap_tol = 1e-10;
  long max_outer = 10000, max_inner = 100000;
};

int run_path(const PathArgs& args) {
  Timer total;
  json report = base_report("path");

  Timer load;
  ogl::Matrix A = ogl::load_matrix_csv(args.matrix);
  ogl::Vector b = ogl::load_vector(args.labels);
  const ogl::GroupStructure gs =
      ogl::load_groups(args.groups, static_cast<int>(A.cols()));
  const double load_ms = load.ms();

  ogl::LeastSquaresLoss loss(std::move(A), std::move(b));
  ogl::SolverOptions options;
  options.outer_tol = args.tol;
  options.gap_tol = args.gap_tol;
  options.max_outer = args.max_outer;
  options.max_inner = args.max_inner;
  const std::vector<double> grid =
      args.rho_grid.empty() ? ogl::default_rho_grid() : args.rho_grid;

  Timer solve;
  const ogl::PathResult path = ogl::reg_path(loss, gs, grid, options);
  const double solve_ms = solve.ms();

  fs::create_directories(args.out_dir);
  json entries = json::array();
  bool all_converged = true;
  for (const auto& entry : path.entries) {
    json e;
    e["rho"] = entry.rho;
    e["lambda1"] = entry.lambda1;
    e["lambda2"] = entry.lambda2;
    if (entry.failed) {
      e["failed"] = true;
      e["error"] = entry.error;
      all_converged = false;
    } else {
      std::ostringstream name;
      name << "x_rho" << entry.rho << ".csv";
      const std::string solution_path =
          (fs::path(args.out_dir) / name.str()).string();
      write_solution(solution_path, entry.result.x);
      e["solution_file"] = solution_path;
      e["telemetry"] = telemetry_json(entry.result);
      e["solution"] = solution_json(entry.result.x, gs, entry.result);
      all_converged = all_converged && entry.result.converged;
    }
    entries.push_back(std::move(e));
  }

  report["options"] = {{"matrix", args.matrix}, {"labels", args.labels},
                       {"groups", args.groups}, {"out_dir", args.out_dir},
                       {"tol", args.tol},       {"gap_tol", args.gap_tol},
                       {"rho_grid", grid}};
  report["lambda1_max"] = path.lambda1_max;
  report["entries"] = std::move(entries);
  report["timings_ms"] = {{"load", load_ms}, {"solve", solve_ms},
                          {"total", total.ms()}};
  const std::string report_path =
      args.report.empty()
          ? (fs::path(args.out_dir) / "path_report.json").string()
          : args.report;
  write_report(report_path, report);
  return all_converged ? kExitOk : kExitNotConverged;
}

struct SynthArgs {
  std::string out;
  int p = 0, n = 100, g = 0, group_size = 0, overlap = 0;
  std::optional<int> active_groups;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

int run_synth(const SynthArgs& args) {
  ogl::SynthSpec spec;
  spec.p = args.p;
  spec.n = args.n;
  spec.g = args.g;
  spec.group_size = args.group_size;
  spec.overlap = args.overlap;
  spec.active_groups =
      args.active_groups ? *args.active_groups : std::max(1, args.g / 5);
  spec.noise_sigma = args.noise_sigma;
  spec.seed = args.seed;

  const ogl::SynthData data = ogl::synth_overlap_dataset(spec);
  fs::create_directories(args.out);
  ogl::write_matrix_csv((fs::path(args.out) / "A.csv").string(), data.data.A);
  ogl::write_vector((fs::path(args.out) / "b.txt").string(), data.data.b);
  ogl::write_groups((fs::path(args.out) / "groups.txt").string(), data.gs);
  ogl::write_vector((fs::path(args.out) / "xtrue.csv").string(), data.x_true);
  return kExitOk;
}

int run_eval(const std::string& pred_path, const std::string& labels_path) {
  const ogl::Vector pred = ogl::load_vector(pred_path);
  const ogl::Vector labels = ogl::load_vector(labels_path);
  const double ber = ogl::balanced_error_rate(pred, labels);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", ber);
  std::cout << buf << '\n';
  return kExitOk;
}

int run_stats(const std::string& groups_path, int p) {
  const ogl::GroupStructure gs = ogl::load_groups(groups_path, p);
  const ogl::GroupStats stats = ogl::group_stats(gs);
  json out;
  out["g"] = stats.g;
  out["p"] = stats.p;
  out["mean_group_size"] = stats.mean_group_size;
  out["max_group_size"] = stats.max_group_size;
  out["features_covered"] = stats.features_covered;
  out["mean_appearance_frequency"] = stats.mean_appearance_frequency;
  std::cout << out.dump(1) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  effective_threads();

  CLI::App app{"Overlapping group Lasso solver"};
  app.set_version_flag("--version", std::string(ogl::kVersion));
  app.require_subcommand(1);

  ProxArgs prox_args;
  auto* prox_cmd = app.add_subcommand(
      "prox", "Evaluate the penalized proximal operator of an input vector");
  prox_cmd->add_option("--input", prox_args.input, "Input vector CSV")->required();
  prox_cmd->add_option("--groups", prox_args.groups, "Group file")->required();
  prox_cmd->add_option("--l1", prox_args.l1, "l1 penalty weight")->required();
  prox_cmd->add_option("--l2", prox_args.l2, "group penalty weight")->required();
  prox_cmd->add_option("--gap-tol", prox_args.gap_tol, "Duality-gap tolerance");
  prox_cmd->add_option("--max-inner", prox_args.max_inner, "Inner iteration cap");
  prox_cmd->add_option("--report", prox_args.report, "Write a JSON report");
  prox_cmd->add_option("--out", prox_args.out,
                       "Solution CSV path (stdout when omitted)");

  SolveArgs solve_args;
  auto* solve_cmd =
      app.add_subcommand("solve", "Fit the penalized least-squares model");
  solve_cmd->add_option("--matrix", solve_args.matrix, "Design matrix CSV")->required();
  solve_cmd->add_option("--labels", solve_args.labels, "Response file, one value per line")->required();
  solve_cmd->add_option("--groups", solve_args.groups, "Group file")->required();
  double rho_value = 0.0, l1_value = 0.0, l2_value = 0.0;
  auto* rho_opt = solve_cmd->add_option(
      "--rho", rho_value, "Set lambda1 = lambda2 = rho * ||A^T b||_inf");
  auto* l1_opt = solve_cmd->add_option("--l1", l1_value, "Explicit l1 penalty");
  auto* l2_opt = solve_cmd->add_option("--l2", l2_value, "Explicit group penalty");
  rho_opt->excludes(l1_opt)->excludes(l2_opt);
  l1_opt->needs(l2_opt);
  l2_opt->needs(l1_opt);
  solve_cmd->add_option("--tol", solve_args.tol, "Relative objective-change tolerance");
  solve_cmd->add_option("--gap-tol", solve_args.gap_tol, "Inner duality-gap tolerance");
  solve_cmd->add_option("--max-outer", solve_args.max_outer, "Outer iteration cap");
  solve_cmd->add_option("--max-inner", solve_args.max_inner, "Inner iteration cap");
  solve_cmd->add_option("--report", solve_args.report, "Write a JSON report");
  solve_cmd->add_option("--out", solve_args.out, "Solution CSV path");

  PathArgs path_args;
  auto* path_cmd = app.add_subcommand(
      "path", "Fit a warm-started regularization path over a rho grid");
  path_cmd->add_option("--matrix", path_args.matrix, "Design matrix CSV")->required();
  path_cmd->add_option("--labels", path_args.labels, "Response file")->required();
  path_cmd->add_option("--groups", path_args.groups, "Group file")->required();
  path_cmd->add_option("--rho-grid", path_args.rho_grid,
                       "Comma-separated decreasing rho values")
      ->delimiter(',');
  path_cmd->add_option("--tol", path_args.tol, "Relative objective-change tolerance");
  path_cmd->add_option("--gap-tol", path_args.gap_tol, "Inner duality-gap tolerance");
  path_cmd->add_option("--max-outer", path_args.max_outer, "Outer iteration cap");
  path_cmd->add_option("--max-inner", path_args.max_inner, "Inner iteration cap");
  path_cmd->add_option("--out-dir", path_args.out_dir, "Output directory");
  path_cmd->add_option("--report", path_args.report, "Combined JSON report path");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a seeded synthetic overlapping-group dataset");
  synth_cmd->add_option("--p", synth_args.p, "Feature count")->required();
  synth_cmd->add_option("--n", synth_args.n, "Sample count");
  synth_cmd->add_option("--g", synth_args.g, "Group count")->required();
  synth_cmd->add_option("--group-size", synth_args.group_size, "Group size")->required();
  synth_cmd->add_option("--overlap", synth_args.overlap,
                        "Shared indices between consecutive groups")->required();
  int active_value = 0;
  auto* active_opt = synth_cmd->add_option("--active-groups", active_value,
                                           "Number of truly nonzero groups");
  synth_cmd->add_option("--noise-sigma", synth_args.noise_sigma, "Noise level");
  synth_cmd->add_option("--seed", synth_args.seed, "PRNG seed")->required();
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();

  std::string eval_pred, eval_labels;
  auto* eval_cmd =
      app.add_subcommand("eval", "Balanced error rate of +-1 predictions");
  eval_cmd->add_option("--pred", eval_pred, "Predictions file")->required();
  eval_cmd->add_option("--labels", eval_labels, "Labels file")->required();

  std::string stats_groups;
  int stats_p = 0;
  auto* stats_cmd = app.add_subcommand("stats", "Group structure statistics");
  stats_cmd->add_option("--groups", stats_groups, "Group file")->required();
  stats_cmd->add_option("--p", stats_p, "Feature count")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (rho_opt->count() > 0) solve_args.rho = rho_value;
  if (l1_opt->count() > 0) solve_args.l1 = l1_value;
  if (l2_opt->count() > 0) solve_args.l2 = l2_value;
  if (active_opt->count() > 0) synth_args.active_groups = active_value;

  try {
    if (*prox_cmd) return run_prox(prox_args);
    if (*solve_cmd) {
      if (!solve_args.rho && !(solve_args.l1 && solve_args.l2)) {
        std::cerr << "ogl solve: provide either --rho or both --l1 and --l2\n";
        return kExitInput;
      }
      return run_solve(solve_args);
    }
    if (*path_cmd) return run_path(path_args);
    if (*synth_cmd) return run_synth(synth_args);
    if (*eval_cmd) return run_eval(eval_pred, eval_labels);
    if (*stats_cmd) return run_stats(stats_groups, stats_p);
  } catch (const std::exception& e) {
    std::cerr << "ogl: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitInternal;
}
