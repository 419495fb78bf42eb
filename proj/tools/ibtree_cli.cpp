// Command-line front end for the information-optimal quadtree library.
//
//   ibtree search    --env FILE --beta B
//   ibtree sweep     --env FILE [--beta-min B0] [--beta-max B1] [--steps N]
//   ibtree phases    --env FILE
//   ibtree dual      --env FILE --D D [--epsilon E]
//   ibtree gap       --env FILE [--steps N]
//   ibtree dualshape --env FILE (--D D | --D-ratio R) [--beta-min B0] [--beta-max B1] [--steps N]
//   ibtree ilp       --env FILE --D D [--mps FILE]
//   ibtree render    --env FILE --tree FILE [--cell-px N]
//
// Exit codes: 0 ok, 2 unreadable or malformed input, 3 bad usage, 4 request
// outside the problem's domain.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ibtree/dual.hpp"
#include "ibtree/environment.hpp"
#include "ibtree/error.hpp"
#include "ibtree/ilp.hpp"
#include "ibtree/information.hpp"
#include "ibtree/phase_transitions.hpp"
#include "ibtree/qsearch.hpp"
#include "ibtree/render.hpp"
#include "json.hpp"

namespace {

using ibtree::Environment;
using ibtree::InfoIncrements;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 3;
constexpr int kExitDomain = 4;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string env_path;
  std::string format;
  std::string prior_path;
  std::string output_path;
  std::string tree_path;
  std::string mps_path;
  std::optional<double> beta;
  std::optional<double> D;
  std::optional<double> D_ratio;
  std::optional<double> beta_min;
  std::optional<double> beta_max;
  std::optional<double> epsilon;
  int steps = 0;
  int cell_px = 8;
};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// JSON number carrying 9 significant digits.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt(v));
}

Environment load(const RunConfig& cfg) {
  const std::filesystem::path path(cfg.env_path);
  ibtree::EnvFormat format;
  if (cfg.format.empty()) {
    try {
      format = ibtree::format_from_extension(path);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string(e.what()) + "; pass --format");
    }
  } else if (cfg.format == "pgm") {
    format = ibtree::EnvFormat::kPgm;
  } else if (cfg.format == "csv") {
    format = ibtree::EnvFormat::kCsv;
  } else {
    throw UsageError("--format must be pgm or csv");
  }
  std::optional<std::filesystem::path> prior;
  if (!cfg.prior_path.empty()) prior = cfg.prior_path;
  return ibtree::load_environment(path, format, prior);
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output_path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw ibtree::FormatError("cannot write " + cfg.output_path);
  out << text;
  if (!out) throw ibtree::FormatError("failed writing " + cfg.output_path);
}

std::vector<double> linear_grid(double lo, double hi, int steps) {
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    grid[static_cast<std::size_t>(i)] = i == steps ? hi : lo + (hi - lo) * i / steps;
  }
  return grid;
}

double default_beta_max(const ibtree::PhaseTransitionSet& pts) {
  return pts.empty() ? 10.0 : 1.25 * pts.betas.back();
}

void require_non_negative(const std::optional<double>& v, const char* flag) {
  if (v && !(*v >= 0.0 && std::isfinite(*v))) throw UsageError(std::string(flag) + " must be a finite value >= 0");
}

int cmd_search(const RunConfig& cfg) {
  require_non_negative(cfg.beta, "--beta");
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const ibtree::TreeSelection sel = ibtree::qtree_search(inc, *cfg.beta);
  const ibtree::TreeInformation info = ibtree::tree_information(sel, inc);
  emit(cfg, ibtree::selection_to_json(sel, env.ell()) + "\n");
  std::cerr << "I_X=" << fmt(info.ix) << " I_Y=" << fmt(info.iy)
            << " objective=" << fmt(info.ix - *cfg.beta * info.iy) << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  require_non_negative(cfg.beta_min, "--beta-min");
  require_non_negative(cfg.beta_max, "--beta-max");
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const double lo = cfg.beta_min.value_or(0.0);
  const double hi = cfg.beta_max ? *cfg.beta_max : default_beta_max(ibtree::tree_phase_transitions(inc));
  if (hi < lo) throw UsageError("--beta-max must not be below --beta-min");
  const auto grid = linear_grid(lo, hi, cfg.steps > 0 ? cfg.steps : 100);
  emit(cfg, ibtree::sweep_to_csv(ibtree::beta_sweep(inc, grid)));
  return kExitOk;
}

int cmd_phases(const RunConfig& cfg) {
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  emit(cfg, ibtree::phases_to_csv(ibtree::tree_phase_transitions(inc)));
  return kExitOk;
}

int cmd_dual(const RunConfig& cfg) {
  require_non_negative(cfg.D, "--D");
  if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const ibtree::PhaseTransitionSet pts = ibtree::tree_phase_transitions(inc);
  const ibtree::DualSolution sol = ibtree::solve_dual(pts, ibtree::checked_information_level(*cfg.D, inc.total_relevant_information()));
  const ibtree::RecoveredTree rec = ibtree::recover_primal_feasible(inc, pts, sol.D, cfg.epsilon.value_or(0.0));
  const ibtree::TreeInformation info = ibtree::tree_information(rec.tree, inc);

  ordered_json out;
  out["D"] = num(sol.D);
  out["beta_star"] = num(sol.beta_star);
  out["d_star"] = num(sol.d_star);
  out["j_star"] = sol.j_star;
  out["strong_duality"] = ibtree::strong_duality_holds(pts, sol.D);
  out["recovered_tree"] = ordered_json::parse(ibtree::selection_to_json(rec.tree, env.ell()));
  out["recovered_beta"] = num(rec.beta);
  out["recovered_I_X"] = num(info.ix);
  out["recovered_I_Y"] = num(info.iy);
  out["suboptimality_bound"] = num(rec.bound);
  emit(cfg, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_gap(const RunConfig& cfg) {
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const double total = inc.total_relevant_information();
  if (!(total > 0.0)) throw ibtree::InfeasibleError("I(X;Y) = 0: the D grid is degenerate");
  const ibtree::PhaseTransitionSet pts = ibtree::tree_phase_transitions(inc);
  std::optional<ibtree::PrimalEnumerator> primal;
  if (env.ell() <= 3) primal.emplace(inc);

  std::string csv = "D,v,d_star,gap\n";
  for (double D : linear_grid(0.0, total, cfg.steps > 0 ? cfg.steps : 50)) {
    const ibtree::GapReport r = ibtree::duality_gap(inc, pts, primal ? &*primal : nullptr, D);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    csv += fmt(r.D) + "," + fmt(r.v.value_or(nan)) + "," + fmt(r.d_star) + "," + fmt(r.gap.value_or(nan)) + "\n";
  }
  emit(cfg, csv);
  return kExitOk;
}

int cmd_dualshape(const RunConfig& cfg) {
  if (cfg.D.has_value() == cfg.D_ratio.has_value()) throw UsageError("dualshape needs exactly one of --D and --D-ratio");
  require_non_negative(cfg.D, "--D");
  require_non_negative(cfg.D_ratio, "--D-ratio");
  require_non_negative(cfg.beta_min, "--beta-min");
  require_non_negative(cfg.beta_max, "--beta-max");
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const ibtree::PhaseTransitionSet pts = ibtree::tree_phase_transitions(inc);
  const double total = inc.total_relevant_information();
  const double D = ibtree::checked_information_level(cfg.D ? *cfg.D : *cfg.D_ratio * total, total);
  const double lo = cfg.beta_min.value_or(0.0);
  const double hi = cfg.beta_max.value_or(default_beta_max(pts));
  if (hi < lo) throw UsageError("--beta-max must not be below --beta-min");

  std::string csv = "# D=" + fmt(D) + " I(X;Y)=" + fmt(total) + "\n# transitions:";
  for (double b : pts.betas) csv += " " + fmt(b);
  csv += "\nbeta,d_q_method,d_pt_method\n";
  for (double beta : linear_grid(lo, hi, cfg.steps > 0 ? cfg.steps : 100)) {
    csv += fmt(beta) + "," + fmt(ibtree::dual_function(inc, beta, D)) + "," +
           fmt(ibtree::dual_value_from_pts(pts, D, beta)) + "\n";
  }
  emit(cfg, csv);
  return kExitOk;
}

int cmd_ilp(const RunConfig& cfg) {
  require_non_negative(cfg.D, "--D");
  const Environment env = load(cfg);
  const InfoIncrements inc = ibtree::compute_increments(env);
  const double D = ibtree::checked_information_level(*cfg.D, inc.total_relevant_information());
  const ibtree::IlpModel model = ibtree::build_ilp(inc, D);
  if (!cfg.mps_path.empty()) {
    std::ofstream mps(cfg.mps_path, std::ios::binary);
    if (!mps) throw ibtree::FormatError("cannot write " + cfg.mps_path);
    mps << ibtree::ilp_to_mps(model);
  }

  ordered_json out;
  out["D"] = num(D);
  out["num_vars"] = model.num_vars();
  out["hierarchy_rows"] = model.hierarchy_rows.size();
  const ibtree::LpSolution lp = ibtree::solve_lp_relaxation(model);
  ordered_json lpj;
  lpj["status"] = ibtree::to_string(lp.status);
  if (lp.status == ibtree::LpStatus::kOptimal) {
    lpj["objective"] = num(lp.objective);
    lpj["dual_beta"] = num(lp.dual_beta);
    ordered_json z = ordered_json::array();
    for (Eigen::Index i = 0; i < lp.z.size(); ++i) z.push_back(num(lp.z(i)));
    lpj["z"] = z;
  }
  out["lp_relaxation"] = lpj;
  if (model.ell <= 3) {
    const ibtree::IlpSolution ilp = ibtree::solve_ilp_bruteforce(model);
    ordered_json ij;
    ij["v"] = num(ilp.value);
    ij["tree"] = ordered_json::parse(ibtree::selection_to_json(ilp.tree, model.ell));
    out["ilp"] = ij;
  }
  const ibtree::TuCheckResult tu = ibtree::tu_check(model.hierarchy_matrix(), ibtree::TuCheckMode::sampled(10000));
  out["structural_witness"] = tu.structural_witness;
  out["sampled_unimodular"] = tu.totally_unimodular;
  emit(cfg, out.dump(2) + "\n");
  return kExitOk;
}

int cmd_render(const RunConfig& cfg) {
  if (cfg.cell_px <= 0) throw UsageError("--cell-px must be positive");
  const Environment env = load(cfg);
  std::ifstream in(cfg.tree_path, std::ios::binary);
  if (!in) throw ibtree::FormatError("cannot open " + cfg.tree_path);
  std::stringstream text;
  text << in.rdbuf();
  int ell = 0;
  const ibtree::TreeSelection sel = ibtree::selection_from_json(text.str(), &ell);
  if (ell != env.ell()) {
    throw ibtree::InfeasibleError("tree depth " + std::to_string(ell) + " does not match environment depth " +
                                  std::to_string(env.ell()));
  }
  if (!ibtree::validate_selection(sel, ell)) throw ibtree::InfeasibleError("tree violates the hierarchy");
  emit(cfg, ibtree::render_svg(sel, ibtree::compute_increments(env), cfg.cell_px));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-optimal quadtree abstractions of grid environments"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_env = [&](CLI::App* sub) {
    sub->add_option("--env", cfg.env_path, "Environment file (.pgm or .csv)")->required();
    sub->add_option("--format", cfg.format, "pgm or csv (default: from the extension)");
    sub->add_option("--prior", cfg.prior_path, "CSV prior of the same shape (default: uniform)");
    sub->add_option("--out", cfg.output_path, "Output file (default: stdout)");
  };

  CLI::App* search = app.add_subcommand("search", "Q-tree search at one beta; tree JSON");
  add_env(search);
  search->add_option("--beta", cfg.beta, "Trade-off parameter")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Q-tree search over a beta grid; CSV");
  add_env(sweep);
  sweep->add_option("--beta-min", cfg.beta_min);
  sweep->add_option("--beta-max", cfg.beta_max);
  sweep->add_option("--steps", cfg.steps, "Grid intervals (default 100)");

  CLI::App* phases = app.add_subcommand("phases", "Tree phase transitions; CSV");
  add_env(phases);

  CLI::App* dual = app.add_subcommand("dual", "Dual optimum and a recovered feasible tree; JSON");
  add_env(dual);
  dual->add_option("--D", cfg.D, "Required relevant information (bits)")->required();
  dual->add_option("--epsilon", cfg.epsilon, "Step past the optimal beta used for recovery");

  CLI::App* gap = app.add_subcommand("gap", "Duality gap over a D grid; CSV");
  add_env(gap);
  gap->add_option("--steps", cfg.steps, "Grid intervals (default 50)");

  CLI::App* dualshape = app.add_subcommand("dualshape", "Dual function two ways over a beta grid; CSV");
  add_env(dualshape);
  dualshape->add_option("--D", cfg.D);
  dualshape->add_option("--D-ratio", cfg.D_ratio, "D as a fraction of I(X;Y)");
  dualshape->add_option("--beta-min", cfg.beta_min);
  dualshape->add_option("--beta-max", cfg.beta_max);
  dualshape->add_option("--steps", cfg.steps, "Grid intervals (default 100)");

  CLI::App* ilp = app.add_subcommand("ilp", "Integer program, LP relaxation and checks; JSON");
  add_env(ilp);
  ilp->add_option("--D", cfg.D)->required();
  ilp->add_option("--mps", cfg.mps_path, "Also write the model as MPS-like text");

  CLI::App* render = app.add_subcommand("render", "SVG of a tree's leaves");
  add_env(render);
  render->add_option("--tree", cfg.tree_path, "Tree JSON")->required();
  render->add_option("--cell-px", cfg.cell_px, "Pixels per finest cell (default 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(search)) return cmd_search(cfg);
    if (app.got_subcommand(sweep)) return cmd_sweep(cfg);
    if (app.got_subcommand(phases)) return cmd_phases(cfg);
    if (app.got_subcommand(dual)) return cmd_dual(cfg);
    if (app.got_subcommand(gap)) return cmd_gap(cfg);
    if (app.got_subcommand(dualshape)) return cmd_dualshape(cfg);
    if (app.got_subcommand(ilp)) return cmd_ilp(cfg);
    if (app.got_subcommand(render)) return cmd_render(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ibtree::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ibtree::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
