#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <optional>

#include "dfot/error.hpp"
#include "dfot/experiments.hpp"
#include "dfot/io.hpp"
#include "dfot/verify.hpp"

namespace dfot {

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  a verification check failed\n"
    "  2  malformed or missing input\n"
    "  3  infeasible marginals (total masses differ)\n"
    "Environment: DFOT_SEED overrides the default seed (42).";

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("DFOT_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("DFOT_SEED is not an unsigned integer: ") + env);
  }
  return kDefaultSeed;
}

std::filesystem::path out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir) / name;
}

struct Inputs {
  std::string polytope;
  std::string mu;
  std::string nu;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool required = true) {
  auto* p = cmd->add_option("--polytope", in.polytope, "Polytope JSON {\"extreme_points\": [...]}");
  auto* m = cmd->add_option("--mu", in.mu, "Source measure JSON {\"points\", \"weights\"}");
  auto* n = cmd->add_option("--nu", in.nu, "Target measure JSON");
  if (required) {
    p->required();
    m->required();
    n->required();
  }
}

DFMode parse_mode(const std::string& s) { return s == "robust" ? DFMode::kRobust : DFMode::kOptimistic; }

std::vector<double> parse_times(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    std::size_t used = 0;
    double t = 0.0;
    try {
      t = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InvalidInput("bad time value '" + item + "'");
    out.push_back(t);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decision-focused optimal transport toolkit"};
  app.footer(kExitCodes);
  app.require_subcommand(1);

  // distance
  Inputs dist_in;
  std::string kind = "optimistic";
  std::string method = "auto";
  std::string mode = "optimistic";
  double epsilon = 0.0;
  std::string dist_out;
  std::string plan_csv;
  auto* distance = app.add_subcommand("distance", "Compute a decision-focused distance");
  add_inputs(distance, dist_in);
  distance->add_option("--kind", kind, "Distance kind")
      ->check(CLI::IsMember({"optimistic", "robust", "regret", "sym-add", "sym-js", "entropic"}));
  distance->add_option("--method", method, "Solver for the optimistic distance")
      ->check(CLI::IsMember({"auto", "direct", "reduction"}));
  distance->add_option("--mode", mode, "Coupling mode for sym-add, sym-js and entropic")
      ->check(CLI::IsMember({"optimistic", "robust"}));
  distance->add_option("--epsilon", epsilon, "Entropic regularization strength (> 0)");
  distance->add_option("--out", dist_out, "Write the result JSON here");
  distance->add_option("--plan-csv", plan_csv, "Write the coupling as i,j,mass triplets here");

  // interpolate
  Inputs interp_in;
  std::string coupling = "optimistic";
  std::vector<std::string> times{"0", "0.5", "1"};
  std::string interp_dir = ".";
  std::size_t bins = 64;
  auto* interpolate = app.add_subcommand("interpolate", "Write coupling-induced interpolants");
  add_inputs(interpolate, interp_in);
  interpolate->add_option("--coupling", coupling, "Coupling inducing the path")
      ->check(CLI::IsMember({"optimistic", "robust", "independent", "w2", "reduced-mccann"}));
  interpolate->add_option("--t", times, "Comma-separated times in [0, 1]")->delimiter(',');
  interpolate->add_option("--out-dir", interp_dir, "Directory for slice_t<t>.json and grid.csv");
  interpolate->add_option("--bins", bins, "Histogram bins per axis");

  // verify
  Inputs verify_in;
  std::vector<std::string> checks{"all"};
  std::string verify_plan;
  auto* verify = app.add_subcommand("verify", "Run the invariant checks on an instance");
  add_inputs(verify, verify_in);
  verify->add_option("--check", checks, "Checks to run: all, reduction, lift, duality, rescaling, "
                                        "bounds, one-sided, endpoints, mccann")
      ->delimiter(',');
  verify->add_option("--plan", verify_plan, "Plan CSV (i,j,mass) to test against the marginals");

  // newsvendor
  std::string nv_config;
  std::string nv_out;
  auto* newsvendor = app.add_subcommand("newsvendor", "Mixture-weight distance table");
  newsvendor->add_option("--config", nv_config, "Instance JSON (default: bundled three-type instance)");
  newsvendor->add_option("--out", nv_out, "Write the table CSV here (default: stdout)");

  // parkinsons
  std::string pk_data;
  std::string pk_dir = ".";
  auto* parkinsons = app.add_subcommand("parkinsons", "Telemonitoring cohort pipeline");
  parkinsons->add_option("--data", pk_data, "UCI telemonitoring CSV")->required();
  parkinsons->add_option("--out-dir", pk_dir, "Directory for the output tables");

  // sample-error
  Inputs se_in;
  std::string se_data;
  std::vector<std::size_t> n_grid{5, 10, 18, 35};
  std::size_t trials = 50;
  std::optional<std::uint64_t> seed_flag;
  std::size_t jobs = 1;
  bool no_robust = false;
  std::string se_out;
  auto* sample_error = app.add_subcommand("sample-error", "Subsampling estimation-error sweep");
  add_inputs(sample_error, se_in, /*required=*/false);
  sample_error->add_option("--data", se_data, "Telemonitoring CSV; uses the day-50/day-150 windows");
  sample_error->add_option("--n", n_grid, "Comma-separated sample sizes")->delimiter(',');
  sample_error->add_option("--trials", trials, "Trials per sample size");
  sample_error->add_option("--seed", seed_flag, "Random seed (default 42 or DFOT_SEED)");
  sample_error->add_option("--jobs", jobs, "Worker threads for trials");
  sample_error->add_flag("--no-robust", no_robust, "Skip the robust distance");
  sample_error->add_option("--out", se_out, "Write the table CSV here (default: stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*distance) {
      const FeasibleRegion region = load_region(dist_in.polytope);
      const DiscreteMeasure mu = load_measure(dist_in.mu);
      const DiscreteMeasure nu = load_measure(dist_in.nu);
      DFResult r;
      if (kind == "optimistic") {
        const auto m = method == "direct"      ? OptimisticMethod::kDirect
                       : method == "reduction" ? OptimisticMethod::kReduction
                                               : OptimisticMethod::kAuto;
        r = optimistic(region, mu, nu, m);
      } else if (kind == "robust") {
        r = robust(region, mu, nu);
      } else if (kind == "regret") {
        r.value = regret(region, mu, nu);
        r.coupling = Coupling::product(mu.weights(), nu.weights());
        r.method = DFMethod::kProduct;
      } else if (kind == "sym-add" || kind == "sym-js") {
        r.value = symmetric(region, mu, nu,
                            kind == "sym-add" ? SymmetricKind::kAdditive : SymmetricKind::kJensenShannon,
                            parse_mode(mode));
        r.method = DFMethod::kDirectLP;
      } else {
        if (!(epsilon > 0.0)) throw InvalidInput("--kind entropic needs --epsilon > 0");
        r = entropic_df(region, mu, nu, epsilon, parse_mode(mode));
        if (!r.entropic->converged) {
          err << "warning: Sinkhorn stopped after " << r.entropic->iterations
              << " iterations with marginal error " << format_double(r.entropic->marginal_error) << "\n";
        }
      }
      if (!dist_out.empty()) write_text_file(dist_out, df_result_to_json(r));
      if (!plan_csv.empty()) {
        if (r.coupling.rows() == 0) throw InvalidInput("--plan-csv is not available for symmetrized kinds");
        write_text_file(plan_csv, plan_to_csv(r.coupling));
      }
      out << format_double(r.value) << "\n";
      return kExitOk;
    }

    if (*interpolate) {
      const FeasibleRegion region = load_region(interp_in.polytope);
      const DiscreteMeasure mu = load_measure(interp_in.mu);
      const DiscreteMeasure nu = load_measure(interp_in.nu);
      const std::vector<double> ts = parse_times(times);
      if (ts.empty()) throw InvalidInput("--t needs at least one time");
      InterpolantPath path;
      if (coupling == "reduced-mccann") {
        const ReducedMcCann mc(region, mu, nu);
        path.coupling = mc.eta();
        path.times = ts;
        for (double t : ts) path.measures.push_back(mc.slice(t).nu_t);
      } else {
        const Coupling gamma = build_coupling(region, mu, nu, parse_coupling_kind(coupling));
        path = interpolant_path(gamma, mu, nu, ts);
      }
      for (std::size_t s = 0; s < ts.size(); ++s) {
        write_text_file(out_path(interp_dir, "slice_t" + format_double(ts[s]) + ".json").string(),
                        measure_to_json(path.measures[s]));
      }
      GridSpec grid;
      grid.bins = bins;
      const auto grid_path = out_path(interp_dir, "grid.csv");
      write_text_file(grid_path.string(), histogram_grid_csv(path, grid));
      out << ts.size() << "\n";
      return kExitOk;
    }

    if (*verify) {
      const FeasibleRegion region = load_region(verify_in.polytope);
      const DiscreteMeasure mu = load_measure(verify_in.mu);
      const DiscreteMeasure nu = load_measure(verify_in.nu);
      std::vector<CheckResult> results;
      if (!verify_plan.empty()) {
        const Coupling plan = parse_plan_csv(read_text_file(verify_plan), mu.size(), nu.size());
        results.push_back(check_plan_marginals(mu, nu, plan));
      }
      for (auto& r : run_checks(region, mu, nu, checks)) results.push_back(std::move(r));
      bool all = true;
      for (const auto& r : results) {
        out << (r.pass ? "PASS " : "FAIL ") << r.name << " " << r.detail << "\n";
        all = all && r.pass;
      }
      return all ? kExitOk : kExitCheckFailed;
    }

    if (*newsvendor) {
      const NewsvendorInstance inst =
          nv_config.empty() ? default_newsvendor() : parse_newsvendor(read_text_file(nv_config));
      const std::size_t k = inst.pmfs.size();
      const Vector lambda0 = Vector::Constant(static_cast<Eigen::Index>(k), 1.0 / static_cast<double>(k));
      if (k != 3) throw InvalidInput("the mixture table needs exactly three customer types");
      const std::string csv = mixture_table_csv(mixture_table(inst, default_lambdas(), lambda0)).to_csv();
      if (nv_out.empty()) {
        out << csv;
      } else {
        write_text_file(nv_out, csv);
      }
      return kExitOk;
    }

    if (*parkinsons) {
      const TelemonitoringData data = parse_telemonitoring_csv(read_text_file(pk_data));
      const ParkinsonsReport rep = parkinsons_pipeline(data);
      write_text_file(out_path(pk_dir, "windows.csv").string(), window_table(rep).to_csv());
      write_text_file(out_path(pk_dir, "distances.csv").string(), distance_table(rep).to_csv());
      write_text_file(out_path(pk_dir, "tracked_summary.csv").string(), tracked_summary_table(rep).to_csv());
      write_text_file(out_path(pk_dir, "tracked_losses.csv").string(), tracked_loss_table(rep).to_csv());
      write_text_file(out_path(pk_dir, "epsilon_sweep.csv").string(), epsilon_table(rep).to_csv());
      out << format_double(rep.w_dfo) << "\n";
      return kExitOk;
    }

    if (*sample_error) {
      SampleErrorOptions opts;
      opts.n_grid = n_grid;
      opts.trials = trials;
      opts.seed = resolve_seed(seed_flag);
      opts.jobs = jobs;
      opts.include_robust = !no_robust;
      SampleErrorSweep sweep;
      if (!se_data.empty()) {
        const TelemonitoringData data = parse_telemonitoring_csv(read_text_file(se_data));
        const ParkinsonsOptions po;
        const CohortWindow a = build_window(data, po.start, po.half_width);
        const CohortWindow b = build_window(data, po.end, po.half_width);
        sweep = sample_error_sweep(care_plan_region(), a.cost_measure(), b.cost_measure(), opts);
      } else if (!se_in.polytope.empty() || !se_in.mu.empty() || !se_in.nu.empty()) {
        if (se_in.polytope.empty() || se_in.mu.empty() || se_in.nu.empty()) {
          throw InvalidInput("--polytope, --mu and --nu must be given together");
        }
        sweep = sample_error_sweep(load_region(se_in.polytope), load_measure(se_in.mu),
                                   load_measure(se_in.nu), opts);
      } else {
        const SyntheticReferences ref = synthetic_references(opts.seed);
        sweep = sample_error_sweep(ref.region, ref.mu, ref.nu, opts);
      }
      const std::string csv = sample_error_csv(sweep).to_csv();
      if (se_out.empty()) {
        out << csv;
      } else {
        write_text_file(se_out, csv);
      }
      return kExitOk;
    }
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}

}  // namespace dfot
