#include "ebshrink/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebshrink/config.hpp"
#include "ebshrink/csv.hpp"
#include "ebshrink/diagnostics.hpp"
#include "ebshrink/errors.hpp"
#include "ebshrink/estimators.hpp"
#include "ebshrink/hyperfit.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/service.hpp"
#include "ebshrink/simlab.hpp"
#include "ebshrink/store.hpp"

namespace ebshrink {

namespace {

constexpr const char* kStoreEnvVar = "EBSHRINK_STORE";

// Collects a subcommand's table before anything is emitted, so a failure
// never leaves a partial table behind.
class OutputBuffer {
 public:
  explicit OutputBuffer(std::ostream& fallback) : fallback_(fallback) {}

  std::ostream& stream() { return buffer_; }

  void set_path(std::string path) { path_ = std::move(path); }

  void flush() {
    if (path_.empty()) {
      fallback_ << buffer_.str();
      fallback_.flush();
      return;
    }
    std::ofstream out(path_, std::ios::binary);
    if (!out) throw NotFoundError("cannot open output file: " + path_);
    out << buffer_.str();
  }

 private:
  std::ostream& fallback_;
  std::ostringstream buffer_;
  std::string path_;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string item = comma == std::string::npos
                                 ? text.substr(start)
                                 : text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad grid value: '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string item = comma == std::string::npos
                                 ? text.substr(start)
                                 : text.substr(start, comma - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad seed value: '" + item + "'");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct StoreRef {
  std::string path;

  const std::string& require() const {
    if (path.empty()) {
      throw ConfigError(std::string("no store path; pass --store or set $") +
                        kStoreEnvVar);
    }
    return path;
  }
};

void add_store_option(CLI::App* cmd, StoreRef& ref) {
  cmd->add_option("--store", ref.path, "hyperparameter store JSON path")
      ->envname(kStoreEnvVar);
}

// Shifts a ratio-convention experiment onto the centered scale the prior
// mean targets, and a posterior back onto the ratio scale.
ExperimentSummary center_for_analysis(const ExperimentSummary& exp,
                                      Convention convention) {
  if (convention == Convention::kRatioMinusOne) return exp;
  ExperimentSummary centered = exp;
  centered.theta_hat -= 1.0;
  return centered;
}

PosteriorSummary uncenter(PosteriorSummary post, Convention convention) {
  if (convention == Convention::kRatio) {
    post.mean += 1.0;
    post.interval_lo += 1.0;
    post.interval_hi += 1.0;
  }
  return post;
}

Convention convention_from_string(const std::string& name) {
  if (name == "ratio") return Convention::kRatio;
  if (name == "ratio_minus_one") return Convention::kRatioMinusOne;
  throw ConfigError("unknown convention: " + name);
}

int run_fit_tau(const std::string& input, const StoreRef& store,
                const std::string& ns, double m0, double a, double b,
                std::optional<double> tau_max, bool tau_floor,
                std::string source, OutputBuffer& out) {
  const auto curated = parse_curated(input);
  double tau_star = fit_tau(curated, tau_max);
  if (tau_star == 0.0) {
    if (!tau_floor) {
      throw ConfigError(
          "fit-tau: tau* is 0 (all shrinkage would collapse to m0); "
          "re-run with --tau-floor to store the 1e-12 floor instead");
    }
    tau_star = 1e-12;
  }
  StoredHyper entry;
  entry.hyper = {m0, tau_star, a, b};
  entry.fitted_at = iso8601_utc_now();
  entry.source = source.empty() ? "fit-tau " + input : std::move(source);
  store_hyperparams(store.require(), ns, entry);

  out.stream() << "namespace,tau_star,n_observations\n"
               << ns << ',' << format_double(tau_star) << ','
               << curated.size() << '\n';
  return 0;
}

int run_adjust(const std::string& input, const StoreRef& store,
               const std::string& ns, double level,
               const std::string& estimator_name,
               const std::string& convention_name, OutputBuffer& out) {
  const auto exps = parse_experiments(input);
  if (exps.empty()) throw InvalidInput("adjust: no experiments in " + input);
  const HyperParameters hyper = load_hyperparams(store.require(), ns);
  const Convention convention = convention_from_string(convention_name);

  std::vector<Estimator> wanted;
  if (estimator_name == "all") {
    wanted = {Estimator::kFaceValue, Estimator::kGlobal, Estimator::kHybrid};
  } else {
    wanted = {estimator_from_string(estimator_name)};
  }

  const double z = normal_quantile(0.5 + 0.5 * level);
  std::vector<PosteriorRow> rows;
  rows.reserve(exps.size() * wanted.size());
  for (const ExperimentSummary& exp : exps) {
    const ExperimentSummary centered = center_for_analysis(exp, convention);
    for (Estimator est : wanted) {
      PosteriorRow row;
      row.id = exp.id;
      row.estimator = est;
      if (est == Estimator::kFaceValue) {
        row.mean = exp.theta_hat;
        row.variance = exp.sigma_hat * exp.sigma_hat;
        row.interval_lo = exp.theta_hat - z * exp.sigma_hat;
        row.interval_hi = exp.theta_hat + z * exp.sigma_hat;
      } else {
        const PosteriorSummary post = uncenter(
            est == Estimator::kGlobal ? global_posterior(centered, hyper, level)
                                      : hybrid_posterior(centered, hyper, level),
            convention);
        row.mean = post.mean;
        row.variance = post.variance;
        row.lambda_used = post.lambda_used;
        row.interval_lo = post.interval_lo;
        row.interval_hi = post.interval_hi;
      }
      rows.push_back(std::move(row));
    }
  }
  write_posterior_table(out.stream(), rows);
  return 0;
}

int run_aggregate(const std::string& input, const std::string& estimator_name,
                  double level, OutputBuffer& out) {
  const Estimator wanted = estimator_from_string(estimator_name);
  const auto table = parse_posterior_table(input);
  std::vector<PosteriorSummary> posteriors;
  for (const PosteriorRow& row : table) {
    if (row.estimator != wanted) continue;
    PosteriorSummary p;
    p.mean = row.mean;
    p.variance = row.variance;
    posteriors.push_back(p);
  }
  if (posteriors.empty()) {
    throw InvalidInput("aggregate: no rows for estimator " + estimator_name);
  }
  const AggregateEstimate agg = aggregate(posteriors, level);
  out.stream() << "estimator,n_experiments,mean,variance,interval_level,"
                  "interval_lo,interval_hi\n"
               << estimator_name << ',' << agg.n_experiments << ','
               << format_double(agg.mean) << ',' << format_double(agg.variance)
               << ',' << format_double(agg.interval_level) << ','
               << format_double(agg.interval_lo) << ','
               << format_double(agg.interval_hi) << '\n';
  return 0;
}

int run_simulate(const std::string& config_path, bool unconditional,
                 std::optional<std::uint64_t> seed,
                 std::optional<double> selection_z, unsigned threads,
                 OutputBuffer& out) {
  ScenarioConfig cfg = parse_scenario_file(config_path);
  if (seed) cfg.seed = *seed;
  if (selection_z) cfg.selection_multiplier = *selection_z;
  cfg.validate();

  const auto records = generate_scenario(cfg, threads);
  const auto triples = run_estimators(records, cfg, threads);
  const auto metrics = compute_metrics(records, triples, !unconditional);
  if (!metrics) {
    throw AbsentMetrics("simulate: no records selected; nothing to report");
  }
  write_metrics_table(out.stream(), *metrics);
  return 0;
}

int run_sweep_cmd(const std::string& config_path, const std::string& axis_name,
                  const std::string& grid_text, const std::string& seeds_text,
                  bool unconditional, std::optional<double> selection_z,
                  unsigned threads, OutputBuffer& out) {
  ScenarioConfig base = parse_scenario_file(config_path);
  if (selection_z) base.selection_multiplier = *selection_z;
  const SweepAxis axis = axis_from_string(axis_name);
  const auto grid = parse_grid(grid_text);
  const auto seeds = parse_seeds(seeds_text);
  const auto rows = run_sweep(base, axis, grid, seeds, !unconditional, threads);
  write_sweep_table(out.stream(), rows);
  return 0;
}

int run_check(const std::string& input, const StoreRef& store,
              const std::string& ns, const std::string& estimator_name,
              const std::string& statistic_name, std::size_t n_replicates,
              std::uint64_t seed, OutputBuffer& out) {
  const auto exps = parse_experiments(input);
  const HyperParameters hyper = load_hyperparams(store.require(), ns);
  const Estimator estimator = estimator_from_string(estimator_name);

  CheckStatistic statistic;
  if (statistic_name == "mean") {
    statistic = CheckStatistic::kMean;
  } else if (statistic_name == "max") {
    statistic = CheckStatistic::kMax;
  } else if (statistic_name == "sd") {
    statistic = CheckStatistic::kSd;
  } else {
    throw ConfigError("unknown statistic: " + statistic_name);
  }

  const ReplicateMatrix replicates =
      posterior_predictive_replicate(exps, hyper, estimator, n_replicates, seed);
  const CheckReport report =
      tail_area_probability(exps, replicates, statistic);

  out.stream() << "{\"statistic_name\":\"" << report.statistic_name
               << "\",\"observed\":" << format_double(report.observed)
               << ",\"tail_area_p\":" << format_double(report.tail_area_p)
               << ",\"n_replicates\":" << report.n_replicates << "}\n";
  return 0;
}

int run_replicate_eval(const std::string& input, const StoreRef& store,
                       const std::string& ns, OutputBuffer& out) {
  const auto pairs = parse_pairs(input);
  const HyperParameters hyper = load_hyperparams(store.require(), ns);
  const ReplicationMae mae = evaluate_replication_pairs(pairs, hyper);
  out.stream() << "estimator,mae,n_pairs\n"
               << "face_value," << format_double(mae.face_value) << ','
               << mae.n_pairs << '\n'
               << "global," << format_double(mae.global_shrink) << ','
               << mae.n_pairs << '\n'
               << "hybrid," << format_double(mae.hybrid) << ',' << mae.n_pairs
               << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Empirical-Bayes shrinkage toolkit for A/B experiment collections"};
  app.require_subcommand(1);

  // fit-tau
  auto* fit = app.add_subcommand(
      "fit-tau", "fit the global prior variance from a curated CSV");
  std::string fit_input, fit_ns, fit_source;
  StoreRef fit_store;
  double fit_m0 = 0.0, fit_a = 1.0, fit_b = 1.0;
  std::optional<double> fit_tau_max;
  bool fit_floor = false;
  std::string fit_output;
  fit->add_option("--input", fit_input, "curated CSV (id,eta_hat,gamma)")
      ->required();
  add_store_option(fit, fit_store);
  fit->add_option("--namespace", fit_ns, "store namespace")->required();
  fit->add_option("--m0", fit_m0, "prior mean to store");
  fit->add_option("--a", fit_a, "inverse-gamma hyperparameter a");
  fit->add_option("--b", fit_b, "inverse-gamma hyperparameter b");
  fit->add_option("--tau-max", fit_tau_max, "upper bound of the tau search");
  fit->add_flag("--tau-floor", fit_floor,
                "store the 1e-12 floor when the fit lands on tau* = 0");
  fit->add_option("--source", fit_source, "source description to store");
  fit->add_option("--output", fit_output, "write the result table to a file");

  // adjust
  auto* adjust = app.add_subcommand(
      "adjust", "per-experiment posterior table from an experiment CSV");
  std::string adj_input, adj_ns, adj_estimator = "all";
  std::string adj_convention = "ratio_minus_one", adj_output;
  StoreRef adj_store;
  double adj_level = 0.9;
  adjust->add_option("--input", adj_input, "experiment CSV")->required();
  add_store_option(adjust, adj_store);
  adjust->add_option("--namespace", adj_ns, "store namespace")->required();
  adjust->add_option("--level", adj_level, "credible interval level");
  adjust
      ->add_option("--estimator", adj_estimator,
                   "face_value, global, hybrid, or all")
      ->check(CLI::IsMember({"face_value", "global", "hybrid", "all"}));
  adjust
      ->add_option("--convention", adj_convention,
                   "scale of theta_hat inputs: ratio or ratio_minus_one")
      ->check(CLI::IsMember({"ratio", "ratio_minus_one"}));
  adjust->add_option("--output", adj_output, "write the table to a file");

  // aggregate
  auto* agg = app.add_subcommand(
      "aggregate", "aggregate interval from a posterior table");
  std::string agg_input, agg_estimator, agg_output;
  double agg_level = 0.9;
  agg->add_option("--input", agg_input, "posterior table CSV")->required();
  agg->add_option("--estimator", agg_estimator,
                  "face_value, global, or hybrid")
      ->required()
      ->check(CLI::IsMember({"face_value", "global", "hybrid"}));
  agg->add_option("--level", agg_level, "interval level");
  agg->add_option("--output", agg_output, "write the table to a file");

  // simulate
  auto* sim = app.add_subcommand(
      "simulate", "run one scenario and report per-estimator metrics");
  std::string sim_config, sim_output;
  bool sim_unconditional = false;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_selection_z;
  unsigned sim_threads = 0;
  sim->add_option("--config", sim_config, "scenario config file")->required();
  sim->add_flag("--unconditional", sim_unconditional,
                "metrics over all records instead of the selected subset");
  sim->add_option("--seed", sim_seed, "override the config seed");
  sim->add_option("--selection-z", sim_selection_z,
                  "override the selection multiplier");
  sim->add_option("--threads", sim_threads, "worker threads (0 = auto)");
  sim->add_option("--output", sim_output, "write the table to a file");

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "grid sweep over one scenario axis, one run per (value, seed)");
  std::string sweep_config, sweep_axis, sweep_grid, sweep_seeds, sweep_output;
  bool sweep_unconditional = false;
  std::optional<double> sweep_selection_z;
  unsigned sweep_threads = 0;
  sweep->add_option("--config", sweep_config, "base scenario config file")
      ->required();
  sweep->add_option("--axis", sweep_axis, "sigma, mu, nu, or rho")->required();
  sweep->add_option("--grid", sweep_grid, "comma-separated axis values")
      ->required();
  sweep->add_option("--seeds", sweep_seeds, "comma-separated seeds")
      ->required();
  sweep->add_flag("--unconditional", sweep_unconditional,
                  "metrics over all records instead of the selected subset");
  sweep->add_option("--selection-z", sweep_selection_z,
                    "override the selection multiplier");
  sweep->add_option("--threads", sweep_threads, "worker threads (0 = auto)");
  sweep->add_option("--output", sweep_output, "write the table to a file");

  // check
  auto* check = app.add_subcommand(
      "check", "posterior-predictive goodness-of-fit report (JSON)");
  std::string check_input, check_ns, check_estimator = "hybrid";
  std::string check_statistic = "mean", check_output;
  StoreRef check_store;
  std::size_t check_replicates = 1000;
  std::uint64_t check_seed = 0;
  check->add_option("--input", check_input, "experiment CSV")->required();
  add_store_option(check, check_store);
  check->add_option("--namespace", check_ns, "store namespace")->required();
  check->add_option("--estimator", check_estimator, "global or hybrid")
      ->check(CLI::IsMember({"global", "hybrid"}));
  check->add_option("--statistic", check_statistic, "mean, max, or sd")
      ->check(CLI::IsMember({"mean", "max", "sd"}));
  check->add_option("--replicates", check_replicates, "number of replicates");
  check->add_option("--seed", check_seed, "replicate RNG seed");
  check->add_option("--output", check_output, "write the report to a file");

  // replicate-eval
  auto* repl = app.add_subcommand(
      "replicate-eval", "MAE per estimator over replication pairs");
  std::string repl_input, repl_ns, repl_output;
  StoreRef repl_store;
  repl->add_option("--input", repl_input, "pair CSV")->required();
  add_store_option(repl, repl_store);
  repl->add_option("--namespace", repl_ns, "store namespace")->required();
  repl->add_option("--output", repl_output, "write the table to a file");

  // serve
  auto* serve = app.add_subcommand(
      "serve", "start the HTTP adjustment service");
  StoreRef serve_store;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  unsigned serve_reload = 60;
  add_store_option(serve, serve_store);
  serve->add_option("--host", serve_host, "bind address");
  serve->add_option("--port", serve_port, "bind port");
  serve->add_option("--reload-interval", serve_reload,
                    "store reload interval in seconds (0 disables)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    OutputBuffer buffer(out);
    int status = 0;
    if (fit->parsed()) {
      buffer.set_path(fit_output);
      status = run_fit_tau(fit_input, fit_store, fit_ns, fit_m0, fit_a, fit_b,
                           fit_tau_max, fit_floor, fit_source, buffer);
    } else if (adjust->parsed()) {
      buffer.set_path(adj_output);
      status = run_adjust(adj_input, adj_store, adj_ns, adj_level,
                          adj_estimator, adj_convention, buffer);
    } else if (agg->parsed()) {
      buffer.set_path(agg_output);
      status = run_aggregate(agg_input, agg_estimator, agg_level, buffer);
    } else if (sim->parsed()) {
      buffer.set_path(sim_output);
      status = run_simulate(sim_config, sim_unconditional, sim_seed,
                            sim_selection_z, sim_threads, buffer);
    } else if (sweep->parsed()) {
      buffer.set_path(sweep_output);
      status = run_sweep_cmd(sweep_config, sweep_axis, sweep_grid, sweep_seeds,
                             sweep_unconditional, sweep_selection_z,
                             sweep_threads, buffer);
    } else if (check->parsed()) {
      buffer.set_path(check_output);
      status = run_check(check_input, check_store, check_ns, check_estimator,
                         check_statistic, check_replicates, check_seed, buffer);
    } else if (repl->parsed()) {
      buffer.set_path(repl_output);
      status = run_replicate_eval(repl_input, repl_store, repl_ns, buffer);
    } else if (serve->parsed()) {
      return serve_http(serve_store.require(), serve_host, serve_port,
                        std::chrono::seconds(serve_reload));
    }
    if (status == 0) buffer.flush();
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ebshrink
