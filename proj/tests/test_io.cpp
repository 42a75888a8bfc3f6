#include <cmath>
#include <sstream>
#include <vector>

#include <doctest.h>

#include "ebshrink/cli.hpp"
#include "ebshrink/config.hpp"
#include "ebshrink/csv.hpp"
#include "ebshrink/errors.hpp"
#include "ebshrink/math.hpp"
#include "ebshrink/store.hpp"
#include "test_util.hpp"

using namespace ebshrink;
using test_util::TempDir;

namespace {

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::vector<const char*> argv{"ebshrink"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status =
      run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return status;
}

}  // namespace

TEST_CASE("experiment CSV row maps to a summary") {
  TempDir dir;
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat,selected\n"
                        "e1,0.021,0.010,true\n"
                        "e2,-0.5,2,\n"
                        "e3,1e-3,0.25,false\n");
  const auto exps = parse_experiments(dir.file("exp.csv"));
  REQUIRE(exps.size() == 3);
  CHECK(exps[0].id == "e1");
  CHECK(exps[0].theta_hat == 0.021);
  CHECK(exps[0].sigma_hat == 0.010);
  CHECK(exps[0].selected == true);
  CHECK_FALSE(exps[1].selected.has_value());
  CHECK(exps[2].selected == false);
}

TEST_CASE("experiment CSV errors carry the row number") {
  TempDir dir;
  test_util::write_file(dir.file("bad_sigma.csv"),
                        "id,theta_hat,sigma_hat\n"
                        "e1,0.1,0.2\n"
                        "e2,0.1,0\n");
  try {
    parse_experiments(dir.file("bad_sigma.csv"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  test_util::write_file(dir.file("bad_header.csv"), "id,theta,sigma\ne,1,1\n");
  CHECK_THROWS_AS(parse_experiments(dir.file("bad_header.csv")), ParseError);

  test_util::write_file(dir.file("bad_number.csv"),
                        "id,theta_hat,sigma_hat\ne1,abc,1\n");
  CHECK_THROWS_AS(parse_experiments(dir.file("bad_number.csv")), ParseError);

  test_util::write_file(dir.file("bad_fields.csv"),
                        "id,theta_hat,sigma_hat\ne1,1\n");
  CHECK_THROWS_AS(parse_experiments(dir.file("bad_fields.csv")), ParseError);

  test_util::write_file(dir.file("bad_selected.csv"),
                        "id,theta_hat,sigma_hat,selected\ne1,1,1,yes\n");
  CHECK_THROWS_AS(parse_experiments(dir.file("bad_selected.csv")), ParseError);

  CHECK_THROWS_AS(parse_experiments(dir.file("missing.csv")), NotFoundError);
}

TEST_CASE("experiment CSV round-trips exactly") {
  TempDir dir;
  std::vector<ExperimentSummary> exps{
      {"a", 0.1234567890123456, 1.0 / 3.0, true},
      {"b", -2.5e-17, 7.25, std::nullopt},
      {"c", 42.0, 0.125, false},
  };
  write_experiments(dir.file("roundtrip.csv"), exps);
  const auto back = parse_experiments(dir.file("roundtrip.csv"));
  REQUIRE(back.size() == exps.size());
  for (std::size_t i = 0; i < exps.size(); ++i) {
    CHECK(back[i].id == exps[i].id);
    CHECK(back[i].theta_hat == exps[i].theta_hat);
    CHECK(back[i].sigma_hat == exps[i].sigma_hat);
    CHECK(back[i].selected == exps[i].selected);
  }
}

TEST_CASE("curated and pair CSV schemas parse strictly") {
  TempDir dir;
  test_util::write_file(dir.file("curated.csv"),
                        "id,eta_hat,gamma\nh1,2,1\nh2,-0.3,0.5\n");
  const auto curated = parse_curated(dir.file("curated.csv"));
  REQUIRE(curated.size() == 2);
  CHECK(curated[0].eta_hat == 2.0);
  CHECK(curated[1].gamma == 0.5);

  test_util::write_file(dir.file("bad_gamma.csv"),
                        "id,eta_hat,gamma\nh1,2,-1\n");
  CHECK_THROWS_AS(parse_curated(dir.file("bad_gamma.csv")), ParseError);

  test_util::write_file(
      dir.file("pairs.csv"),
      "id,theta_hat,sigma_hat,rep_theta_hat,rep_sigma_hat\np1,2,1,1,1\n");
  const auto pairs = parse_pairs(dir.file("pairs.csv"));
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].original.theta_hat == 2.0);
  CHECK(pairs[0].replication.theta_hat == 1.0);
}

TEST_CASE("posterior table round-trips") {
  TempDir dir;
  std::vector<PosteriorRow> rows{
      {"e1", Estimator::kFaceValue, 2.0, 1.0, std::nullopt, 0.355, 3.645},
      {"e1", Estimator::kHybrid, 10.0 / 9.0, 0.5, 1.25, 0.1, 2.2},
  };
  {
    std::ostringstream out;
    write_posterior_table(out, rows);
    test_util::write_file(dir.file("table.csv"), out.str());
  }
  const auto back = parse_posterior_table(dir.file("table.csv"));
  REQUIRE(back.size() == 2);
  CHECK(back[0].estimator == Estimator::kFaceValue);
  CHECK_FALSE(back[0].lambda_used.has_value());
  CHECK(back[1].lambda_used == 1.25);
  CHECK(back[1].mean == 10.0 / 9.0);
}

TEST_CASE("hyperparameter store persists namespaces") {
  TempDir dir;
  const auto path = dir.file("store.json");
  StoredHyper one{{0.0, 3.0, 1.0, 1.0}, "2026-01-01T00:00:00Z", "unit"};
  StoredHyper two{{0.5, 0.25, 3.0, 2.0}, "2026-01-02T00:00:00Z", "unit"};
  store_hyperparams(path, "team_a", one);
  store_hyperparams(path, "team_b", two);

  const auto a = load_stored(path, "team_a");
  CHECK(a.hyper.tau == 3.0);
  CHECK(a.fitted_at == "2026-01-01T00:00:00Z");
  const auto b = load_hyperparams(path, "team_b");
  CHECK(b.m0 == 0.5);
  CHECK(b.a == 3.0);

  CHECK_THROWS_AS(load_hyperparams(path, "absent"), NotFoundError);
  CHECK_THROWS_AS(load_store(dir.file("nope.json")), NotFoundError);

  // Overwrite keeps the other namespace intact.
  one.hyper.tau = 9.0;
  store_hyperparams(path, "team_a", one);
  CHECK(load_hyperparams(path, "team_a").tau == 9.0);
  CHECK(load_hyperparams(path, "team_b").tau == 0.25);
}

TEST_CASE("store rejects corrupt documents") {
  TempDir dir;
  test_util::write_file(dir.file("corrupt.json"), "{not json");
  CHECK_THROWS_AS(load_store(dir.file("corrupt.json")), ParseError);
  test_util::write_file(dir.file("bad_entry.json"), R"({"ns":{"m0":0}})");
  CHECK_THROWS_AS(load_store(dir.file("bad_entry.json")), ParseError);
  test_util::write_file(dir.file("bad_tau.json"),
                        R"({"ns":{"m0":0,"tau":-1,"a":1,"b":1}})");
  CHECK_THROWS_AS(load_store(dir.file("bad_tau.json")), ParseError);
}

TEST_CASE("scenario config round-trips and validates") {
  ScenarioConfig cfg;
  cfg.family = Family::kHiddenSelection;
  cfg.n_experiments = 1234;
  cfg.mu = {0.25, -0.5};
  cfg.epsilon = 2.0;
  cfg.sigma = 0.75;
  cfg.kappa = 0.0375;
  cfg.rho = 0.6;
  cfg.analysis_m0 = 0.0;
  cfg.analysis_tau = 2.0;
  cfg.selection_multiplier = 1.645;
  cfg.interval_level = 0.9;
  cfg.seed = 99;

  const auto text = serialize_scenario(cfg);
  const auto back = parse_scenario_text(text);
  CHECK(back.family == cfg.family);
  CHECK(back.mu == cfg.mu);
  CHECK(back.rho == cfg.rho);
  CHECK(back.seed == cfg.seed);
  CHECK(back.selection_multiplier == cfg.selection_multiplier);
}

TEST_CASE("scenario config rejects missing, unknown, and misplaced keys") {
  const std::string base =
      "family = correct_prior\n"
      "n_experiments = 100\n"
      "mu = 0\n"
      "epsilon = 1\n"
      "sigma = 1\n"
      "kappa = 0.05\n"
      "analysis_m0 = 0\n"
      "analysis_tau = 1\n"
      "selection_multiplier = 1.96\n"
      "interval_level = 0.9\n"
      "seed = 1\n";
  CHECK_NOTHROW(parse_scenario_text(base));
  CHECK_THROWS_AS(parse_scenario_text(base + "nu = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario_text(base + "bogus = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario_text(base + "seed = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario_text("family = correct_prior\n"), ParseError);
  CHECK_THROWS_AS(parse_scenario_text("family = weird\n" + base), ParseError);

  // Comments and blank lines are fine.
  CHECK_NOTHROW(parse_scenario_text("# comment\n\n" + base));
}

TEST_CASE("cli fit-tau fits, stores, and reports") {
  TempDir dir;
  test_util::write_file(dir.file("curated.csv"), "id,eta_hat,gamma\nh1,2,1\n");
  std::string out;
  const int status = cli({"fit-tau", "--input", dir.file("curated.csv"),
                          "--store", dir.file("store.json"), "--namespace",
                          "main"},
                         &out);
  CHECK(status == 0);
  CHECK(out.find("namespace,tau_star,n_observations\n") == 0);
  const double tau = load_hyperparams(dir.file("store.json"), "main").tau;
  CHECK(tau == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("cli fit-tau boundary needs the explicit floor") {
  TempDir dir;
  test_util::write_file(dir.file("null.csv"),
                        "id,eta_hat,gamma\nh1,0,1\nh2,0,1\n");
  std::string err;
  CHECK(cli({"fit-tau", "--input", dir.file("null.csv"), "--store",
             dir.file("store.json"), "--namespace", "main"},
            nullptr, &err) != 0);
  CHECK(err.find("tau-floor") != std::string::npos);

  CHECK(cli({"fit-tau", "--input", dir.file("null.csv"), "--store",
             dir.file("store.json"), "--namespace", "main", "--tau-floor"}) ==
        0);
  CHECK(load_hyperparams(dir.file("store.json"), "main").tau == 1e-12);
}

TEST_CASE("cli adjust reproduces the hand-computed hybrid mean") {
  TempDir dir;
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat\ne1,2,1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string out;
  REQUIRE(cli({"adjust", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main"},
              &out) == 0);

  // lambda* = (4+1)/4; mean = (1.25/2.25)*2 = 10/9.
  const auto table_path = dir.file("table.csv");
  test_util::write_file(table_path, out);
  const auto rows = parse_posterior_table(table_path);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].estimator == Estimator::kFaceValue);
  CHECK(rows[0].mean == 2.0);
  CHECK(rows[1].estimator == Estimator::kGlobal);
  CHECK(rows[1].mean == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rows[2].estimator == Estimator::kHybrid);
  CHECK(rows[2].mean == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
  CHECK(*rows[2].lambda_used == doctest::Approx(1.25).epsilon(1e-15));
}

TEST_CASE("cli adjust ratio convention recenters and restores") {
  TempDir dir;
  // theta_hat = 3 on the ratio scale is 2 on the centered scale; the hybrid
  // mean should be the centered answer shifted back by one.
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat\ne1,3,1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string out;
  REQUIRE(cli({"adjust", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main", "--estimator",
               "hybrid", "--convention", "ratio"},
              &out) == 0);
  test_util::write_file(dir.file("table.csv"), out);
  const auto rows = parse_posterior_table(dir.file("table.csv"));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean == doctest::Approx(10.0 / 9.0 + 1.0).epsilon(1e-12));
}

TEST_CASE("cli aggregate sums a posterior table") {
  TempDir dir;
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat\ne1,1,1\ne2,2,1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string table;
  REQUIRE(cli({"adjust", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main", "--estimator",
               "global"},
              &table) == 0);
  test_util::write_file(dir.file("table.csv"), table);

  std::string out;
  REQUIRE(cli({"aggregate", "--input", dir.file("table.csv"), "--estimator",
               "global"},
              &out) == 0);
  CHECK(out.find("estimator,n_experiments,mean,variance") == 0);
  CHECK(out.find("global,2,1.5,1,") != std::string::npos);

  std::string err;
  CHECK(cli({"aggregate", "--input", dir.file("table.csv"), "--estimator",
             "hybrid"},
            nullptr, &err) != 0);
}

TEST_CASE("cli simulate is byte-identical across runs") {
  TempDir dir;
  ScenarioConfig cfg;
  cfg.family = Family::kCorrectPrior;
  cfg.n_experiments = 2000;
  cfg.kappa = 0.0;
  cfg.seed = 5;
  test_util::write_file(dir.file("scenario.cfg"), serialize_scenario(cfg));

  std::string first, second;
  REQUIRE(cli({"simulate", "--config", dir.file("scenario.cfg")}, &first) == 0);
  REQUIRE(cli({"simulate", "--config", dir.file("scenario.cfg")}, &second) ==
          0);
  CHECK(first == second);
  CHECK(first.find("estimator,mse,bias,coverage,n_selected,selection_rate\n") ==
        0);

  // Seed override changes the numbers; threads do not.
  std::string reseeded, threaded;
  REQUIRE(cli({"simulate", "--config", dir.file("scenario.cfg"), "--seed",
               "6"},
              &reseeded) == 0);
  CHECK(reseeded != first);
  REQUIRE(cli({"simulate", "--config", dir.file("scenario.cfg"), "--threads",
               "7"},
              &threaded) == 0);
  CHECK(threaded == first);
}

TEST_CASE("cli simulate reports absent metrics as a failure") {
  TempDir dir;
  ScenarioConfig cfg;
  cfg.family = Family::kCorrectPrior;
  cfg.n_experiments = 50;
  cfg.kappa = 0.0;
  cfg.seed = 5;
  cfg.selection_multiplier = 50.0;  // selects nothing
  test_util::write_file(dir.file("scenario.cfg"), serialize_scenario(cfg));
  std::string out, err;
  CHECK(cli({"simulate", "--config", dir.file("scenario.cfg")}, &out, &err) !=
        0);
  CHECK(out.empty());  // no partial table
  CHECK(!err.empty());
}

TEST_CASE("cli sweep emits the grid table") {
  TempDir dir;
  ScenarioConfig cfg;
  cfg.family = Family::kCorrectPrior;
  cfg.n_experiments = 500;
  cfg.kappa = 0.05;
  cfg.seed = 1;
  test_util::write_file(dir.file("scenario.cfg"), serialize_scenario(cfg));
  std::string out;
  REQUIRE(cli({"sweep", "--config", dir.file("scenario.cfg"), "--axis",
               "sigma", "--grid", "0.5,1", "--seeds", "1,2,3"},
              &out) == 0);
  // Header plus 2 grid values x 3 seeds x 3 estimators.
  std::size_t lines = 0;
  for (char c : out) lines += c == '\n';
  CHECK(lines == 1 + 2 * 3 * 3);

  std::string err;
  CHECK(cli({"sweep", "--config", dir.file("scenario.cfg"), "--axis", "nu",
             "--grid", "3", "--seeds", "1"},
            nullptr, &err) != 0);
}

TEST_CASE("cli check produces a deterministic JSON report") {
  TempDir dir;
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat\ne1,0.2,1\ne2,-0.3,1\ne3,0.5,"
                        "1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string a, b;
  REQUIRE(cli({"check", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main", "--replicates",
               "500", "--seed", "3"},
              &a) == 0);
  REQUIRE(cli({"check", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main", "--replicates",
               "500", "--seed", "3"},
              &b) == 0);
  CHECK(a == b);
  CHECK(a.find("\"statistic_name\":\"mean\"") != std::string::npos);
  CHECK(a.find("\"tail_area_p\":") != std::string::npos);
}

TEST_CASE("cli replicate-eval reports MAE per estimator") {
  TempDir dir;
  test_util::write_file(
      dir.file("pairs.csv"),
      "id,theta_hat,sigma_hat,rep_theta_hat,rep_sigma_hat\np1,2,1,1,1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string out;
  REQUIRE(cli({"replicate-eval", "--input", dir.file("pairs.csv"), "--store",
               dir.file("store.json"), "--namespace", "main"},
              &out) == 0);
  CHECK(out.find("estimator,mae,n_pairs\n") == 0);
  CHECK(out.find("face_value,1,1\n") != std::string::npos);
}

TEST_CASE("cli surfaces usage errors with nonzero status") {
  std::string out, err;
  CHECK(cli({"frobnicate"}, &out, &err) != 0);
  CHECK(cli({}, &out, &err) != 0);
  CHECK(cli({"adjust"}, &out, &err) != 0);  // missing required options
  CHECK(cli({"adjust", "--input", "x.csv", "--namespace", "n"}, &out, &err) !=
        0);  // no store configured
}

TEST_CASE("cli --output writes the table to a file") {
  TempDir dir;
  test_util::write_file(dir.file("exp.csv"),
                        "id,theta_hat,sigma_hat\ne1,2,1\n");
  store_hyperparams(dir.file("store.json"), "main",
                    {{0.0, 1.0, 1.0, 1.0}, "t", "s"});
  std::string out;
  REQUIRE(cli({"adjust", "--input", dir.file("exp.csv"), "--store",
               dir.file("store.json"), "--namespace", "main", "--output",
               dir.file("out.csv")},
              &out) == 0);
  CHECK(out.empty());
  const auto rows = parse_posterior_table(dir.file("out.csv"));
  CHECK(rows.size() == 3);
}
