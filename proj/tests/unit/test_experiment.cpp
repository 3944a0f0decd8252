#include <catch_amalgamated.hpp>

#include <set>

#include "tensorchan/baselines.hpp"
#include "tensorchan/error.hpp"
#include "tensorchan/experiment.hpp"
#include "tensorchan/results.hpp"

using namespace tensorchan;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.experiment_id = "unit";
  cfg.dims = {8, 8, 16};
  cfg.n_paths = {3};
  cfg.pilot_ratios = {0.2, 0.4, 0.6};
  cfg.snr_db = {15.0};
  EstimatorSpec ls;
  EstimatorSpec tucker;
  tucker.kind = EstimatorKind::kTucker;
  cfg.estimators = {ls, tucker};
  cfg.mc_runs = 2;
  return cfg;
}

// Regenerates the observation a harness cell sees.
Observation cell_observation(const ExperimentConfig& cfg, const RunRecord& r, ComplexTensor3* truth) {
  const std::uint64_t seed = run_seed(cfg, r.n_paths, r.snr_db, r.pilot_ratio, r.run_index);
  Rng c(derive_seed(seed, {}, "channel")), m(derive_seed(seed, {}, "mask")), n(derive_seed(seed, {}, "noise"));
  const ChannelSpec spec{cfg.dims.n1, cfg.dims.n2, cfg.dims.n3, r.n_paths, seed};
  *truth = generate_channel(spec, c).h;
  const auto mask = generate_mask(cfg.mask_pattern, r.pilot_ratio, cfg.dims, m);
  return observe(*truth, mask, r.snr_db, n);
}

std::string without_wall_time(const std::vector<RunRecord>& records) {
  auto copy = records;
  for (auto& r : copy) r.wall_time_s = 0.0;
  return format_csv(copy);
}

}  // namespace

TEST_CASE("record count is points x estimators x runs") {
  auto cfg = small_config();
  CHECK(run_monte_carlo(cfg).size() == 12);
  cfg.n_paths = {2, 3};
  cfg.snr_db = {10.0, 20.0};
  CHECK(run_monte_carlo(cfg).size() == 48);
}

TEST_CASE("records are ordered sweep-major, then roster, then run") {
  auto cfg = small_config();
  const auto records = run_monte_carlo(cfg);
  std::size_t n = 0;
  for (double rho : cfg.pilot_ratios)
    for (const char* est : {"ls", "tucker"})
      for (int run = 0; run < 2; ++run, ++n) {
        CHECK(records[n].pilot_ratio == rho);
        CHECK(records[n].estimator == est);
        CHECK(records[n].run_index == run);
      }
}

TEST_CASE("estimators share one observation per cell") {
  const auto cfg = small_config();
  const auto records = run_monte_carlo(cfg);
  for (std::size_t n = 0; n < records.size(); n += 4) {
    // (ls run 0, ls run 1, tucker run 0, tucker run 1)
    CHECK(records[n].observation_hash == records[n + 2].observation_hash);
    CHECK(records[n + 1].observation_hash == records[n + 3].observation_hash);
    CHECK(records[n].seed == records[n + 2].seed);
    CHECK(records[n].observation_hash != records[n + 1].observation_hash);
  }
  // The LS number is recomputable from the regenerated observation bytes.
  for (const auto& r : records) {
    if (r.estimator != "ls") continue;
    ComplexTensor3 truth;
    const auto obs = cell_observation(cfg, r, &truth);
    CHECK(observation_hash(obs) == r.observation_hash);
    CHECK(nmse(ls_estimate(obs), truth) == r.nmse);
  }
}

TEST_CASE("reruns are identical and independent of thread count") {
  auto cfg = small_config();
  cfg.threads = 1;
  const auto a = without_wall_time(run_monte_carlo(cfg));
  cfg.threads = 3;
  const auto b = without_wall_time(run_monte_carlo(cfg));
  CHECK(a == b);
}

TEST_CASE("every estimator runs through the harness") {
  auto cfg = small_config();
  cfg.pilot_ratios = {0.3};
  cfg.estimators.clear();
  for (auto kind : {EstimatorKind::kLs, EstimatorKind::kLmmse, EstimatorKind::kOmp, EstimatorKind::kTucker,
                    EstimatorKind::kCp}) {
    EstimatorSpec e;
    e.kind = kind;
    e.lmmse_train = 20;
    cfg.estimators.push_back(e);
  }
  const auto records = run_monte_carlo(cfg);
  REQUIRE(records.size() == 10);
  for (const auto& r : records) {
    CHECK_FALSE(r.failed);
    CHECK(std::isfinite(r.nmse));
    CHECK(r.nmse_db == to_db(r.nmse));
  }
  CHECK(records[4].iterations == 3);  // omp: sparsity follows L
}

TEST_CASE("estimator failures become flagged records") {
  auto cfg = small_config();
  cfg.pilot_ratios = {0.3};
  EstimatorSpec omp;
  omp.kind = EstimatorKind::kOmp;
  omp.sparsity = 1000;  // more atoms than the 8x8 dictionary holds
  cfg.estimators = {EstimatorSpec{}, omp};
  const auto records = run_monte_carlo(cfg);
  CHECK_FALSE(records[0].failed);
  CHECK(records[2].failed);
  CHECK(std::isnan(records[2].nmse));
  CHECK(records[2].error.find("sparsity") != std::string::npos);
  const auto curves = summarize(records);
  REQUIRE(curves.size() == 2);
  CHECK(curves[1].failures == 2);
  CHECK(curves[1].runs == 0);
}

TEST_CASE("configuration validation") {
  auto cfg = small_config();
  cfg.pilot_ratios = {1.5};
  CHECK_THROWS_AS(run_monte_carlo(cfg), ContractError);
  cfg = small_config();
  cfg.estimators.clear();
  CHECK_THROWS_AS(run_monte_carlo(cfg), ContractError);
  cfg = small_config();
  cfg.mc_runs = 0;
  CHECK_THROWS_AS(run_monte_carlo(cfg), ContractError);
  cfg = small_config();
  cfg.estimators[1].ranks = Ranks{9, 1, 1};
  CHECK_THROWS_AS(run_monte_carlo(cfg), ContractError);
  CHECK_THROWS_AS(parse_estimator("mmse"), ContractError);
  try {
    parse_estimator("mmse");
  } catch (const ContractError& e) {
    CHECK(std::string(e.what()).find("ls, lmmse, omp, tucker, cp") != std::string::npos);
  }
  CHECK(parse_estimator("cp") == EstimatorKind::kCp);
}

TEST_CASE("summaries average linear NMSE") {
  std::vector<RunRecord> records(3);
  for (auto& r : records) {
    r.estimator = "tucker";
    r.pilot_ratio = 0.1;
    r.snr_db = 10.0;
    r.n_paths = 5;
  }
  records[0].nmse = 0.1;
  records[1].nmse = 0.01;
  records[2].nmse = 0.001;
  const auto curves = summarize(records);
  REQUIRE(curves.size() == 1);
  CHECK(curves[0].mean_nmse == Catch::Approx(0.037));
  CHECK(curves[0].runs == 3);
}

TEST_CASE("thresholds come from the curve and the DoF arithmetic") {
  ExperimentConfig cfg;
  cfg.n_paths = {2};
  cfg.snr_db = {20.0};
  cfg.pilot_ratios = experiment4_rho_grid();
  REQUIRE(cfg.pilot_ratios.size() == 14);
  std::vector<CurvePoint> curves;
  for (double rho : cfg.pilot_ratios) {
    curves.push_back({"tucker", 2, 20.0, rho, rho >= 0.12 ? 0.005 : 0.3, 0.0, 10, 0});
  }
  const auto t = extract_thresholds(curves, cfg);
  REQUIRE(t.size() == 1);
  REQUIRE(t[0].rho_min);
  CHECK(*t[0].rho_min == 0.12);
  CHECK(*t[0].omega_min == 15729);
  CHECK(*t[0].oversampling == Catch::Approx(40.96).margin(0.005));
  CHECK(t[0].dof_tucker == 524);

  for (auto& c : curves) c.mean_nmse = 0.3;
  const auto none = extract_thresholds(curves, cfg);
  CHECK_FALSE(none[0].rho_min);
  CHECK_FALSE(none[0].omega_min);
}

TEST_CASE("threshold table arithmetic") {
  const Dims d{32, 32, 128};
  struct Row {
    std::size_t l;
    double rho;
    std::size_t omega;
    double c;
  };
  for (const Row& row : {Row{2, 0.12, 15729, 40.96}, Row{3, 0.15, 19661, 34.13}, Row{5, 0.15, 19661, 20.48},
                         Row{8, 0.20, 26214, 17.07}, Row{10, 0.20, 26214, 13.65}, Row{15, 0.25, 32768, 11.38},
                         Row{8, 0.15, 19661, 12.80}}) {
    const auto t = make_threshold(20.0, row.l, row.rho, d);
    CHECK(*t.omega_min == row.omega);
    CHECK(std::round(*t.oversampling * 100.0) / 100.0 == Catch::Approx(row.c));
  }
}

TEST_CASE("full-size study configurations") {
  const auto e1 = experiment1_config();
  CHECK(e1.mc_runs == 500);
  CHECK(e1.pilot_ratios == std::vector<double>{0.02, 0.04, 0.06, 0.08, 0.10, 0.15, 0.20});
  CHECK(e1.estimators.size() == 4);
  CHECK(e1.estimators[3].ranks == Ranks{4, 4, 6});
  const auto e2 = experiment2_config();
  CHECK(e2.snr_db == std::vector<double>{-5, 0, 5, 10, 15, 20});
  CHECK(e2.estimators.back().kind == EstimatorKind::kCp);
  CHECK(e2.estimators.back().cp_rank == 5);
  const auto e4 = experiment4_config();
  CHECK(e4.mc_runs == 100);
  CHECK(e4.n_paths == std::vector<std::size_t>{2, 3, 5, 8, 10, 15});
  CHECK_FALSE(e4.estimators[0].ranks);
  auto bad = e4;
  bad.estimators = {EstimatorSpec{}};
  CHECK_THROWS_AS(experiment4(bad), ContractError);
}

TEST_CASE("progress callback sees every cell") {
  auto cfg = small_config();
  std::vector<std::size_t> seen;
  cfg.progress = [&](std::size_t done, std::size_t total) {
    CHECK(total == 6);
    seen.push_back(done);
  };
  run_monte_carlo(cfg);
  CHECK(seen.size() == 6);
  CHECK(seen.back() == 6);
}
