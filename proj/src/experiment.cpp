#include "tensorchan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include "tensorchan/baselines.hpp"
#include "tensorchan/completion.hpp"
#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

struct SweepPoint {
  std::size_t n_paths;
  double snr_db;
  double rho;
};

struct EstimateOutcome {
  ComplexTensor3 estimate;
  int iterations = 0;
};

// Read-only state shared by all workers.
struct SharedContext {
  std::map<std::pair<std::size_t, std::size_t>, FrequencyCovariance> covariances;  // (L, n_train)
  std::map<std::tuple<std::size_t, std::size_t, GridSpacing>, AngularDictionary> dictionaries;
};

std::size_t grid_or(std::size_t grid, std::size_t fallback) { return grid == 0 ? fallback : grid; }

FrequencyCovariance training_covariance(const ExperimentConfig& cfg, std::size_t n_paths,
                                        std::size_t n_train) {
  std::vector<ComplexTensor3> training;
  training.reserve(n_train);
  ChannelSpec spec{cfg.dims.n1, cfg.dims.n2, cfg.dims.n3, n_paths, cfg.base_seed};
  for (std::size_t n = 0; n < n_train; ++n) {
    Rng rng(derive_seed(cfg.base_seed, {hash_tag(cfg.experiment_id), n_paths, n}, "lmmse_train"));
    training.push_back(generate_channel(spec, rng).h);
  }
  return estimate_frequency_covariance(training);
}

EstimateOutcome run_estimator(const EstimatorSpec& spec, const Observation& obs, std::size_t n_paths,
                              const SharedContext& ctx, std::uint64_t cell_seed) {
  const Dims d = obs.y.dims();
  EstimateOutcome out;
  switch (spec.kind) {
    case EstimatorKind::kLs:
      out.estimate = ls_estimate(obs);
      break;
    case EstimatorKind::kLmmse:
      out.estimate = lmmse_estimate(obs, ctx.covariances.at({n_paths, spec.lmmse_train}));
      break;
    case EstimatorKind::kOmp: {
      const auto& dict =
          ctx.dictionaries.at({grid_or(spec.grid_rx, d.n1), grid_or(spec.grid_tx, d.n2), spec.grid_spacing});
      const std::size_t sparsity = spec.sparsity == 0 ? n_paths : spec.sparsity;
      out.estimate = somp_estimate(obs, dict, sparsity);
      out.iterations = static_cast<int>(sparsity);
      break;
    }
    case EstimatorKind::kTucker: {
      TuckerCompletionConfig tc;
      tc.ranks = spec.ranks.value_or(ranks_for_paths(n_paths, d));
      tc.max_iters = spec.max_iters;
      tc.tol = spec.tol;
      auto res = tucker_complete(obs, tc);
      out.iterations = res.iterations;
      out.estimate = spec.reimpose_pilots ? std::move(res.consistent) : std::move(res.estimate);
      break;
    }
    case EstimatorKind::kCp: {
      CPCompletionConfig cc;
      cc.rank = spec.cp_rank == 0 ? n_paths : spec.cp_rank;
      cc.restarts = spec.cp_restarts;
      cc.max_sweeps = spec.cp_max_sweeps;
      cc.tol = spec.cp_tol;
      cc.ridge = spec.cp_ridge;
      cc.hosvd_first_restart = spec.cp_hosvd_init;
      cc.seed = derive_seed(cell_seed, {}, "cp");
      auto res = cp_wals_complete(obs, cc);
      out.iterations = res.restarts[static_cast<std::size_t>(res.best_restart)].sweeps;
      out.estimate = std::move(res.estimate);
      break;
    }
  }
  return out;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> points;
  for (std::size_t l : cfg.n_paths)
    for (double snr : cfg.snr_db)
      for (double rho : cfg.pilot_ratios) points.push_back({l, snr, rho});
  return points;
}

EstimatorSpec make_spec(EstimatorKind kind) {
  EstimatorSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kLs: return "ls";
    case EstimatorKind::kLmmse: return "lmmse";
    case EstimatorKind::kOmp: return "omp";
    case EstimatorKind::kTucker: return "tucker";
    case EstimatorKind::kCp: return "cp";
  }
  return "ls";
}

EstimatorKind parse_estimator(std::string_view name) {
  for (auto k : {EstimatorKind::kLs, EstimatorKind::kLmmse, EstimatorKind::kOmp, EstimatorKind::kTucker,
                 EstimatorKind::kCp}) {
    if (to_string(k) == name) return k;
  }
  throw ContractError("unknown estimator '" + std::string(name) + "' (valid: " +
                      std::string(kEstimatorRoster) + ")");
}

void ExperimentConfig::validate() const {
  require(dims.n1 >= 1 && dims.n2 >= 1 && dims.n3 >= 1, "experiment dimensions must be >= 1");
  require(!n_paths.empty() && !pilot_ratios.empty() && !snr_db.empty(), "sweep lists must be non-empty");
  require(!estimators.empty(), "estimator roster must be non-empty");
  require(mc_runs >= 1, "mc_runs must be >= 1");
  for (std::size_t l : n_paths) require(l >= 1, "path counts must be >= 1");
  for (double rho : pilot_ratios) {
    require(rho > 0.0 && rho <= 1.0, "pilot ratio must lie in (0, 1], got " + std::to_string(rho));
  }
  for (double snr : snr_db) require(!std::isnan(snr), "SNR values must not be NaN");
  for (const auto& e : estimators) {
    if (e.kind == EstimatorKind::kTucker) {
      require(e.max_iters >= 1 && e.tol > 0.0, "tucker needs max_iters >= 1 and tol > 0");
      for (std::size_t l : n_paths) {
        const Ranks r = e.ranks.value_or(ranks_for_paths(l, dims));
        for (int m = 1; m <= 3; ++m) {
          require(r[m - 1] >= 1 && r[m - 1] <= dims[m], "tucker rank outside [1, n] for mode " + std::to_string(m));
        }
      }
    }
    if (e.kind == EstimatorKind::kCp) {
      require(e.cp_restarts >= 1 && e.cp_max_sweeps >= 1 && e.cp_ridge >= 0.0, "invalid CP settings");
    }
    if (e.kind == EstimatorKind::kLmmse) require(e.lmmse_train >= 2, "LMMSE needs >= 2 training channels");
  }
}

std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t n_paths, double snr_db, double rho,
                       int run_index) {
  return derive_seed(cfg.base_seed, {hash_tag(cfg.experiment_id), n_paths, std::bit_cast<std::uint64_t>(snr_db),
                                     std::bit_cast<std::uint64_t>(rho), static_cast<std::uint64_t>(run_index)});
}

std::vector<RunRecord> run_monte_carlo(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  const std::size_t runs = static_cast<std::size_t>(cfg.mc_runs);
  const std::size_t roster = cfg.estimators.size();

  SharedContext ctx;
  for (const auto& e : cfg.estimators) {
    if (e.kind == EstimatorKind::kLmmse) {
      for (std::size_t l : cfg.n_paths) {
        const auto key = std::make_pair(l, e.lmmse_train);
        if (!ctx.covariances.contains(key)) ctx.covariances.emplace(key, training_covariance(cfg, l, e.lmmse_train));
      }
    }
    if (e.kind == EstimatorKind::kOmp) {
      const auto key = std::make_tuple(grid_or(e.grid_rx, cfg.dims.n1), grid_or(e.grid_tx, cfg.dims.n2), e.grid_spacing);
      if (!ctx.dictionaries.contains(key)) {
        const auto [g_r, g_t, spacing] = key;
        ctx.dictionaries.emplace(key, make_angular_dictionary(cfg.dims.n1, cfg.dims.n2, g_r, g_t, spacing));
      }
    }
  }

  std::mutex progress_mutex;
  std::size_t completed = 0;
  // cells[p * runs + r][e]
  std::vector<std::vector<RunRecord>> cells(points.size() * runs);
  auto work = [&](std::size_t cell) {
    const SweepPoint& pt = points[cell / runs];
    const int run = static_cast<int>(cell % runs);
    const std::uint64_t seed = run_seed(cfg, pt.n_paths, pt.snr_db, pt.rho, run);
    const ChannelSpec spec{cfg.dims.n1, cfg.dims.n2, cfg.dims.n3, pt.n_paths, seed};
    Rng channel_rng(derive_seed(seed, {}, "channel"));
    Rng mask_rng(derive_seed(seed, {}, "mask"));
    Rng noise_rng(derive_seed(seed, {}, "noise"));
    const Channel ch = generate_channel(spec, channel_rng);
    const PilotMask mask = generate_mask(cfg.mask_pattern, pt.rho, cfg.dims, mask_rng);
    const Observation obs = observe(ch.h, mask, pt.snr_db, noise_rng);
    const std::uint64_t obs_hash = observation_hash(obs);

    auto& out = cells[cell];
    out.reserve(roster);
    for (const auto& est : cfg.estimators) {
      RunRecord rec;
      rec.estimator = est.name();
      rec.pilot_ratio = pt.rho;
      rec.snr_db = pt.snr_db;
      rec.n_paths = pt.n_paths;
      rec.run_index = run;
      rec.seed = seed;
      rec.observation_hash = obs_hash;
      const auto start = std::chrono::steady_clock::now();
      try {
        EstimateOutcome o = run_estimator(est, obs, pt.n_paths, ctx, seed);
        rec.nmse = nmse(o.estimate, ch.h);
        rec.iterations = o.iterations;
        if (!std::isfinite(rec.nmse)) {
          rec.failed = true;
          rec.error = "non-finite estimate";
        }
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
        rec.nmse = std::numeric_limits<double>::quiet_NaN();
      }
      rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.nmse_db = to_db(rec.nmse);
      out.push_back(std::move(rec));
    }
    if (cfg.progress) {
      std::lock_guard lock(progress_mutex);
      cfg.progress(++completed, cells.size());
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = std::min<std::size_t>(cfg.threads == 0 ? hw : cfg.threads, cells.size());
  if (threads <= 1) {
    for (std::size_t c = 0; c < cells.size(); ++c) work(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) work(c);
      });
    }
  }

  std::vector<RunRecord> records;
  records.reserve(cells.size() * roster);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t e = 0; e < roster; ++e)
      for (std::size_t r = 0; r < runs; ++r) records.push_back(cells[p * runs + r][e]);
  return records;
}

std::vector<CurvePoint> summarize(const std::vector<RunRecord>& records) {
  // Keep first-appearance order so curves follow the record order.
  using Key = std::tuple<std::string, std::size_t, double, double>;
  std::vector<Key> order;
  std::map<Key, CurvePoint> acc;
  for (const auto& r : records) {
    Key key{r.estimator, r.n_paths, r.snr_db, r.pilot_ratio};
    auto [it, inserted] = acc.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      it->second = CurvePoint{r.estimator, r.n_paths, r.snr_db, r.pilot_ratio, 0.0, 0.0, 0, 0};
    }
    if (r.failed) {
      ++it->second.failures;
    } else {
      it->second.mean_nmse += r.nmse;
      ++it->second.runs;
    }
  }
  std::vector<CurvePoint> curves;
  for (const auto& key : order) {
    CurvePoint c = acc.at(key);
    c.mean_nmse = c.runs > 0 ? c.mean_nmse / c.runs : std::numeric_limits<double>::quiet_NaN();
    c.mean_nmse_db = to_db(c.mean_nmse);
    curves.push_back(c);
  }
  return curves;
}

ThresholdRecord make_threshold(double snr_db, std::size_t n_paths, std::optional<double> rho_min,
                               const Dims& dims) {
  ThresholdRecord t;
  t.snr_db = snr_db;
  t.n_paths = n_paths;
  t.dof_cp = dof_cp(n_paths, dims);
  t.dof_tucker = dof_tucker(ranks_for_paths(n_paths, dims), dims);
  if (rho_min) {
    t.rho_min = rho_min;
    t.omega_min = static_cast<std::size_t>(std::llround(*rho_min * static_cast<double>(dims.size())));
    t.oversampling = static_cast<double>(*t.omega_min) / static_cast<double>(t.dof_cp);
  }
  return t;
}

std::vector<ThresholdRecord> extract_thresholds(const std::vector<CurvePoint>& curves,
                                                const ExperimentConfig& cfg, std::string_view estimator) {
  std::vector<ThresholdRecord> out;
  for (double snr : cfg.snr_db) {
    for (std::size_t l : cfg.n_paths) {
      std::vector<std::pair<double, double>> curve;  // (ρ, mean NMSE)
      for (const auto& c : curves) {
        if (c.estimator == estimator && c.n_paths == l && c.snr_db == snr) curve.emplace_back(c.pilot_ratio, c.mean_nmse);
      }
      if (curve.empty()) continue;
      std::sort(curve.begin(), curve.end());
      std::vector<double> means;
      for (const auto& [rho, m] : curve) means.push_back(m);
      const auto hit = first_recovery_index(means);
      out.push_back(make_threshold(snr, l, hit ? std::optional<double>(curve[*hit].first) : std::nullopt, cfg.dims));
    }
  }
  return out;
}

std::vector<double> experiment4_rho_grid() {
  return {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.10, 0.12, 0.15, 0.18, 0.20, 0.22, 0.25};
}

ExperimentConfig experiment1_config(int mc_runs) {
  ExperimentConfig cfg;
  cfg.experiment_id = "exp1";
  cfg.n_paths = {5};
  cfg.pilot_ratios = {0.02, 0.04, 0.06, 0.08, 0.10, 0.15, 0.20};
  cfg.snr_db = {10.0};
  EstimatorSpec tucker = make_spec(EstimatorKind::kTucker);
  tucker.ranks = Ranks{4, 4, 6};
  cfg.estimators = {make_spec(EstimatorKind::kLs), make_spec(EstimatorKind::kLmmse),
                    make_spec(EstimatorKind::kOmp), tucker};
  cfg.mc_runs = mc_runs;
  return cfg;
}

ExperimentConfig experiment2_config(int mc_runs) {
  ExperimentConfig cfg;
  cfg.experiment_id = "exp2";
  cfg.n_paths = {5};
  cfg.pilot_ratios = {0.08};
  cfg.snr_db = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  EstimatorSpec tucker = make_spec(EstimatorKind::kTucker);
  tucker.ranks = Ranks{5, 5, 6};
  EstimatorSpec cp = make_spec(EstimatorKind::kCp);
  cp.cp_rank = 5;
  cfg.estimators = {make_spec(EstimatorKind::kLs), make_spec(EstimatorKind::kLmmse),
                    make_spec(EstimatorKind::kOmp), tucker, cp};
  cfg.mc_runs = mc_runs;
  return cfg;
}

ExperimentConfig experiment4_config(int mc_runs) {
  ExperimentConfig cfg;
  cfg.experiment_id = "exp4";
  cfg.n_paths = {2, 3, 5, 8, 10, 15};
  cfg.pilot_ratios = experiment4_rho_grid();
  cfg.snr_db = {10.0, 20.0, 30.0};
  cfg.estimators = {make_spec(EstimatorKind::kTucker)};  // ranks follow L
  cfg.mc_runs = mc_runs;
  return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult result;
  result.records = run_monte_carlo(cfg);
  result.curves = summarize(result.records);
  result.thresholds = extract_thresholds(result.curves, cfg);
  return result;
}

ExperimentResult experiment1(const ExperimentConfig& cfg) {
  require(cfg.snr_db.size() == 1, "experiment 1 sweeps pilot ratio at a single SNR");
  return run_experiment(cfg);
}

ExperimentResult experiment2(const ExperimentConfig& cfg) {
  require(cfg.pilot_ratios.size() == 1, "experiment 2 sweeps SNR at a single pilot ratio");
  return run_experiment(cfg);
}

ExperimentResult experiment4(const ExperimentConfig& cfg) {
  const bool has_tucker = std::any_of(cfg.estimators.begin(), cfg.estimators.end(),
                                      [](const EstimatorSpec& e) { return e.kind == EstimatorKind::kTucker; });
  require(has_tucker, "experiment 4 needs a tucker estimator in the roster");
  require(std::is_sorted(cfg.pilot_ratios.begin(), cfg.pilot_ratios.end()),
          "experiment 4 pilot grid must be ascending");
  return run_experiment(cfg);
}

}  // namespace tensorchan
