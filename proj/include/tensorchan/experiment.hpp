#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tensorchan/baselines.hpp"
#include "tensorchan/channel.hpp"
#include "tensorchan/metrics.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

enum class EstimatorKind { kLs, kLmmse, kOmp, kTucker, kCp };

std::string_view to_string(EstimatorKind kind);
/// Throws ContractError listing the valid roster for unknown names.
EstimatorKind parse_estimator(std::string_view name);
inline constexpr std::string_view kEstimatorRoster = "ls, lmmse, omp, tucker, cp";

/// One roster entry. Zero-valued sizes mean "follow the path count" (or the
/// antenna count for dictionary grids).
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::kLs;

  // tucker
  std::optional<Ranks> ranks;  // nullopt: ranks_for_paths(L)
  int max_iters = 20;
  double tol = 1e-6;
  bool reimpose_pilots = true;

  // cp
  std::size_t cp_rank = 0;
  int cp_restarts = 5;
  int cp_max_sweeps = 50;
  double cp_tol = 1e-6;
  double cp_ridge = 1e-8;
  bool cp_hosvd_init = false;

  // omp
  std::size_t sparsity = 0;
  std::size_t grid_rx = 0;
  std::size_t grid_tx = 0;
  GridSpacing grid_spacing = GridSpacing::kAngle;

  // lmmse
  std::size_t lmmse_train = 200;

  std::string name() const { return std::string(to_string(kind)); }
};

struct ExperimentConfig {
  std::string experiment_id = "custom";
  Dims dims{32, 32, 128};
  std::vector<std::size_t> n_paths{5};
  std::vector<double> pilot_ratios{0.10};
  std::vector<double> snr_db{10.0};
  std::vector<EstimatorSpec> estimators;
  int mc_runs = 500;
  std::uint64_t base_seed = 42;
  MaskPattern mask_pattern = MaskPattern::kRandom;
  std::string output_path;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
  /// Called with (completed cells, total cells); serialized by the harness.
  std::function<void(std::size_t, std::size_t)> progress;

  void validate() const;
};

struct RunRecord {
  std::string estimator;
  double pilot_ratio = 0.0;
  double snr_db = 0.0;
  std::size_t n_paths = 0;
  int run_index = 0;
  double nmse = 0.0;
  double nmse_db = 0.0;
  int iterations = 0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  // Metadata carried in JSON output only.
  std::uint64_t observation_hash = 0;
  bool failed = false;
  std::string error;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Mean over the successful runs of one (estimator, L, SNR, ρ) point.
struct CurvePoint {
  std::string estimator;
  std::size_t n_paths = 0;
  double snr_db = 0.0;
  double pilot_ratio = 0.0;
  double mean_nmse = 0.0;
  double mean_nmse_db = 0.0;
  int runs = 0;
  int failures = 0;
};

struct ThresholdRecord {
  double snr_db = 0.0;
  std::size_t n_paths = 0;
  std::optional<double> rho_min;        // nullopt: not reached
  std::optional<std::size_t> omega_min;
  std::optional<double> oversampling;   // |Ω|_min / (L (N_r + N_t + N_f))
  std::size_t dof_cp = 0;
  std::size_t dof_tucker = 0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<CurvePoint> curves;
  std::vector<ThresholdRecord> thresholds;  // experiment 4 only
};

/// Seed of the (sweep point, run) cell; channel, mask, noise and CP restart
/// streams are derived from it with distinct purpose tags.
std::uint64_t run_seed(const ExperimentConfig& cfg, std::size_t n_paths, double snr_db, double rho,
                       int run_index);

/// Monte Carlo over every (L, SNR, ρ) × run; all estimators in a cell see the
/// same Observation. Records are ordered sweep-major (L, SNR, ρ), then by
/// roster position, then by run index. Estimator exceptions become records
/// with failed = true and nmse = NaN.
std::vector<RunRecord> run_monte_carlo(const ExperimentConfig& cfg);

std::vector<CurvePoint> summarize(const std::vector<RunRecord>& records);

/// Threshold extraction for every (SNR, L) Tucker curve in `curves`.
std::vector<ThresholdRecord> extract_thresholds(const std::vector<CurvePoint>& curves,
                                                const ExperimentConfig& cfg,
                                                std::string_view estimator = "tucker");

ThresholdRecord make_threshold(double snr_db, std::size_t n_paths, std::optional<double> rho_min,
                               const Dims& dims);

// Full-size study configurations; pass a smaller mc_runs for quick runs.
ExperimentConfig experiment1_config(int mc_runs = 500);
ExperimentConfig experiment2_config(int mc_runs = 500);
ExperimentConfig experiment4_config(int mc_runs = 100);

/// Pilot-ratio grid of the sample-complexity study (14 points).
std::vector<double> experiment4_rho_grid();

/// run_monte_carlo + summarize + Tucker threshold extraction.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Drivers for the three synthetic studies: NMSE vs pilot ratio, NMSE vs SNR,
// and recovery thresholds over (L, ρ). Each validates that the roster suits
// the study before running.
ExperimentResult experiment1(const ExperimentConfig& cfg);
ExperimentResult experiment2(const ExperimentConfig& cfg);
ExperimentResult experiment4(const ExperimentConfig& cfg);

}  // namespace tensorchan
