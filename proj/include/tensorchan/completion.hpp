#pragma once

#include <cstdint>
#include <vector>

#include "tensorchan/channel.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

struct TuckerCompletionConfig {
  Ranks ranks{4, 4, 6};
  int max_iters = 20;
  double tol = 1e-6;
  double denom_guard = 1e-12;

  void validate(const Dims& dims) const;
};

struct TuckerCompletionResult {
  /// Last low-rank projection X̂ (the algorithm's returned estimate).
  ComplexTensor3 estimate;
  /// Last data-consistent iterate M ⊙ Y + (1 - M) ⊙ X̂, i.e. X̂ with the
  /// pilots re-imposed.
  ComplexTensor3 consistent;
  int iterations = 0;
  bool converged = false;
  std::vector<double> deltas;
};

/// Tucker completion by alternating projection between truncated HOSVD and
/// data consistency on Ω.
///
/// Each iteration projects the current data-consistent iterate onto
/// multilinear rank `ranks`, re-imposes the pilots, and measures
///   δ = ‖(X̂ₜ − X̂ₜ₋₁) ⊙ M‖ / (‖Y ⊙ M‖ + guard),   X̂₀ = Y,
/// stopping once δ < tol or after max_iters iterations.
TuckerCompletionResult tucker_complete(const Observation& obs, const TuckerCompletionConfig& cfg);

struct CPCompletionConfig {
  std::size_t rank = 5;
  int restarts = 5;
  int max_sweeps = 50;
  double tol = 1e-6;
  double ridge = 1e-8;
  std::uint64_t seed = 42;
  /// Restart 0 starts from the leading mode subspaces of Y instead of noise.
  /// Off by default: every restart draws i.i.d. complex Gaussian factors.
  bool hosvd_first_restart = false;

  void validate() const;
};

struct CPRestartTrace {
  /// Regularized observed objective after initialization and after each
  /// sweep: Σ_Ω |y - model|² + ridge · Σ ‖factor‖².
  std::vector<double> objective;
  double observed_fit = 0.0;  // observed-entry NMSE at exit
  double initial_fit = 0.0;   // observed-entry NMSE at initialization
  int sweeps = 0;
  bool diverged = false;
};

struct CPCompletionResult {
  ComplexTensor3 estimate;
  CPModel model;
  double best_restart_fit = 0.0;
  int best_restart = 0;
  bool any_diverged = false;
  std::vector<CPRestartTrace> restarts;
};

/// Rank-R CP completion by weighted (observed-entries-only) alternating least
/// squares with ridge regularization and multiple restarts; the restart with
/// the smallest observed-entry NMSE wins.
CPCompletionResult cp_wals_complete(const Observation& obs, const CPCompletionConfig& cfg);

/// ‖(est − y) ⊙ M‖² / ‖y ⊙ M‖².
double observed_nmse(const ComplexTensor3& est, const Observation& obs);

}  // namespace tensorchan
