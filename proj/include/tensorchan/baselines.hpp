#pragma once

#include <vector>

#include "tensorchan/channel.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

/// Frequency-domain covariance shared by every (rx, tx) fiber.
struct FrequencyCovariance {
  CMatrix r_f;
  std::size_t n_train = 0;
};

/// Kronecker ULA steering dictionary.
struct AngularDictionary {
  std::vector<double> grid_rx;  // angles (radians)
  std::vector<double> grid_tx;
  CMatrix a_rx;  // n_r × G_r
  CMatrix a_tx;  // n_t × G_t
};

/// Diagonal loading on every LMMSE and SOMP solve.
inline constexpr double kDiagonalLoading = 1e-10;

/// Zero-filled least squares: the observation itself.
ComplexTensor3 ls_estimate(const Observation& obs);

FrequencyCovariance estimate_frequency_covariance(const std::vector<ComplexTensor3>& training);

/// Per-fiber LMMSE along frequency:
/// ĥ = R[:, S] (R[S, S] + σ² I)⁻¹ y_S for the observed subcarriers S of the fiber.
ComplexTensor3 lmmse_estimate(const Observation& obs, const FrequencyCovariance& cov);

/// kSine: G points uniform in sin θ over [−1, 1).
/// kAngle: G midpoints uniform in θ over (−π/2, π/2).
enum class GridSpacing { kSine, kAngle };

AngularDictionary make_angular_dictionary(std::size_t n_r, std::size_t n_t, std::size_t grid_rx,
                                          std::size_t grid_tx, GridSpacing spacing = GridSpacing::kSine);

struct SompResult {
  ComplexTensor3 estimate;
  /// Selected (rx atom, tx atom) pairs in selection order.
  std::vector<std::pair<std::size_t, std::size_t>> support;
  /// Observed residual norm summed over subcarriers, before any atom and
  /// after each re-fit.
  std::vector<double> residual_norms;
};

/// Simultaneous OMP with one angular support shared by all subcarriers.
SompResult somp(const Observation& obs, const AngularDictionary& dict, std::size_t sparsity);
ComplexTensor3 somp_estimate(const Observation& obs, const AngularDictionary& dict,
                             std::size_t sparsity);

}  // namespace tensorchan
