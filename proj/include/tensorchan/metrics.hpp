#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "tensorchan/tensor.hpp"

namespace tensorchan {

/// ‖est − truth‖² / ‖truth‖².
double nmse(const ComplexTensor3& est, const ComplexTensor3& truth);

inline double to_db(double linear) { return 10.0 * std::log10(linear); }

/// CP-style degrees of freedom L (N_r + N_t + N_f).
std::size_t dof_cp(std::size_t n_paths, const Dims& dims);

/// Tucker degrees of freedom R1 R2 R3 + R1 N1 + R2 N2 + R3 N3.
std::size_t dof_tucker(const Ranks& ranks, const Dims& dims);

/// Ranks used when Tucker ranks follow the path count: (L, L, L + 1), each
/// capped by its dimension.
Ranks ranks_for_paths(std::size_t n_paths, const Dims& dims);

/// Recovery criterion for thresholds: mean NMSE ≤ 1e-2.
inline constexpr double kRecoveryNmse = 1e-2;

/// Index of the first grid point whose mean NMSE meets `criterion`, no
/// interpolation.
std::optional<std::size_t> first_recovery_index(std::span<const double> mean_nmse,
                                                double criterion = kRecoveryNmse);

}  // namespace tensorchan
