#include "tensorchan/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tensorchan/error.hpp"

namespace tensorchan {

double nmse(const ComplexTensor3& est, const ComplexTensor3& truth) {
  require(est.dims() == truth.dims(), "nmse: dimension mismatch");
  const double denom = squared_norm(truth);
  require(denom > 0.0, "nmse: reference tensor has zero energy");
  double num = 0.0;
  for (std::size_t n = 0; n < truth.size(); ++n) num += std::norm(est[n] - truth[n]);
  return num / denom;
}

std::size_t dof_cp(std::size_t n_paths, const Dims& dims) {
  return n_paths * (dims.n1 + dims.n2 + dims.n3);
}

std::size_t dof_tucker(const Ranks& ranks, const Dims& dims) {
  for (int m = 1; m <= 3; ++m) {
    require(ranks[m - 1] >= 1 && ranks[m - 1] <= dims[m], "dof_tucker: rank outside [1, n]");
  }
  return ranks[0] * ranks[1] * ranks[2] + ranks[0] * dims.n1 + ranks[1] * dims.n2 + ranks[2] * dims.n3;
}

Ranks ranks_for_paths(std::size_t n_paths, const Dims& dims) {
  require(n_paths >= 1, "ranks_for_paths: need at least one path");
  return {std::min(n_paths, dims.n1), std::min(n_paths, dims.n2), std::min(n_paths + 1, dims.n3)};
}

std::optional<std::size_t> first_recovery_index(std::span<const double> mean_nmse, double criterion) {
  for (std::size_t n = 0; n < mean_nmse.size(); ++n) {
    if (std::isfinite(mean_nmse[n]) && mean_nmse[n] <= criterion) return n;
  }
  return std::nullopt;
}

}  // namespace tensorchan
