#include "tensorchan/completion.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

double pilot_energy(const Observation& obs) {
  double s = 0.0;
  for (std::size_t n : obs.mask.indices()) s += std::norm(obs.y[n]);
  return s;
}

// Observed entries grouped by the index of one mode (CSR layout).
struct ModeBuckets {
  std::vector<std::size_t> row_start;  // size n_mode + 1
  std::vector<std::size_t> entry;      // positions into the entry arrays
};

struct ObservedSet {
  std::vector<std::array<std::size_t, 3>> coords;
  std::vector<Complex> values;
  std::array<ModeBuckets, 3> by_mode;
};

ObservedSet gather(const Observation& obs) {
  const Dims d = obs.y.dims();
  ObservedSet set;
  set.coords.reserve(obs.mask.count());
  set.values.reserve(obs.mask.count());
  for (std::size_t n : obs.mask.indices()) {
    const std::size_t k = n % d.n3;
    const std::size_t j = (n / d.n3) % d.n2;
    const std::size_t i = n / (d.n2 * d.n3);
    set.coords.push_back({i, j, k});
    set.values.push_back(obs.y[n]);
  }
  for (int m = 0; m < 3; ++m) {
    const std::size_t rows = d[m + 1];
    ModeBuckets& b = set.by_mode[m];
    b.row_start.assign(rows + 1, 0);
    for (const auto& c : set.coords) ++b.row_start[c[m] + 1];
    for (std::size_t r = 0; r < rows; ++r) b.row_start[r + 1] += b.row_start[r];
    std::vector<std::size_t> fill(b.row_start.begin(), b.row_start.end() - 1);
    b.entry.resize(set.coords.size());
    for (std::size_t e = 0; e < set.coords.size(); ++e) b.entry[fill[set.coords[e][m]]++] = e;
  }
  return set;
}

double residual_energy(const ObservedSet& set, const std::array<CMatrix, 3>& f) {
  double s = 0.0;
  for (std::size_t e = 0; e < set.coords.size(); ++e) {
    const auto& c = set.coords[e];
    const Complex model =
        (f[0].row(idx(c[0])).cwiseProduct(f[1].row(idx(c[1]))).cwiseProduct(f[2].row(idx(c[2])))).sum();
    s += std::norm(set.values[e] - model);
  }
  return s;
}

double ridge_energy(const std::array<CMatrix, 3>& f, double ridge) {
  return ridge * (f[0].squaredNorm() + f[1].squaredNorm() + f[2].squaredNorm());
}

// Exact minimization over mode `m` rows with the other two factors fixed.
void update_mode(const ObservedSet& set, std::array<CMatrix, 3>& f, int m, double ridge) {
  const int p = (m + 1) % 3;
  const int q = (m + 2) % 3;
  const Eigen::Index rank = f[m].cols();
  const ModeBuckets& b = set.by_mode[m];
  CMatrix gram(rank, rank);
  CVector rhs(rank);
  Eigen::RowVectorXcd z(rank);
  for (std::size_t row = 0; row + 1 < b.row_start.size(); ++row) {
    const std::size_t begin = b.row_start[row];
    const std::size_t end = b.row_start[row + 1];
    if (begin == end) {
      f[m].row(idx(row)).setZero();
      continue;
    }
    gram.setZero();
    rhs.setZero();
    for (std::size_t t = begin; t < end; ++t) {
      const std::size_t e = b.entry[t];
      const auto& c = set.coords[e];
      z = f[p].row(idx(c[p])).cwiseProduct(f[q].row(idx(c[q])));
      gram.noalias() += z.adjoint() * z;
      rhs.noalias() += z.adjoint() * set.values[e];
    }
    gram.diagonal().array() += ridge;
    Eigen::LLT<CMatrix> llt(gram);
    CVector a;
    if (llt.info() == Eigen::Success) {
      a = llt.solve(rhs);
    } else {
      a = gram.completeOrthogonalDecomposition().solve(rhs);
    }
    f[m].row(idx(row)) = a.transpose();
  }
}

CMatrix random_factor(std::size_t rows, std::size_t rank, Rng& rng) {
  CMatrix f(idx(rows), idx(rank));
  for (Eigen::Index c = 0; c < f.cols(); ++c)
    for (Eigen::Index r = 0; r < f.rows(); ++r) f(r, c) = rng.complex_normal(1.0);
  return f;
}

std::array<CMatrix, 3> subspace_init(const Observation& obs, std::size_t rank, Rng& rng) {
  std::array<CMatrix, 3> f;
  for (int m = 1; m <= 3; ++m) {
    const std::size_t n = obs.y.dims()[m];
    CMatrix u = random_factor(n, rank, rng);
    const std::size_t lead = std::min(rank, n);
    u.leftCols(idx(lead)) = leading_mode_subspace(obs.y, m, lead);
    f[m - 1] = std::move(u);
  }
  return f;
}

}  // namespace

void TuckerCompletionConfig::validate(const Dims& dims) const {
  for (int m = 1; m <= 3; ++m) {
    require(ranks[m - 1] >= 1 && ranks[m - 1] <= dims[m],
            "Tucker rank for mode " + std::to_string(m) + " must lie in [1, " +
                std::to_string(dims[m]) + "]");
  }
  require(max_iters >= 1, "Tucker max_iters must be >= 1");
  require(tol > 0.0, "Tucker tolerance must be positive");
  require(denom_guard >= 0.0, "Tucker denominator guard must be nonnegative");
}

TuckerCompletionResult tucker_complete(const Observation& obs, const TuckerCompletionConfig& cfg) {
  cfg.validate(obs.y.dims());
  require(obs.mask.dims() == obs.y.dims(), "tucker_complete: mask and observation dimensions differ");
  TuckerCompletionResult result;
  const double pilot_norm = std::sqrt(pilot_energy(obs));
  if (pilot_norm == 0.0) {
    result.estimate = ComplexTensor3(obs.y.dims());
    result.consistent = result.estimate;
    result.converged = true;
    return result;
  }

  const auto pilots = obs.mask.indices();
  ComplexTensor3 x = obs.y;
  ComplexTensor3 previous_projection = obs.y;
  ComplexTensor3 projection;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    projection = hosvd_project(x, cfg.ranks);
    double change = 0.0;
    for (std::size_t n : pilots) change += std::norm(projection[n] - previous_projection[n]);
    const double delta = std::sqrt(change) / (pilot_norm + cfg.denom_guard);
    result.deltas.push_back(delta);
    result.iterations = t;

    x = projection;
    for (std::size_t n : pilots) x[n] = obs.y[n];

    if (delta < cfg.tol) {
      result.converged = true;
      break;
    }
    previous_projection = projection;
  }
  result.estimate = std::move(projection);
  result.consistent = std::move(x);
  return result;
}

void CPCompletionConfig::validate() const {
  require(rank >= 1, "CP rank must be >= 1");
  require(restarts >= 1, "CP restarts must be >= 1");
  require(max_sweeps >= 1, "CP max_sweeps must be >= 1");
  require(tol > 0.0, "CP tolerance must be positive");
  require(ridge >= 0.0, "CP ridge must be nonnegative");
}

CPCompletionResult cp_wals_complete(const Observation& obs, const CPCompletionConfig& cfg) {
  cfg.validate();
  require(obs.mask.dims() == obs.y.dims(), "cp_wals_complete: mask and observation dimensions differ");
  const double energy = pilot_energy(obs);
  require(energy > 0.0, "cp_wals_complete: observation carries zero pilot energy");
  const ObservedSet set = gather(obs);
  const Dims d = obs.y.dims();

  CPCompletionResult result;
  double best_fit = std::numeric_limits<double>::infinity();
  std::array<CMatrix, 3> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}, "cp_restart"));
    std::array<CMatrix, 3> f;
    if (r == 0 && cfg.hosvd_first_restart) {
      f = subspace_init(obs, cfg.rank, rng);
    } else {
      f = {random_factor(d.n1, cfg.rank, rng), random_factor(d.n2, cfg.rank, rng),
           random_factor(d.n3, cfg.rank, rng)};
    }

    CPRestartTrace trace;
    double fit_energy = residual_energy(set, f);
    trace.initial_fit = fit_energy / energy;
    trace.objective.push_back(fit_energy + ridge_energy(f, cfg.ridge));
    double fit = trace.initial_fit;
    for (int s = 1; s <= cfg.max_sweeps; ++s) {
      for (int m = 0; m < 3; ++m) update_mode(set, f, m, cfg.ridge);
      fit_energy = residual_energy(set, f);
      trace.objective.push_back(fit_energy + ridge_energy(f, cfg.ridge));
      const double new_fit = fit_energy / energy;
      trace.sweeps = s;
      const double change = std::abs(fit - new_fit) / std::max(fit, std::numeric_limits<double>::min());
      fit = new_fit;
      if (change < cfg.tol) break;
    }
    trace.observed_fit = fit;
    trace.diverged = !std::isfinite(fit) || fit > trace.initial_fit;
    result.any_diverged = result.any_diverged || trace.diverged;
    if (std::isfinite(fit) && fit < best_fit) {
      best_fit = fit;
      best = f;
      result.best_restart = r;
    }
    result.restarts.push_back(std::move(trace));
  }
  if (!std::isfinite(best_fit)) throw NumericalError("cp_wals_complete: every restart produced a non-finite fit");
  result.best_restart_fit = best_fit;
  result.model.factors = std::move(best);
  result.estimate = cp_reconstruct(result.model);
  return result;
}

double observed_nmse(const ComplexTensor3& est, const Observation& obs) {
  require(est.dims() == obs.y.dims(), "observed_nmse: dimension mismatch");
  const double energy = pilot_energy(obs);
  require(energy > 0.0, "observed_nmse: observation carries zero pilot energy");
  double s = 0.0;
  for (std::size_t n : obs.mask.indices()) s += std::norm(est[n] - obs.y[n]);
  return s / energy;
}

}  // namespace tensorchan
