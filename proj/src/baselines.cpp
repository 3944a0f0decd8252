#include "tensorchan/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

std::vector<double> sine_grid(std::size_t g) {
  std::vector<double> angles(g);
  for (std::size_t n = 0; n < g; ++n) {
    const double s = -1.0 + 2.0 * static_cast<double>(n) / static_cast<double>(g);
    angles[n] = std::asin(s);
  }
  return angles;
}

std::vector<double> angle_grid(std::size_t g) {
  std::vector<double> angles(g);
  for (std::size_t n = 0; n < g; ++n) {
    angles[n] = std::numbers::pi * ((static_cast<double>(n) + 0.5) / static_cast<double>(g) - 0.5);
  }
  return angles;
}

CMatrix steering_matrix(std::size_t n, const std::vector<double>& angles) {
  CMatrix a(idx(n), idx(angles.size()));
  for (std::size_t g = 0; g < angles.size(); ++g) a.col(idx(g)) = steering_vector(n, angles[g]);
  return a;
}

}  // namespace

ComplexTensor3 ls_estimate(const Observation& obs) { return obs.y; }

FrequencyCovariance estimate_frequency_covariance(const std::vector<ComplexTensor3>& training) {
  if (training.empty()) throw ContractError("frequency covariance needs at least one training channel");
  const Dims d = training.front().dims();
  CMatrix r = CMatrix::Zero(idx(d.n3), idx(d.n3));
  for (const auto& h : training) {
    require(h.dims().n3 == d.n3, "training channels must share the subcarrier count");
    const Dims hd = h.dims();
    Eigen::Map<const CMatrix> fibers(h.data().data(), idx(hd.n3), idx(hd.n1 * hd.n2));
    r.noalias() += fibers * fibers.adjoint();
  }
  std::size_t fiber_count = 0;
  for (const auto& h : training) fiber_count += h.dims().n1 * h.dims().n2;
  r /= static_cast<double>(fiber_count);
  FrequencyCovariance cov;
  cov.r_f = 0.5 * (r + r.adjoint());
  cov.n_train = training.size();
  return cov;
}

ComplexTensor3 lmmse_estimate(const Observation& obs, const FrequencyCovariance& cov) {
  const Dims d = obs.y.dims();
  require(static_cast<std::size_t>(cov.r_f.rows()) == d.n3 && cov.r_f.cols() == cov.r_f.rows(),
          "LMMSE covariance size does not match the subcarrier count");
  const auto flags = obs.mask.flags();
  ComplexTensor3 est(d);
  std::vector<Eigen::Index> observed;
  observed.reserve(d.n3);
  for (std::size_t i = 0; i < d.n1; ++i)
    for (std::size_t j = 0; j < d.n2; ++j) {
      const std::size_t base = (i * d.n2 + j) * d.n3;
      observed.clear();
      for (std::size_t k = 0; k < d.n3; ++k)
        if (flags[base + k]) observed.push_back(idx(k));
      if (observed.empty()) continue;
      const auto s = static_cast<Eigen::Index>(observed.size());
      CMatrix r_ss(s, s);
      CMatrix r_fs(idx(d.n3), s);
      CVector y_s(s);
      for (Eigen::Index a = 0; a < s; ++a) {
        y_s(a) = obs.y[base + static_cast<std::size_t>(observed[static_cast<std::size_t>(a)])];
        r_fs.col(a) = cov.r_f.col(observed[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < s; ++b)
          r_ss(a, b) = cov.r_f(observed[static_cast<std::size_t>(a)], observed[static_cast<std::size_t>(b)]);
      }
      r_ss.diagonal().array() += obs.noise_var + kDiagonalLoading;
      Eigen::LDLT<CMatrix> ldlt(r_ss);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericalError("LMMSE: singular fiber system at (" + std::to_string(i) + ", " +
                             std::to_string(j) + ") with " + std::to_string(s) + " pilots");
      }
      const CVector h = r_fs * ldlt.solve(y_s);
      for (std::size_t k = 0; k < d.n3; ++k) est(i, j, k) = h(idx(k));
    }
  return est;
}

AngularDictionary make_angular_dictionary(std::size_t n_r, std::size_t n_t, std::size_t grid_rx,
                                          std::size_t grid_tx, GridSpacing spacing) {
  require(grid_rx >= 1 && grid_tx >= 1, "dictionary grids must be non-empty");
  AngularDictionary dict;
  const auto grid = spacing == GridSpacing::kSine ? sine_grid : angle_grid;
  dict.grid_rx = grid(grid_rx);
  dict.grid_tx = grid(grid_tx);
  dict.a_rx = steering_matrix(n_r, dict.grid_rx);
  dict.a_tx = steering_matrix(n_t, dict.grid_tx);
  return dict;
}

SompResult somp(const Observation& obs, const AngularDictionary& dict, std::size_t sparsity) {
  require(sparsity >= 1, "SOMP sparsity must be >= 1");
  const Dims d = obs.y.dims();
  require(static_cast<std::size_t>(dict.a_rx.rows()) == d.n1 &&
              static_cast<std::size_t>(dict.a_tx.rows()) == d.n2,
          "SOMP dictionary does not match the antenna counts");
  const Eigen::Index g_r = dict.a_rx.cols();
  const Eigen::Index g_t = dict.a_tx.cols();
  require(sparsity <= static_cast<std::size_t>(g_r * g_t), "SOMP sparsity exceeds the dictionary size");

  // Per-subcarrier observed (rx, tx) pairs and values.
  struct Subcarrier {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    CVector y;
    CVector residual;
    CMatrix phi;  // |Ω_k| × selected atoms
    CVector coef;
  };
  std::vector<Subcarrier> sub(d.n3);
  {
    std::vector<std::vector<Complex>> values(d.n3);
    for (std::size_t n : obs.mask.indices()) {
      const std::size_t k = n % d.n3;
      const std::size_t j = (n / d.n3) % d.n2;
      const std::size_t i = n / (d.n2 * d.n3);
      sub[k].pairs.emplace_back(idx(i), idx(j));
      values[k].push_back(obs.y[n]);
    }
    for (std::size_t k = 0; k < d.n3; ++k) {
      sub[k].y = Eigen::Map<const CVector>(values[k].data(), idx(values[k].size()));
      sub[k].residual = sub[k].y;
      sub[k].phi.resize(idx(values[k].size()), 0);
    }
  }

  SompResult result;
  auto total_residual = [&] {
    double s = 0.0;
    for (const auto& sc : sub) s += sc.residual.squaredNorm();
    return std::sqrt(s);
  };
  result.residual_norms.push_back(total_residual());

  std::vector<char> selected(static_cast<std::size_t>(g_r * g_t), 0);
  const CMatrix a_rx_h = dict.a_rx.adjoint();
  Eigen::MatrixXd score(g_r, g_t);
  CMatrix partial(g_r, idx(d.n2));
  for (std::size_t step = 0; step < sparsity; ++step) {
    score.setZero();
    for (auto& sc : sub) {
      if (sc.pairs.empty()) continue;
      // ⟨residual, atom⟩ over Ω_k for every atom: A_rxᴴ R_k A_tx.
      partial.setZero();
      for (std::size_t e = 0; e < sc.pairs.size(); ++e) {
        const auto [i, j] = sc.pairs[e];
        partial.col(j) += a_rx_h.col(i) * sc.residual(idx(e));
      }
      score += (partial * dict.a_tx).cwiseAbs2() / static_cast<double>(sc.pairs.size());
    }
    Eigen::Index best_r = -1;
    Eigen::Index best_t = -1;
    double best = -1.0;
    for (Eigen::Index t = 0; t < g_t; ++t)
      for (Eigen::Index r = 0; r < g_r; ++r) {
        if (selected[static_cast<std::size_t>(r * g_t + t)]) continue;
        if (score(r, t) > best) {
          best = score(r, t);
          best_r = r;
          best_t = t;
        }
      }
    selected[static_cast<std::size_t>(best_r * g_t + best_t)] = 1;
    result.support.emplace_back(static_cast<std::size_t>(best_r), static_cast<std::size_t>(best_t));

    for (auto& sc : sub) {
      const Eigen::Index m = idx(sc.pairs.size());
      const Eigen::Index s = sc.phi.cols();
      sc.phi.conservativeResize(m, s + 1);
      for (Eigen::Index e = 0; e < m; ++e) {
        const auto [i, j] = sc.pairs[static_cast<std::size_t>(e)];
        sc.phi(e, s) = dict.a_rx(i, best_r) * std::conj(dict.a_tx(j, best_t));
      }
      if (m == 0) {
        sc.coef = CVector::Zero(s + 1);
        continue;
      }
      CMatrix gram = sc.phi.adjoint() * sc.phi;
      gram.diagonal().array() += kDiagonalLoading;
      sc.coef = gram.ldlt().solve(sc.phi.adjoint() * sc.y);
      sc.residual = sc.y - sc.phi * sc.coef;
    }
    result.residual_norms.push_back(total_residual());
  }

  // Synthesize every subcarrier from its fitted coefficients.
  CMatrix atoms_rx(idx(d.n1), idx(sparsity));
  CMatrix atoms_tx(idx(d.n2), idx(sparsity));
  for (std::size_t s = 0; s < sparsity; ++s) {
    atoms_rx.col(idx(s)) = dict.a_rx.col(idx(result.support[s].first));
    atoms_tx.col(idx(s)) = dict.a_tx.col(idx(result.support[s].second)).conjugate();
  }
  result.estimate = ComplexTensor3(d);
  for (std::size_t k = 0; k < d.n3; ++k) {
    const CMatrix slice = atoms_rx * sub[k].coef.asDiagonal() * atoms_tx.transpose();
    for (std::size_t i = 0; i < d.n1; ++i)
      for (std::size_t j = 0; j < d.n2; ++j) result.estimate(i, j, k) = slice(idx(i), idx(j));
  }
  return result;
}

ComplexTensor3 somp_estimate(const Observation& obs, const AngularDictionary& dict,
                             std::size_t sparsity) {
  return somp(obs, dict, sparsity).estimate;
}

}  // namespace tensorchan
