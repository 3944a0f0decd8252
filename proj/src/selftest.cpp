#include "tensorchan/selftest.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "tensorchan/baselines.hpp"
#include "tensorchan/completion.hpp"
#include "tensorchan/cten.hpp"
#include "tensorchan/experiment.hpp"
#include "tensorchan/metrics.hpp"
#include "tensorchan/results.hpp"

namespace tensorchan {

namespace {

ComplexTensor3 random_tensor(Dims d, Rng& rng) {
  ComplexTensor3 x(d);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = rng.complex_normal();
  return x;
}

double rel_err(const ComplexTensor3& a, const ComplexTensor3& b) {
  return frobenius_norm(a - b) / std::max(frobenius_norm(b), 1e-300);
}

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

// Each check returns an empty string on success or a failure description.
using Check = std::function<std::string()>;

std::string expect_le(double value, double bound) {
  return value <= bound ? std::string() : sci(value) + " > " + sci(bound);
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"tensor.unfold_fold_roundtrip",
       [] {
         Rng rng(1);
         const auto x = random_tensor({3, 4, 5}, rng);
         for (int m = 1; m <= 3; ++m) {
           if (!(fold(unfold(x, m), m, x.dims()) == x)) return "mode " + std::to_string(m);
         }
         return std::string();
       }},
      {"tensor.mode_product_identity",
       [] {
         Rng rng(2);
         const auto x = random_tensor({3, 4, 5}, rng);
         for (int m = 1; m <= 3; ++m) {
           const CMatrix eye = CMatrix::Identity(static_cast<Eigen::Index>(x.dims()[m]),
                                                static_cast<Eigen::Index>(x.dims()[m]));
           if (!(mode_product(x, eye, m) == x)) return "mode " + std::to_string(m);
         }
         return std::string();
       }},
      {"tensor.hosvd_full_rank",
       [] {
         Rng rng(3);
         const auto x = random_tensor({4, 5, 6}, rng);
         return expect_le(rel_err(tucker_reconstruct(truncated_hosvd(x, {4, 5, 6})), x), 1e-12);
       }},
      {"tensor.norm_single_entry",
       [] {
         ComplexTensor3 x({1, 1, 1});
         x(0, 0, 0) = {3.0, 4.0};
         return expect_le(std::abs(frobenius_norm(x) - 5.0), 0.0);
       }},
      {"channel.steering_broadside",
       [] {
         const CVector a = steering_vector(4, 0.0);
         return expect_le((a - CVector::Ones(4)).norm(), 0.0);
       }},
      {"channel.steering_endfire",
       [] {
         const CVector a = steering_vector(2, std::numbers::pi / 2);
         return expect_le(std::abs(a(1) + 1.0), 1e-15);
       }},
      {"channel.single_path_all_ones",
       [] {
         MultipathParams p{{0.0}, {0.0}, {Complex(1.0)}, {0.0}};
         const auto h = synthesize_channel({3, 3, 4}, p);
         return expect_le(rel_err(h, ComplexTensor3({3, 3, 4}, std::vector<Complex>(36, 1.0))), 0.0);
       }},
      {"channel.random_mask_count",
       [] {
         Rng rng(4);
         const auto m = generate_mask(MaskPattern::kRandom, 0.10, {32, 32, 128}, rng);
         return m.count() == 13107 ? std::string() : "count " + std::to_string(m.count());
       }},
      {"channel.comb_mask",
       [] {
         Rng rng(5);
         const auto m = generate_mask(MaskPattern::kComb, 0.25, {2, 2, 64}, rng);
         return expect_le(std::abs(m.realized_rho() - 0.25), 0.0);
       }},
      {"channel.noiseless_observation",
       [] {
         Rng rng(6);
         const auto h = generate_channel({8, 8, 16, 3, 6}).h;
         const auto mask = generate_mask(MaskPattern::kRandom, 0.3, h.dims(), rng);
         const auto obs = observe(h, mask, std::numeric_limits<double>::infinity(), rng);
         ComplexTensor3 expect(h.dims());
         for (std::size_t n : mask.indices()) expect[n] = h[n];
         return obs.y == expect ? std::string() : std::string("y != M * h");
       }},
      {"completion.tucker_full_observation",
       [] {
         Rng rng(7);
         const auto h = generate_channel({8, 8, 16, 2, 7}).h;
         const auto obs = observe(h, generate_mask(MaskPattern::kRandom, 1.0, h.dims(), rng),
                                  std::numeric_limits<double>::infinity(), rng);
         TuckerCompletionConfig cfg;
         cfg.ranks = {2, 2, 3};
         return expect_le(nmse(tucker_complete(obs, cfg).estimate, h), 1e-10);
       }},
      {"completion.cp_objective_monotone",
       [] {
         Rng rng(8);
         const auto h = generate_channel({8, 8, 16, 3, 8}).h;
         const auto obs = observe(h, generate_mask(MaskPattern::kRandom, 0.4, h.dims(), rng), 20.0, rng);
         CPCompletionConfig cfg;
         cfg.rank = 3;
         const auto res = cp_wals_complete(obs, cfg);
         for (const auto& r : res.restarts) {
           for (std::size_t s = 1; s < r.objective.size(); ++s) {
             if (r.objective[s] > r.objective[s - 1] * (1.0 + 1e-10)) return "increase at sweep " + std::to_string(s);
           }
         }
         return std::string();
       }},
      {"baselines.ls_noiseless_energy",
       [] {
         Rng rng(9);
         const auto h = generate_channel({8, 8, 16, 3, 9}).h;
         const auto mask = generate_mask(MaskPattern::kRandom, 0.2, h.dims(), rng);
         const auto obs = observe(h, mask, std::numeric_limits<double>::infinity(), rng);
         const double observed = squared_norm(obs.y) / squared_norm(h);
         return expect_le(std::abs(nmse(ls_estimate(obs), h) - (1.0 - observed)), 1e-12);
       }},
      {"baselines.somp_on_grid",
       [] {
         const auto dict = make_angular_dictionary(8, 8, 8, 8);
         MultipathParams p{{dict.grid_rx[3]}, {dict.grid_tx[5]}, {Complex(1.0)}, {0.25}};
         const auto h = synthesize_channel({8, 8, 16}, p);
         Rng rng(10);
         const auto obs = observe(h, generate_mask(MaskPattern::kRandom, 1.0, h.dims(), rng),
                                  std::numeric_limits<double>::infinity(), rng);
         return expect_le(nmse(somp_estimate(obs, dict, 1), h), 1e-10);
       }},
      {"metrics.nmse_scaling",
       [] {
         Rng rng(11);
         const auto x = random_tensor({2, 3, 4}, rng);
         return expect_le(std::abs(nmse(Complex(2.0) * x, x) - 1.0) + nmse(x, x), 1e-15);
       }},
      {"metrics.dof",
       [] {
         const Dims d{32, 32, 128};
         if (dof_tucker({2, 2, 3}, d) != 524) return std::string("dof_tucker L=2");
         if (dof_tucker({15, 15, 16}, d) != 6608) return std::string("dof_tucker L=15");
         if (dof_cp(5, d) != 960) return std::string("dof_cp");
         return std::string();
       }},
      {"metrics.threshold_step",
       [] {
         const std::vector<double> curve{0.5, 0.2, 0.05, 0.009, 0.001};
         const auto i = first_recovery_index(curve);
         return i && *i == 3 ? std::string() : std::string("wrong index");
       }},
      {"cten.roundtrip",
       [] {
         Rng rng(12);
         const auto x = random_tensor({2, 3, 4}, rng);
         const auto back = decode_cten(encode_cten(x, CtenDtype::kComplex128));
         return back.tensor == x ? std::string() : std::string("payload mismatch");
       }},
      {"harness.record_count",
       [] {
         ExperimentConfig cfg;
         cfg.dims = {4, 4, 8};
         cfg.n_paths = {2};
         cfg.pilot_ratios = {0.3, 0.5, 0.7};
         cfg.snr_db = {20.0};
         cfg.estimators = {EstimatorSpec{}, EstimatorSpec{}};
         cfg.estimators[1].kind = EstimatorKind::kTucker;
         cfg.estimators[1].ranks = Ranks{2, 2, 3};
         cfg.mc_runs = 2;
         cfg.threads = 1;
         const auto records = run_monte_carlo(cfg);
         return records.size() == 12 ? std::string() : "records " + std::to_string(records.size());
       }},
      {"results.csv_roundtrip",
       [] {
         RunRecord r;
         r.estimator = "tucker";
         r.pilot_ratio = 0.1;
         r.snr_db = 10.0;
         r.n_paths = 5;
         r.nmse = 0.0123;
         r.nmse_db = to_db(r.nmse);
         r.seed = 99;
         const auto back = parse_csv(format_csv({r}));
         return back.size() == 1 && back[0] == r ? std::string() : std::string("record mismatch");
       }},
  };

  std::vector<SelftestCheck> out;
  for (const auto& [name, fn] : checks) {
    SelftestCheck c{name, false, {}};
    try {
      c.detail = fn();
      c.passed = c.detail.empty();
    } catch (const std::exception& e) {
      c.detail = std::string("exception: ") + e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tensorchan
