#include <limits>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tensorchan/baselines.hpp"
#include "tensorchan/completion.hpp"
#include "tensorchan/cten.hpp"
#include "tensorchan/dataset.hpp"
#include "tensorchan/error.hpp"
#include "tensorchan/experiment.hpp"
#include "tensorchan/metrics.hpp"
#include "tensorchan/results.hpp"
#include "tensorchan/selftest.hpp"

namespace py = pybind11;
using namespace tensorchan;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

CArray to_numpy(const ComplexTensor3& x) {
  const Dims d = x.dims();
  CArray out({d.n1, d.n2, d.n3});
  std::copy(x.data().begin(), x.data().end(), out.mutable_data());
  return out;
}

ComplexTensor3 from_numpy(const CArray& a) {
  if (a.ndim() != 3) throw ContractError("expected a 3-D array");
  const Dims d{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
               static_cast<std::size_t>(a.shape(2))};
  return ComplexTensor3(d, std::vector<Complex>(a.data(), a.data() + a.size()));
}

Observation make_observation(const CArray& y, const CArray& mask, double noise_var, double snr_db) {
  return observation_from(from_numpy(y), from_numpy(mask), noise_var, snr_db);
}

}  // namespace

PYBIND11_MODULE(_tensorchan, m) {
  m.doc() = "Low-rank tensor completion for pilot-limited wideband MIMO channel estimation";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "generate_channel",
      [](std::size_t n_r, std::size_t n_t, std::size_t n_f, std::size_t n_paths, std::uint64_t seed) {
        return to_numpy(generate_channel(ChannelSpec{n_r, n_t, n_f, n_paths, seed}).h);
      },
      py::arg("n_r") = 32, py::arg("n_t") = 32, py::arg("n_f") = 128, py::arg("n_paths") = 5,
      py::arg("seed") = 42);

  m.def(
      "generate_rich_channel",
      [](std::size_t n_r, std::size_t n_t, std::size_t n_f, std::size_t n_paths, double diffuse, std::uint64_t seed) {
        Rng rng(seed);
        return to_numpy(generate_rich_channel(ChannelSpec{n_r, n_t, n_f, n_paths, seed}, diffuse, rng));
      },
      py::arg("n_r"), py::arg("n_t"), py::arg("n_f"), py::arg("n_paths"), py::arg("diffuse_fraction"),
      py::arg("seed") = 42);

  m.def(
      "observe",
      [](const CArray& h, double rho, double snr_db, const std::string& pattern, std::uint64_t seed) {
        const ComplexTensor3 ht = from_numpy(h);
        Rng rng(seed);
        const PilotMask mask = generate_mask(parse_mask_pattern(pattern), rho, ht.dims(), rng);
        const Observation obs = observe(ht, mask, snr_db, rng);
        return py::make_tuple(to_numpy(obs.y), to_numpy(mask.as_tensor()).attr("real").attr("astype")("uint8"),
                              obs.noise_var);
      },
      py::arg("h"), py::arg("pilot_ratio"), py::arg("snr_db") = std::numeric_limits<double>::infinity(),
      py::arg("mask") = "random", py::arg("seed") = 42,
      "Returns (y, mask, noise_var); mask is a uint8 array of 0/1.");

  m.def(
      "tucker_complete",
      [](const CArray& y, const CArray& mask, std::array<std::size_t, 3> ranks, int max_iters, double tol,
         bool reimpose_pilots) {
        TuckerCompletionConfig cfg;
        cfg.ranks = ranks;
        cfg.max_iters = max_iters;
        cfg.tol = tol;
        auto res = tucker_complete(make_observation(y, mask, 0.0, std::numeric_limits<double>::infinity()), cfg);
        return py::make_tuple(to_numpy(reimpose_pilots ? res.consistent : res.estimate), res.iterations,
                              res.converged);
      },
      py::arg("y"), py::arg("mask"), py::arg("ranks"), py::arg("max_iters") = 20, py::arg("tol") = 1e-6,
      py::arg("reimpose_pilots") = true, "Returns (estimate, iterations, converged).");

  m.def(
      "cp_complete",
      [](const CArray& y, const CArray& mask, std::size_t rank, int restarts, int max_sweeps, double ridge,
         std::uint64_t seed, bool hosvd_init) {
        CPCompletionConfig cfg;
        cfg.rank = rank;
        cfg.restarts = restarts;
        cfg.max_sweeps = max_sweeps;
        cfg.ridge = ridge;
        cfg.seed = seed;
        cfg.hosvd_first_restart = hosvd_init;
        auto res = cp_wals_complete(make_observation(y, mask, 0.0, std::numeric_limits<double>::infinity()), cfg);
        return py::make_tuple(to_numpy(res.estimate), res.best_restart_fit);
      },
      py::arg("y"), py::arg("mask"), py::arg("rank") = 5, py::arg("restarts") = 5, py::arg("max_sweeps") = 50,
      py::arg("ridge") = 1e-8, py::arg("seed") = 42, py::arg("hosvd_init") = false, "Returns (estimate, best observed-entry NMSE).");

  m.def(
      "somp_estimate",
      [](const CArray& y, const CArray& mask, std::size_t sparsity) {
        const Observation obs = make_observation(y, mask, 0.0, std::numeric_limits<double>::infinity());
        const Dims d = obs.y.dims();
        return to_numpy(somp_estimate(obs, make_angular_dictionary(d.n1, d.n2, d.n1, d.n2, GridSpacing::kAngle), sparsity));
      },
      py::arg("y"), py::arg("mask"), py::arg("sparsity"));

  m.def(
      "nmse", [](const CArray& est, const CArray& truth) { return nmse(from_numpy(est), from_numpy(truth)); },
      py::arg("est"), py::arg("truth"));
  m.def("dof_cp", [](std::size_t l, std::array<std::size_t, 3> d) { return dof_cp(l, {d[0], d[1], d[2]}); });
  m.def("dof_tucker", [](Ranks r, std::array<std::size_t, 3> d) { return dof_tucker(r, {d[0], d[1], d[2]}); });

  m.def(
      "write_cten", [](const std::filesystem::path& p, const CArray& x) { write_cten(p, from_numpy(x)); },
      py::arg("path"), py::arg("x"));
  m.def(
      "read_cten", [](const std::filesystem::path& p) { return to_numpy(read_cten(p).tensor); }, py::arg("path"),
      "Mask files decode to complex 0/1 entries.");

  m.def(
      "export_hybrid_dataset",
      [](const std::filesystem::path& out_dir, std::size_t count, std::array<std::size_t, 3> dims, Ranks ranks,
         double diffuse, std::uint64_t seed) {
        HybridExportConfig cfg;
        cfg.dims = {dims[0], dims[1], dims[2]};
        cfg.ranks = ranks;
        cfg.diffuse_fraction = diffuse;
        cfg.base_seed = seed;
        const auto manifest = export_hybrid_dataset(cfg, count, out_dir);
        py::list out;
        for (const auto& s : manifest.samples) {
          py::dict d;
          d["index"] = s.index;
          d["dir"] = s.dir;
          d["split"] = s.split;
          d["pilot_ratio"] = s.pilot_ratio;
          d["snr_db"] = s.snr_db;
          d["nmse_hlr"] = s.nmse_hlr;
          out.append(d);
        }
        return out;
      },
      py::arg("out_dir"), py::arg("count"), py::arg("dims") = std::array<std::size_t, 3>{16, 32, 64},
      py::arg("ranks") = Ranks{4, 4, 8}, py::arg("diffuse_fraction") = 0.3, py::arg("seed") = 42);

  m.def(
      "run_experiment",
      [](const std::string& which, int mc_runs, std::array<std::size_t, 3> dims, unsigned threads) {
        ExperimentConfig cfg = which == "exp1"   ? experiment1_config(mc_runs)
                               : which == "exp2" ? experiment2_config(mc_runs)
                               : which == "exp4" ? experiment4_config(mc_runs)
                                                 : throw ContractError("experiment must be exp1, exp2 or exp4");
        cfg.dims = {dims[0], dims[1], dims[2]};
        cfg.threads = threads;
        return format_csv(run_experiment(cfg).records);
      },
      py::arg("experiment"), py::arg("mc_runs"), py::arg("dims") = std::array<std::size_t, 3>{32, 32, 128},
      py::arg("threads") = 0, "Runs a study and returns the per-run CSV text.");

  m.def("selftest", [] {
    py::list out;
    for (const auto& c : run_selftest()) out.append(py::make_tuple(c.name, c.passed, c.detail));
    return out;
  });
}
