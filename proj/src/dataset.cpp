#include "tensorchan/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "tensorchan/completion.hpp"
#include "tensorchan/cten.hpp"
#include "tensorchan/error.hpp"
#include "tensorchan/metrics.hpp"
#include "tensorchan/results.hpp"

namespace tensorchan {

namespace {

using nlohmann::json;

json dims_json(const Dims& d) { return json::array({d.n1, d.n2, d.n3}); }
json ranks_json(const Ranks& r) { return json::array({r[0], r[1], r[2]}); }

std::string sample_dir_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06zu", index);
  return buf;
}

}  // namespace

void HybridExportConfig::validate() const {
  require(dims.n1 >= 1 && dims.n2 >= 1 && dims.n3 >= 1, "export dimensions must be >= 1");
  require(n_paths >= 1, "n_paths must be >= 1");
  require(diffuse_fraction >= 0.0 && diffuse_fraction < 1.0, "diffuse_fraction must lie in [0, 1)");
  require(!pilot_ratios.empty() && !snr_db.empty(), "pilot ratio and SNR lists must be non-empty");
  for (double rho : pilot_ratios) require(rho > 0.0 && rho <= 1.0, "pilot ratio must lie in (0, 1]");
  TuckerCompletionConfig tc;
  tc.ranks = ranks;
  tc.max_iters = max_iters;
  tc.tol = tol;
  tc.validate(dims);
}

std::vector<std::string> split_assignment(std::size_t count, std::uint64_t split_seed) {
  std::vector<std::size_t> perm(count);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(derive_seed(split_seed, {count}, "split"));
  for (std::size_t i = count; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
  const std::size_t n_train = (count * 8) / 10;
  const std::size_t n_val = count / 10;
  std::vector<std::string> split(count);
  for (std::size_t pos = 0; pos < count; ++pos) {
    split[perm[pos]] = pos < n_train ? "train" : (pos < n_train + n_val ? "val" : "test");
  }
  return split;
}

HybridManifest export_hybrid_dataset(const HybridExportConfig& cfg, std::size_t count,
                                     const std::filesystem::path& out_dir) {
  cfg.validate();
  require(count >= 1, "export count must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir.string() + ": " + ec.message());

  TuckerCompletionConfig tc;
  tc.ranks = cfg.ranks;
  tc.max_iters = cfg.max_iters;
  tc.tol = cfg.tol;

  HybridManifest manifest;
  manifest.config = cfg;
  const auto split = split_assignment(count, cfg.split_seed);
  json samples = json::array();

  for (std::size_t n = 0; n < count; ++n) {
    const std::uint64_t seed = derive_seed(cfg.base_seed, {n}, "hybrid_sample");
    Rng pick(derive_seed(seed, {}, "sweep"));
    const double rho = cfg.pilot_ratios[pick.uniform_index(cfg.pilot_ratios.size())];
    const double snr = cfg.snr_db[pick.uniform_index(cfg.snr_db.size())];

    const ChannelSpec spec{cfg.dims.n1, cfg.dims.n2, cfg.dims.n3, cfg.n_paths, seed};
    Rng channel_rng(derive_seed(seed, {}, "channel"));
    Rng mask_rng(derive_seed(seed, {}, "mask"));
    Rng noise_rng(derive_seed(seed, {}, "noise"));
    const ComplexTensor3 h = generate_rich_channel(spec, cfg.diffuse_fraction, channel_rng);
    const PilotMask mask = generate_mask(cfg.mask_pattern, rho, cfg.dims, mask_rng);
    const Observation obs = observe(h, mask, snr, noise_rng);
    auto completion = tucker_complete(obs, tc);
    const ComplexTensor3& hlr = cfg.reimpose_pilots ? completion.consistent : completion.estimate;

    HybridSample s;
    s.index = n;
    s.dir = sample_dir_name(n);
    s.split = split[n];
    s.pilot_ratio = rho;
    s.snr_db = snr;
    s.seed = seed;
    s.nmse_hlr = nmse(hlr, h);
    s.nmse_ls = nmse(obs.y, h);

    const auto dir = out_dir / s.dir;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    write_cten(dir / "H.cten", h);
    write_cten(dir / "Y.cten", obs.y);
    write_mask_cten(dir / "M.cten", mask);
    write_cten(dir / "HLR.cten", hlr);

    json meta;
    meta["index"] = n;
    meta["dims"] = dims_json(cfg.dims);
    meta["n_paths"] = cfg.n_paths;
    meta["diffuse_fraction"] = cfg.diffuse_fraction;
    meta["pilot_ratio"] = rho;
    meta["realized_pilot_ratio"] = mask.realized_rho();
    meta["mask_pattern"] = std::string(to_string(cfg.mask_pattern));
    meta["snr_db"] = snr;
    meta["noise_var"] = obs.noise_var;
    meta["seed"] = seed;
    meta["seeds"] = {{"channel", channel_rng.key()}, {"mask", mask_rng.key()}, {"noise", noise_rng.key()}};
    meta["ranks"] = ranks_json(cfg.ranks);
    meta["tucker_iterations"] = completion.iterations;
    meta["reimpose_pilots"] = cfg.reimpose_pilots;
    meta["nmse_hlr"] = s.nmse_hlr;
    meta["nmse_ls"] = s.nmse_ls;
    meta["split"] = s.split;
    write_text(dir / "meta.json", meta.dump(2) + '\n');

    samples.push_back({{"index", n},
                       {"dir", s.dir},
                       {"split", s.split},
                       {"pilot_ratio", rho},
                       {"snr_db", snr},
                       {"nmse_hlr", s.nmse_hlr}});
    manifest.samples.push_back(std::move(s));
  }

  json m;
  m["format_version"] = 1;
  m["count"] = count;
  m["dims"] = dims_json(cfg.dims);
  m["n_paths"] = cfg.n_paths;
  m["diffuse_fraction"] = cfg.diffuse_fraction;
  m["ranks"] = ranks_json(cfg.ranks);
  m["max_iters"] = cfg.max_iters;
  m["reimpose_pilots"] = cfg.reimpose_pilots;
  m["mask_pattern"] = std::string(to_string(cfg.mask_pattern));
  m["pilot_ratio_range"] = cfg.pilot_ratios;
  m["snr_db_range"] = cfg.snr_db;
  m["base_seed"] = cfg.base_seed;
  m["split_seed"] = cfg.split_seed;
  m["split_fractions"] = {{"train", 0.8}, {"val", 0.1}, {"test", 0.1}};
  m["files"] = {{"truth", "H.cten"}, {"observation", "Y.cten"}, {"mask", "M.cten"}, {"prior", "HLR.cten"},
                {"meta", "meta.json"}};
  m["samples"] = std::move(samples);
  write_text(out_dir / "manifest.json", m.dump(2) + '\n');
  return manifest;
}

}  // namespace tensorchan
