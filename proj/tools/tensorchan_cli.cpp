// tensorchan command-line front end.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tensorchan/baselines.hpp"
#include "tensorchan/completion.hpp"
#include "tensorchan/cten.hpp"
#include "tensorchan/dataset.hpp"
#include "tensorchan/error.hpp"
#include "tensorchan/experiment.hpp"
#include "tensorchan/results.hpp"
#include "tensorchan/selftest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tensorchan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::optional<std::size_t> nr, nt, nf;
  std::vector<std::size_t> paths;
  std::vector<double> pilot_ratio;
  std::vector<std::string> snr_db;  // parsed separately to allow "inf"
  std::string mask = "random";
  std::vector<std::string> methods;
  std::string ranks;
  std::optional<std::size_t> cp_rank;
  bool cp_hosvd_init = false;
  std::optional<std::size_t> sparsity;
  std::optional<int> mc_runs;
  std::optional<int> max_iters;
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
  unsigned threads = 0;
  bool quiet = false;
  // simulate / export
  double diffuse = 0.0;
  std::optional<double> export_diffuse;
  std::size_t count = 100;
  // complete
  std::string in_dir;
  std::size_t lmmse_train = 200;
  std::string config;
};

double parse_snr(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "noiseless") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == s.size() && !s.empty(), "invalid --snr-db value '" + s + "'");
  return v;
}

std::vector<double> snr_values(const Options& o) {
  std::vector<double> out;
  for (const auto& s : o.snr_db) out.push_back(parse_snr(s));
  return out;
}

std::optional<Ranks> parse_ranks(const std::string& text) {
  if (text.empty()) return std::nullopt;
  Ranks r{};
  std::stringstream ss(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(ss, item, ',')) {
    require(n < 3, "--ranks expects three comma-separated integers");
    try {
      const long v = std::stol(item);
      require(v >= 1, "--ranks entries must be >= 1");
      r[n++] = static_cast<std::size_t>(v);
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ContractError*>(&e)) throw;
      throw ContractError("--ranks expects three comma-separated integers, got '" + text + "'");
    }
  }
  require(n == 3, "--ranks expects three comma-separated integers");
  return r;
}

double single(const std::vector<double>& v, const char* flag, double fallback) {
  if (v.empty()) return fallback;
  require(v.size() == 1, std::string(flag) + " takes a single value for this subcommand");
  return v.front();
}

Dims dims_from(const Options& o, Dims base) {
  if (o.nr) base.n1 = *o.nr;
  if (o.nt) base.n2 = *o.nt;
  if (o.nf) base.n3 = *o.nf;
  require(base.n1 >= 1 && base.n2 >= 1 && base.n3 >= 1, "--nr, --nt and --nf must be >= 1");
  return base;
}

void check_ratio(double rho) {
  require(rho > 0.0 && rho <= 1.0, "--pilot-ratio must lie in (0, 1], got " + std::to_string(rho));
}

void progress_line(const Options& o, const std::string& text) {
  if (!o.quiet) std::cerr << text << '\n';
}

// Applies --method/--ranks/--cp-rank/--sparsity/--max-iters to a roster.
void apply_estimator_flags(const Options& o, std::vector<EstimatorSpec>& roster) {
  if (!o.methods.empty()) {
    std::vector<EstimatorSpec> chosen;
    for (const auto& name : o.methods) {
      const EstimatorKind kind = parse_estimator(name);
      EstimatorSpec spec;
      spec.kind = kind;
      for (const auto& existing : roster) {
        if (existing.kind == kind) spec = existing;
      }
      chosen.push_back(spec);
    }
    roster = std::move(chosen);
  }
  const auto ranks = parse_ranks(o.ranks);
  for (auto& e : roster) {
    if (e.kind == EstimatorKind::kTucker) {
      if (ranks) e.ranks = ranks;
      if (o.max_iters) e.max_iters = *o.max_iters;
    }
    if (e.kind == EstimatorKind::kCp && o.cp_rank) e.cp_rank = *o.cp_rank;
    if (e.kind == EstimatorKind::kCp) e.cp_hosvd_init = o.cp_hosvd_init;
    if (e.kind == EstimatorKind::kOmp && o.sparsity) e.sparsity = *o.sparsity;
    if (e.kind == EstimatorKind::kLmmse) e.lmmse_train = o.lmmse_train;
  }
}

ExperimentConfig experiment_config(const std::string& which, const Options& o) {
  ExperimentConfig cfg = which == "exp1"   ? experiment1_config()
                         : which == "exp2" ? experiment2_config()
                                           : experiment4_config();
  cfg.dims = dims_from(o, cfg.dims);
  if (!o.paths.empty()) cfg.n_paths = o.paths;
  if (!o.pilot_ratio.empty()) cfg.pilot_ratios = o.pilot_ratio;
  if (!o.snr_db.empty()) cfg.snr_db = snr_values(o);
  for (double rho : cfg.pilot_ratios) check_ratio(rho);
  cfg.mask_pattern = parse_mask_pattern(o.mask);
  if (o.mc_runs) cfg.mc_runs = *o.mc_runs;
  cfg.base_seed = o.seed;
  cfg.threads = o.threads;
  cfg.output_path = o.out;
  apply_estimator_flags(o, cfg.estimators);
  cfg.validate();
  return cfg;
}

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

int run_experiment_cmd(const std::string& which, const Options& o) {
  const ResultFormat format = parse_result_format(o.format);
  ExperimentConfig cfg = experiment_config(which, o);
  if (!o.quiet) {
    cfg.progress = [last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t pct = done * 100 / total;
      if (pct != last || done == total) {
        std::cerr << "\r" << done << "/" << total << " cells" << (done == total ? "\n" : "") << std::flush;
        last = pct;
      }
    };
  }
  progress_line(o, which + ": " + std::to_string(cfg.n_paths.size() * cfg.snr_db.size() * cfg.pilot_ratios.size()) +
                       " sweep points x " + std::to_string(cfg.mc_runs) + " runs x " +
                       std::to_string(cfg.estimators.size()) + " estimators");
  const ExperimentResult result = which == "exp1"   ? experiment1(cfg)
                                  : which == "exp2" ? experiment2(cfg)
                                                    : experiment4(cfg);
  if (!o.out.empty()) {
    const fs::path out(o.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_results(result.records, out, format);
    write_text(sibling(out, "_curves.csv"), format_curves_csv(result.curves));
    if (which == "exp4") write_text(sibling(out, "_thresholds.csv"), format_thresholds_csv(result.thresholds));
    progress_line(o, "wrote " + out.string());
  }
  std::cout << (which == "exp4" ? format_thresholds_csv(result.thresholds) : format_curves_csv(result.curves));
  return kExitOk;
}

int run_simulate(const Options& o) {
  ChannelSpec spec;
  const Dims d = dims_from(o, spec.dims());
  spec.n_r = d.n1;
  spec.n_t = d.n2;
  spec.n_f = d.n3;
  if (!o.paths.empty()) {
    require(o.paths.size() == 1, "--paths takes a single value for simulate");
    spec.n_paths = o.paths.front();
  }
  spec.seed = o.seed;
  spec.validate();
  const double rho = single(o.pilot_ratio, "--pilot-ratio", 0.10);
  check_ratio(rho);
  const auto snrs = snr_values(o);
  require(snrs.size() <= 1, "--snr-db takes a single value for simulate");
  const double snr = snrs.empty() ? 10.0 : snrs.front();
  require(o.diffuse >= 0.0 && o.diffuse < 1.0, "--diffuse must lie in [0, 1)");
  const MaskPattern pattern = parse_mask_pattern(o.mask);

  const fs::path dir(o.out.empty() ? "." : o.out);
  fs::create_directories(dir);
  Rng channel_rng(derive_seed(spec.seed, {}, "channel"));
  Rng mask_rng(derive_seed(spec.seed, {}, "mask"));
  Rng noise_rng(derive_seed(spec.seed, {}, "noise"));
  const ComplexTensor3 h = o.diffuse > 0.0 ? generate_rich_channel(spec, o.diffuse, channel_rng)
                                           : generate_channel(spec, channel_rng).h;
  const PilotMask mask = generate_mask(pattern, rho, d, mask_rng);
  const Observation obs = observe(h, mask, snr, noise_rng);
  write_cten(dir / "H.cten", h);
  write_cten(dir / "Y.cten", obs.y);
  write_mask_cten(dir / "M.cten", mask);
  json meta;
  meta["dims"] = {d.n1, d.n2, d.n3};
  meta["n_paths"] = spec.n_paths;
  meta["pilot_ratio"] = rho;
  meta["realized_pilot_ratio"] = mask.realized_rho();
  meta["mask_pattern"] = std::string(to_string(pattern));
  meta["snr_db"] = std::isfinite(snr) ? json(snr) : json(nullptr);
  meta["noise_var"] = obs.noise_var;
  meta["diffuse_fraction"] = o.diffuse;
  meta["seed"] = spec.seed;
  meta["observation_hash"] = observation_hash(obs);
  write_text(dir / "meta.json", meta.dump(2) + '\n');
  progress_line(o, "wrote H.cten, Y.cten, M.cten, meta.json to " + dir.string());
  std::cout << meta.dump() << '\n';
  return kExitOk;
}

int run_complete(const Options& o) {
  const ResultFormat format = parse_result_format(o.format);
  require(o.methods.size() <= 1, "--method takes a single estimator for complete");
  const EstimatorKind kind = parse_estimator(o.methods.empty() ? "tucker" : o.methods.front());
  const auto ranks = parse_ranks(o.ranks);
  const fs::path dir(o.in_dir.empty() ? "." : o.in_dir);

  json meta = json::object();
  if (fs::exists(dir / "meta.json")) meta = json::parse(read_text(dir / "meta.json"));
  const double noise_var = meta.value("noise_var", 0.0);
  const double snr = meta.contains("snr_db") && !meta["snr_db"].is_null() ? meta["snr_db"].get<double>()
                                                                           : std::numeric_limits<double>::infinity();
  std::size_t n_paths = meta.value("n_paths", std::size_t{5});
  if (!o.paths.empty()) n_paths = o.paths.front();

  const ComplexTensor3 y = read_cten(dir / "Y.cten").tensor;
  const ComplexTensor3 m = read_cten(dir / "M.cten").tensor;
  const Observation obs = observation_from(y, m, noise_var, snr);
  const Dims d = y.dims();

  ComplexTensor3 est;
  int iterations = 0;
  switch (kind) {
    case EstimatorKind::kLs:
      est = ls_estimate(obs);
      break;
    case EstimatorKind::kLmmse: {
      std::vector<ComplexTensor3> training;
      for (std::size_t n = 0; n < o.lmmse_train; ++n) {
        Rng rng(derive_seed(o.seed, {n}, "lmmse_train"));
        training.push_back(generate_channel({d.n1, d.n2, d.n3, n_paths, o.seed}, rng).h);
      }
      est = lmmse_estimate(obs, estimate_frequency_covariance(training));
      break;
    }
    case EstimatorKind::kOmp: {
      const std::size_t sparsity = o.sparsity.value_or(n_paths);
      est = somp_estimate(obs, make_angular_dictionary(d.n1, d.n2, d.n1, d.n2, GridSpacing::kAngle), sparsity);
      iterations = static_cast<int>(sparsity);
      break;
    }
    case EstimatorKind::kTucker: {
      TuckerCompletionConfig cfg;
      cfg.ranks = ranks.value_or(ranks_for_paths(n_paths, d));
      if (o.max_iters) cfg.max_iters = *o.max_iters;
      auto res = tucker_complete(obs, cfg);
      iterations = res.iterations;
      est = std::move(res.consistent);
      break;
    }
    case EstimatorKind::kCp: {
      CPCompletionConfig cfg;
      cfg.rank = o.cp_rank.value_or(n_paths);
      cfg.hosvd_first_restart = o.cp_hosvd_init;
      cfg.seed = o.seed;
      auto res = cp_wals_complete(obs, cfg);
      iterations = res.restarts[static_cast<std::size_t>(res.best_restart)].sweeps;
      est = std::move(res.estimate);
      break;
    }
  }

  json summary;
  summary["estimator"] = std::string(to_string(kind));
  summary["iterations"] = iterations;
  summary["observed_nmse"] = observed_nmse(est, obs);
  if (fs::exists(dir / "H.cten")) {
    const double e = nmse(est, read_cten(dir / "H.cten").tensor);
    summary["nmse"] = e;
    summary["nmse_db"] = std::isfinite(to_db(e)) ? json(to_db(e)) : json(nullptr);
  }
  if (!o.out.empty()) {
    write_cten(o.out, est);
    progress_line(o, "wrote " + o.out);
  }
  if (format == ResultFormat::kJson) {
    std::cout << summary.dump() << '\n';
  } else {
    std::cout << "estimator,iterations,observed_nmse,nmse,nmse_db\n"
              << summary["estimator"].get<std::string>() << ',' << iterations << ','
              << summary["observed_nmse"].get<double>() << ','
              << (summary.contains("nmse") ? summary["nmse"].dump() : "") << ','
              << (summary.contains("nmse_db") ? summary["nmse_db"].dump() : "") << '\n';
  }
  return kExitOk;
}

int run_export(const Options& o) {
  HybridExportConfig cfg;
  cfg.dims = dims_from(o, cfg.dims);
  if (!o.paths.empty()) {
    require(o.paths.size() == 1, "--paths takes a single value for export-hybrid");
    cfg.n_paths = o.paths.front();
  }
  if (!o.pilot_ratio.empty()) cfg.pilot_ratios = o.pilot_ratio;
  for (double rho : cfg.pilot_ratios) check_ratio(rho);
  if (!o.snr_db.empty()) cfg.snr_db = snr_values(o);
  if (o.export_diffuse) cfg.diffuse_fraction = *o.export_diffuse;
  if (const auto r = parse_ranks(o.ranks)) cfg.ranks = *r;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  cfg.mask_pattern = parse_mask_pattern(o.mask);
  cfg.base_seed = o.seed;
  cfg.validate();
  require(o.count >= 1, "--count must be >= 1");
  const fs::path dir(o.out.empty() ? "hybrid_dataset" : o.out);
  progress_line(o, "exporting " + std::to_string(o.count) + " samples to " + dir.string());
  const auto manifest = export_hybrid_dataset(cfg, o.count, dir);
  std::size_t n_train = 0, n_val = 0, n_test = 0;
  for (const auto& s : manifest.samples) {
    n_train += s.split == "train";
    n_val += s.split == "val";
    n_test += s.split == "test";
  }
  std::cout << json{{"out_dir", dir.string()}, {"count", manifest.samples.size()},
                    {"train", n_train}, {"val", n_val}, {"test", n_test}}
                   .dump()
            << '\n';
  return kExitOk;
}

int run_selftest_cmd(const Options& o) {
  const auto checks = run_selftest();
  int failures = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) std::cout << ": " << c.detail;
    std::cout << '\n';
    failures += c.passed ? 0 : 1;
  }
  progress_line(o, std::to_string(checks.size() - failures) + "/" + std::to_string(checks.size()) + " checks passed");
  return failures == 0 ? kExitOk : kExitRuntime;
}

std::string json_to_arg(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto& item : v) joined += (joined.empty() ? "" : ",") + json_to_arg(item);
    return joined;
  }
  return v.dump();
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

// Appends config-file entries for flags not given on the command line, so
// explicit flags always win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  json cfg;
  try {
    cfg = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ContractError("config file " + path + ": " + e.what());
  }
  require(cfg.is_object(), "config file " + path + " must hold a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "--config" || flag_present(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    extra.push_back(flag);
    extra.push_back(json_to_arg(value));
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--nr", o.nr, "receive antennas");
  cmd->add_option("--nt", o.nt, "transmit antennas");
  cmd->add_option("--nf", o.nf, "subcarriers");
  cmd->add_option("--paths", o.paths, "path count(s), comma-separated")->delimiter(',');
  cmd->add_option("--pilot-ratio", o.pilot_ratio, "pilot ratio(s) in (0,1], comma-separated")->delimiter(',');
  cmd->add_option("--snr-db", o.snr_db, "SNR(s) in dB, comma-separated; 'inf' for noiseless")->delimiter(',');
  cmd->add_option("--mask", o.mask, "pilot pattern")->check(CLI::IsMember({"random", "grid", "comb"}));
  cmd->add_option("--method", o.methods, "estimator(s): ls, lmmse, omp, tucker, cp")->delimiter(',');
  cmd->add_option("--ranks", o.ranks, "Tucker ranks a,b,c");
  cmd->add_option("--cp-rank", o.cp_rank, "CP rank");
  cmd->add_flag("--cp-hosvd-init", o.cp_hosvd_init, "start the first CP restart from the HOSVD subspaces");
  cmd->add_option("--sparsity", o.sparsity, "SOMP sparsity");
  cmd->add_option("--max-iters", o.max_iters, "Tucker iteration cap");
  cmd->add_option("--mc-runs", o.mc_runs, "Monte Carlo runs per sweep point");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--out", o.out, "output path");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads (0: all cores)");
  cmd->add_option("--lmmse-train", o.lmmse_train, "LMMSE training channels");
  cmd->add_option("--config", o.config, "JSON config file; flags override its entries");
  cmd->add_flag("--quiet", o.quiet, "suppress progress on stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pilot-limited wideband MIMO channel estimation by tensor completion", "tensorchan"};
  app.require_subcommand(1);
  Options o;
  const char* names[] = {"simulate", "complete", "exp1", "exp2", "exp4", "export-hybrid", "selftest"};
  const char* help[] = {"generate H/Y/M tensors",
                        "run one estimator on simulate output",
                        "NMSE versus pilot ratio",
                        "NMSE versus SNR",
                        "recovery thresholds over path count and pilot ratio",
                        "write a dataset for the residual learner",
                        "run the built-in invariant checks"};
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < std::size(names); ++i) {
    CLI::App* cmd = app.add_subcommand(names[i], help[i]);
    add_common(cmd, o);
    cmds.push_back(cmd);
  }
  cmds[0]->add_option("--diffuse", o.diffuse, "diffuse power fraction in [0,1)");
  cmds[1]->add_option("--in", o.in_dir, "directory holding Y.cten, M.cten (H.cten, meta.json optional)")
      ->check(CLI::ExistingDirectory);
  cmds[5]->add_option("--diffuse", o.export_diffuse, "diffuse power fraction in [0,1)");
  cmds[5]->add_option("--count", o.count, "number of samples");

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = merge_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "simulate") return run_simulate(o);
    if (sub == "complete") return run_complete(o);
    if (sub == "export-hybrid") return run_export(o);
    if (sub == "selftest") return run_selftest_cmd(o);
    return run_experiment_cmd(sub, o);
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
