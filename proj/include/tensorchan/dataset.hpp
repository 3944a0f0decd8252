#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tensorchan/channel.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

/// Samples mix pilot ratios and SNRs drawn uniformly from the two lists.
struct HybridExportConfig {
  Dims dims{16, 32, 64};
  std::size_t n_paths = 5;
  double diffuse_fraction = 0.3;
  std::vector<double> pilot_ratios{0.02, 0.04, 0.06, 0.08, 0.10, 0.15, 0.20};
  std::vector<double> snr_db{5.0, 10.0, 15.0};
  MaskPattern mask_pattern = MaskPattern::kRandom;
  Ranks ranks{4, 4, 8};
  int max_iters = 20;
  double tol = 1e-6;
  bool reimpose_pilots = true;
  std::uint64_t base_seed = 42;
  std::uint64_t split_seed = 7;

  void validate() const;
};

struct HybridSample {
  std::size_t index = 0;
  std::string dir;    // relative to the dataset root
  std::string split;  // train | val | test
  double pilot_ratio = 0.0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  double nmse_hlr = 0.0;
  double nmse_ls = 0.0;
};

struct HybridManifest {
  HybridExportConfig config;
  std::vector<HybridSample> samples;
};

/// Train/val/test labels for `count` samples: a fixed-seed permutation of the
/// indices, first 80% train, next 10% val, rest test.
std::vector<std::string> split_assignment(std::size_t count, std::uint64_t split_seed);

/// Writes sample_XXXXXX/{H,Y,M,HLR}.cten + meta.json and manifest.json
/// under out_dir. Output is byte-identical for identical arguments.
HybridManifest export_hybrid_dataset(const HybridExportConfig& cfg, std::size_t count,
                                     const std::filesystem::path& out_dir);

}  // namespace tensorchan
