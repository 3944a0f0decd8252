#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tensorchan/rng.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

struct ChannelSpec {
  std::size_t n_r = 32;
  std::size_t n_t = 32;
  std::size_t n_f = 128;
  std::size_t n_paths = 5;
  std::uint64_t seed = 42;

  Dims dims() const { return {n_r, n_t, n_f}; }
  void validate() const;
};

/// Specular path parameters. Angles in radians, delays normalized to [0, 1).
struct MultipathParams {
  std::vector<double> angles_rx;
  std::vector<double> angles_tx;
  std::vector<Complex> gains;
  std::vector<double> delays;

  std::size_t n_paths() const { return gains.size(); }
};

struct Channel {
  ComplexTensor3 h;
  MultipathParams params;
};

enum class MaskPattern { kRandom, kGrid, kComb };

std::string_view to_string(MaskPattern p);
MaskPattern parse_mask_pattern(std::string_view name);

/// Pilot index set Ω stored as sorted, unique linear offsets into the tensor.
class PilotMask {
 public:
  PilotMask() = default;
  PilotMask(MaskPattern pattern, Dims dims, double requested_rho, std::vector<std::size_t> indices);

  MaskPattern pattern() const { return pattern_; }
  const Dims& dims() const { return dims_; }
  double requested_rho() const { return requested_rho_; }
  double realized_rho() const;
  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t count() const { return indices_.size(); }

  /// One flag per tensor entry.
  std::vector<std::uint8_t> flags() const;
  /// 0/1 tensor M.
  ComplexTensor3 as_tensor() const;

 private:
  MaskPattern pattern_ = MaskPattern::kRandom;
  Dims dims_{};
  double requested_rho_ = 0.0;
  std::vector<std::size_t> indices_;
};

struct Observation {
  ComplexTensor3 y;  // zero outside Ω
  PilotMask mask;
  double noise_var = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();
};

/// ULA response with half-wavelength spacing: entry m is exp(iπ m sin(angle)).
CVector steering_vector(std::size_t n, double angle);

/// Deterministic synthesis of the specular model from explicit parameters.
ComplexTensor3 synthesize_channel(Dims dims, const MultipathParams& params);

/// Draws angles U[-π/2, π/2], gains CN(0,1) normalized to unit total power,
/// delays U[0,1), then synthesizes the tensor.
Channel generate_channel(const ChannelSpec& spec, Rng& rng);
Channel generate_channel(const ChannelSpec& spec);

/// Number of weak paths forming the diffuse part of the rich surrogate.
inline constexpr std::size_t kDiffusePaths = 25;

/// sqrt(1 - f) * specular(L) + sqrt(f) * diffuse(25 weak paths), renormalized
/// to unit mean per-entry power. The specular part consumes the rng first, so
/// with f = 0 the result is generate_channel under the same stream, rescaled.
ComplexTensor3 generate_rich_channel(const ChannelSpec& spec, double diffuse_fraction, Rng& rng);

PilotMask generate_mask(MaskPattern pattern, double rho, Dims dims, Rng& rng);

/// Noise variance for a global SNR referenced to mean per-entry power of h.
double noise_variance_for(const ComplexTensor3& h, double snr_db);

/// y = M ⊙ (h + n); noise drawn only on Ω. snr_db = +inf means noiseless.
Observation observe(const ComplexTensor3& h, const PilotMask& mask, double snr_db, Rng& rng);

/// Builds an Observation from an existing zero-filled tensor and 0/1 mask,
/// e.g. after loading files.
Observation observation_from(const ComplexTensor3& y, const ComplexTensor3& mask_tensor,
                             double noise_var, double snr_db);

/// Stable 64-bit digest of an observation's bytes (y payload and Ω).
std::uint64_t observation_hash(const Observation& obs);

}  // namespace tensorchan
