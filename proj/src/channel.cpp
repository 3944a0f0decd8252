#include "tensorchan/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

constexpr double kPi = std::numbers::pi;

void check_rho(double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ContractError("pilot ratio must lie in (0, 1], got " + std::to_string(rho));
  }
}

MultipathParams draw_paths(std::size_t n_paths, Rng& rng) {
  MultipathParams p;
  p.angles_rx.resize(n_paths);
  p.angles_tx.resize(n_paths);
  p.gains.resize(n_paths);
  p.delays.resize(n_paths);
  for (auto& a : p.angles_rx) a = rng.uniform(-kPi / 2, kPi / 2);
  for (auto& a : p.angles_tx) a = rng.uniform(-kPi / 2, kPi / 2);
  double power = 0.0;
  for (auto& g : p.gains) {
    g = rng.complex_normal(1.0);
    power += std::norm(g);
  }
  const double scale = 1.0 / std::sqrt(power);
  for (auto& g : p.gains) g *= scale;
  for (auto& t : p.delays) t = rng.uniform();
  return p;
}

}  // namespace

void ChannelSpec::validate() const {
  require(n_r >= 1 && n_t >= 1 && n_f >= 1, "channel dimensions must be >= 1");
  require(n_paths >= 1, "number of paths must be >= 1");
}

std::string_view to_string(MaskPattern p) {
  switch (p) {
    case MaskPattern::kRandom: return "random";
    case MaskPattern::kGrid: return "grid";
    case MaskPattern::kComb: return "comb";
  }
  return "random";
}

MaskPattern parse_mask_pattern(std::string_view name) {
  if (name == "random") return MaskPattern::kRandom;
  if (name == "grid") return MaskPattern::kGrid;
  if (name == "comb") return MaskPattern::kComb;
  throw ContractError("unknown mask pattern '" + std::string(name) + "' (valid: random, grid, comb)");
}

PilotMask::PilotMask(MaskPattern pattern, Dims dims, double requested_rho,
                     std::vector<std::size_t> indices)
    : pattern_(pattern), dims_(dims), requested_rho_(requested_rho), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  require(std::adjacent_find(indices_.begin(), indices_.end()) == indices_.end(),
          "pilot mask indices must be unique");
  require(indices_.empty() || indices_.back() < dims.size(), "pilot mask index out of range");
}

double PilotMask::realized_rho() const {
  return dims_.size() == 0 ? 0.0
                           : static_cast<double>(indices_.size()) / static_cast<double>(dims_.size());
}

std::vector<std::uint8_t> PilotMask::flags() const {
  std::vector<std::uint8_t> f(dims_.size(), 0);
  for (std::size_t n : indices_) f[n] = 1;
  return f;
}

ComplexTensor3 PilotMask::as_tensor() const {
  ComplexTensor3 m(dims_);
  for (std::size_t n : indices_) m[n] = 1.0;
  return m;
}

CVector steering_vector(std::size_t n, double angle) {
  require(n >= 1, "steering vector length must be >= 1");
  CVector a(static_cast<Eigen::Index>(n));
  const double phase = kPi * std::sin(angle);
  for (std::size_t m = 0; m < n; ++m) {
    a(static_cast<Eigen::Index>(m)) = std::polar(1.0, phase * static_cast<double>(m));
  }
  return a;
}

ComplexTensor3 synthesize_channel(Dims dims, const MultipathParams& params) {
  const std::size_t paths = params.gains.size();
  require(params.angles_rx.size() == paths && params.angles_tx.size() == paths &&
              params.delays.size() == paths,
          "multipath parameter lists must share one length");
  ComplexTensor3 h(dims);
  for (std::size_t l = 0; l < paths; ++l) {
    const CVector ar = params.gains[l] * steering_vector(dims.n1, params.angles_rx[l]);
    const CVector at = steering_vector(dims.n2, params.angles_tx[l]).conjugate();
    CVector w(static_cast<Eigen::Index>(dims.n3));
    for (std::size_t k = 0; k < dims.n3; ++k) {
      w(static_cast<Eigen::Index>(k)) =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * params.delays[l]);
    }
    h += outer(ar, at, w);
  }
  return h;
}

Channel generate_channel(const ChannelSpec& spec, Rng& rng) {
  spec.validate();
  Channel c;
  c.params = draw_paths(spec.n_paths, rng);
  c.h = synthesize_channel(spec.dims(), c.params);
  return c;
}

Channel generate_channel(const ChannelSpec& spec) {
  Rng rng(spec.seed);
  return generate_channel(spec, rng);
}

ComplexTensor3 generate_rich_channel(const ChannelSpec& spec, double diffuse_fraction, Rng& rng) {
  require(diffuse_fraction >= 0.0 && diffuse_fraction < 1.0, "diffuse fraction must lie in [0, 1)");
  ComplexTensor3 h = generate_channel(spec, rng).h;
  h *= std::sqrt(1.0 - diffuse_fraction);
  const MultipathParams diffuse = draw_paths(kDiffusePaths, rng);
  ComplexTensor3 d = synthesize_channel(spec.dims(), diffuse);
  d *= std::sqrt(diffuse_fraction);
  h += d;
  const double mean_power = squared_norm(h) / static_cast<double>(h.size());
  h *= 1.0 / std::sqrt(mean_power);
  return h;
}

PilotMask generate_mask(MaskPattern pattern, double rho, Dims dims, Rng& rng) {
  check_rho(rho);
  const std::size_t total = dims.size();
  require(total > 0, "mask dimensions must be positive");
  std::vector<std::size_t> idx;
  switch (pattern) {
    case MaskPattern::kRandom: {
      const auto count = static_cast<std::size_t>(std::llround(rho * static_cast<double>(total)));
      // Partial Fisher-Yates over all offsets.
      std::vector<std::size_t> pool(total);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t n = 0; n < count; ++n) {
        const std::size_t pick = n + rng.uniform_index(total - n);
        std::swap(pool[n], pool[pick]);
      }
      idx.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
      break;
    }
    case MaskPattern::kGrid: {
      auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
      std::size_t best_s = 1;
      std::size_t best_sf = 1;
      double best_err = std::numeric_limits<double>::infinity();
      for (std::size_t s = 1; s <= std::max(dims.n1, dims.n2); ++s) {
        for (std::size_t sf = s; sf <= std::max(dims.n3, s); ++sf) {
          const double realized =
              static_cast<double>(ceil_div(dims.n1, s) * ceil_div(dims.n2, s) * ceil_div(dims.n3, sf)) /
              static_cast<double>(total);
          const double err = std::abs(realized - rho);
          if (err < best_err) {
            best_err = err;
            best_s = s;
            best_sf = sf;
          }
        }
      }
      for (std::size_t i = 0; i < dims.n1; i += best_s)
        for (std::size_t j = 0; j < dims.n2; j += best_s)
          for (std::size_t k = 0; k < dims.n3; k += best_sf) idx.push_back((i * dims.n2 + j) * dims.n3 + k);
      break;
    }
    case MaskPattern::kComb: {
      const auto step = static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / rho - 1e-9)));
      for (std::size_t i = 0; i < dims.n1; ++i)
        for (std::size_t j = 0; j < dims.n2; ++j)
          for (std::size_t k = 0; k < dims.n3; k += step) idx.push_back((i * dims.n2 + j) * dims.n3 + k);
      break;
    }
  }
  return PilotMask(pattern, dims, rho, std::move(idx));
}

double noise_variance_for(const ComplexTensor3& h, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const double mean_power = squared_norm(h) / static_cast<double>(h.size());
  return mean_power / std::pow(10.0, snr_db / 10.0);
}

Observation observe(const ComplexTensor3& h, const PilotMask& mask, double snr_db, Rng& rng) {
  require(h.dims() == mask.dims(), "observe: mask dimensions do not match the channel");
  require(!std::isnan(snr_db), "observe: SNR must not be NaN");
  Observation obs;
  obs.mask = mask;
  obs.snr_db = snr_db;
  obs.noise_var = noise_variance_for(h, snr_db);
  obs.y = ComplexTensor3(h.dims());
  const bool noisy = obs.noise_var > 0.0;
  for (std::size_t n : mask.indices()) {
    obs.y[n] = h[n];
    if (noisy) obs.y[n] += rng.complex_normal(obs.noise_var);
  }
  return obs;
}

Observation observation_from(const ComplexTensor3& y, const ComplexTensor3& mask_tensor,
                             double noise_var, double snr_db) {
  require(y.dims() == mask_tensor.dims(), "observation and mask dimensions differ");
  std::vector<std::size_t> idx;
  for (std::size_t n = 0; n < mask_tensor.size(); ++n) {
    const Complex m = mask_tensor[n];
    require(m == Complex(0.0) || m == Complex(1.0), "mask tensor entries must be 0 or 1");
    if (m == Complex(1.0)) idx.push_back(n);
  }
  Observation obs;
  obs.mask = PilotMask(MaskPattern::kRandom, y.dims(),
                       static_cast<double>(idx.size()) / static_cast<double>(y.size()), std::move(idx));
  obs.y = ComplexTensor3(y.dims());
  for (std::size_t n : obs.mask.indices()) obs.y[n] = y[n];
  obs.noise_var = noise_var;
  obs.snr_db = snr_db;
  return obs;
}

std::uint64_t observation_hash(const Observation& obs) {
  std::uint64_t h = hash_tag("observation");
  for (const Complex& v : obs.y.data()) {
    h = mix64(h ^ std::bit_cast<std::uint64_t>(v.real()));
    h = mix64(h ^ std::bit_cast<std::uint64_t>(v.imag()));
  }
  for (std::size_t n : obs.mask.indices()) h = mix64(h ^ static_cast<std::uint64_t>(n));
  return h;
}

}  // namespace tensorchan
