#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tensorchan/channel.hpp"
#include "tensorchan/tensor.hpp"

namespace tensorchan {

// .cten layout (all integers little-endian):
//   "CTEN" | u8 version=1 | u8 dtype | u8 ndim=3 | u8 reserved=0
//   | u64 n1 | u64 n2 | u64 n3 | payload
// Payload is row-major with the third index fastest.
//   dtype 0: (re, im) pairs of float64
//   dtype 1: (re, im) pairs of float32
//   dtype 2: u8 mask values 0/1
enum class CtenDtype : std::uint8_t { kComplex128 = 0, kComplex64 = 1, kMask = 2 };

inline constexpr std::size_t kCtenHeaderBytes = 4 + 4 + 3 * 8;

struct CtenFile {
  CtenDtype dtype = CtenDtype::kComplex128;
  Dims dims{};
  ComplexTensor3 tensor;  // mask files decode to 0/1 entries
};

std::vector<std::uint8_t> encode_cten(const ComplexTensor3& x, CtenDtype dtype);
CtenFile decode_cten(std::span<const std::uint8_t> bytes);

void write_cten(const std::filesystem::path& path, const ComplexTensor3& x,
                CtenDtype dtype = CtenDtype::kComplex128);
void write_mask_cten(const std::filesystem::path& path, const PilotMask& mask);
CtenFile read_cten(const std::filesystem::path& path);

}  // namespace tensorchan
