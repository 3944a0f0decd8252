#include <catch_amalgamated.hpp>

#include <bit>
#include <cstring>
#include <fstream>

#include "helpers.hpp"
#include "tensorchan/cten.hpp"
#include "tensorchan/error.hpp"

using namespace tensorchan;
using namespace testutil;

namespace {

// Byte-level encoder written against the documented layout.
std::vector<std::uint8_t> reference_encode(const ComplexTensor3& x) {
  std::vector<std::uint8_t> out{'C', 'T', 'E', 'N', 1, 0, 3, 0};
  auto put = [&](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
  };
  put(x.dims().n1);
  put(x.dims().n2);
  put(x.dims().n3);
  for (std::size_t i = 0; i < x.dims().n1; ++i)
    for (std::size_t j = 0; j < x.dims().n2; ++j)
      for (std::size_t k = 0; k < x.dims().n3; ++k) {
        put(std::bit_cast<std::uint64_t>(x(i, j, k).real()));
        put(std::bit_cast<std::uint64_t>(x(i, j, k).imag()));
      }
  return out;
}

}  // namespace

TEST_CASE("complex128 encoding matches the byte layout") {
  const auto x = random_tensor({2, 3, 4}, 1);
  const auto bytes = encode_cten(x, CtenDtype::kComplex128);
  CHECK(bytes.size() == kCtenHeaderBytes + 24 * 16);
  CHECK(bytes == reference_encode(x));
}

TEST_CASE("round trips for every dtype") {
  const auto x = random_tensor({3, 2, 5}, 2);
  const auto f64 = decode_cten(encode_cten(x, CtenDtype::kComplex128));
  CHECK(f64.dtype == CtenDtype::kComplex128);
  CHECK(f64.dims == x.dims());
  CHECK(f64.tensor == x);

  const auto f32 = decode_cten(encode_cten(x, CtenDtype::kComplex64));
  CHECK(f32.dtype == CtenDtype::kComplex64);
  CHECK(max_abs_diff(f32.tensor, x) <= 1e-6 * 10);
  const auto bytes32 = encode_cten(x, CtenDtype::kComplex64);
  CHECK(bytes32.size() == kCtenHeaderBytes + 30 * 8);

  ComplexTensor3 mask(x.dims());
  mask[0] = mask[7] = 1.0;
  const auto bytes = encode_cten(mask, CtenDtype::kMask);
  CHECK(bytes.size() == kCtenHeaderBytes + 30);
  CHECK(bytes[kCtenHeaderBytes + 7] == 1);
  CHECK(decode_cten(bytes).tensor == mask);
}

TEST_CASE("decoding rejects malformed payloads") {
  const auto x = random_tensor({2, 2, 2}, 3);
  auto bytes = encode_cten(x, CtenDtype::kComplex128);
  CHECK_THROWS_AS(decode_cten(std::span(bytes).first(10)), IoError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_cten(bad_magic), IoError);
  auto bad_version = bytes;
  bad_version[4] = 2;
  CHECK_THROWS_AS(decode_cten(bad_version), IoError);
  auto bad_dtype = bytes;
  bad_dtype[5] = 9;
  CHECK_THROWS_AS(decode_cten(bad_dtype), IoError);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_cten(truncated), IoError);
  ComplexTensor3 mask(x.dims());
  auto mask_bytes = encode_cten(mask, CtenDtype::kMask);
  mask_bytes.back() = 2;
  CHECK_THROWS_AS(decode_cten(mask_bytes), IoError);
  mask[1] = 0.5;
  CHECK_THROWS_AS(encode_cten(mask, CtenDtype::kMask), ContractError);
}

TEST_CASE("files round trip and errors carry the path") {
  const auto dir = temp_dir("cten");
  const auto x = random_tensor({4, 3, 2}, 4);
  write_cten(dir / "x.cten", x);
  CHECK(read_cten(dir / "x.cten").tensor == x);

  Rng rng(5);
  PilotMask mask(MaskPattern::kRandom, x.dims(), 0.25, {0, 5, 9});
  write_mask_cten(dir / "m.cten", mask);
  const auto m = read_cten(dir / "m.cten");
  CHECK(m.dtype == CtenDtype::kMask);
  CHECK(m.tensor == mask.as_tensor());

  try {
    read_cten(dir / "missing.cten");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("missing.cten") != std::string::npos);
  }
  std::ofstream(dir / "junk.cten") << "not a tensor";
  try {
    read_cten(dir / "junk.cten");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("junk.cten") != std::string::npos);
  }
}
