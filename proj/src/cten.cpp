#include "tensorchan/cten.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}

std::size_t element_bytes(CtenDtype dtype) {
  switch (dtype) {
    case CtenDtype::kComplex128: return 16;
    case CtenDtype::kComplex64: return 8;
    case CtenDtype::kMask: return 1;
  }
  return 0;
}

}  // namespace

std::vector<std::uint8_t> encode_cten(const ComplexTensor3& x, CtenDtype dtype) {
  std::vector<std::uint8_t> out;
  out.reserve(kCtenHeaderBytes + x.size() * element_bytes(dtype));
  for (std::uint8_t b : {std::uint8_t{'C'}, std::uint8_t{'T'}, std::uint8_t{'E'}, std::uint8_t{'N'}, std::uint8_t{1},
                         static_cast<std::uint8_t>(dtype), std::uint8_t{3}, std::uint8_t{0}})
    out.push_back(b);
  put_u64(out, x.dims().n1);
  put_u64(out, x.dims().n2);
  put_u64(out, x.dims().n3);
  for (const Complex& v : x.data()) {
    switch (dtype) {
      case CtenDtype::kComplex128:
        put_u64(out, std::bit_cast<std::uint64_t>(v.real()));
        put_u64(out, std::bit_cast<std::uint64_t>(v.imag()));
        break;
      case CtenDtype::kComplex64:
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.real())));
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.imag())));
        break;
      case CtenDtype::kMask:
        require(v == Complex(0.0) || v == Complex(1.0), "mask .cten payload must be 0/1");
        out.push_back(v == Complex(1.0) ? 1 : 0);
        break;
    }
  }
  return out;
}

CtenFile decode_cten(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kCtenHeaderBytes) throw IoError("cten: truncated header");
  if (std::memcmp(bytes.data(), "CTEN", 4) != 0) throw IoError("cten: bad magic");
  if (bytes[4] != 1) throw IoError("cten: unsupported version " + std::to_string(bytes[4]));
  if (bytes[5] > 2) throw IoError("cten: unknown dtype " + std::to_string(bytes[5]));
  if (bytes[6] != 3) throw IoError("cten: only order-3 tensors are supported");
  CtenFile file;
  file.dtype = static_cast<CtenDtype>(bytes[5]);
  file.dims = {get_u64(bytes.data() + 8), get_u64(bytes.data() + 16), get_u64(bytes.data() + 24)};
  const std::size_t count = file.dims.size();
  const std::size_t width = element_bytes(file.dtype);
  if (bytes.size() != kCtenHeaderBytes + count * width) throw IoError("cten: payload size mismatch");
  std::vector<Complex> data(count);
  const std::uint8_t* p = bytes.data() + kCtenHeaderBytes;
  for (std::size_t n = 0; n < count; ++n, p += width) {
    switch (file.dtype) {
      case CtenDtype::kComplex128:
        data[n] = {std::bit_cast<double>(get_u64(p)), std::bit_cast<double>(get_u64(p + 8))};
        break;
      case CtenDtype::kComplex64:
        data[n] = {std::bit_cast<float>(get_u32(p)), std::bit_cast<float>(get_u32(p + 4))};
        break;
      case CtenDtype::kMask:
        if (*p > 1) throw IoError("cten: mask value other than 0/1");
        data[n] = static_cast<double>(*p);
        break;
    }
  }
  file.tensor = ComplexTensor3(file.dims, std::move(data));
  return file;
}

void write_cten(const std::filesystem::path& path, const ComplexTensor3& x, CtenDtype dtype) {
  const auto bytes = encode_cten(x, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_mask_cten(const std::filesystem::path& path, const PilotMask& mask) {
  write_cten(path, mask.as_tensor(), CtenDtype::kMask);
}

CtenFile read_cten(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_cten(bytes);
  } catch (const IoError& e) {
    throw IoError(std::string(e.what()) + " (" + path.string() + ")");
  }
}

}  // namespace tensorchan
