#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "tensorchan/rng.hpp"
#include "tensorchan/tensor.hpp"

namespace testutil {

using namespace tensorchan;

inline ComplexTensor3 random_tensor(Dims d, std::uint64_t seed) {
  Rng rng(seed);
  ComplexTensor3 x(d);
  for (std::size_t n = 0; n < x.size(); ++n) x[n] = rng.complex_normal();
  return x;
}

inline CMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.complex_normal();
  return m;
}

inline CMatrix random_orthonormal(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  const CMatrix g = random_matrix(rows, cols, seed);
  Eigen::HouseholderQR<CMatrix> qr(g);
  return qr.householderQ() * CMatrix::Identity(g.rows(), g.cols());
}

inline double rel_err(const ComplexTensor3& a, const ComplexTensor3& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    num += std::norm(a[n] - b[n]);
    den += std::norm(b[n]);
  }
  return std::sqrt(num / std::max(den, 1e-300));
}

inline double max_abs_diff(const ComplexTensor3& a, const ComplexTensor3& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

// Entry-wise Tucker evaluation, independent of the mode_product kernels.
inline ComplexTensor3 naive_tucker(const ComplexTensor3& core, const CMatrix& u1, const CMatrix& u2,
                                   const CMatrix& u3) {
  const Dims c = core.dims();
  ComplexTensor3 x({static_cast<std::size_t>(u1.rows()), static_cast<std::size_t>(u2.rows()),
                    static_cast<std::size_t>(u3.rows())});
  for (std::size_t i = 0; i < x.dims().n1; ++i)
    for (std::size_t j = 0; j < x.dims().n2; ++j)
      for (std::size_t k = 0; k < x.dims().n3; ++k) {
        Complex acc = 0.0;
        for (std::size_t a = 0; a < c.n1; ++a)
          for (std::size_t b = 0; b < c.n2; ++b)
            for (std::size_t g = 0; g < c.n3; ++g)
              acc += core(a, b, g) * u1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) *
                     u2(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(b)) *
                     u3(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(g));
        x(i, j, k) = acc;
      }
  return x;
}

inline ComplexTensor3 random_tucker_tensor(Dims d, Ranks r, std::uint64_t seed) {
  const ComplexTensor3 core = random_tensor({r[0], r[1], r[2]}, seed);
  return naive_tucker(core, random_orthonormal(d.n1, r[0], seed + 1), random_orthonormal(d.n2, r[1], seed + 2),
                      random_orthonormal(d.n3, r[2], seed + 3));
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tensorchan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
