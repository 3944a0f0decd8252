#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace tensorchan {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Extents of an order-3 tensor, (receive, transmit, frequency) for channels.
struct Dims {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::size_t n3 = 0;

  std::size_t size() const { return n1 * n2 * n3; }
  std::size_t operator[](int mode) const;  // 1-based mode
  friend bool operator==(const Dims&, const Dims&) = default;
};

/// Multilinear ranks (R1, R2, R3).
using Ranks = std::array<std::size_t, 3>;

/// Dense complex order-3 tensor.
///
/// Storage is row-major with the third index varying fastest, i.e. entry
/// (i, j, k) lives at offset (i * n2 + j) * n3 + k. std::complex<double> is
/// laid out as interleaved (re, im) pairs, so data() is directly the payload
/// of a dtype-0 .cten file.
class ComplexTensor3 {
 public:
  ComplexTensor3() = default;
  explicit ComplexTensor3(Dims dims);
  ComplexTensor3(Dims dims, std::vector<Complex> data);

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t offset(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dims_.n2 + j) * dims_.n3 + k;
  }
  Complex& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[offset(i, j, k)];
  }
  const Complex& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[offset(i, j, k)];
  }
  Complex& operator[](std::size_t linear) { return data_[linear]; }
  const Complex& operator[](std::size_t linear) const { return data_[linear]; }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  ComplexTensor3& operator+=(const ComplexTensor3& other);
  ComplexTensor3& operator-=(const ComplexTensor3& other);
  ComplexTensor3& operator*=(Complex scale);

  friend ComplexTensor3 operator+(ComplexTensor3 a, const ComplexTensor3& b) { return a += b; }
  friend ComplexTensor3 operator-(ComplexTensor3 a, const ComplexTensor3& b) { return a -= b; }
  friend ComplexTensor3 operator*(Complex s, ComplexTensor3 a) { return a *= s; }
  friend bool operator==(const ComplexTensor3&, const ComplexTensor3&) = default;

  bool all_finite() const;

 private:
  Dims dims_{};
  std::vector<Complex> data_;
};

/// Tucker model: core ×₁ U1 ×₂ U2 ×₃ U3 with orthonormal factor columns.
struct TuckerModel {
  ComplexTensor3 core;
  std::array<CMatrix, 3> factors;

  Ranks ranks() const;
  Dims dims() const;
};

/// CP model: sum over r of outer(A[:, r], B[:, r], C[:, r]).
struct CPModel {
  std::array<CMatrix, 3> factors;

  std::size_t rank() const { return static_cast<std::size_t>(factors[0].cols()); }
  Dims dims() const;
};

// Mode-n unfolding with Kolda-Bader column ordering: for mode 1 the column of
// entry (i, j, k) is j + k*n2, for mode 2 it is i + k*n1, for mode 3 it is
// i + j*n1.
CMatrix unfold(const ComplexTensor3& x, int mode);
ComplexTensor3 fold(const CMatrix& m, int mode, Dims dims);

/// x ×_mode u; u must have n_mode columns.
ComplexTensor3 mode_product(const ComplexTensor3& x, const CMatrix& u, int mode);

/// X_(n) X_(n)ᴴ computed without materializing the unfolding.
CMatrix mode_gram(const ComplexTensor3& x, int mode);

/// Leading `rank` left singular vectors of the mode-n unfolding.
CMatrix leading_mode_subspace(const ComplexTensor3& x, int mode, std::size_t rank);

TuckerModel truncated_hosvd(const ComplexTensor3& x, const Ranks& ranks);
ComplexTensor3 tucker_reconstruct(const TuckerModel& m);
ComplexTensor3 cp_reconstruct(const CPModel& m);

/// Equivalent to tucker_reconstruct(truncated_hosvd(x, ranks)).
ComplexTensor3 hosvd_project(const ComplexTensor3& x, const Ranks& ranks);

ComplexTensor3 outer(const CVector& a, const CVector& b, const CVector& c);

double squared_norm(const ComplexTensor3& x);
double frobenius_norm(const ComplexTensor3& x);

}  // namespace tensorchan
