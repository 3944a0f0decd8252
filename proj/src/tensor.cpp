#include "tensorchan/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tensorchan/error.hpp"

namespace tensorchan {

namespace {

using CMap = Eigen::Map<CMatrix>;
using ConstCMap = Eigen::Map<const CMatrix>;

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw ContractError("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

void check_same_dims(const ComplexTensor3& a, const ComplexTensor3& b) {
  require(a.dims() == b.dims(), "tensor dimension mismatch");
}

Dims replace_mode(Dims d, int mode, std::size_t extent) {
  if (mode == 1) d.n1 = extent;
  if (mode == 2) d.n2 = extent;
  if (mode == 3) d.n3 = extent;
  return d;
}

}  // namespace

std::size_t Dims::operator[](int mode) const {
  check_mode(mode);
  return mode == 1 ? n1 : (mode == 2 ? n2 : n3);
}

ComplexTensor3::ComplexTensor3(Dims dims) : dims_(dims), data_(dims.size(), Complex{}) {
  require(dims.n1 > 0 && dims.n2 > 0 && dims.n3 > 0, "tensor dimensions must be positive");
}

ComplexTensor3::ComplexTensor3(Dims dims, std::vector<Complex> data)
    : dims_(dims), data_(std::move(data)) {
  require(dims.n1 > 0 && dims.n2 > 0 && dims.n3 > 0, "tensor dimensions must be positive");
  require(data_.size() == dims.size(), "tensor data length does not match n1*n2*n3");
}

ComplexTensor3& ComplexTensor3::operator+=(const ComplexTensor3& other) {
  check_same_dims(*this, other);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += other.data_[n];
  return *this;
}

ComplexTensor3& ComplexTensor3::operator-=(const ComplexTensor3& other) {
  check_same_dims(*this, other);
  for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= other.data_[n];
  return *this;
}

ComplexTensor3& ComplexTensor3::operator*=(Complex scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

bool ComplexTensor3::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  });
}

Ranks TuckerModel::ranks() const {
  const Dims& c = core.dims();
  return {c.n1, c.n2, c.n3};
}

Dims TuckerModel::dims() const {
  return {static_cast<std::size_t>(factors[0].rows()), static_cast<std::size_t>(factors[1].rows()),
          static_cast<std::size_t>(factors[2].rows())};
}

Dims CPModel::dims() const {
  return {static_cast<std::size_t>(factors[0].rows()), static_cast<std::size_t>(factors[1].rows()),
          static_cast<std::size_t>(factors[2].rows())};
}

CMatrix unfold(const ComplexTensor3& x, int mode) {
  check_mode(mode);
  const auto [n1, n2, n3] = x.dims();
  CMatrix m;
  if (mode == 1) {
    m.resize(idx(n1), idx(n2 * n3));
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t k = 0; k < n3; ++k) m(idx(i), idx(j + k * n2)) = x(i, j, k);
  } else if (mode == 2) {
    m.resize(idx(n2), idx(n1 * n3));
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t k = 0; k < n3; ++k) m(idx(j), idx(i + k * n1)) = x(i, j, k);
  } else {
    m.resize(idx(n3), idx(n1 * n2));
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j)
        for (std::size_t k = 0; k < n3; ++k) m(idx(k), idx(i + j * n1)) = x(i, j, k);
  }
  return m;
}

ComplexTensor3 fold(const CMatrix& m, int mode, Dims dims) {
  check_mode(mode);
  const std::size_t rows = dims[mode];
  require(static_cast<std::size_t>(m.rows()) == rows &&
              static_cast<std::size_t>(m.cols()) * rows == dims.size(),
          "fold: matrix shape is inconsistent with the target dimensions");
  ComplexTensor3 x(dims);
  const auto [n1, n2, n3] = dims;
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      for (std::size_t k = 0; k < n3; ++k) {
        if (mode == 1) x(i, j, k) = m(idx(i), idx(j + k * n2));
        else if (mode == 2) x(i, j, k) = m(idx(j), idx(i + k * n1));
        else x(i, j, k) = m(idx(k), idx(i + j * n1));
      }
  return x;
}

// The three products below view the row-major buffer through column-major
// maps so that no unfolding is ever copied.
ComplexTensor3 mode_product(const ComplexTensor3& x, const CMatrix& u, int mode) {
  check_mode(mode);
  const Dims d = x.dims();
  require(static_cast<std::size_t>(u.cols()) == d[mode],
          "mode_product: factor column count must equal the mode extent");
  require(u.rows() > 0, "mode_product: factor must have at least one row");
  const std::size_t m = static_cast<std::size_t>(u.rows());
  ComplexTensor3 y(replace_mode(d, mode, m));
  const Complex* src = x.data().data();
  Complex* dst = y.data().data();
  if (mode == 1) {
    ConstCMap a(src, idx(d.n2 * d.n3), idx(d.n1));
    CMap out(dst, idx(d.n2 * d.n3), idx(m));
    out.noalias() = a * u.transpose();
  } else if (mode == 2) {
    for (std::size_t i = 0; i < d.n1; ++i) {
      ConstCMap s(src + i * d.n2 * d.n3, idx(d.n3), idx(d.n2));
      CMap out(dst + i * m * d.n3, idx(d.n3), idx(m));
      out.noalias() = s * u.transpose();
    }
  } else {
    ConstCMap b(src, idx(d.n3), idx(d.n1 * d.n2));
    CMap out(dst, idx(m), idx(d.n1 * d.n2));
    out.noalias() = u * b;
  }
  return y;
}

CMatrix mode_gram(const ComplexTensor3& x, int mode) {
  check_mode(mode);
  const Dims d = x.dims();
  const Complex* src = x.data().data();
  if (mode == 1) {
    ConstCMap a(src, idx(d.n2 * d.n3), idx(d.n1));
    CMatrix g = a.adjoint() * a;
    return g.transpose();
  }
  if (mode == 2) {
    CMatrix g = CMatrix::Zero(idx(d.n2), idx(d.n2));
    for (std::size_t i = 0; i < d.n1; ++i) {
      ConstCMap s(src + i * d.n2 * d.n3, idx(d.n3), idx(d.n2));
      g.noalias() += s.adjoint() * s;
    }
    return g.transpose();
  }
  ConstCMap b(src, idx(d.n3), idx(d.n1 * d.n2));
  return b * b.adjoint();
}

CMatrix leading_mode_subspace(const ComplexTensor3& x, int mode, std::size_t rank) {
  const std::size_t n = x.dims()[mode];
  require(rank >= 1 && rank <= n, "HOSVD rank must lie in [1, n] for mode " + std::to_string(mode));
  CMatrix g = mode_gram(x, mode);
  // Hermitian symmetrize before the eigensolver reads one triangle.
  g = (0.5 * (g + g.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(g);
  if (eig.info() != Eigen::Success) throw NumericalError("HOSVD: eigensolver failed");
  const CMatrix& v = eig.eigenvectors();  // ascending eigenvalues
  CMatrix u(idx(n), idx(rank));
  for (std::size_t r = 0; r < rank; ++r) u.col(idx(r)) = v.col(idx(n - 1 - r));
  return u;
}

TuckerModel truncated_hosvd(const ComplexTensor3& x, const Ranks& ranks) {
  TuckerModel model;
  for (int mode = 1; mode <= 3; ++mode) {
    model.factors[mode - 1] = leading_mode_subspace(x, mode, ranks[mode - 1]);
  }
  // Contract the largest mode first to keep intermediates small.
  ComplexTensor3 core = mode_product(x, model.factors[2].adjoint(), 3);
  core = mode_product(core, model.factors[0].adjoint(), 1);
  model.core = mode_product(core, model.factors[1].adjoint(), 2);
  return model;
}

ComplexTensor3 tucker_reconstruct(const TuckerModel& m) {
  const Dims c = m.core.dims();
  for (int mode = 1; mode <= 3; ++mode) {
    require(static_cast<std::size_t>(m.factors[mode - 1].cols()) == c[mode],
            "tucker_reconstruct: factor columns must match the core extent");
  }
  ComplexTensor3 x = mode_product(m.core, m.factors[0], 1);
  x = mode_product(x, m.factors[1], 2);
  return mode_product(x, m.factors[2], 3);
}

ComplexTensor3 hosvd_project(const ComplexTensor3& x, const Ranks& ranks) {
  return tucker_reconstruct(truncated_hosvd(x, ranks));
}

ComplexTensor3 cp_reconstruct(const CPModel& m) {
  const auto& [a, b, c] = m.factors;
  require(a.cols() == b.cols() && b.cols() == c.cols() && a.cols() >= 1,
          "cp_reconstruct: factors must share a positive column count");
  const Dims d = m.dims();
  ComplexTensor3 x(d);
  // Row (i, j) of the Khatri-Rao product times Cᵀ gives the mode-3 fiber.
  CMatrix ab(idx(d.n1 * d.n2), a.cols());
  for (std::size_t i = 0; i < d.n1; ++i)
    for (std::size_t j = 0; j < d.n2; ++j)
      ab.row(idx(i * d.n2 + j)) = a.row(idx(i)).cwiseProduct(b.row(idx(j)));
  CMap out(x.data().data(), idx(d.n3), idx(d.n1 * d.n2));
  out.noalias() = c * ab.transpose();
  return x;
}

ComplexTensor3 outer(const CVector& a, const CVector& b, const CVector& c) {
  ComplexTensor3 x(Dims{static_cast<std::size_t>(a.size()), static_cast<std::size_t>(b.size()),
                        static_cast<std::size_t>(c.size())});
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) {
      const Complex ab = a(i) * b(j);
      for (Eigen::Index k = 0; k < c.size(); ++k)
        x(static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)) =
            ab * c(k);
    }
  return x;
}

double squared_norm(const ComplexTensor3& x) {
  double s = 0.0;
  for (const auto& v : x.data()) s += std::norm(v);
  return s;
}

double frobenius_norm(const ComplexTensor3& x) { return std::sqrt(squared_norm(x)); }

}  // namespace tensorchan
