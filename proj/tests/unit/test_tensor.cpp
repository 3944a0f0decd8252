#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "tensorchan/error.hpp"

using namespace tensorchan;
using namespace testutil;
using Catch::Matchers::WithinAbs;

namespace {

// Column of entry (i, j, k) in the mode-n unfolding, written out per mode.
std::size_t unfold_column(int mode, std::size_t i, std::size_t j, std::size_t k, Dims d) {
  switch (mode) {
    case 1: return j + k * d.n2;
    case 2: return i + k * d.n1;
    default: return i + j * d.n1;
  }
}

std::size_t unfold_row(int mode, std::size_t i, std::size_t j, std::size_t k) {
  return mode == 1 ? i : (mode == 2 ? j : k);
}

ComplexTensor3 naive_mode_product(const ComplexTensor3& x, const CMatrix& u, int mode) {
  Dims out = x.dims();
  const auto rows = static_cast<std::size_t>(u.rows());
  if (mode == 1) out.n1 = rows;
  if (mode == 2) out.n2 = rows;
  if (mode == 3) out.n3 = rows;
  ComplexTensor3 y(out);
  for (std::size_t i = 0; i < out.n1; ++i)
    for (std::size_t j = 0; j < out.n2; ++j)
      for (std::size_t k = 0; k < out.n3; ++k) {
        Complex acc = 0.0;
        const std::size_t r = mode == 1 ? i : (mode == 2 ? j : k);
        for (std::size_t s = 0; s < x.dims()[mode]; ++s) {
          const Complex v = mode == 1 ? x(s, j, k) : (mode == 2 ? x(i, s, k) : x(i, j, s));
          acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) * v;
        }
        y(i, j, k) = acc;
      }
  return y;
}

// Best rank-(1,1,1) approximation error by alternating power iterations.
double best_rank1_error(const ComplexTensor3& x, int starts, std::uint64_t seed) {
  const Dims d = x.dims();
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < starts; ++s) {
    CVector b = random_matrix(d.n2, 1, seed + 10 * s).col(0).normalized();
    CVector c = random_matrix(d.n3, 1, seed + 10 * s + 1).col(0).normalized();
    CVector a(static_cast<Eigen::Index>(d.n1));
    for (int it = 0; it < 500; ++it) {
      a.setZero();
      for (std::size_t i = 0; i < d.n1; ++i)
        for (std::size_t j = 0; j < d.n2; ++j)
          for (std::size_t k = 0; k < d.n3; ++k)
            a(static_cast<Eigen::Index>(i)) += x(i, j, k) * std::conj(b(static_cast<Eigen::Index>(j))) *
                                               std::conj(c(static_cast<Eigen::Index>(k)));
      a.normalize();
      b.setZero();
      for (std::size_t i = 0; i < d.n1; ++i)
        for (std::size_t j = 0; j < d.n2; ++j)
          for (std::size_t k = 0; k < d.n3; ++k)
            b(static_cast<Eigen::Index>(j)) += x(i, j, k) * std::conj(a(static_cast<Eigen::Index>(i))) *
                                               std::conj(c(static_cast<Eigen::Index>(k)));
      b.normalize();
      c.setZero();
      for (std::size_t i = 0; i < d.n1; ++i)
        for (std::size_t j = 0; j < d.n2; ++j)
          for (std::size_t k = 0; k < d.n3; ++k)
            c(static_cast<Eigen::Index>(k)) += x(i, j, k) * std::conj(a(static_cast<Eigen::Index>(i))) *
                                               std::conj(b(static_cast<Eigen::Index>(j)));
      c.normalize();
    }
    Complex g = 0.0;
    for (std::size_t i = 0; i < d.n1; ++i)
      for (std::size_t j = 0; j < d.n2; ++j)
        for (std::size_t k = 0; k < d.n3; ++k)
          g += x(i, j, k) * std::conj(a(static_cast<Eigen::Index>(i)) * b(static_cast<Eigen::Index>(j)) *
                                      c(static_cast<Eigen::Index>(k)));
    best = std::min(best, squared_norm(x) - std::norm(g));
  }
  return best;
}

}  // namespace

TEST_CASE("construction validates dimensions and length") {
  CHECK_THROWS_AS(ComplexTensor3(Dims{0, 2, 2}), ContractError);
  CHECK_THROWS_AS(ComplexTensor3(Dims{2, 2, 2}, std::vector<Complex>(7)), ContractError);
  const ComplexTensor3 x({2, 3, 4});
  CHECK(x.size() == 24);
  CHECK(x.offset(1, 2, 3) == 23);
}

TEST_CASE("mode-1 unfolding of the 2x2x2 index tensor") {
  ComplexTensor3 t({2, 2, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) t(i, j, k) = static_cast<double>(i + 2 * j + 4 * k);
  const CMatrix m = unfold(t, 1);
  REQUIRE(m.rows() == 2);
  REQUIRE(m.cols() == 4);
  // Column order j + 2k: (0,0), (1,0), (0,1), (1,1).
  const double expected[4] = {0, 2, 4, 6};
  for (int c = 0; c < 4; ++c) CHECK(m(0, c) == Complex(expected[c]));
  for (int c = 0; c < 4; ++c) CHECK(m(1, c) == Complex(expected[c] + 1));
}

TEST_CASE("unfold places every entry at its indexed row and column") {
  const Dims d{3, 4, 5};
  const auto x = random_tensor(d, 11);
  for (int mode = 1; mode <= 3; ++mode) {
    const CMatrix m = unfold(x, mode);
    CHECK(static_cast<std::size_t>(m.rows()) == d[mode]);
    CHECK(static_cast<std::size_t>(m.cols()) == d.size() / d[mode]);
    for (std::size_t i = 0; i < d.n1; ++i)
      for (std::size_t j = 0; j < d.n2; ++j)
        for (std::size_t k = 0; k < d.n3; ++k)
          REQUIRE(m(static_cast<Eigen::Index>(unfold_row(mode, i, j, k)),
                    static_cast<Eigen::Index>(unfold_column(mode, i, j, k, d))) == x(i, j, k));
  }
}

TEST_CASE("fold inverts unfold bit-exactly") {
  for (const Dims d : {Dims{3, 4, 5}, Dims{1, 6, 2}, Dims{7, 1, 1}}) {
    const auto x = random_tensor(d, 5);
    for (int mode = 1; mode <= 3; ++mode) CHECK(fold(unfold(x, mode), mode, d) == x);
  }
}

TEST_CASE("zeros unfold and fold to zeros") {
  const ComplexTensor3 z({3, 2, 4});
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(unfold(z, mode).isZero(0.0));
    CHECK(fold(CMatrix::Zero(unfold(z, mode).rows(), unfold(z, mode).cols()), mode, z.dims()) == z);
  }
}

TEST_CASE("fold of a single row reshapes onto the sole mode-1 slice") {
  const std::size_t a = 3, b = 4;
  CMatrix row(1, static_cast<Eigen::Index>(a * b));
  for (Eigen::Index c = 0; c < row.cols(); ++c) row(0, c) = Complex(static_cast<double>(c), -1.0);
  const auto x = fold(row, 1, {1, a, b});
  for (std::size_t j = 0; j < a; ++j)
    for (std::size_t k = 0; k < b; ++k) CHECK(x(0, j, k) == row(0, static_cast<Eigen::Index>(j + k * a)));
}

TEST_CASE("fold rejects mismatched shapes and modes") {
  CHECK_THROWS_AS(fold(CMatrix::Zero(2, 5), 1, {2, 2, 2}), ContractError);
  const auto x = random_tensor({2, 2, 2}, 1);
  CHECK_THROWS_AS(unfold(x, 4), ContractError);
  CHECK_THROWS_AS(mode_product(x, CMatrix::Identity(3, 3), 1), ContractError);
}

TEST_CASE("mode product matches the defining sum") {
  const auto x = random_tensor({3, 4, 5}, 21);
  for (int mode = 1; mode <= 3; ++mode) {
    const CMatrix u = random_matrix(6, x.dims()[mode], 30 + mode);
    CHECK(max_abs_diff(mode_product(x, u, mode), naive_mode_product(x, u, mode)) <= 1e-12);
  }
}

TEST_CASE("mode product with identity is exact") {
  const auto x = random_tensor({3, 4, 5}, 3);
  for (int mode = 1; mode <= 3; ++mode) {
    const auto n = static_cast<Eigen::Index>(x.dims()[mode]);
    CHECK(mode_product(x, CMatrix::Identity(n, n), mode) == x);
  }
}

TEST_CASE("mode products along distinct modes commute") {
  const auto x = random_tensor({3, 4, 5}, 4);
  const CMatrix a = random_matrix(2, 3, 40), b = random_matrix(6, 4, 41), c = random_matrix(3, 5, 42);
  CHECK(rel_err(mode_product(mode_product(x, a, 1), b, 2), mode_product(mode_product(x, b, 2), a, 1)) <= 1e-12);
  CHECK(rel_err(mode_product(mode_product(x, a, 1), c, 3), mode_product(mode_product(x, c, 3), a, 1)) <= 1e-12);
  CHECK(rel_err(mode_product(mode_product(x, b, 2), c, 3), mode_product(mode_product(x, c, 3), b, 2)) <= 1e-12);
}

TEST_CASE("mode-1 product of an outer product scales the first vector") {
  const CVector a = random_matrix(3, 1, 50).col(0), b = random_matrix(3, 1, 51).col(0),
                c = random_matrix(3, 1, 52).col(0);
  const CMatrix u = random_matrix(3, 3, 53);
  CHECK(rel_err(mode_product(outer(a, b, c), u, 1), outer(u * a, b, c)) <= 1e-13);
}

TEST_CASE("mode Gram equals the explicit unfolding product") {
  const auto x = random_tensor({4, 3, 6}, 6);
  for (int mode = 1; mode <= 3; ++mode) {
    const CMatrix m = unfold(x, mode);
    CHECK((mode_gram(x, mode) - m * m.adjoint()).norm() <= 1e-12 * (m * m.adjoint()).norm());
  }
}

TEST_CASE("truncated HOSVD recovers exact multilinear rank") {
  const auto x = random_tucker_tensor({6, 5, 7}, {2, 2, 2}, 60);
  const double e = squared_norm(tucker_reconstruct(truncated_hosvd(x, {2, 2, 2})) - x) / squared_norm(x);
  CHECK(e <= 1e-12);
}

TEST_CASE("truncated HOSVD at full ranks reproduces the tensor") {
  const auto x = random_tensor({4, 3, 5}, 7);
  CHECK(rel_err(tucker_reconstruct(truncated_hosvd(x, {4, 3, 5})), x) <= 1e-12);
  CHECK(rel_err(hosvd_project(x, {4, 3, 5}), x) <= 1e-12);
}

TEST_CASE("HOSVD factors are orthonormal and ordered by singular value") {
  const auto x = random_tensor({8, 7, 9}, 8);
  const Ranks r{3, 4, 5};
  const auto m = truncated_hosvd(x, r);
  for (int n = 0; n < 3; ++n) {
    const CMatrix& u = m.factors[static_cast<std::size_t>(n)];
    CHECK(static_cast<std::size_t>(u.cols()) == r[static_cast<std::size_t>(n)]);
    CHECK((u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).norm() <= 1e-10);
    // Leading subspace agrees with an SVD of the explicit unfolding.
    Eigen::JacobiSVD<CMatrix> svd(unfold(x, n + 1), Eigen::ComputeThinU);
    const CMatrix ref = svd.matrixU().leftCols(u.cols());
    CHECK((u * u.adjoint() - ref * ref.adjoint()).norm() <= 1e-9);
  }
}

TEST_CASE("HOSVD error is bounded by the discarded singular values") {
  const auto x = random_tensor({8, 7, 9}, 9);
  const Ranks r{2, 3, 4};
  double bound = 0.0;
  for (int n = 0; n < 3; ++n) {
    Eigen::JacobiSVD<CMatrix> svd(unfold(x, n + 1));
    const auto& s = svd.singularValues();
    for (Eigen::Index i = static_cast<Eigen::Index>(r[static_cast<std::size_t>(n)]); i < s.size(); ++i) bound += s(i) * s(i);
  }
  const double err = squared_norm(hosvd_project(x, r) - x);
  CHECK(err <= bound * (1.0 + 1e-10));
}

TEST_CASE("rank-(1,1,1) HOSVD is quasi-optimal against an alternating search") {
  const auto x = random_tensor({8, 8, 8}, 12);
  const double hosvd_err = squared_norm(hosvd_project(x, {1, 1, 1}) - x);
  const double best = best_rank1_error(x, 20, 1000);
  CHECK(hosvd_err >= best / (1.0 + 1e-6));
  CHECK(hosvd_err <= 3.0 * best);
}

TEST_CASE("HOSVD rejects ranks outside [1, n]") {
  const auto x = random_tensor({3, 3, 3}, 1);
  CHECK_THROWS_AS(truncated_hosvd(x, {0, 1, 1}), ContractError);
  CHECK_THROWS_AS(truncated_hosvd(x, {4, 1, 1}), ContractError);
}

TEST_CASE("Tucker reconstruction with identity factors returns the core") {
  const auto core = random_tensor({3, 2, 4}, 13);
  TuckerModel m{core, {CMatrix::Identity(3, 3), CMatrix::Identity(2, 2), CMatrix::Identity(4, 4)}};
  CHECK(tucker_reconstruct(m) == core);
}

TEST_CASE("Tucker reconstruction matches entry-wise evaluation") {
  const auto core = random_tensor({2, 3, 2}, 14);
  const CMatrix u1 = random_matrix(4, 2, 15), u2 = random_matrix(5, 3, 16), u3 = random_matrix(3, 2, 17);
  CHECK(max_abs_diff(tucker_reconstruct({core, {u1, u2, u3}}), naive_tucker(core, u1, u2, u3)) <= 1e-12);
}

TEST_CASE("superdiagonal Tucker core reproduces the CP model") {
  const std::size_t r = 3;
  const CMatrix a = random_matrix(4, r, 70), b = random_matrix(5, r, 71), c = random_matrix(6, r, 72);
  ComplexTensor3 core({r, r, r});
  for (std::size_t n = 0; n < r; ++n) core(n, n, n) = 1.0;
  CHECK(rel_err(tucker_reconstruct({core, {a, b, c}}), cp_reconstruct({{a, b, c}})) <= 1e-12);
}

TEST_CASE("CP reconstruction of unit vectors places a single one") {
  CMatrix a = CMatrix::Zero(3, 1), b = CMatrix::Zero(4, 1), c = CMatrix::Zero(2, 1);
  a(1, 0) = b(3, 0) = c(0, 0) = 1.0;
  const auto x = cp_reconstruct({{a, b, c}});
  for (std::size_t n = 0; n < x.size(); ++n) CHECK(x[n] == (n == x.offset(1, 3, 0) ? Complex(1.0) : Complex(0.0)));
}

TEST_CASE("CP reconstruction is invariant to column scaling") {
  CMatrix a = random_matrix(4, 2, 80), b = random_matrix(5, 2, 81), c = random_matrix(3, 2, 82);
  const auto x = cp_reconstruct({{a, b, c}});
  const Complex alpha(2.5, -0.7);
  a.col(1) *= alpha;
  c.col(1) /= alpha;
  CHECK(rel_err(cp_reconstruct({{a, b, c}}), x) <= 1e-12);
}

TEST_CASE("CP reconstruction matches a triple loop") {
  const CMatrix a = random_matrix(4, 2, 90), b = random_matrix(4, 2, 91), c = random_matrix(4, 2, 92);
  const auto x = cp_reconstruct({{a, b, c}});
  double dev = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      for (Eigen::Index k = 0; k < 4; ++k) {
        Complex v = 0.0;
        for (Eigen::Index r = 0; r < 2; ++r) v += a(i, r) * b(j, r) * c(k, r);
        dev = std::max(dev, std::abs(v - x(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                                           static_cast<std::size_t>(k))));
      }
  CHECK(dev <= 1e-13);
}

TEST_CASE("Frobenius norm") {
  CHECK(frobenius_norm(ComplexTensor3({2, 2, 2})) == 0.0);
  ComplexTensor3 one({1, 1, 1});
  one[0] = {3.0, 4.0};
  CHECK_THAT(frobenius_norm(one), WithinAbs(5.0, 1e-15));
  const auto x = random_tensor({3, 4, 5}, 99);
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK_THAT(squared_norm(x), WithinAbs(unfold(x, mode).squaredNorm(), 1e-10));
  }
}
