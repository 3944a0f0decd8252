#include <catch_amalgamated.hpp>

#include <set>

#include "tensorchan/rng.hpp"

using namespace tensorchan;

TEST_CASE("identical keys give identical streams") {
  Rng a(123), b(123);
  for (int n = 0; n < 1000; ++n) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different keys give different streams") {
  Rng a(1), b(2);
  int equal = 0;
  for (int n = 0; n < 1000; ++n) equal += a.next_u64() == b.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("uniform draws lie in [0, 1) with the right moments") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
  CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("uniform_index stays in range and covers every value evenly") {
  Rng rng(8);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  // Chi-square with 6 degrees of freedom; 22.5 is the 0.999 quantile.
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.5);
}

TEST_CASE("normal and complex normal moments") {
  Rng rng(9);
  const int n = 200000;
  double m = 0.0, v = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    m += x;
    v += x * x;
  }
  CHECK(std::abs(m / n) < 0.01);
  CHECK(std::abs(v / n - 1.0) < 0.01);

  double re2 = 0.0, im2 = 0.0;
  std::complex<double> mean = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto z = rng.complex_normal(2.0);
    mean += z;
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
  }
  CHECK(std::abs(mean / double(n)) < 0.02);
  CHECK(std::abs(re2 / n - 1.0) < 0.02);
  CHECK(std::abs(im2 / n - 1.0) < 0.02);
}

TEST_CASE("derived seeds separate purposes and parts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t run = 0; run < 100; ++run) {
    seen.insert(derive_seed(42, {run}, "channel"));
    seen.insert(derive_seed(42, {run}, "mask"));
    seen.insert(derive_seed(42, {run}, "noise"));
  }
  CHECK(seen.size() == 300);
  CHECK(derive_seed(42, {1, 2}) != derive_seed(42, {2, 1}));
  CHECK(derive_seed(42, {1}) == derive_seed(42, {1}));
  CHECK(hash_tag("channel") != hash_tag("mask"));
}

TEST_CASE("Rng satisfies the standard generator interface") {
  Rng rng(10);
  std::vector<int> v{1, 2, 3, 4, 5};
  std::shuffle(v.begin(), v.end(), rng);
  std::sort(v.begin(), v.end());
  CHECK(v == std::vector<int>{1, 2, 3, 4, 5});
}
