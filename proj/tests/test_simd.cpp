#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "heatsift/rng.hpp"
#include "heatsift/simd.hpp"

using namespace heatsift;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  rng::Stream stream(seed);
  std::vector<double> v(n);
  for (double& x : v) x = stream.uniform(-2.0, 2.0);
  return v;
}

simd::CsrView as_view(const std::vector<std::int64_t>& rp, const std::vector<std::int32_t>& col,
                      const std::vector<double>& val) {
  return {rp.size() - 1, rp.data(), col.data(), val.data()};
}

// Random sparse symmetric-pattern matrix in CSR form.
struct RandomCsr {
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;

  explicit RandomCsr(std::size_t n, std::uint64_t seed) {
    rng::Stream stream(seed);
    row_ptr.push_back(0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        if (i == j || stream.uniform() < 0.15) {
          col.push_back(static_cast<std::int32_t>(j));
          val.push_back(stream.uniform(-1.0, 1.0));
        }
      row_ptr.push_back(static_cast<std::int64_t>(col.size()));
    }
  }

  simd::CsrView view() const { return as_view(row_ptr, col, val); }
};

constexpr double kRelTol = 1e-13;

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

#if HEATSIFT_HAVE_AVX2

TEST_CASE("avx2 reductions match scalar within fma rounding") {
  if (!simd::set_backend(simd::Backend::avx2)) return;  // host without AVX2
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 256u, 1001u}) {
    const auto x = random_vector(n, 11 + n);
    const auto y = random_vector(n, 77 + n);
    CHECK(rel_err(simd::scalar::dot(x.data(), y.data(), n),
                  simd::avx2::dot(x.data(), y.data(), n)) < kRelTol);
    CHECK(rel_err(simd::scalar::sumsq(x.data(), n), simd::avx2::sumsq(x.data(), n)) < kRelTol);
    CHECK(rel_err(simd::scalar::sum(x.data(), n), simd::avx2::sum(x.data(), n)) < kRelTol);
  }
}

TEST_CASE("avx2 elementwise kernels match scalar") {
  for (std::size_t n : {1u, 5u, 64u, 129u}) {
    const auto w = random_vector(n, 5 + n);
    const auto y1 = random_vector(n, 6 + n);
    const auto y0 = random_vector(n, 9 + n);
    std::vector<double> out_s(n), out_v(n);

    simd::scalar::scal_sub(1.7, w.data(), y0.data(), out_s.data(), n);
    simd::avx2::scal_sub(1.7, w.data(), y0.data(), out_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(out_s[i], out_v[i]) < kRelTol);

    simd::scalar::cheb_step(0.3, w.data(), y1.data(), y0.data(), out_s.data(), n);
    simd::avx2::cheb_step(0.3, w.data(), y1.data(), y0.data(), out_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(out_s[i], out_v[i]) < kRelTol);

    auto acc_s = random_vector(n, 13 + n);
    auto acc_v = acc_s;
    simd::scalar::axpy(-0.4, w.data(), acc_s.data(), n);
    simd::avx2::axpy(-0.4, w.data(), acc_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(acc_s[i], acc_v[i]) < kRelTol);

    simd::scalar::add_scaled_sq(2.1, w.data(), acc_s.data(), n);
    simd::avx2::add_scaled_sq(2.1, w.data(), acc_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(acc_s[i], acc_v[i]) < kRelTol);

    auto scale_s = w;
    auto scale_v = w;
    simd::scalar::scale(3.25, scale_s.data(), n);
    simd::avx2::scale(3.25, scale_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(scale_s[i] == scale_v[i]);  // exact: one multiply
  }
}

TEST_CASE("avx2 spmv matches scalar") {
  for (std::size_t n : {1u, 2u, 9u, 40u, 300u}) {
    const RandomCsr m(n, 1000 + n);
    const auto x = random_vector(n, 2000 + n);
    std::vector<double> y_s(n), y_v(n);
    simd::scalar::spmv(m.view(), x.data(), y_s.data());
    simd::avx2::spmv(m.view(), x.data(), y_v.data());
    for (std::size_t i = 0; i < n; ++i) CHECK(rel_err(y_s[i], y_v[i]) < kRelTol);
  }
}

#endif  // HEATSIFT_HAVE_AVX2

TEST_CASE("dispatch honors set_backend") {
  const auto x = random_vector(100, 3);
  REQUIRE(simd::set_backend(simd::Backend::scalar));
  CHECK(simd::active_backend() == simd::Backend::scalar);
  CHECK(simd::sum(x.data(), x.size()) == simd::scalar::sum(x.data(), x.size()));
#if HEATSIFT_HAVE_AVX2
  if (simd::set_backend(simd::Backend::avx2)) {
    CHECK(simd::active_backend() == simd::Backend::avx2);
    CHECK(simd::sum(x.data(), x.size()) == simd::avx2::sum(x.data(), x.size()));
  }
#endif
}

TEST_CASE("scalar kernels agree with straightforward formulas") {
  const std::size_t n = 23;
  const auto x = random_vector(n, 41);
  const auto y = random_vector(n, 42);
  double expected = 0.0;
  for (std::size_t i = 0; i < n; ++i) expected += x[i] * y[i];
  CHECK(simd::scalar::dot(x.data(), y.data(), n) == doctest::Approx(expected).epsilon(1e-14));

  std::vector<double> out(n);
  simd::scalar::cheb_step(1.5, x.data(), y.data(), x.data(), out.data(), n);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(out[i] == doctest::Approx(1.5 * x[i] - 2.0 * y[i] - x[i]));
}
