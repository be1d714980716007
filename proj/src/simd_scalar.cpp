#include "heatsift/simd.hpp"

namespace heatsift::simd::scalar {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sumsq(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void scal_sub(double a, const double* w, const double* v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * w[i] - v[i];
}

void cheb_step(double a, const double* w, const double* y1, const double* y0, double* out,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * w[i] - 2.0 * y1[i] - y0[i];
}

void add_scaled_sq(double a, const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a * x[i] * x[i];
}

void spmv(const CsrView& m, const double* x, double* y) {
  for (std::size_t i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (std::int64_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      s += m.val[k] * x[m.col[k]];
    y[i] = s;
  }
}

}  // namespace heatsift::simd::scalar
