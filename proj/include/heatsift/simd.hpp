#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops used by the kernel and concentration code paths.
// Every operation has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant compiled in a separate translation unit. The active
// variant is chosen once at startup from CPUID (override: HEATSIFT_SIMD
// environment variable, or set_backend() from tests). Both variants are
// equivalence-tested against each other; a single process always runs one
// variant, so outputs are reproducible for any worker count.

namespace heatsift::simd {

// CSR view of a sparse symmetric matrix; values include the diagonal and
// columns are sorted within each row.
struct CsrView {
  std::size_t n = 0;
  const std::int64_t* row_ptr = nullptr;  // n + 1 entries
  const std::int32_t* col = nullptr;
  const double* val = nullptr;
};

#define HEATSIFT_SIMD_OPS(X)                                                             \
  X(double, dot, (const double* x, const double* y, std::size_t n), (x, y, n))           \
  X(double, sumsq, (const double* x, std::size_t n), (x, n))                             \
  X(double, sum, (const double* x, std::size_t n), (x, n))                               \
  X(void, axpy, (double a, const double* x, double* y, std::size_t n), (a, x, y, n))     \
  X(void, scale, (double a, double* x, std::size_t n), (a, x, n))                        \
  /* out = a*w - v */                                                                    \
  X(void, scal_sub, (double a, const double* w, const double* v, double* out,            \
                     std::size_t n), (a, w, v, out, n))                                  \
  /* out = a*w - 2*y1 - y0 (one Chebyshev recurrence step, SpMV result w) */             \
  X(void, cheb_step, (double a, const double* w, const double* y1, const double* y0,     \
                      double* out, std::size_t n), (a, w, y1, y0, out, n))               \
  /* acc += a * x[i]^2 */                                                                \
  X(void, add_scaled_sq, (double a, const double* x, double* acc, std::size_t n),        \
    (a, x, acc, n))                                                                      \
  X(void, spmv, (const CsrView& m, const double* x, double* y), (m, x, y))

#define HEATSIFT_DECLARE(ret, name, args, call) ret name args;

namespace scalar {
HEATSIFT_SIMD_OPS(HEATSIFT_DECLARE)
}

#if HEATSIFT_HAVE_AVX2
namespace avx2 {
HEATSIFT_SIMD_OPS(HEATSIFT_DECLARE)
}
#endif

#undef HEATSIFT_DECLARE

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();

// Returns false if the requested backend is unavailable on this host.
bool set_backend(Backend b);

// Dispatched entry points.
#define HEATSIFT_DECLARE_PTR(ret, name, args, call) extern ret(*name) args;
HEATSIFT_SIMD_OPS(HEATSIFT_DECLARE_PTR)
#undef HEATSIFT_DECLARE_PTR

}  // namespace heatsift::simd
