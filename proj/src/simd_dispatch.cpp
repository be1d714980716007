#include <cstdlib>
#include <cstring>

#include "heatsift/simd.hpp"

namespace heatsift::simd {

namespace {

Backend g_backend = Backend::scalar;

bool avx2_available() {
#if HEATSIFT_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

void assign(Backend b);

struct Init {
  Init() {
    Backend b = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("HEATSIFT_SIMD")) {
      if (std::strcmp(env, "scalar") == 0) b = Backend::scalar;
      if (std::strcmp(env, "avx2") == 0 && avx2_available()) b = Backend::avx2;
    }
    assign(b);
  }
};

}  // namespace

#define HEATSIFT_DEFINE_PTR(ret, name, args, call) ret(*name) args = &scalar::name;
HEATSIFT_SIMD_OPS(HEATSIFT_DEFINE_PTR)
#undef HEATSIFT_DEFINE_PTR

namespace {

void assign(Backend b) {
#if HEATSIFT_HAVE_AVX2
  if (b == Backend::avx2) {
#define HEATSIFT_ASSIGN_AVX2(ret, name, args, call) name = &avx2::name;
    HEATSIFT_SIMD_OPS(HEATSIFT_ASSIGN_AVX2)
#undef HEATSIFT_ASSIGN_AVX2
    g_backend = Backend::avx2;
    return;
  }
#endif
#define HEATSIFT_ASSIGN_SCALAR(ret, name, args, call) name = &scalar::name;
  HEATSIFT_SIMD_OPS(HEATSIFT_ASSIGN_SCALAR)
#undef HEATSIFT_ASSIGN_SCALAR
  g_backend = Backend::scalar;
}

const Init g_init;

}  // namespace

Backend active_backend() { return g_backend; }

const char* backend_name() { return g_backend == Backend::avx2 ? "avx2" : "scalar"; }

bool set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) return false;
  assign(b);
  return true;
}

}  // namespace heatsift::simd
