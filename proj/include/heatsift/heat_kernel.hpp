#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "heatsift/graph.hpp"
#include "heatsift/linalg.hpp"

namespace heatsift {

inline constexpr std::size_t kDefaultDenseLimit = 8000;
inline constexpr int kDefaultChebDegree = 30;
inline constexpr int kMaxChebDegree = 512;
inline constexpr double kChebGuardTolerance = 1e-6;

enum class KernelMethod { exact, chebyshev };

// Dense evaluation of e^{-tL}. Symmetric; rows sum to 1 within the method
// tolerance (1e-10 exact, 1e-6 chebyshev); t = 0 gives the identity.
struct KernelMatrix {
  std::size_t order = 0;
  double time = 0.0;
  KernelMethod method = KernelMethod::exact;
  int cheb_degree = 0;          // chebyshev only
  double est_lambda_max = 0.0;  // chebyshev only
  linalg::Matrix entries;
};

// Coefficients of the degree-m Chebyshev expansion of f(lambda) = e^{-t lambda}
// on [0, lambda_max], under p(x) = c0/2 + sum_{k>=1} c_k T_k(x) with
// lambda = (lambda_max/2)(x + 1).
struct ChebCoefficients {
  int degree = 0;
  double lambda_max = 0.0;
  double time = 0.0;
  std::vector<double> values;  // degree + 1 coefficients

  // Reconstruction p(lambda) via the Clenshaw recurrence.
  double evaluate(double lambda) const;
};

// Upper bound on lambda_max(L): 2 * max_u d_u, optionally tightened by 50
// power iterations (times 1.01 safety, never above the cheap bound).
double spectral_bound(const LaplacianMatrix& L, bool refine = false, std::uint64_t seed = 0);

// Reusable symmetric eigendecomposition of L; lets callers evaluate kernels
// and concentrations at many times while factorizing once.
class SpectralFactor {
public:
  static SpectralFactor compute(const LaplacianMatrix& L);

  std::size_t order() const noexcept { return eigenvalues_.size(); }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  double lambda2() const { return eigenvalues_.size() > 1 ? eigenvalues_[1] : 0.0; }

  KernelMatrix kernel_at(double t) const;

  // c_u(t) = sqrt((e^{-2tL})_{uu}) from the spectrum, without forming the kernel.
  std::vector<double> concentrations_at(double t) const;

private:
  std::vector<double> eigenvalues_;   // ascending
  linalg::Matrix vectors_;            // row k = eigenvector k
  linalg::Matrix vectors_squared_;    // elementwise square of vectors_
};

// e^{-tL} by full symmetric eigendecomposition. N above dense_limit is a
// size error directing to the Chebyshev path.
KernelMatrix exact_kernel(const LaplacianMatrix& L, double t,
                          std::size_t dense_limit = kDefaultDenseLimit);

ChebCoefficients cheb_coefficients(double t, double lambda_max, int m);

// Sup-error of the scalar reconstruction against e^{-t lambda} on a
// 1000-point grid over [0, lambda_max].
double cheb_sup_error(const ChebCoefficients& coeffs);

enum class GuardPolicy { escalate, warn_only };

// Chebyshev accuracy guard: doubles m (capped at kMaxChebDegree) until the
// scalar sup-error is below kChebGuardTolerance, warning on every escalation.
// warn_only keeps the requested degree and only reports.
ChebCoefficients guarded_coefficients(double t, double lambda_max, int m,
                                      GuardPolicy policy = GuardPolicy::escalate);

// Degree-m polynomial in L applied to a signal via the three-term recurrence
// on Ltilde = (2/lambda_max) L - I; cost O(m |E|), no dense matrix.
std::vector<double> cheb_apply(const LaplacianMatrix& L, const ChebCoefficients& coeffs,
                               std::span<const double> signal);

// Assembles all N kernel columns by cheb_apply on each delta_u, partitioned
// across workers, then symmetrizes as (K + K^T)/2. Bitwise identical output
// for any worker count. refine_bound tightens lambda_max by power iteration
// (faster coefficient decay at the cost of 50 extra SpMVs).
KernelMatrix full_kernel_approx(const LaplacianMatrix& L, double t, int m, int workers,
                                GuardPolicy policy = GuardPolicy::escalate,
                                bool refine_bound = false);

// Kernel via the path picked by dense_limit: exact when N <= dense_limit,
// column-parallel Chebyshev otherwise.
KernelMatrix heat_kernel_auto(const LaplacianMatrix& L, double t, std::size_t dense_limit,
                              int cheb_degree, int workers, bool refine_bound = false);

}  // namespace heatsift
