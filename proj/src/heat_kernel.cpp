#include "heatsift/heat_kernel.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

#include "heatsift/errors.hpp"
#include "heatsift/parallel.hpp"
#include "heatsift/rng.hpp"
#include "heatsift/simd.hpp"

namespace heatsift {

namespace {

void require_time(double t) {
  if (!(t >= 0.0)) throw ParameterError("diffusion time must be nonnegative");
}

}  // namespace

double spectral_bound(const LaplacianMatrix& L, bool refine, std::uint64_t seed) {
  const double cheap = 2.0 * L.max_strength();
  if (!refine || L.order == 0) return cheap;

  rng::Stream stream(rng::derive(seed, "power-iter"));
  std::vector<double> v(L.order), w(L.order);
  for (double& x : v) x = stream.uniform() - 0.5;
  const auto csr = L.view();
  double rayleigh = 0.0;
  for (int it = 0; it < 50; ++it) {
    simd::spmv(csr, v.data(), w.data());
    const double nw = std::sqrt(simd::sumsq(w.data(), w.size()));
    if (nw == 0.0) return cheap;
    rayleigh = simd::dot(v.data(), w.data(), v.size()) / simd::sumsq(v.data(), v.size());
    simd::scale(1.0 / nw, w.data(), w.size());
    std::swap(v, w);
  }
  return std::min(cheap, rayleigh * 1.01);
}

SpectralFactor SpectralFactor::compute(const LaplacianMatrix& L) {
  SpectralFactor f;
  const auto eig = linalg::symmetric_eigen(L.dense());
  f.eigenvalues_ = eig.values;
  f.vectors_ = eig.vectors;
  const std::size_t n = L.order;
  f.vectors_squared_ = linalg::Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = f.vectors_.row(k);
    double* sq = f.vectors_squared_.row(k);
    for (std::size_t i = 0; i < n; ++i) sq[i] = row[i] * row[i];
  }
  return f;
}

KernelMatrix SpectralFactor::kernel_at(double t) const {
  require_time(t);
  const std::size_t n = order();
  KernelMatrix k;
  k.order = n;
  k.time = t;
  k.method = KernelMethod::exact;
  if (t == 0.0) {
    k.entries = linalg::Matrix::identity(n);
    return k;
  }
  // Everything but the constant mode has decayed: kernel is (1/N) 11^T.
  if (n > 1 && std::exp(-t * lambda2()) < 1e-12 / static_cast<double>(n)) {
    k.entries = linalg::Matrix(n, n, 1.0 / static_cast<double>(n));
    return k;
  }
  k.entries = linalg::Matrix(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    const double g = std::exp(-t * std::max(0.0, eigenvalues_[m]));
    if (g < 1e-16) continue;
    const double* u = vectors_.row(m);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = g * u[i];
      if (c == 0.0) continue;
      simd::axpy(c, u + i, k.entries.row(i) + i, n - i);
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) k.entries(j, i) = k.entries(i, j);
  return k;
}

std::vector<double> SpectralFactor::concentrations_at(double t) const {
  require_time(t);
  const std::size_t n = order();
  std::vector<double> sq(n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const double g = std::exp(-2.0 * t * std::max(0.0, eigenvalues_[m]));
    if (g < 1e-18) continue;
    simd::axpy(g, vectors_squared_.row(m), sq.data(), n);
  }
  for (double& x : sq) x = std::sqrt(std::max(0.0, x));
  return sq;
}

KernelMatrix exact_kernel(const LaplacianMatrix& L, double t, std::size_t dense_limit) {
  require_time(t);
  if (L.order > dense_limit)
    throw SizeError("graph order " + std::to_string(L.order) + " exceeds the dense limit " +
                    std::to_string(dense_limit) + "; use the Chebyshev path");
  return SpectralFactor::compute(L).kernel_at(t);
}

double ChebCoefficients::evaluate(double lambda) const {
  const double x = 2.0 * lambda / lambda_max - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (int k = degree; k >= 1; --k) {
    const double b = 2.0 * x * b1 - b2 + values[static_cast<std::size_t>(k)];
    b2 = b1;
    b1 = b;
  }
  return x * b1 - b2 + 0.5 * values[0];
}

ChebCoefficients cheb_coefficients(double t, double lambda_max, int m) {
  require_time(t);
  if (!(lambda_max > 0.0)) throw ParameterError("lambda_max must be positive");
  if (m < 1) throw ParameterError("chebyshev degree must be >= 1");

  ChebCoefficients c;
  c.degree = m;
  c.lambda_max = lambda_max;
  c.time = t;
  c.values.assign(static_cast<std::size_t>(m) + 1, 0.0);
  const int nodes = m + 1;
  std::vector<double> theta(static_cast<std::size_t>(nodes));
  std::vector<double> f(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) {
    theta[j] = std::numbers::pi * (j + 0.5) / nodes;
    const double lambda = 0.5 * lambda_max * (std::cos(theta[j]) + 1.0);
    f[j] = std::exp(-t * lambda);
  }
  for (int k = 0; k <= m; ++k) {
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) s += f[j] * std::cos(k * theta[j]);
    c.values[static_cast<std::size_t>(k)] = 2.0 * s / nodes;
  }
  return c;
}

double cheb_sup_error(const ChebCoefficients& coeffs) {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lambda = coeffs.lambda_max * i / 999.0;
    worst = std::max(worst, std::abs(coeffs.evaluate(lambda) - std::exp(-coeffs.time * lambda)));
  }
  return worst;
}

ChebCoefficients guarded_coefficients(double t, double lambda_max, int m, GuardPolicy policy) {
  ChebCoefficients c = cheb_coefficients(t, lambda_max, m);
  double err = cheb_sup_error(c);
  if (err <= kChebGuardTolerance) return c;
  if (policy == GuardPolicy::warn_only) {
    std::cerr << "[heat-kernel] warning: chebyshev degree " << m << " has scalar sup-error "
              << err << " at t*lambda_max = " << t * lambda_max << "\n";
    return c;
  }
  while (err > kChebGuardTolerance && c.degree < kMaxChebDegree) {
    const int next = std::min(kMaxChebDegree, c.degree * 2);
    std::cerr << "[heat-kernel] warning: chebyshev degree " << c.degree
              << " insufficient (sup-error " << err << "), escalating to " << next << "\n";
    c = cheb_coefficients(t, lambda_max, next);
    err = cheb_sup_error(c);
  }
  if (err > kChebGuardTolerance)
    std::cerr << "[heat-kernel] warning: sup-error " << err << " still above "
              << kChebGuardTolerance << " at the degree cap " << kMaxChebDegree << "\n";
  return c;
}

namespace {

struct ChebScratch {
  std::vector<double> y0, y1, y2, w;
  void resize(std::size_t n) {
    y0.resize(n);
    y1.resize(n);
    y2.resize(n);
    w.resize(n);
  }
};

void cheb_apply_into(const simd::CsrView& csr, const ChebCoefficients& coeffs,
                     const double* signal, double* out, ChebScratch& s) {
  const std::size_t n = csr.n;
  const double a = 2.0 / coeffs.lambda_max;
  s.resize(n);

  // T_0 x = x
  std::copy(signal, signal + n, s.y0.begin());
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * coeffs.values[0] * s.y0[i];
  if (coeffs.degree < 1) return;

  // T_1 x = Ltilde x
  simd::spmv(csr, s.y0.data(), s.w.data());
  simd::scal_sub(a, s.w.data(), s.y0.data(), s.y1.data(), n);
  simd::axpy(coeffs.values[1], s.y1.data(), out, n);

  for (int k = 2; k <= coeffs.degree; ++k) {
    // T_k x = 2 Ltilde T_{k-1} x - T_{k-2} x
    simd::spmv(csr, s.y1.data(), s.w.data());
    simd::cheb_step(2.0 * a, s.w.data(), s.y1.data(), s.y0.data(), s.y2.data(), n);
    simd::axpy(coeffs.values[static_cast<std::size_t>(k)], s.y2.data(), out, n);
    std::swap(s.y0, s.y1);
    std::swap(s.y1, s.y2);
  }
}

}  // namespace

std::vector<double> cheb_apply(const LaplacianMatrix& L, const ChebCoefficients& coeffs,
                               std::span<const double> signal) {
  if (signal.size() != L.order) throw ShapeError("signal length does not match graph order");
  std::vector<double> out(L.order);
  ChebScratch scratch;
  cheb_apply_into(L.view(), coeffs, signal.data(), out.data(), scratch);
  return out;
}

KernelMatrix full_kernel_approx(const LaplacianMatrix& L, double t, int m, int workers,
                                GuardPolicy policy, bool refine_bound) {
  require_time(t);
  if (m < 1) throw ParameterError("chebyshev degree must be >= 1");
  const std::size_t n = L.order;
  const double lambda_max = spectral_bound(L, refine_bound);
  const ChebCoefficients coeffs = guarded_coefficients(t, lambda_max, m, policy);

  KernelMatrix k;
  k.order = n;
  k.time = t;
  k.method = KernelMethod::chebyshev;
  k.cheb_degree = coeffs.degree;
  k.est_lambda_max = lambda_max;
  k.entries = linalg::Matrix(n, n);

  // Column u of e^{-tL} lands in storage row u; (K + K^T)/2 below makes the
  // layout immaterial.
  const auto csr = L.view();
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    ChebScratch scratch;
    std::vector<double> delta(n, 0.0);
    for (std::size_t u = begin; u < end; ++u) {
      delta[u] = 1.0;
      cheb_apply_into(csr, coeffs, delta.data(), k.entries.row(u), scratch);
      delta[u] = 0.0;
    }
  });

  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double avg = 0.5 * (k.entries(i, j) + k.entries(j, i));
        k.entries(i, j) = avg;
        k.entries(j, i) = avg;
      }
  });
  return k;
}

KernelMatrix heat_kernel_auto(const LaplacianMatrix& L, double t, std::size_t dense_limit,
                              int cheb_degree, int workers, bool refine_bound) {
  if (L.order <= dense_limit) return exact_kernel(L, t, dense_limit);
  return full_kernel_approx(L, t, cheb_degree, workers, GuardPolicy::escalate, refine_bound);
}

}  // namespace heatsift
