#pragma once

// Dense double-precision inner loops with a scalar reference implementation
// and vectorized variants (AVX2+FMA on x86-64, NEON on AArch64). The variant
// is chosen once at startup from CPU features; LEXPROP_SIMD=scalar forces the
// reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace lexprop::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] = alpha * x[i] + beta * y[i]
  void (*axpby)(double alpha, const double* x, double beta, double* y, std::size_t n);
  // max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

bool backend_supported(Backend b);
Backend active_backend();
// Used by tests to pin a variant; throws UsageError when unsupported.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline double squared_norm(std::span<const double> a) {
  return kernels().dot(a.data(), a.data(), a.size());
}
inline void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  kernels().axpby(alpha, x.data(), beta, y.data(), x.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return kernels().max_abs_diff(a.data(), b.data(), a.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return kernels().squared_distance(a.data(), b.data(), a.size());
}

}  // namespace lexprop::simd
