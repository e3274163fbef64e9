#include <atomic>
#include <cstdlib>
#include <string>

#include "lexprop/error.hpp"
#include "lexprop/simd/kernels.hpp"

namespace lexprop::simd {

#ifndef LEXPROP_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#ifndef LEXPROP_HAVE_NEON
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(LEXPROP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("LEXPROP_SIMD")) {
    const std::string v = env;
    if (v == "scalar") return Backend::Scalar;
  }
  if (backend_supported(Backend::Avx2)) return Backend::Avx2;
  if (backend_supported(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Avx2:
      return avx2_kernels();
    case Backend::Neon:
      return neon_kernels();
    case Backend::Scalar:
      break;
  }
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{table_for(detect())};
  return table;
}

std::atomic<Backend>& current_backend() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool backend_supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return avx2_kernels() != nullptr && cpu_has_avx2();
    case Backend::Neon:
      return neon_kernels() != nullptr;
  }
  return false;
}

Backend active_backend() { return current_backend().load(); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw UsageError("SIMD backend not supported on this machine: " + std::string(backend_name(b)));
  }
  current_backend().store(b);
  current().store(table_for(b));
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& kernels() { return *current().load(std::memory_order_relaxed); }

}  // namespace lexprop::simd
