#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "cscat/error.hpp"
#include "cscat/kernels.hpp"

namespace cscat::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(CSCAT_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() noexcept {
  const char* env = std::getenv("CSCAT_KERNELS");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    return &detail::scalar_table();
  }
#if defined(CSCAT_HAVE_AVX2_KERNELS)
  if (cpu_has_avx2()) {
    return &detail::avx2_table();
  }
#endif
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> ptr{pick_default()};
  return ptr;
}

}  // namespace

bool available(Backend backend) noexcept {
  return backend == Backend::scalar || (backend == Backend::avx2 && cpu_has_avx2());
}

const KernelTable& table(Backend backend) {
  if (!available(backend)) {
    throw Error(ErrorKind::discretization, "requested kernel backend is not available on this CPU");
  }
#if defined(CSCAT_HAVE_AVX2_KERNELS)
  if (backend == Backend::avx2) {
    return detail::avx2_table();
  }
#endif
  return detail::scalar_table();
}

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void select(Backend backend) { current().store(&table(backend), std::memory_order_release); }

void plane_wave_sum(std::span<const double> k, std::span<const PlaneWaveSet> sets, double x, std::span<cplx> value,
                    std::span<cplx> slope) {
  if (sets.size() > kMaxSets || value.size() < sets.size() || (!slope.empty() && slope.size() < sets.size())) {
    throw Error(ErrorKind::discretization, "plane_wave_sum: bad set/output sizes");
  }
  active().plane_wave_sum(k.data(), k.size(), sets.data(), sets.size(), x, value.data(),
                          slope.empty() ? nullptr : slope.data());
}

cplx weighted_inner(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b) {
  return active().weighted_inner(w.data(), a.data(), b.data(), std::min({w.size(), a.size(), b.size()}));
}

double weighted_norm(std::span<const double> w, std::span<const cplx> a) {
  return active().weighted_norm(w.data(), a.data(), std::min(w.size(), a.size()));
}

}  // namespace cscat::kernels
