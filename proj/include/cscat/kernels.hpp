#pragma once

// Data-parallel inner loops used by packet synthesis and x-quadrature.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once at runtime from cpuid; set
// CSCAT_KERNELS=scalar in the environment or call select() to override.

#include <complex>
#include <cstddef>
#include <span>

namespace cscat::kernels {

using cplx = std::complex<double>;

enum class Backend { scalar, avx2 };

/// Split-complex coefficient arrays for sum_n P_n e^{i k_n x} + M_n e^{-i k_n x}.
struct PlaneWaveSet {
  const double* plus_re = nullptr;
  const double* plus_im = nullptr;
  const double* minus_re = nullptr;
  const double* minus_im = nullptr;
};

inline constexpr std::size_t kMaxSets = 4;

struct KernelTable {
  Backend backend;
  const char* name;
  /// For each set: value = sum P e^{ikx} + M e^{-ikx}, slope = d/dx of it.
  void (*plane_wave_sum)(const double* k, std::size_t n, const PlaneWaveSet* sets, std::size_t nsets, double x,
                         cplx* value, cplx* slope);
  /// sum_i w_i conj(a_i) b_i
  cplx (*weighted_inner)(const double* w, const cplx* a, const cplx* b, std::size_t n);
  /// sum_i w_i |a_i|^2
  double (*weighted_norm)(const double* w, const cplx* a, std::size_t n);
  /// Elementwise sin and cos (exposed for accuracy tests).
  void (*sincos)(const double* x, std::size_t n, double* s, double* c);
};

bool available(Backend backend) noexcept;
const KernelTable& table(Backend backend);
const KernelTable& active() noexcept;
void select(Backend backend);

// Thin span-based front ends over active().
void plane_wave_sum(std::span<const double> k, std::span<const PlaneWaveSet> sets, double x, std::span<cplx> value,
                    std::span<cplx> slope);
cplx weighted_inner(std::span<const double> w, std::span<const cplx> a, std::span<const cplx> b);
double weighted_norm(std::span<const double> w, std::span<const cplx> a);

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(CSCAT_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table() noexcept;
#endif
}  // namespace detail

}  // namespace cscat::kernels
