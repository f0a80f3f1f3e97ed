#include <cmath>

#include "cscat/kernels.hpp"

namespace cscat::kernels {
namespace {

void plane_wave_sum_scalar(const double* k, std::size_t n, const PlaneWaveSet* sets, std::size_t nsets, double x,
                           cplx* value, cplx* slope) {
  double vr[kMaxSets] = {}, vi[kMaxSets] = {}, sr[kMaxSets] = {}, si[kMaxSets] = {};
  for (std::size_t j = 0; j < n; ++j) {
    const double c = std::cos(k[j] * x);
    const double s = std::sin(k[j] * x);
    for (std::size_t m = 0; m < nsets; ++m) {
      const auto& set = sets[m];
      // P e^{ikx} and M e^{-ikx}
      const double pr = set.plus_re[j] * c - set.plus_im[j] * s;
      const double pi = set.plus_re[j] * s + set.plus_im[j] * c;
      const double mr = set.minus_re[j] * c + set.minus_im[j] * s;
      const double mi = set.minus_im[j] * c - set.minus_re[j] * s;
      vr[m] += pr + mr;
      vi[m] += pi + mi;
      // i k (P e^{ikx} - M e^{-ikx})
      sr[m] -= k[j] * (pi - mi);
      si[m] += k[j] * (pr - mr);
    }
  }
  for (std::size_t m = 0; m < nsets; ++m) {
    value[m] = {vr[m], vi[m]};
    if (slope != nullptr) {
      slope[m] = {sr[m], si[m]};
    }
  }
}

cplx weighted_inner_scalar(const double* w, const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    im += w[i] * (a[i].real() * b[i].imag() - a[i].imag() * b[i].real());
  }
  return {re, im};
}

double weighted_norm_scalar(const double* w, const cplx* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * std::norm(a[i]);
  }
  return acc;
}

void sincos_scalar(const double* x, std::size_t n, double* s, double* c) {
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

constexpr KernelTable kScalar{Backend::scalar, "scalar", plane_wave_sum_scalar, weighted_inner_scalar,
                              weighted_norm_scalar, sincos_scalar};

}  // namespace

const KernelTable& detail::scalar_table() noexcept { return kScalar; }

}  // namespace cscat::kernels
