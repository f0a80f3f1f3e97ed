// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma and
// must only be entered after the runtime check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>

#include "cscat/kernels.hpp"

namespace cscat::kernels {
namespace {

// Cody-Waite split of pi/4 and minimax coefficients on [-pi/4, pi/4]
// (Cephes sin.c).
constexpr double kDP1 = 7.85398125648498535156e-1;
constexpr double kDP2 = 3.77489470793079817668e-8;
constexpr double kDP3 = 2.69515142907905952645e-15;
constexpr double kFourOverPi = 1.27323954473516268615;

constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8, 2.75573136213857245213e-6,
                            -1.98412698295895385996e-4, 8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9, -2.75573141792967388112e-7,
                            2.48015872888517045348e-5,   -1.38888888888730564116e-3, 4.16666666666665929218e-2};

inline __m256d horner6(__m256d z, const double (&c)[6]) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) {
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
  }
  return p;
}

inline void sincos4(__m256d x, __m256d& s_out, __m256d& c_out) {
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);

  const __m256d neg = _mm256_and_pd(x, sign_bit);
  const __m256d ax = _mm256_andnot_pd(sign_bit, x);

  // y = octant rounded up to even, so z = ax - y*pi/4 lies in [-pi/4, pi/4].
  __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(kFourOverPi)));
  const __m256d odd = _mm256_sub_pd(y, _mm256_mul_pd(_mm256_set1_pd(2.0), _mm256_floor_pd(_mm256_mul_pd(y, half))));
  y = _mm256_add_pd(y, odd);

  __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP1), ax);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP2), z);
  z = _mm256_fnmadd_pd(y, _mm256_set1_pd(kDP3), z);
  const __m256d zz = _mm256_mul_pd(z, z);

  const __m256d ps = _mm256_fmadd_pd(_mm256_mul_pd(z, zz), horner6(zz, kSin), z);
  const __m256d pc =
      _mm256_fmadd_pd(_mm256_mul_pd(zz, zz), horner6(zz, kCos), _mm256_fnmadd_pd(half, zz, one));

  // Quadrant q = (y/2) mod 4.
  const __m256d hy = _mm256_mul_pd(y, half);
  const __m256d q = _mm256_sub_pd(hy, _mm256_mul_pd(_mm256_set1_pd(4.0), _mm256_floor_pd(_mm256_mul_pd(hy, _mm256_set1_pd(0.25)))));
  const __m256d q1 = _mm256_cmp_pd(q, one, _CMP_EQ_OQ);
  const __m256d q2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d q3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(q1, q3);

  __m256d s = _mm256_blendv_pd(ps, pc, swap);
  __m256d c = _mm256_blendv_pd(pc, ps, swap);
  const __m256d s_flip = _mm256_and_pd(_mm256_or_pd(q2, q3), sign_bit);
  const __m256d c_flip = _mm256_and_pd(_mm256_or_pd(q1, q2), sign_bit);
  s = _mm256_xor_pd(s, _mm256_xor_pd(s_flip, neg));
  c = _mm256_xor_pd(c, c_flip);
  s_out = s;
  c_out = c;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void plane_wave_sum_avx2(const double* k, std::size_t n, const PlaneWaveSet* sets, std::size_t nsets, double x,
                         cplx* value, cplx* slope) {
  __m256d vr[kMaxSets], vi[kMaxSets], sr[kMaxSets], si[kMaxSets];
  for (std::size_t m = 0; m < nsets; ++m) {
    vr[m] = vi[m] = sr[m] = si[m] = _mm256_setzero_pd();
  }
  const __m256d xv = _mm256_set1_pd(x);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d kv = _mm256_loadu_pd(k + j);
    __m256d s, c;
    sincos4(_mm256_mul_pd(kv, xv), s, c);
    for (std::size_t m = 0; m < nsets; ++m) {
      const auto& set = sets[m];
      const __m256d Pr = _mm256_loadu_pd(set.plus_re + j);
      const __m256d Pi = _mm256_loadu_pd(set.plus_im + j);
      const __m256d Mr = _mm256_loadu_pd(set.minus_re + j);
      const __m256d Mi = _mm256_loadu_pd(set.minus_im + j);
      const __m256d pr = _mm256_fmsub_pd(Pr, c, _mm256_mul_pd(Pi, s));
      const __m256d pi = _mm256_fmadd_pd(Pr, s, _mm256_mul_pd(Pi, c));
      const __m256d mr = _mm256_fmadd_pd(Mr, c, _mm256_mul_pd(Mi, s));
      const __m256d mi = _mm256_fmsub_pd(Mi, c, _mm256_mul_pd(Mr, s));
      vr[m] = _mm256_add_pd(vr[m], _mm256_add_pd(pr, mr));
      vi[m] = _mm256_add_pd(vi[m], _mm256_add_pd(pi, mi));
      sr[m] = _mm256_fnmadd_pd(kv, _mm256_sub_pd(pi, mi), sr[m]);
      si[m] = _mm256_fmadd_pd(kv, _mm256_sub_pd(pr, mr), si[m]);
    }
  }
  double tvr[kMaxSets], tvi[kMaxSets], tsr[kMaxSets], tsi[kMaxSets];
  for (std::size_t m = 0; m < nsets; ++m) {
    tvr[m] = hsum(vr[m]);
    tvi[m] = hsum(vi[m]);
    tsr[m] = hsum(sr[m]);
    tsi[m] = hsum(si[m]);
  }
  for (; j < n; ++j) {
    const double c = std::cos(k[j] * x);
    const double s = std::sin(k[j] * x);
    for (std::size_t m = 0; m < nsets; ++m) {
      const auto& set = sets[m];
      const double pr = set.plus_re[j] * c - set.plus_im[j] * s;
      const double pi = set.plus_re[j] * s + set.plus_im[j] * c;
      const double mr = set.minus_re[j] * c + set.minus_im[j] * s;
      const double mi = set.minus_im[j] * c - set.minus_re[j] * s;
      tvr[m] += pr + mr;
      tvi[m] += pi + mi;
      tsr[m] -= k[j] * (pi - mi);
      tsi[m] += k[j] * (pr - mr);
    }
  }
  for (std::size_t m = 0; m < nsets; ++m) {
    value[m] = {tvr[m], tvi[m]};
    if (slope != nullptr) {
      slope[m] = {tsr[m], tsi[m]};
    }
  }
}

cplx weighted_inner_avx2(const double* w, const cplx* a, const cplx* b, std::size_t n) {
  const auto* ap = reinterpret_cast<const double*>(a);
  const auto* bp = reinterpret_cast<const double*>(b);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bp + 2 * i);
    const __m256d wv = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
    // [ar br, ai bi] sums to the real part; [ar bi, ai br] differences to the imaginary.
    const __m256d bswap = _mm256_permute_pd(bv, 0b0101);
    acc_re = _mm256_fmadd_pd(wv, _mm256_mul_pd(av, bv), acc_re);
    acc_im = _mm256_fmadd_pd(wv, _mm256_mul_pd(av, bswap), acc_im);
  }
  double re = hsum(acc_re);
  alignas(32) double t[4];
  _mm256_store_pd(t, acc_im);
  double im = (t[0] - t[1]) + (t[2] - t[3]);
  for (; i < n; ++i) {
    re += w[i] * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    im += w[i] * (a[i].real() * b[i].imag() - a[i].imag() * b[i].real());
  }
  return {re, im};
}

double weighted_norm_avx2(const double* w, const cplx* a, std::size_t n) {
  const auto* ap = reinterpret_cast<const double*>(a);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d av = _mm256_loadu_pd(ap + 2 * i);
    const __m256d wv = _mm256_set_pd(w[i + 1], w[i + 1], w[i], w[i]);
    acc = _mm256_fmadd_pd(wv, _mm256_mul_pd(av, av), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    total += w[i] * std::norm(a[i]);
  }
  return total;
}

void sincos_avx2(const double* x, std::size_t n, double* s, double* c) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d sv, cv;
    sincos4(_mm256_loadu_pd(x + i), sv, cv);
    _mm256_storeu_pd(s + i, sv);
    _mm256_storeu_pd(c + i, cv);
  }
  for (; i < n; ++i) {
    s[i] = std::sin(x[i]);
    c[i] = std::cos(x[i]);
  }
}

constexpr KernelTable kAvx2{Backend::avx2, "avx2", plane_wave_sum_avx2, weighted_inner_avx2, weighted_norm_avx2,
                            sincos_avx2};

}  // namespace

const KernelTable& detail::avx2_table() noexcept { return kAvx2; }

}  // namespace cscat::kernels
