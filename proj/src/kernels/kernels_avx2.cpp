// AVX2+FMA variants of the complex kernels.  This translation unit is the
// only one compiled with -mavx2 -mfma; it is entered only after a runtime
// CPU feature check (see kernels.cpp).
//
// Complex products are formed on interleaved [re, im] pairs: accumulate
// a_re*(x_re, x_im) and a_im*(x_im, x_re) separately with FMAs, then merge
// once per row with addsub, which yields
//   [a_re*x_re - a_im*x_im, a_re*x_im + a_im*x_re].

#include "cavtel/kernels.hpp"

#if defined(CAVTEL_HAVE_AVX2)

#include <immintrin.h>

namespace cavtel::kernels::detail {

namespace {

// [ar ai ar' ai'] -> [ar ar ar' ar']
inline __m256d dup_re(__m256d v) { return _mm256_movedup_pd(v); }
// [ar ai ar' ai'] -> [ai ai ai' ai']
inline __m256d dup_im(__m256d v) { return _mm256_unpackhi_pd(v, v); }
// [xr xi xr' xi'] -> [xi xr xi' xr']
inline __m256d swap_ri(__m256d v) { return _mm256_shuffle_pd(v, v, 0x5); }

}  // namespace

void matvec_avx2(const Cplx* a, const Cplx* x, Cplx* y, std::size_t n) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const std::size_t w = 2 * n;  // doubles per row
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = ad + i * w;
    __m256d re0 = _mm256_setzero_pd(), im0 = _mm256_setzero_pd();
    __m256d re1 = _mm256_setzero_pd(), im1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 8 <= w; j += 8) {  // four complex entries per iteration
      const __m256d va0 = _mm256_loadu_pd(row + j);
      const __m256d vx0 = _mm256_loadu_pd(xd + j);
      const __m256d va1 = _mm256_loadu_pd(row + j + 4);
      const __m256d vx1 = _mm256_loadu_pd(xd + j + 4);
      re0 = _mm256_fmadd_pd(dup_re(va0), vx0, re0);
      im0 = _mm256_fmadd_pd(dup_im(va0), swap_ri(vx0), im0);
      re1 = _mm256_fmadd_pd(dup_re(va1), vx1, re1);
      im1 = _mm256_fmadd_pd(dup_im(va1), swap_ri(vx1), im1);
    }
    for (; j + 4 <= w; j += 4) {  // two complex entries
      const __m256d va = _mm256_loadu_pd(row + j);
      const __m256d vx = _mm256_loadu_pd(xd + j);
      re0 = _mm256_fmadd_pd(dup_re(va), vx, re0);
      im0 = _mm256_fmadd_pd(dup_im(va), swap_ri(vx), im0);
    }
    const __m256d s = _mm256_addsub_pd(_mm256_add_pd(re0, re1),
                                       _mm256_add_pd(im0, im1));
    __m128d c =
        _mm_add_pd(_mm256_castpd256_pd128(s), _mm256_extractf128_pd(s, 1));
    if (j < w) {  // odd trailing entry
      const double ar = row[j], ai = row[j + 1];
      const double xr = xd[j], xi = xd[j + 1];
      c = _mm_add_pd(c, _mm_set_pd(ar * xi + ai * xr, ar * xr - ai * xi));
    }
    _mm_storeu_pd(yd + 2 * i, c);
  }
}

double norm2_avx2(const Cplx* x, std::size_t n) {
  const double* d = reinterpret_cast<const double*>(x);
  const std::size_t w = 2 * n;
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= w; j += 8) {
    const __m256d v0 = _mm256_loadu_pd(d + j);
    const __m256d v1 = _mm256_loadu_pd(d + j + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  for (; j + 4 <= w; j += 4) {
    const __m256d v = _mm256_loadu_pd(d + j);
    acc0 = _mm256_fmadd_pd(v, v, acc0);
  }
  const __m256d s = _mm256_add_pd(acc0, acc1);
  __m128d c =
      _mm_add_pd(_mm256_castpd256_pd128(s), _mm256_extractf128_pd(s, 1));
  c = _mm_add_sd(c, _mm_unpackhi_pd(c, c));
  double out = _mm_cvtsd_f64(c);
  for (; j < w; ++j) out += d[j] * d[j];
  return out;
}

void axpy_avx2(Cplx sc, const Cplx* x, Cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d sre = _mm256_set1_pd(sc.real());
  const __m256d sim = _mm256_set1_pd(sc.imag());
  const std::size_t w = 2 * n;
  std::size_t j = 0;
  for (; j + 4 <= w; j += 4) {
    const __m256d vx = _mm256_loadu_pd(xd + j);
    const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(sre, vx),
                                          _mm256_mul_pd(sim, swap_ri(vx)));
    _mm256_storeu_pd(yd + j, _mm256_add_pd(_mm256_loadu_pd(yd + j), prod));
  }
  for (; j + 2 <= w; j += 2) {
    const double xr = xd[j], xi = xd[j + 1];
    yd[j] += sc.real() * xr - sc.imag() * xi;
    yd[j + 1] += sc.real() * xi + sc.imag() * xr;
  }
}

void scale_avx2(Cplx sc, Cplx* x, std::size_t n) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d sre = _mm256_set1_pd(sc.real());
  const __m256d sim = _mm256_set1_pd(sc.imag());
  const std::size_t w = 2 * n;
  std::size_t j = 0;
  for (; j + 4 <= w; j += 4) {
    const __m256d vx = _mm256_loadu_pd(xd + j);
    _mm256_storeu_pd(xd + j,
                     _mm256_addsub_pd(_mm256_mul_pd(sre, vx),
                                      _mm256_mul_pd(sim, swap_ri(vx))));
  }
  for (; j + 2 <= w; j += 2) {
    const double xr = xd[j], xi = xd[j + 1];
    xd[j] = sc.real() * xr - sc.imag() * xi;
    xd[j + 1] = sc.real() * xi + sc.imag() * xr;
  }
}

}  // namespace cavtel::kernels::detail

#endif  // CAVTEL_HAVE_AVX2
