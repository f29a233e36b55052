// SPDX-License-Identifier: Apache-2.0

// AVX2+FMA variants of the complex vector kernels. Two interleaved complex
// doubles per 256-bit lane: [re0 im0 re1 im1]. Only reached through the
// runtime dispatch after a cpuid check, so compiling this TU with -mavx2 is
// safe on any host.

#include "hdgmg/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace hdgmg::kernels
{

namespace
{

// a*b for packed complex pairs.
inline __m256d cmul(__m256d a, __m256d b)
{
  __m256d ar = _mm256_movedup_pd(a);          // [ar0 ar0 ar1 ar1]
  __m256d ai = _mm256_permute_pd(a, 0xF);     // [ai0 ai0 ai1 ai1]
  __m256d bs = _mm256_permute_pd(b, 0x5);     // [bi0 br0 bi1 br1]
  return _mm256_fmaddsub_pd(ar, b, _mm256_mul_pd(ai, bs));
}

// conj(a)*b for packed complex pairs.
inline __m256d cmulc(__m256d a, __m256d b)
{
  __m256d ar = _mm256_movedup_pd(a);
  __m256d ai = _mm256_permute_pd(a, 0xF);
  __m256d bs = _mm256_permute_pd(b, 0x5);
  return _mm256_fmsubadd_pd(ar, b, _mm256_mul_pd(ai, bs));
}

inline cplx reduce2(__m256d acc)
{
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  return {t[0] + t[2], t[1] + t[3]};
}

void zaxpy_avx2(std::size_t n, cplx a, const cplx *x, cplx *y)
{
  const double *xp = reinterpret_cast<const double *>(x);
  double *yp = reinterpret_cast<double *>(y);
  __m256d ar = _mm256_set1_pd(a.real());
  __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
  {
    __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    __m256d xs = _mm256_permute_pd(xv, 0x5);
    __m256d prod = _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs));
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(_mm256_loadu_pd(yp + 2 * i), prod));
  }
  for (; i < n; i++)
    y[i] += a * x[i];
}

void zscal_avx2(std::size_t n, cplx a, cplx *x)
{
  double *xp = reinterpret_cast<double *>(x);
  __m256d ar = _mm256_set1_pd(a.real());
  __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
  {
    __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    __m256d xs = _mm256_permute_pd(xv, 0x5);
    _mm256_storeu_pd(xp + 2 * i, _mm256_fmaddsub_pd(ar, xv, _mm256_mul_pd(ai, xs)));
  }
  for (; i < n; i++)
    x[i] *= a;
}

cplx zdotc_avx2(std::size_t n, const cplx *x, const cplx *y)
{
  const double *xp = reinterpret_cast<const double *>(x);
  const double *yp = reinterpret_cast<const double *>(y);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = _mm256_add_pd(acc, cmulc(_mm256_loadu_pd(xp + 2 * i), _mm256_loadu_pd(yp + 2 * i)));
  cplx s = reduce2(acc);
  for (; i < n; i++)
    s += std::conj(x[i]) * y[i];
  return s;
}

double znrm2sq_avx2(std::size_t n, const cplx *x)
{
  const double *xp = reinterpret_cast<const double *>(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
  {
    __m256d xv = _mm256_loadu_pd(xp + 2 * i);
    acc = _mm256_fmadd_pd(xv, xv, acc);
  }
  alignas(32) double t[4];
  _mm256_store_pd(t, acc);
  double s = t[0] + t[1] + t[2] + t[3];
  for (; i < n; i++)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void spmv_z_avx2(const CsrZ &A, const cplx *x, cplx *y)
{
  const double *vp = reinterpret_cast<const double *>(A.val.data());
  for (std::int64_t r = 0; r < A.n_rows; r++)
  {
    std::int64_t k = A.rowptr[r];
    const std::int64_t end = A.rowptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 2 <= end; k += 2)
    {
      __m256d av = _mm256_loadu_pd(vp + 2 * k);
      __m128d x0 = _mm_loadu_pd(reinterpret_cast<const double *>(x + A.col[k]));
      __m128d x1 = _mm_loadu_pd(reinterpret_cast<const double *>(x + A.col[k + 1]));
      __m256d xv = _mm256_insertf128_pd(_mm256_castpd128_pd256(x0), x1, 1);
      acc = _mm256_add_pd(acc, cmul(av, xv));
    }
    cplx s = reduce2(acc);
    for (; k < end; k++)
      s += A.val[k] * x[A.col[k]];
    y[r] = s;
  }
}

const Dispatch avx2_dispatch = {zaxpy_avx2, zscal_avx2, zdotc_avx2, znrm2sq_avx2, spmv_z_avx2};

}  // namespace

const Dispatch &avx2_table() { return avx2_dispatch; }

}  // namespace hdgmg::kernels

#else

namespace hdgmg::kernels
{

namespace
{
const Dispatch null_dispatch = {nullptr, nullptr, nullptr, nullptr, nullptr};
}

const Dispatch &avx2_table() { return null_dispatch; }

}  // namespace hdgmg::kernels

#endif
