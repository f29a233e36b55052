// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/kernels.hpp"

#include <cstdlib>

namespace hdgmg::kernels
{

namespace
{

void zaxpy_scalar(std::size_t n, cplx a, const cplx *x, cplx *y)
{
  for (std::size_t i = 0; i < n; i++)
    y[i] += a * x[i];
}

void zscal_scalar(std::size_t n, cplx a, cplx *x)
{
  for (std::size_t i = 0; i < n; i++)
    x[i] *= a;
}

cplx zdotc_scalar(std::size_t n, const cplx *x, const cplx *y)
{
  cplx s = 0.0;
  for (std::size_t i = 0; i < n; i++)
    s += std::conj(x[i]) * y[i];
  return s;
}

double znrm2sq_scalar(std::size_t n, const cplx *x)
{
  double s = 0.0;
  for (std::size_t i = 0; i < n; i++)
    s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
  return s;
}

void spmv_z_scalar(const CsrZ &A, const cplx *x, cplx *y)
{
  for (std::int64_t r = 0; r < A.n_rows; r++)
  {
    cplx s = 0.0;
    for (std::int64_t k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      s += A.val[k] * x[A.col[k]];
    y[r] = s;
  }
}

const Dispatch scalar_dispatch = {zaxpy_scalar, zscal_scalar, zdotc_scalar, znrm2sq_scalar,
                                  spmv_z_scalar};

std::string g_backend;

const Dispatch &select()
{
  const char *env = std::getenv("HDGMG_KERNELS");
  const std::string want = env ? env : "";
  if (want == "scalar")
  {
    g_backend = "scalar";
    return scalar_table();
  }
  if ((want.empty() || want == "avx2") && avx2_available() && avx2_table().zaxpy)
  {
    g_backend = "avx2";
    return avx2_table();
  }
  g_backend = "scalar";
  return scalar_table();
}

}  // namespace

const Dispatch &scalar_table() { return scalar_dispatch; }

const Dispatch &active()
{
  static const Dispatch &d = select();
  return d;
}

const std::string &backend_name()
{
  active();
  return g_backend;
}

bool avx2_available()
{
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace hdgmg::kernels
