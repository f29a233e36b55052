// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "hdgmg/types.hpp"

#include <cstddef>
#include <string>

namespace hdgmg::kernels
{

// Dispatch table for the hot vector algebra. The scalar entries are the
// reference implementations; the AVX2 entries are bit-compatible up to
// floating point reassociation and are selected at runtime when the CPU
// supports AVX2+FMA. Set HDGMG_KERNELS=scalar|avx2 to force a backend.
struct Dispatch
{
  // y += a * x
  void (*zaxpy)(std::size_t n, cplx a, const cplx *x, cplx *y);
  // x *= a
  void (*zscal)(std::size_t n, cplx a, cplx *x);
  // conj(x) . y
  cplx (*zdotc)(std::size_t n, const cplx *x, const cplx *y);
  // sum |x_i|^2
  double (*znrm2sq)(std::size_t n, const cplx *x);
  // y = A x (CSR)
  void (*spmv_z)(const CsrZ &A, const cplx *x, cplx *y);
};

// Active backend (initialized on first use).
const Dispatch &active();
const std::string &backend_name();

// Reference (scalar) and AVX2 tables, exposed for equivalence tests.
const Dispatch &scalar_table();
const Dispatch &avx2_table();   // entries null if unsupported at build time
bool avx2_available();          // runtime cpuid check

// Convenience wrappers through the active table.
inline void zaxpy(std::size_t n, cplx a, const cplx *x, cplx *y) { active().zaxpy(n, a, x, y); }
inline void zscal(std::size_t n, cplx a, cplx *x) { active().zscal(n, a, x); }
inline cplx zdotc(std::size_t n, const cplx *x, const cplx *y) { return active().zdotc(n, x, y); }
inline double znrm2sq(std::size_t n, const cplx *x) { return active().znrm2sq(n, x); }
inline void spmv_z(const CsrZ &A, const cplx *x, cplx *y) { active().spmv_z(A, x, y); }

}  // namespace hdgmg::kernels
