// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "hdgmg/kernels.hpp"
#include "hdgmg/types.hpp"

using namespace hdgmg;

namespace
{

std::mt19937 rng(20240917);

VecZ random_vec(std::size_t n)
{
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  VecZ v(n);
  for (cplx &z : v)
    z = cplx(d(rng), d(rng));
  return v;
}

CsrZ random_csr(int64 rows, int64 cols, int per_row)
{
  TripletBuffer<cplx> buf(rows, cols);
  std::uniform_int_distribution<int64> ci(0, cols - 1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int64 r = 0; r < rows; r++)
    for (int k = 0; k < per_row; k++)
      buf.add(r, ci(rng), cplx(d(rng), d(rng)));
  return buf.compress();
}

double max_abs_diff(const VecZ &a, const VecZ &b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); i++)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("triplet buffer sums duplicates and sorts columns")
{
  TripletBuffer<cplx> buf(3, 4);
  buf.add(1, 3, cplx(1.0, 0.0));
  buf.add(1, 0, cplx(2.0, 1.0));
  buf.add(1, 3, cplx(0.5, -2.0));
  buf.add(0, 2, cplx(1.0, 1.0));
  CsrZ A = buf.compress();
  CHECK(A.nnz() == 3);
  CHECK(A.rowptr[1] - A.rowptr[0] == 1);
  CHECK(A.rowptr[2] - A.rowptr[1] == 2);
  CHECK(A.rowptr[3] - A.rowptr[2] == 0);
  // Row 1 sorted by column: 0 then 3, with the duplicate summed.
  CHECK(A.col[A.rowptr[1]] == 0);
  CHECK(A.col[A.rowptr[1] + 1] == 3);
  CHECK(A.val[A.rowptr[1] + 1] == cplx(1.5, -2.0));
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r] + 1; k < A.rowptr[r + 1]; k++)
      CHECK(A.col[k - 1] < A.col[k]);
}

TEST_CASE("scalar kernels match hand-computed results")
{
  const kernels::Dispatch &ref = kernels::scalar_table();

  VecZ x = {cplx(1, 2), cplx(-3, 0.5)};
  VecZ y = {cplx(0, 1), cplx(2, -1)};
  const cplx a(0.5, -1.5);

  VecZ y2 = y;
  ref.zaxpy(2, a, x.data(), y2.data());
  for (int i = 0; i < 2; i++)
    CHECK(std::abs(y2[i] - (y[i] + a * x[i])) < 1e-15);

  VecZ x2 = x;
  ref.zscal(2, a, x2.data());
  for (int i = 0; i < 2; i++)
    CHECK(std::abs(x2[i] - a * x[i]) < 1e-15);

  const cplx dot = ref.zdotc(2, x.data(), y.data());
  const cplx expect = std::conj(x[0]) * y[0] + std::conj(x[1]) * y[1];
  CHECK(std::abs(dot - expect) < 1e-15);

  CHECK(ref.znrm2sq(2, x.data()) ==
        doctest::Approx(std::norm(x[0]) + std::norm(x[1])).epsilon(1e-15));
}

TEST_CASE("zdotc is conjugate-symmetric and positive on the diagonal")
{
  VecZ x = random_vec(57), y = random_vec(57);
  const cplx xy = kernels::zdotc(57, x.data(), y.data());
  const cplx yx = kernels::zdotc(57, y.data(), x.data());
  CHECK(std::abs(xy - std::conj(yx)) < 1e-13);
  const cplx xx = kernels::zdotc(57, x.data(), x.data());
  CHECK(xx.real() > 0.0);
  CHECK(std::abs(xx.imag()) < 1e-13);
  CHECK(xx.real() == doctest::Approx(kernels::znrm2sq(57, x.data())).epsilon(1e-13));
}

TEST_CASE("spmv matches a dense reference multiply")
{
  CsrZ A = random_csr(23, 17, 4);
  VecZ x = random_vec(17);
  VecZ y(23);
  kernels::spmv_z(A, x.data(), y.data());

  VecZ ref(23, cplx(0, 0));
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      ref[static_cast<std::size_t>(r)] += A.val[k] * x[static_cast<std::size_t>(A.col[k])];
  CHECK(max_abs_diff(y, ref) < 1e-13);
}

TEST_CASE("avx2 backend agrees with the scalar reference")
{
  if (!kernels::avx2_available())
  {
    MESSAGE("AVX2 not available on this host; dispatch test skipped");
    return;
  }
  const kernels::Dispatch &sc = kernels::scalar_table();
  const kernels::Dispatch &vec = kernels::avx2_table();
  REQUIRE(vec.zaxpy != nullptr);

  // Sizes straddling the vector width, including remainders.
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 8u, 33u, 1000u, 1021u})
  {
    VecZ x = random_vec(n), y = random_vec(n);
    const cplx a(0.7, -0.3);

    VecZ y1 = y, y2 = y;
    sc.zaxpy(n, a, x.data(), y1.data());
    vec.zaxpy(n, a, x.data(), y2.data());
    CHECK(max_abs_diff(y1, y2) < 1e-13);

    VecZ x1 = x, x2 = x;
    sc.zscal(n, a, x1.data());
    vec.zscal(n, a, x2.data());
    CHECK(max_abs_diff(x1, x2) < 1e-13);

    CHECK(std::abs(sc.zdotc(n, x.data(), y.data()) - vec.zdotc(n, x.data(), y.data())) <
          1e-12 * std::sqrt(static_cast<double>(n)));
    CHECK(sc.znrm2sq(n, x.data()) ==
          doctest::Approx(vec.znrm2sq(n, x.data())).epsilon(1e-12));
  }

  CsrZ A = random_csr(64, 50, 6);
  VecZ x = random_vec(50), y1(64), y2(64);
  sc.spmv_z(A, x.data(), y1.data());
  vec.spmv_z(A, x.data(), y2.data());
  CHECK(max_abs_diff(y1, y2) < 1e-13);
}

TEST_CASE("active backend is one of the known tables")
{
  const std::string &name = kernels::backend_name();
  CHECK((name == "scalar" || name == "avx2"));
  // The active table must behave like the scalar reference.
  VecZ x = random_vec(40), y = random_vec(40);
  VecZ y1 = y, y2 = y;
  kernels::scalar_table().zaxpy(40, cplx(1.5, 0.5), x.data(), y1.data());
  kernels::active().zaxpy(40, cplx(1.5, 0.5), x.data(), y2.data());
  CHECK(max_abs_diff(y1, y2) < 1e-13);
}
