// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace hdgmg
{

using cplx = std::complex<double>;
using int32 = std::int32_t;
using int64 = std::int64_t;

struct Vec2
{
  double x = 0.0, y = 0.0;

  Vec2 operator+(const Vec2 &o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2 &o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2 &o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

// Compressed sparse row matrix. Rows are stored in ascending column order so
// that Gauss-Seidel sweeps and diagonal extraction are well defined.
template <typename Scalar>
struct Csr
{
  std::int64_t n_rows = 0;
  std::int64_t n_cols = 0;
  std::vector<std::int64_t> rowptr;  // size n_rows + 1
  std::vector<std::int32_t> col;
  std::vector<Scalar> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }
};

using CsrZ = Csr<cplx>;
using CsrD = Csr<double>;

using VecZ = std::vector<cplx>;
using VecD = std::vector<double>;

// Triplet accumulator -> CSR with duplicate summation.
template <typename Scalar>
class TripletBuffer
{
public:
  TripletBuffer(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols) {}

  void add(std::int64_t r, std::int64_t c, Scalar v)
  {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    entries_.push_back({r, c, v});
  }

  void reserve(std::size_t n) { entries_.reserve(n); }

  Csr<Scalar> compress() const;

private:
  struct Entry
  {
    std::int64_t r;
    std::int64_t c;
    Scalar v;
  };
  std::int64_t rows_, cols_;
  std::vector<Entry> entries_;
};

template <typename Scalar>
Csr<Scalar> TripletBuffer<Scalar>::compress() const
{
  Csr<Scalar> A;
  A.n_rows = rows_;
  A.n_cols = cols_;
  A.rowptr.assign(rows_ + 1, 0);
  for (const Entry &e : entries_)
    A.rowptr[e.r + 1]++;
  for (std::int64_t r = 0; r < rows_; r++)
    A.rowptr[r + 1] += A.rowptr[r];
  // Bucket by row, then sort each row by column and merge duplicates.
  std::vector<std::pair<std::int32_t, Scalar>> buf(entries_.size());
  {
    std::vector<std::int64_t> cursor(A.rowptr.begin(), A.rowptr.end() - 1);
    for (const Entry &e : entries_)
      buf[cursor[e.r]++] = {static_cast<std::int32_t>(e.c), e.v};
  }
  A.col.reserve(entries_.size());
  A.val.reserve(entries_.size());
  std::vector<std::int64_t> newptr(rows_ + 1, 0);
  for (std::int64_t r = 0; r < rows_; r++)
  {
    auto beg = buf.begin() + A.rowptr[r], end = buf.begin() + A.rowptr[r + 1];
    std::sort(beg, end, [](const auto &a, const auto &b) { return a.first < b.first; });
    for (auto it = beg; it != end;)
    {
      Scalar s = it->second;
      std::int32_t c = it->first;
      for (++it; it != end && it->first == c; ++it)
        s += it->second;
      A.col.push_back(c);
      A.val.push_back(s);
    }
    newptr[r + 1] = static_cast<std::int64_t>(A.col.size());
  }
  A.rowptr = std::move(newptr);
  return A;
}

}  // namespace hdgmg
