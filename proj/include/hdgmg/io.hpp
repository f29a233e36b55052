// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_IO_HPP
#define HDGMG_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hdgmg/types.hpp"

namespace hdgmg
{
namespace io
{

// Deterministic float formatting used for all file output.
std::string fmt_e(double v, int digits = 12);  // scientific, e.g. 1.234567890123e-05
std::string fmt_f(double v, int digits = 3);   // fixed, e.g. 0.123

// RFC-4180 field escaping: quote when the field contains comma, quote, or
// newline; double embedded quotes.
std::string csv_escape(const std::string &field);

struct SummaryRow
{
  int level = 0;
  int64 dofs = 0;
  int iter = 0;
  double seconds = 0.0;
};

// "level,dofs,iter,seconds" table.  With mask_seconds the timing column is
// written as 0.000 so that repeated runs produce bit-identical files.
std::string emit_table(const std::vector<SummaryRow> &rows, bool mask_seconds);

void write_file(const std::string &path, const std::string &content);

// "step,relres" with one row per recorded residual (step 0 = initial).
std::string residuals_csv(const std::vector<double> &relres);

// Minimal deterministic semi-log-y SVG line plot of a positive sequence.
std::string svg_semilogy(const std::vector<double> &values, const std::string &title);

// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a(const std::string &data);

// MatrixMarket coordinate output (1-based indices).
std::string matrix_market(const CsrZ &A);
std::string matrix_market(const CsrD &A);

// "index,re,im" CSV for a complex vector.
std::string vector_csv(const VecZ &v);

}  // namespace io
}  // namespace hdgmg

#endif  // HDGMG_IO_HPP
