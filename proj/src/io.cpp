// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hdgmg
{
namespace io
{

std::string fmt_e(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*e", digits, v);
  return buf;
}

std::string fmt_f(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string csv_escape(const std::string &field)
{
  bool need = false;
  for (char c : field)
    if (c == ',' || c == '"' || c == '\n' || c == '\r')
    {
      need = true;
      break;
    }
  if (!need)
    return field;
  std::string out = "\"";
  for (char c : field)
  {
    if (c == '"')
      out += "\"\"";
    else
      out += c;
  }
  out += '"';
  return out;
}

std::string emit_table(const std::vector<SummaryRow> &rows, bool mask_seconds)
{
  if (rows.empty())
    throw std::invalid_argument("emit_table: no rows");
  std::string out = "level,dofs,iter,seconds\n";
  for (const SummaryRow &r : rows)
  {
    out += std::to_string(r.level);
    out += ',';
    out += std::to_string(r.dofs);
    out += ',';
    out += std::to_string(r.iter);
    out += ',';
    out += fmt_f(mask_seconds ? 0.0 : r.seconds, 3);
    out += '\n';
  }
  return out;
}

void write_file(const std::string &path, const std::string &content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

std::string residuals_csv(const std::vector<double> &relres)
{
  std::string out = "step,relres\n";
  for (size_t i = 0; i < relres.size(); i++)
  {
    out += std::to_string(i);
    out += ',';
    out += fmt_e(relres[i]);
    out += '\n';
  }
  return out;
}

std::string svg_semilogy(const std::vector<double> &values, const std::string &title)
{
  const int W = 640, H = 420;
  const int ml = 70, mr = 20, mt = 40, mb = 40;  // margins
  const double pw = W - ml - mr, ph = H - mt - mb;

  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (double v : values)
  {
    if (!(v > 0.0) || !std::isfinite(v))
      continue;
    double lg = std::log10(v);
    if (first || lg < lo)
      lo = lg;
    if (first || lg > hi)
      hi = lg;
    first = false;
  }
  if (first)
  {
    lo = -1.0;
    hi = 1.0;
  }
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi - lo < 1.0)
    hi = lo + 1.0;

  auto px = [&](size_t i) {
    double n = values.size() > 1 ? double(values.size() - 1) : 1.0;
    return ml + pw * (double(i) / n);
  };
  auto py = [&](double v) {
    double lg = (v > 0.0 && std::isfinite(v)) ? std::log10(v) : lo;
    if (lg < lo)
      lg = lo;
    if (lg > hi)
      lg = hi;
    return mt + ph * (hi - lg) / (hi - lo);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
       "\" height=\"" + std::to_string(H) + "\" viewBox=\"0 0 " + std::to_string(W) + " " +
       std::to_string(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(W / 2) +
       "\" y=\"24\" font-family=\"monospace\" font-size=\"14\" text-anchor=\"middle\">" + title +
       "</text>\n";
  // Axes box.
  s += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
       fmt_f(pw, 1) + "\" height=\"" + fmt_f(ph, 1) +
       "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  // Horizontal gridlines at integer decades.
  for (double d = lo; d <= hi + 0.5; d += 1.0)
  {
    double y = mt + ph * (hi - d) / (hi - lo);
    s += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + fmt_f(y, 1) + "\" x2=\"" +
         std::to_string(W - mr) + "\" y2=\"" + fmt_f(y, 1) +
         "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    s += "<text x=\"" + std::to_string(ml - 6) + "\" y=\"" + fmt_f(y + 4, 1) +
         "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">1e" +
         std::to_string(int(d)) + "</text>\n";
  }
  // Data polyline.
  if (!values.empty())
  {
    s += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < values.size(); i++)
    {
      if (i)
        s += ' ';
      s += fmt_f(px(i), 2) + "," + fmt_f(py(values[i]), 2);
    }
    s += "\"/>\n";
  }
  s += "<text x=\"" + std::to_string(W / 2) + "\" y=\"" + std::to_string(H - 10) +
       "\" font-family=\"monospace\" font-size=\"12\" text-anchor=\"middle\">iteration</text>\n";
  s += "</svg>\n";
  return s;
}

std::uint64_t fnv1a(const std::string &data)
{
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data)
  {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string matrix_market(const CsrZ &A)
{
  std::string s = "%%MatrixMarket matrix coordinate complex general\n";
  s += std::to_string(A.n_rows) + " " + std::to_string(A.n_cols) + " " +
       std::to_string(A.val.size()) + "\n";
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      s += std::to_string(r + 1) + " " + std::to_string(A.col[k] + 1) + " " +
           fmt_e(A.val[k].real()) + " " + fmt_e(A.val[k].imag()) + "\n";
  return s;
}

std::string matrix_market(const CsrD &A)
{
  std::string s = "%%MatrixMarket matrix coordinate real general\n";
  s += std::to_string(A.n_rows) + " " + std::to_string(A.n_cols) + " " +
       std::to_string(A.val.size()) + "\n";
  for (int64 r = 0; r < A.n_rows; r++)
    for (int64 k = A.rowptr[r]; k < A.rowptr[r + 1]; k++)
      s += std::to_string(r + 1) + " " + std::to_string(A.col[k] + 1) + " " +
           fmt_e(A.val[k]) + "\n";
  return s;
}

std::string vector_csv(const VecZ &v)
{
  std::string s = "index,re,im\n";
  for (size_t i = 0; i < v.size(); i++)
    s += std::to_string(i) + "," + fmt_e(v[i].real()) + "," + fmt_e(v[i].imag()) + "\n";
  return s;
}

}  // namespace io
}  // namespace hdgmg
