// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace hdgmg
{

namespace
{

constexpr long double kPiL = 3.141592653589793238462643383279502884L;
// Crossover between the power series and the asymptotic expansion, placed
// where both deliver ~1e-13: the series loses digits to cancellation as z
// grows, the asymptotic error shrinks like exp(-2z).
constexpr double kCross = 14.0;

long double series_j(int nu, long double z)
{
  const long double q = z / 2.0L, q2 = q * q;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 400; k++)
  {
    term *= -q2 / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-24L * std::abs(sum) + 1e-30L)
      break;
  }
  return nu == 0 ? sum : q * sum;
}

long double hankel_j(int nu, long double z)
{
  const long double mu = 4.0L * nu * nu;
  // term_k = a_k / z^k with a_k the standard Hankel coefficients; P sums the
  // even terms with alternating sign, Q the odd ones.
  long double term = 1.0L, P = 1.0L, Q = 0.0L, prev = 1e30L;
  for (int k = 1; k < 60; k++)
  {
    long double odd = 2.0L * k - 1.0L;
    term *= (mu - odd * odd) / (8.0L * k * z);
    if (std::abs(term) > prev)
      break;  // asymptotic series started diverging
    prev = std::abs(term);
    int m = k / 2;
    long double signed_term = (m % 2 == 0 ? term : -term);
    if (k % 2 == 0)
      P += signed_term;
    else
      Q += signed_term;
    if (std::abs(term) < 1e-20L)
      break;
  }
  long double chi = z - (0.5L * nu + 0.25L) * kPiL;
  return std::sqrt(2.0L / (kPiL * z)) * (P * std::cos(chi) - Q * std::sin(chi));
}

}  // namespace

double bessel_j(int nu, double x)
{
  if (nu != 0 && nu != 1)
    throw std::invalid_argument("bessel_j: only orders 0 and 1 are provided");
  double sign = 1.0;
  if (x < 0.0)
  {
    x = -x;
    if (nu == 1)
      sign = -1.0;
  }
  long double z = x;
  long double v = x < kCross ? series_j(nu, z) : hankel_j(nu, z);
  return sign * static_cast<double>(v);
}

double bessel_j0(double x)
{
  return bessel_j(0, x);
}

double bessel_j1(double x)
{
  return bessel_j(1, x);
}

}  // namespace hdgmg
