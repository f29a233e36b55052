// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_BESSEL_HPP
#define HDGMG_BESSEL_HPP

namespace hdgmg
{

// Bessel functions of the first kind, orders 0 and 1, accurate to about
// 1e-12 absolute error on [0, 1000] (power series below the crossover,
// Hankel asymptotic expansion above).
double bessel_j0(double x);
double bessel_j1(double x);
double bessel_j(int nu, double x);

}  // namespace hdgmg

#endif  // HDGMG_BESSEL_HPP
