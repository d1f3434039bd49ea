#include <algorithm>
#include <cmath>
#include <numbers>

#include "igp/equilibria.hpp"

namespace igp {

namespace {

using cplx = std::complex<double>;

template <class T>
T cubic(const std::array<double, 3>& c, T z) {
  return ((z + c[2]) * z + c[1]) * z + c[0];
}

template <class T>
T cubic_derivative(const std::array<double, 3>& c, T z) {
  return (3.0 * z + 2.0 * c[2]) * z + c[1];
}

double coeff_scale(const std::array<double, 3>& c) {
  return std::max({1.0, std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
}

bool acceptable(const std::array<double, 3>& c, cplx z) {
  const double mag = std::max(1.0, std::abs(z));
  return std::abs(cubic(c, z)) <= 1e-8 * coeff_scale(c) * mag * mag * mag;
}

template <class T>
T polish(const std::array<double, 3>& c, T z) {
  for (int it = 0; it < 4; ++it) {
    const T dp = cubic_derivative(c, z);
    if (dp == T(0)) break;
    const T next = z - cubic(c, z) / dp;
    if (!(std::abs(cubic(c, next)) < std::abs(cubic(c, z)))) break;
    z = next;
  }
  return z;
}

std::array<cplx, 2> quadratic(double b, double c) {
  // z^2 + b z + c
  const double disc = b * b - 4.0 * c;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? s : -s));
    if (q == 0.0) return {cplx(0.0), cplx(0.0)};
    return {cplx(q), cplx(c / q)};
  }
  const double re = -0.5 * b;
  const double im = 0.5 * std::sqrt(-disc);
  return {cplx(re, im), cplx(re, -im)};
}

double bisect_real_root(const std::array<double, 3>& c) {
  // Cauchy bound brackets every root.
  const double bound = 1.0 + std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
  double lo = -bound, hi = bound;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cubic(c, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Eigenvalues3 by_deflation(const std::array<double, 3>& c) {
  const double r = polish(c, bisect_real_root(c));
  // Synthetic division of the monic cubic by (z - r).
  const double b1 = c[2] + r;
  const double b0 = c[1] + r * b1;
  const auto q = quadratic(b1, b0);
  return {cplx(r), polish(c, q[0]), polish(c, q[1])};
}

}  // namespace

std::array<double, 3> characteristic_polynomial(const Mat3& a) {
  const double tr = a[0][0] + a[1][1] + a[2][2];
  const double minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                        a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  return {-det, minors, -tr};
}

Eigenvalues3 eigen3(const Mat3& a) {
  const auto c = characteristic_polynomial(a);
  const double shift = c[2] / 3.0;
  // Depressed cubic t^3 + p t + q with lambda = t - shift.
  const double p = c[1] - c[2] * c[2] / 3.0;
  const double q = 2.0 * c[2] * c[2] * c[2] / 27.0 - c[2] * c[1] / 3.0 + c[0];
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  Eigenvalues3 roots;
  if (p == 0.0 && q == 0.0) {
    roots = {cplx(-shift), cplx(-shift), cplx(-shift)};
  } else if (disc > 0.0) {
    const double big = std::cbrt(0.5 * std::abs(q) + std::sqrt(disc));
    const double a1 = q > 0.0 ? -big : big;
    const double b1 = a1 != 0.0 ? -p / (3.0 * a1) : 0.0;
    const double real = polish(c, a1 + b1 - shift);
    roots[0] = cplx(real);
    // Pair from deflation by the polished real root.
    const auto pair = quadratic(c[2] + real, c[1] + real * (c[2] + real));
    roots[1] = polish(c, pair[0]);
    roots[2] = polish(c, pair[1]);
  } else {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots[k] = cplx(polish(c, m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift));
    }
  }

  for (const auto& z : roots) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !acceptable(c, z)) return by_deflation(c);
  }
  return roots;
}

}  // namespace igp
