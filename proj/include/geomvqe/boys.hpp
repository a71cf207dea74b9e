#pragma once

#include <cmath>
#include <span>

#include "units.hpp"

namespace geomvqe {

/// Fill out[m] = F_m(t) for m = 0..out.size()-1, where F_m(t) = int_0^1 u^{2m} exp(-t u^2) du.
///
/// t < 12: Kummer series for the highest order followed by downward recursion.
/// t >= 12: closed form for F_0 (erf(sqrt t) is 1 to machine precision there) and upward
/// recursion, which is stable once exp(-t) is negligible against (2m+1) F_m.
inline void boys(double t, std::span<double> out) {
  if (out.empty()) return;
  const int mmax = static_cast<int>(out.size()) - 1;
  const double et = std::exp(-t);
  if (t < 12.0) {
    // F_m(t) = exp(-t) * sum_k (2t)^k / ((2m+1)(2m+3)...(2m+2k+1))
    double term = 1.0 / (2 * mmax + 1);
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= 2.0 * t / (2 * mmax + 2 * k + 1);
      sum += term;
      if (term < 1e-16 * sum) break;
    }
    out[mmax] = et * sum;
    for (int m = mmax - 1; m >= 0; --m) out[m] = (2.0 * t * out[m + 1] + et) / (2 * m + 1);
  } else {
    out[0] = 0.5 * std::sqrt(kPi / t) * std::erf(std::sqrt(t));
    for (int m = 0; m < mmax; ++m) out[m + 1] = ((2 * m + 1) * out[m] - et) / (2.0 * t);
  }
}

inline double boys(int m, double t) {
  double buf[32];
  boys(t, std::span<double>(buf, static_cast<std::size_t>(m) + 1));
  return buf[m];
}

}  // namespace geomvqe
