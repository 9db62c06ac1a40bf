#pragma once

#include <cmath>
#include <utility>

#include "ntz/error.hpp"

namespace ntz {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Bracketed root of a continuous function on [lo, hi]. Interleaves bisection
/// with Illinois-modified secant (regula falsi) steps so that both ends of the
/// bracket move; stops once the bracket is narrower than abs_tol.
template <class F>
RootResult find_root(F&& fn, double lo, double hi, double abs_tol = 1e-12, int max_iter = 400) {
  double flo = fn(lo);
  double fhi = fn(hi);
  if (flo == 0.0) return {lo, flo, 0};
  if (fhi == 0.0) return {hi, fhi, 0};
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "find_root: interval does not bracket a root");
  }
  // Weighted copies used by the Illinois rule; flo/fhi keep the true signs.
  double wlo = flo;
  double whi = fhi;
  int side = 0;
  int it = 0;
  for (; it < max_iter && hi - lo > abs_tol; ++it) {
    double x;
    if (it % 3 == 2) {
      x = 0.5 * (lo + hi);
    } else {
      x = hi - whi * (hi - lo) / (whi - wlo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    }
    const double fx = fn(x);
    if (fx == 0.0) return {x, fx, it + 1};
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = wlo = fx;
      if (side == -1) whi *= 0.5;
      side = -1;
    } else {
      hi = x;
      fhi = whi = fx;
      if (side == 1) wlo *= 0.5;
      side = 1;
    }
  }
  return std::abs(flo) < std::abs(fhi) ? RootResult{lo, flo, it} : RootResult{hi, fhi, it};
}

/// Grows hi geometrically from a starting guess until pred(hi) holds.
template <class Pred>
double expand_bracket(Pred&& pred, double start, double limit = 1e12) {
  double hi = start;
  while (!pred(hi)) {
    hi *= 2.0;
    if (hi > limit) throw Error(ErrorCode::InvalidArgument, "expand_bracket: no bracket below limit");
  }
  return hi;
}

}  // namespace ntz
