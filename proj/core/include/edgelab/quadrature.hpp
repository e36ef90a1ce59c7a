#pragma once

#include <cmath>
#include <span>
#include <string>

#include "edgelab/error.hpp"

namespace edgelab::quad {

/// 20-point Gauss-Legendre nodes and weights on [-1, 1].
std::span<const double> gl_nodes();
std::span<const double> gl_weights();

struct Result {
  double value = 0.0;
  /// |last - previous| at termination.
  double error = 0.0;
  long panels = 0;
};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const auto x = gl_nodes();
  const auto w = gl_weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

template <class F>
double composite(F&& f, double a, double b, long panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double s = 0.0;
  for (long i = 0; i < panels; ++i) s += gauss_legendre(f, a + i * h, i + 1 == panels ? b : a + (i + 1) * h);
  return s;
}

/// Composite Gauss-Legendre with panel doubling until successive estimates
/// differ by less than `tol`. Throws NumericalError past `max_panels`.
template <class F>
Result refine(F&& f, double a, double b, double tol, long initial_panels = 8,
              long max_panels = 1L << 20) {
  if (a == b) return {0.0, 0.0, 0};
  long panels = std::max(1L, initial_panels);
  double prev = composite(f, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    const double cur = composite(f, a, b, panels);
    const double diff = std::abs(cur - prev);
    if (diff < tol) return {cur, diff, panels};
    prev = cur;
  }
  throw NumericalError("quadrature did not converge below " + std::to_string(tol) + " on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
}

namespace detail {
template <class F>
double bisect(F& f, double a, double b, double whole, double tol, int depth, long& panels) {
  const double m = 0.5 * (a + b);
  const double left = gauss_legendre(f, a, m), right = gauss_legendre(f, m, b);
  panels += 2;
  const double diff = std::abs(left + right - whole);
  if (diff < tol || depth <= 0) {
    if (diff >= tol && depth <= 0)
      throw NumericalError("adaptive quadrature exhausted its depth on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]");
    return left + right;
  }
  return bisect(f, a, m, left, 0.5 * tol, depth - 1, panels) +
         bisect(f, m, b, right, 0.5 * tol, depth - 1, panels);
}
}  // namespace detail

/// Locally adaptive bisection; `tol` is an absolute budget split between halves.
template <class F>
Result adaptive(F&& f, double a, double b, double tol, int max_depth = 40) {
  if (a == b) return {0.0, 0.0, 0};
  long panels = 1;
  const double whole = gauss_legendre(f, a, b);
  const double value = detail::bisect(f, a, b, whole, tol, max_depth, panels);
  return {value, std::abs(value - whole), panels};
}

}  // namespace edgelab::quad
