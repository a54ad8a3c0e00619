#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracvolt/errors.hpp"

namespace fracvolt {

/// Neumaier's variant of Kahan summation.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  NeumaierSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

/// Ten-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_panel(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

/// Composite ten-point Gauss-Legendre with `panels` equal panels.
template <class F>
double gauss_composite(F&& f, double a, double b, int panels) {
  NeumaierSum acc;
  const double w = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * w;
    const double hi = (i + 1 == panels) ? b : lo + w;
    acc += gauss_panel(f, lo, hi);
  }
  return acc.value();
}

/// Adaptive Gauss-Kronrod (7/15). Throws NumericalError when the error
/// estimate stays above `tol` relative to the result.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, unsigned max_depth = 30) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &err);
  if (!std::isfinite(v) || err > 100.0 * tol * std::max(1.0, std::abs(v))) {
    throw NumericalError("adaptive quadrature did not converge", v, {{static_cast<int>(max_depth), v}});
  }
  return v;
}

struct DyadicOptions {
  int min_levels = 4;
  int max_levels = 60;
  double rel_tol = 1e-12;
  /// Panel contribution ratio at or above which a level counts as non-shrinking.
  double stall_ratio = 0.97;
  /// Consecutive non-shrinking levels that declare divergence.
  int stall_count = 2;
  bool extrapolate_tail = true;
  /// Angular frequency of an oscillatory factor; panels are subdivided so that
  /// each ten-point rule sees at most about half a period.
  double frequency = 0.0;
  /// When set, trace levels are reported as 2^level (a resolution) instead of level.
  bool trace_as_resolution = false;
};

/// Partial sums of a dyadic panel series together with a finiteness verdict.
struct DyadicResult {
  double value = 0.0;
  bool divergent = false;
  bool converged = false;
  int levels = 0;
  double last_ratio = 0.0;
  RefinementTrace trace;
};

/// Sums c(0), c(1), ... where c(k) is the contribution of the k-th dyadic
/// panel. Stops once a panel is negligible, or declares divergence once
/// contributions stop shrinking for `stall_count` consecutive levels. A
/// geometric remainder is added when the series is cut while still shrinking.
DyadicResult sum_dyadic_series(const std::function<double(int)>& contribution, const DyadicOptions& opt);

namespace detail {
inline int subpanels_for(double width, double frequency) {
  if (frequency <= 0.0) return 1;
  const double n = std::ceil(width * frequency / M_PI);
  return static_cast<int>(std::clamp(n, 1.0, 8192.0));
}
}  // namespace detail

/// f over (a, b] with a possible integrable (or divergent) singularity at a.
template <class F>
DyadicResult dyadic_left(F&& f, double a, double b, const DyadicOptions& opt = {}) {
  const double w = b - a;
  auto panel = [&](int k) {
    const double hi = a + std::ldexp(w, -k);
    const double lo = a + std::ldexp(w, -k - 1);
    return gauss_composite(f, lo, (k == 0) ? b : hi, detail::subpanels_for(hi - lo, opt.frequency));
  };
  return sum_dyadic_series(panel, opt);
}

/// f over [a, b) with a possible singularity at b.
template <class F>
DyadicResult dyadic_right(F&& f, double a, double b, const DyadicOptions& opt = {}) {
  auto mirrored = [&](double x) { return f(a + b - x); };
  return dyadic_left(mirrored, a, b, opt);
}

/// f over (a, b) with possible singularities at both ends.
template <class F>
DyadicResult dyadic_both(F&& f, double a, double b, const DyadicOptions& opt = {}) {
  const double m = 0.5 * (a + b);
  DyadicResult l = dyadic_left(f, a, m, opt);
  DyadicResult r = dyadic_right(f, m, b, opt);
  DyadicResult out;
  out.value = l.value + r.value;
  out.divergent = l.divergent || r.divergent;
  out.converged = l.converged && r.converged;
  out.levels = std::max(l.levels, r.levels);
  out.last_ratio = std::max(l.last_ratio, r.last_ratio);
  out.trace = l.divergent || !r.divergent ? l.trace : r.trace;
  return out;
}

/// f over [a, infinity) by domain doubling: panels [a + w 2^(k-1), a + w 2^k]
/// after a head panel [a, a + w].
template <class F>
DyadicResult doubling_tail(F&& f, double a, double w, const DyadicOptions& opt = {}) {
  auto panel = [&](int k) {
    const double lo = (k == 0) ? a : a + std::ldexp(w, k - 1);
    const double hi = a + std::ldexp(w, k);
    return gauss_composite(f, lo, hi, detail::subpanels_for(hi - lo, opt.frequency));
  };
  return sum_dyadic_series(panel, opt);
}

/// f over (0, infinity): dyadic refinement towards 0 on (0, scale] and domain
/// doubling on [scale, infinity).
template <class F>
DyadicResult half_line(F&& f, double scale, const DyadicOptions& opt = {}) {
  DyadicResult head = dyadic_left(f, 0.0, scale, opt);
  DyadicResult tail = doubling_tail(f, scale, scale, opt);
  DyadicResult out;
  out.value = head.value + tail.value;
  out.divergent = head.divergent || tail.divergent;
  out.converged = head.converged && tail.converged;
  out.levels = std::max(head.levels, tail.levels);
  out.last_ratio = std::max(head.last_ratio, tail.last_ratio);
  out.trace = head.divergent ? head.trace : tail.trace;
  return out;
}

/// half_line split at the point of largest mass per log-scale, located by a
/// scan of guess * 2^j, so that panel contributions decay away from the split.
template <class F>
DyadicResult half_line_peaked(F&& f, double guess, const DyadicOptions& opt = {}) {
  double best = guess, best_mass = -1.0;
  for (int j = -64; j <= 64; ++j) {
    const double s = std::ldexp(guess, j);
    const double m = std::abs(s * f(s));
    if (std::isfinite(m) && m > best_mass) {
      best_mass = m;
      best = s;
    }
  }
  return half_line(f, best, opt);
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers using contiguous
/// blocks. Results must be written by index for a schedule-independent outcome.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace fracvolt
