#include "fracvolt/numerics.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace fracvolt {

double compensated_sum(std::span<const double> xs) noexcept {
  NeumaierSum acc;
  for (double x : xs) acc += x;
  return acc.value();
}

DyadicResult sum_dyadic_series(const std::function<double(int)>& contribution, const DyadicOptions& opt) {
  DyadicResult out;
  NeumaierSum acc;
  double prev = 0.0;
  double ratio = 0.0;
  int stalls = 0;
  for (int k = 0; k < opt.max_levels; ++k) {
    const double c = contribution(k);
    if (!std::isfinite(c)) {
      out.divergent = true;
      out.levels = k + 1;
      out.trace.emplace_back(opt.trace_as_resolution ? (1 << std::min(k, 30)) : k, c);
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    acc += c;
    out.levels = k + 1;
    out.trace.emplace_back(opt.trace_as_resolution ? (1 << std::min(k, 30)) : k, acc.value());
    const bool have_ratio = k > 0 && prev != 0.0;
    const double prev_ratio = ratio;
    const double prev_c = prev;
    ratio = have_ratio ? std::abs(c) / std::abs(prev) : 0.0;
    prev = c;
    if (k + 1 < opt.min_levels) continue;
    if (have_ratio && ratio >= opt.stall_ratio) {
      if (++stalls >= opt.stall_count) {
        out.divergent = true;
        out.last_ratio = ratio;
        out.value = acc.value();
        return out;
      }
      continue;
    }
    stalls = 0;
    const double total = acc.value();
    if (std::abs(c) <= opt.rel_tol * std::abs(total) || (c == 0.0 && total == 0.0)) {
      out.converged = true;
      break;
    }
    // Once the panel ratio has settled, the geometric remainder is trusted up to
    // its sensitivity to the ratio.
    if (opt.extrapolate_tail && have_ratio && prev_ratio > 0.0 && ratio < 0.95 && c * prev_c > 0.0) {
      const double err = std::abs(c) * std::abs(ratio - prev_ratio) / ((1.0 - ratio) * (1.0 - ratio));
      if (err <= opt.rel_tol * std::abs(total)) {
        out.converged = true;
        break;
      }
    }
  }
  out.last_ratio = ratio;
  double value = acc.value();
  if (opt.extrapolate_tail && ratio > 0.0 && ratio < 1.0) {
    value += prev * ratio / (1.0 - ratio);
  }
  out.value = value;
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads == 0 ? 1 : threads, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  pool.reserve(workers);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace fracvolt
