#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace semibound {

/**
 * Pairwise (cascade) summation.  The reduction tree depends only on the
 * element order, never on thread scheduling, so parallel producers that
 * write into an index-addressed buffer reduce to bit-identical totals.
 */
template <typename S>
S pairwise_sum(std::span<const S> v) {
  const std::size_t n = v.size();
  if (n <= 16) {
    S acc{};
    for (const S& x : v) acc += x;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

template <typename S>
S pairwise_sum(const S* data, std::size_t n) {
  return pairwise_sum(std::span<const S>(data, n));
}

struct MeanSe {
  double mean = 0;
  double se = 0;       // standard error of the mean
  double variance = 0; // sample variance
  std::size_t count = 0;
};

/// Mean and standard error via two pairwise passes.
inline MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  r.count = v.size();
  if (v.empty()) return r;
  r.mean = pairwise_sum(v) / static_cast<double>(v.size());
  if (v.size() < 2) return r;
  double m = r.mean;
  // second pass over centered squares, still pairwise for determinism
  struct Sq {
    const double* p;
    double m;
  };
  // small fixed-size scratch-free recursion
  const std::size_t n = v.size();
  // compute sum of squared deviations with an explicit pairwise recursion
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> double {
    if (hi - lo <= 16) {
      double acc = 0;
      for (std::size_t i = lo; i < hi; ++i) {
        const double d = v[i] - m;
        acc += d * d;
      }
      return acc;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  const double ss = rec(rec, 0, n);
  r.variance = ss / static_cast<double>(n - 1);
  r.se = std::sqrt(r.variance / static_cast<double>(n));
  return r;
}

/// Ordinary least squares y = a + b x with a residual-based CI on the slope.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double residual = 0;  // RMS residual
  std::size_t count = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  const std::size_t n = x.size();
  f.count = n;
  if (n < 2 || y.size() != n) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  if (n > 2) f.slope_se = std::sqrt(ss / (n - 2) / sxx);
  return f;
}

}  // namespace semibound
