// Saturating-exponential model rho*(N) = c - a exp(-b N) of the optimal rate
// curve, its slope, and the average slope over a blocklength interval.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ncrate {

struct ExpFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  // Root-mean-square error over the fitted points.
  double residual = 0.0;
  // Set when the data carry no exponential trend (constant curve, or the
  // best decay rate sits on the search boundary).
  bool degenerate = false;

  double operator()(double n) const noexcept { return c - a * std::exp(-b * n); }
};

struct SlopeSummary {
  double theta = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
};

struct FitOptions {
  double b_min = 1e-4;
  double b_max = 1.0;
  std::size_t bracket_points = 200;
  double tolerance = 1e-13;
};

namespace detail {

struct LinearPart {
  double a;
  double c;
  double sse;
  bool ok;
};

// Best (a, c) for fixed b by linear least squares of rho on exp(-b N).
inline LinearPart solve_linear(std::span<const std::pair<double, double>> pts, double b) {
  const double m = static_cast<double>(pts.size());
  double se = 0.0, sr = 0.0;
  for (const auto& [n, r] : pts) {
    se += std::exp(-b * n);
    sr += r;
  }
  const double me = se / m;
  const double mr = sr / m;
  double see = 0.0, ser = 0.0;
  for (const auto& [n, r] : pts) {
    const double e = std::exp(-b * n) - me;
    see += e * e;
    ser += e * (r - mr);
  }
  if (see <= 1e-300) return {0.0, mr, 0.0, false};
  const double slope = ser / see;  // rho = c + slope * e, so a = -slope
  const double c = mr - slope * me;
  double sse = 0.0;
  for (const auto& [n, r] : pts) {
    const double d = r - (c + slope * std::exp(-b * n));
    sse += d * d;
  }
  return {-slope, c, sse, true};
}

}  // namespace detail

// Least-squares fit: a log-spaced scan of b brackets the minimum, then golden
// section search refines b; a and c are linear given b.
inline ExpFit fit_saturating_exp(std::span<const std::pair<double, double>> points, const FitOptions& opt = {}) {
  if (points.size() < 4) throw std::invalid_argument("fit_saturating_exp: need at least 4 points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw std::invalid_argument("fit_saturating_exp: N must be strictly increasing");
    }
  }

  ExpFit fit;
  double lo_r = points.front().second, hi_r = lo_r;
  for (const auto& p : points) {
    lo_r = std::min(lo_r, p.second);
    hi_r = std::max(hi_r, p.second);
  }
  if (hi_r - lo_r <= 1e-12) {
    fit.a = 0.0;
    fit.b = opt.b_min;
    fit.c = points.front().second;
    fit.degenerate = true;
    return fit;
  }

  auto sse = [&](double b) {
    const auto lp = detail::solve_linear(points, b);
    return lp.ok ? lp.sse : std::numeric_limits<double>::infinity();
  };

  const double log_lo = std::log(opt.b_min);
  const double log_hi = std::log(opt.b_max);
  const std::size_t grid = std::max<std::size_t>(opt.bracket_points, 3);
  std::size_t best = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> bs(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    bs[i] = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) / static_cast<double>(grid - 1));
    const double s = sse(bs[i]);
    if (s < best_sse) {
      best_sse = s;
      best = i;
    }
  }

  double left = bs[best == 0 ? 0 : best - 1];
  double right = bs[best + 1 == grid ? grid - 1 : best + 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = right - inv_phi * (right - left);
  double x2 = left + inv_phi * (right - left);
  double f1 = sse(x1);
  double f2 = sse(x2);
  while (right - left > opt.tolerance * (std::abs(left) + std::abs(right))) {
    if (f1 <= f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - inv_phi * (right - left);
      f1 = sse(x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + inv_phi * (right - left);
      f2 = sse(x2);
    }
  }
  double b = 0.5 * (left + right);
  if (sse(bs[best]) < sse(b)) b = bs[best];

  const auto lp = detail::solve_linear(points, b);
  fit.a = lp.a;
  fit.b = b;
  fit.c = lp.c;
  fit.residual = std::sqrt(lp.sse / static_cast<double>(points.size()));
  const bool on_boundary = b <= opt.b_min * (1.0 + 1e-6) || b >= opt.b_max * (1.0 - 1e-6);
  fit.degenerate = !lp.ok || on_boundary || fit.a <= 0.0;
  return fit;
}

// f(N) = a b exp(-b N), the derivative of the fitted curve.
inline double slope_at(const ExpFit& fit, double n) noexcept { return fit.a * fit.b * std::exp(-fit.b * n); }

// Average slope of the fitted curve over [n1, n2].
inline SlopeSummary average_slope(const ExpFit& fit, double n1, double n2) {
  if (!(n1 < n2)) throw std::invalid_argument("average_slope: need N1 < N2");
  const double theta = (fit.a * std::exp(-fit.b * n1) - fit.a * std::exp(-fit.b * n2)) / (n2 - n1);
  return {theta, n1, n2};
}

}  // namespace ncrate
