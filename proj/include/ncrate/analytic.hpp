// Closed-form packet loss rate of RLNC over a line network, its Gaussian-tail
// bounds, and the continuous-rate upper bound used for rate search.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "ncrate/network.hpp"
#include "ncrate/schemes.hpp"

namespace ncrate {

inline constexpr double kInfiniteField = std::numeric_limits<double>::infinity();

struct BoundPair {
  double lower = 0.0;
  double upper = 1.0;
};

// Phi(y), the standard normal distribution function.
inline double std_normal_cdf(double y) noexcept { return 0.5 * std::erfc(-y / std::sqrt(2.0)); }

// Pr(X = successes) for X ~ Bin(trials, p), evaluated in log space.
inline double binom_pmf(std::size_t successes, std::size_t trials, double p) {
  if (successes > trials) {
    throw std::out_of_range("binom_pmf: successes " + std::to_string(successes) + " > trials " +
                            std::to_string(trials));
  }
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binom_pmf: p must be a probability");
  if (p == 0.0) return successes == 0 ? 1.0 : 0.0;
  if (p == 1.0) return successes == trials ? 1.0 : 0.0;
  const double n = static_cast<double>(trials);
  const double k = static_cast<double>(successes);
  const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
}

// 1 - prod_{j=0}^{k-1} (1 - q^{j-n}): probability that n uniform vectors of
// GF(q)^k do not span the space. Zero for an infinite field.
inline double rank_deficiency(std::size_t k, std::size_t n, double q) {
  if (n < k) return 1.0;
  if (std::isinf(q)) return 0.0;
  // Terms q^{-i}, i = n-k+1 .. n, truncated once negligible.
  double log_full = 0.0;
  const double first = std::pow(q, -static_cast<double>(n - k + 1));
  double term = first;
  for (std::size_t i = n - k + 1; i <= n; ++i) {
    log_full += std::log1p(-term);
    term /= q;
    if (term < first * 1e-18) break;
  }
  return -std::expm1(log_full);
}

// Packet loss rate of RLNC with generation size k and blocklength n over `net`,
// accumulated from per-link failure probabilities in log space.
inline double plr_rlnc(std::size_t k, std::size_t n, const LineNetwork& net, double q = kInfiniteField) {
  if (k < 1 || k > n) throw SpecError("plr_rlnc: need 1 <= K <= N");
  if (!(q >= 2.0)) throw std::domain_error("plr_rlnc: field size must be >= 2");
  double log_success = 0.0;
  for (double delta : net.erasure_probs()) {
    const double p = 1.0 - delta;
    double failure = 0.0;
    for (std::size_t r = 0; r <= n; ++r) {
      const double pmf = binom_pmf(r, n, p);
      if (pmf == 0.0) continue;
      failure += pmf * rank_deficiency(k, r, q);
    }
    failure = std::clamp(failure, 0.0, 1.0);
    if (failure >= 1.0) return 1.0;
    log_success += std::log1p(-failure);
  }
  return -std::expm1(log_success);
}

inline double plr_rlnc(const CodeSpec& spec, const LineNetwork& net, bool infinite_field = false) {
  spec.validate();
  if (spec.scheme != Scheme::rlnc) throw SpecError("plr_rlnc: scheme must be RLNC");
  return plr_rlnc(spec.k, spec.n, net, infinite_field ? kInfiniteField : static_cast<double>(spec.field->size()));
}

// H(x, p) = x ln(x/p) + (1-x) ln((1-x)/(1-p)), with 0 ln 0 = 0.
inline double entropy_H(double x, double p) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("entropy_H: x must lie in [0, 1]");
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("entropy_H: p must lie in (0, 1)");
  double h = 0.0;
  if (x > 0.0) h += x * std::log(x / p);
  if (x < 1.0) h += (1.0 - x) * std::log((1.0 - x) / (1.0 - p));
  return h < 0.0 ? 0.0 : h;
}

namespace detail {

// Phi(sgn(x - p) sqrt(2 n H(x, p))), with the p -> 0 and p -> 1 limits.
inline double gaussian_tail_term(double x, double n, double p) {
  if (x == p) return 0.5;
  const double sign = x > p ? 1.0 : -1.0;
  if (p <= 0.0 || p >= 1.0) return sign > 0 ? 1.0 : 0.0;
  return std_normal_cdf(sign * std::sqrt(2.0 * n * entropy_H(x, p)));
}

}  // namespace detail

// C_p(m) = Phi(sgn(m/N - p) sqrt(2 N H(m/N, p))), a lower bound on
// Pr(Bin(N, p) <= m) that also upper-bounds Pr(Bin(N, p) <= m - 1).
inline double zubkov_C(std::size_t m, std::size_t trials, double p) {
  if (trials == 0 || m > trials) throw std::out_of_range("zubkov_C: need 0 <= m <= N and N >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("zubkov_C: p must be a probability");
  const double n = static_cast<double>(trials);
  return detail::gaussian_tail_term(static_cast<double>(m) / n, n, p);
}

inline BoundPair plr_rlnc_bounds(std::size_t k, std::size_t n, const LineNetwork& net) {
  if (k < 1 || k > n) throw SpecError("plr_rlnc_bounds: need 1 <= K <= N");
  double keep_lower = 1.0;
  double keep_upper = 1.0;
  for (double delta : net.erasure_probs()) {
    const double p = 1.0 - delta;
    keep_lower *= 1.0 - zubkov_C(k - 1, n, p);
    keep_upper *= 1.0 - zubkov_C(k, n, p);
  }
  return BoundPair{1.0 - keep_lower, 1.0 - keep_upper};
}

inline BoundPair plr_rlnc_bounds(const CodeSpec& spec, const LineNetwork& net) {
  spec.validate();
  if (spec.scheme != Scheme::rlnc) throw SpecError("plr_rlnc_bounds: scheme must be RLNC");
  return plr_rlnc_bounds(spec.k, spec.n, net);
}

// Upper-bound PLR as a continuous function of the rate.
inline double plr_gaussian_upper(double rho, std::size_t trials, const LineNetwork& net) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("plr_gaussian_upper: rate must lie in (0, 1]");
  if (trials == 0) throw std::domain_error("plr_gaussian_upper: N must be >= 1");
  double keep = 1.0;
  for (double delta : net.erasure_probs()) {
    keep *= 1.0 - detail::gaussian_tail_term(rho, static_cast<double>(trials), 1.0 - delta);
  }
  return 1.0 - keep;
}

}  // namespace ncrate
