// Binary search for the largest coding rate that meets a target packet loss
// rate, and the evaluators it is run with.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ncrate/analytic.hpp"
#include "ncrate/montecarlo.hpp"
#include "ncrate/schemes.hpp"

namespace ncrate {

struct RatePoint {
  std::size_t k = 0;  // K, or w_e for SWNC
  std::size_t n = 0;
  double rate() const noexcept { return static_cast<double>(k) / static_cast<double>(n); }
};

// Candidate rates for one blocklength, strictly increasing, each mapped to an
// integer K = ceil(N * rho) that the scheme accepts.
class RateSet {
 public:
  RateSet(Scheme scheme, std::size_t n, std::vector<std::size_t> k_values) : scheme_(scheme), n_(n) {
    for (std::size_t k : k_values) {
      CodeSpec{scheme, k, n}.validate();
      if (!k_.empty() && k <= k_.back()) throw SpecError("rate set: rates must be strictly increasing");
      k_.push_back(k);
    }
  }

  // Every rate K/N the scheme accepts for this N.
  static RateSet all_valid(Scheme scheme, std::size_t n) {
    std::vector<std::size_t> ks;
    for (std::size_t k = 1; k <= n; ++k) {
      if (accepts(scheme, k, n)) ks.push_back(k);
    }
    return RateSet(scheme, n, std::move(ks));
  }

  // Maps each rate to K = ceil(N rho); rates the scheme cannot realize and
  // duplicates are dropped.
  static RateSet from_rates(Scheme scheme, std::size_t n, const std::vector<double>& rates) {
    std::vector<std::size_t> ks;
    for (double rho : rates) {
      const double scaled = std::ceil(static_cast<double>(n) * rho - 1e-9);
      if (scaled < 1.0 || scaled > static_cast<double>(n)) continue;
      const auto k = static_cast<std::size_t>(scaled);
      if (accepts(scheme, k, n)) ks.push_back(k);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return RateSet(scheme, n, std::move(ks));
  }

  static bool accepts(Scheme scheme, std::size_t k, std::size_t n) {
    try {
      CodeSpec{scheme, k, n}.validate();
      return true;
    } catch (const SpecError&) {
      return false;
    }
  }

  Scheme scheme() const noexcept { return scheme_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return k_.size(); }
  bool empty() const noexcept { return k_.empty(); }
  RatePoint operator[](std::size_t i) const { return {k_.at(i), n_}; }
  const std::vector<std::size_t>& k_values() const noexcept { return k_; }

 private:
  Scheme scheme_;
  std::size_t n_;
  std::vector<std::size_t> k_;
};

struct RateSearchResult {
  std::optional<double> rho_star;
  std::optional<std::size_t> k_star;
  std::optional<double> achieved_plr;
  std::size_t evaluations = 0;

  bool feasible() const noexcept { return rho_star.has_value(); }
};

// Largest bound on evaluation count for a rate set of the given size.
inline std::size_t max_search_evaluations(std::size_t set_size) {
  if (set_size <= 1) return set_size;
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < set_size) ++bits;
  return bits + 1;
}

// Largest rate in `psi` whose loss rate is at most `target`, assuming the
// evaluator is non-decreasing over psi. Each point is evaluated at most once.
template <class Evaluator>
RateSearchResult optimal_rate(Evaluator&& evaluate, const RateSet& psi, double target) {
  RateSearchResult result;
  std::map<std::size_t, double> memo;
  auto plr_at = [&](std::size_t i) {
    auto it = memo.find(i);
    if (it != memo.end()) return it->second;
    ++result.evaluations;
    const double v = static_cast<double>(evaluate(psi[i]));
    memo.emplace(i, v);
    return v;
  };

  // Partition point of the feasible prefix: first index with plr > target.
  std::size_t lo = 0;
  std::size_t len = psi.size();
  while (len > 0) {
    const std::size_t half = len / 2;
    const std::size_t mid = lo + half;
    if (plr_at(mid) <= target) {
      lo = mid + 1;
      len -= half + 1;
    } else {
      len = half;
    }
  }
  if (lo == 0) return result;
  const RatePoint best = psi[lo - 1];
  result.rho_star = best.rate();
  result.k_star = best.k;
  result.achieved_plr = plr_at(lo - 1);
  return result;
}

// ---------------------------------------------------------------------------
// Loss-rate models used as search evaluators

enum class PlrMethod { analytic_eq1, analytic_bound, montecarlo };

inline std::string_view to_string(PlrMethod m) noexcept {
  switch (m) {
    case PlrMethod::analytic_eq1: return "analytic-eq1";
    case PlrMethod::analytic_bound: return "analytic-bound";
    case PlrMethod::montecarlo: return "montecarlo";
  }
  return "?";
}

inline std::optional<PlrMethod> parse_method(std::string_view s) noexcept {
  if (s == "analytic-eq1") return PlrMethod::analytic_eq1;
  if (s == "analytic-bound") return PlrMethod::analytic_bound;
  if (s == "montecarlo") return PlrMethod::montecarlo;
  return std::nullopt;
}

struct PlrModel {
  Scheme scheme = Scheme::rlnc;
  PlrMethod method = PlrMethod::analytic_eq1;
  const GfField* field = &GfField::standard(8);
  // analytic-eq1 only: drop the finite-field rank term.
  bool infinite_field = false;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  MonteCarloOptions montecarlo;
  std::size_t decoding_window = 0;

  CodeSpec spec(std::size_t k, std::size_t n) const {
    CodeSpec s{scheme, k, n, decoding_window, field};
    s.validate();
    return s;
  }

  void validate() const {
    if (method != PlrMethod::montecarlo && scheme != Scheme::rlnc) {
      throw SpecError(std::string(to_string(method)) + " is only available for RLNC (got " +
                      std::string(to_string(scheme)) + "); use montecarlo");
    }
  }
};

struct PlrValue {
  double plr = 0.0;
  // Half-width of the 95% interval; zero for analytic values.
  double ci = 0.0;
};

inline PlrValue evaluate_plr(const PlrModel& model, std::size_t k, std::size_t n, const LineNetwork& net) {
  model.validate();
  const CodeSpec spec = model.spec(k, n);
  switch (model.method) {
    case PlrMethod::analytic_eq1:
      return {plr_rlnc(spec, net, model.infinite_field), 0.0};
    case PlrMethod::analytic_bound:
      return {plr_gaussian_upper(spec.rate(), n, net), 0.0};
    case PlrMethod::montecarlo: {
      const PlrEstimate e = estimate_plr(spec, net, model.trials, model.seed, model.montecarlo);
      return {e.mean, e.trial_ci_halfwidth};
    }
  }
  return {};
}

struct RateCurveRow {
  double target = 0.0;
  std::size_t n = 0;
  RateSearchResult result;
};

// One search per (target, N), in that nesting order.
inline std::vector<RateCurveRow> optimal_rate_curve(const PlrModel& model, const LineNetwork& net,
                                                    const std::vector<double>& targets,
                                                    const std::vector<std::size_t>& n_list) {
  model.validate();
  std::vector<RateCurveRow> rows;
  rows.reserve(targets.size() * n_list.size());
  for (double target : targets) {
    for (std::size_t n : n_list) {
      const RateSet psi = RateSet::all_valid(model.scheme, n);
      auto eval = [&](const RatePoint& pt) { return evaluate_plr(model, pt.k, pt.n, net).plr; };
      rows.push_back(RateCurveRow{target, n, optimal_rate(eval, psi, target)});
    }
  }
  return rows;
}

}  // namespace ncrate
