// Packet loss rate estimation by repeated pipeline simulation.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "ncrate/network.hpp"
#include "ncrate/schemes.hpp"

namespace ncrate {

struct MonteCarloOptions {
  // SWNC only: groups simulated per trial, and leading groups left out of
  // the statistics while the windows fill.
  std::size_t swnc_groups = 12;
  std::size_t warmup_groups = 2;
  // Worker threads; results do not depend on this value.
  unsigned jobs = 1;
};

struct PlrEstimate {
  // Fraction of offered information packets not recovered.
  double mean = 0.0;
  std::size_t trials = 0;
  std::size_t packets_observed = 0;
  // 95% half-width treating packets as independent draws.
  double ci_halfwidth = 0.0;
  // 95% half-width from the spread of per-trial loss fractions.
  double trial_ci_halfwidth = 0.0;
  // Generation (or SWNC group) level: fraction of reports with any packet lost.
  std::size_t reports = 0;
  double report_failure_rate = 0.0;
  double report_ci_halfwidth = 0.0;

  friend bool operator==(const PlrEstimate&, const PlrEstimate&) = default;
};

namespace detail {

struct TrialTally {
  std::uint64_t offered = 0;
  std::uint64_t undecoded = 0;
  std::uint64_t undecoded_sq = 0;  // sum over trials of (undecoded in trial)^2
  std::uint64_t reports = 0;
  std::uint64_t failed_reports = 0;

  void merge(const TrialTally& o) noexcept {
    offered += o.offered;
    undecoded += o.undecoded;
    undecoded_sq += o.undecoded_sq;
    reports += o.reports;
    failed_reports += o.failed_reports;
  }
};

inline TrialTally run_trial(const CodeSpec& spec, const LineNetwork& net, const RngStream& stream,
                            const MonteCarloOptions& options) {
  TrialTally t;
  std::uint64_t lost = 0;
  auto account = [&](const DeliveryReport& r) {
    t.offered += r.offered;
    lost += r.offered - r.decoded_count;
    ++t.reports;
    if (!r.all_decoded()) ++t.failed_reports;
  };
  if (spec.scheme == Scheme::swnc) {
    const auto reports = run_stream_swnc(spec, net, options.swnc_groups, stream);
    for (std::size_t i = options.warmup_groups; i < reports.size(); ++i) account(reports[i]);
  } else {
    account(run_generation(spec, net, stream));
  }
  t.undecoded = lost;
  t.undecoded_sq = lost * lost;
  return t;
}

inline double half_width_95(double p, double n) {
  if (n <= 0.0) return 0.0;
  return 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p)) / n);
}

}  // namespace detail

inline PlrEstimate estimate_plr(const CodeSpec& spec, const LineNetwork& net, std::size_t trials, std::uint64_t seed,
                                const MonteCarloOptions& options = {}) {
  spec.validate();
  if (trials < 1) throw std::invalid_argument("estimate_plr: need at least one trial");
  if (spec.scheme == Scheme::swnc && options.swnc_groups <= options.warmup_groups) {
    throw std::invalid_argument("estimate_plr: SWNC needs more groups than warm-up groups");
  }

  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(trials)));
  std::vector<detail::TrialTally> partial(jobs);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < trials; i += jobs) {
      partial[worker].merge(detail::run_trial(spec, net, RngStream(seed, i), options));
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
  }
  detail::TrialTally total;
  for (const auto& p : partial) total.merge(p);

  PlrEstimate e;
  e.trials = trials;
  e.packets_observed = total.offered;
  e.mean = total.offered == 0 ? 0.0 : static_cast<double>(total.undecoded) / static_cast<double>(total.offered);
  e.ci_halfwidth = detail::half_width_95(e.mean, static_cast<double>(total.offered));

  const double per_trial = static_cast<double>(total.offered) / static_cast<double>(trials);
  if (trials > 1 && per_trial > 0.0) {
    const double t = static_cast<double>(trials);
    const double sum = static_cast<double>(total.undecoded) / per_trial;
    const double sum_sq = static_cast<double>(total.undecoded_sq) / (per_trial * per_trial);
    const double var = std::max(0.0, (sum_sq - sum * sum / t) / (t - 1.0));
    e.trial_ci_halfwidth = 1.96 * std::sqrt(var / t);
  }

  e.reports = total.reports;
  e.report_failure_rate =
      total.reports == 0 ? 0.0 : static_cast<double>(total.failed_reports) / static_cast<double>(total.reports);
  e.report_ci_halfwidth = detail::half_width_95(e.report_failure_rate, static_cast<double>(total.reports));
  return e;
}

// PLR for each spec of a rate sweep, all with the same seed.
inline std::vector<std::pair<double, PlrEstimate>> estimate_plr_curve(const std::vector<CodeSpec>& family,
                                                                      const LineNetwork& net, std::size_t trials,
                                                                      std::uint64_t seed,
                                                                      const MonteCarloOptions& options = {}) {
  std::vector<std::pair<double, PlrEstimate>> out;
  out.reserve(family.size());
  for (const auto& spec : family) out.emplace_back(spec.rate(), estimate_plr(spec, net, trials, seed, options));
  return out;
}

}  // namespace ncrate
