// Front-end commands. Each returns a table with rows in scenario order.

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "ncrate/cli/scenario.hpp"
#include "ncrate/montecarlo.hpp"
#include "ncrate/optimizer.hpp"
#include "ncrate/rateanalysis.hpp"

namespace ncrate::cli {

// Input data that cannot produce a result (too few points, malformed CSV).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kInfeasible = 3 };

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline const std::vector<std::string> kPlrHeader = {"scheme", "hops", "delta", "N", "K", "rho", "plr", "ci", "method"};
inline const std::vector<std::string> kRateHeader = {"scheme", "hops",     "delta",   "target_plr",  "N",
                                                     "rho_star", "K_star", "achieved_plr", "evaluations"};
inline const std::vector<std::string> kSlopeHeader = {"scheme", "hops", "delta", "target_plr", "a", "b",
                                                      "c",      "residual", "theta", "N1",    "N2"};
inline const std::vector<std::string> kFitHeader = {"a", "b", "c", "residual", "degenerate", "theta", "N1", "N2"};
inline const std::vector<std::string> kSimulateHeader = {
    "scheme", "hops", "delta", "N", "K", "rho", "trials", "packets", "plr", "ci", "trial_ci", "report_failure_rate",
    "report_ci"};

// Shortest text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_count(std::uint64_t v) { return std::to_string(v); }

inline std::string hops_cell(const LineNetwork& net) { return format_count(net.hops()); }

// Uniform networks print one erasure rate; others list every link.
inline std::string delta_cell(const LineNetwork& net) {
  const auto& d = net.erasure_probs();
  bool uniform = true;
  for (double x : d) uniform = uniform && x == d.front();
  if (uniform) return format_number(d.front());
  std::string out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ';';
    out += format_number(d[i]);
  }
  return out;
}

inline void write_csv(std::ostream& os, const Table& t, const std::string& comment) {
  if (!comment.empty()) os << "# " << comment << '\n';
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

inline std::string provenance(const std::string& command, const Scenario& s) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(s)));
  return "ncrate " + command + " seed=" + std::to_string(s.seed) + " config=" + hash;
}

// Runs fn(i) for i in [0, count) on `jobs` threads; results keep index order.
template <class Fn>
auto parallel_map(unsigned jobs, std::size_t count, Fn&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < count; i = next++) out[i] = fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
          next = count;
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// plr

inline Table cmd_plr(const Scenario& s) {
  s.validate(true);
  struct Task {
    Scheme scheme;
    const LineNetwork* net;
    std::size_t n, k;
    PlrMethod method;
  };
  std::vector<Task> tasks;
  for (Scheme scheme : s.schemes)
    for (const auto& net : s.networks)
      for (std::size_t n : s.n_values)
        for (std::size_t k : s.k_grid(scheme, n))
          for (PlrMethod m : s.methods_for(scheme)) tasks.push_back({scheme, &net, n, k, m});

  const auto values = parallel_map(s.jobs, tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    return evaluate_plr(s.model(t.scheme, t.method), t.k, t.n, *t.net);
  });

  Table table{kPlrHeader, {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    table.rows.push_back({std::string(to_string(t.scheme)), hops_cell(*t.net), delta_cell(*t.net), format_count(t.n),
                          format_count(t.k), format_number(RatePoint{t.k, t.n}.rate()), format_number(values[i].plr),
                          format_number(values[i].ci), std::string(to_string(t.method))});
  }
  return table;
}

// ---------------------------------------------------------------------------
// rate

struct RateRecord {
  std::string scheme;
  std::string hops;
  std::string delta;
  double target = 0.0;
  std::size_t n = 0;
  RateSearchResult result;
};

// Rate search uses the first method listed for each scheme.
inline std::vector<RateRecord> run_rate(const Scenario& s) {
  s.validate(false);
  struct Task {
    Scheme scheme;
    const LineNetwork* net;
    double target;
    std::size_t n;
  };
  std::vector<Task> tasks;
  for (Scheme scheme : s.schemes)
    for (const auto& net : s.networks)
      for (double target : s.targets)
        for (std::size_t n : s.n_values) tasks.push_back({scheme, &net, target, n});

  const auto results = parallel_map(s.jobs, tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    const PlrModel model = s.model(t.scheme, s.methods_for(t.scheme).front());
    return optimal_rate_curve(model, *t.net, {t.target}, {t.n}).front().result;
  });

  std::vector<RateRecord> out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    out.push_back({std::string(to_string(t.scheme)), hops_cell(*t.net), delta_cell(*t.net), t.target, t.n, results[i]});
  }
  return out;
}

inline bool any_feasible(const std::vector<RateRecord>& records) {
  for (const auto& r : records)
    if (r.result.feasible()) return true;
  return false;
}

// Infeasible searches leave rho_star, K_star and achieved_plr empty.
inline Table rate_table(const std::vector<RateRecord>& records) {
  Table table{kRateHeader, {}};
  for (const auto& r : records) {
    const auto& res = r.result;
    table.rows.push_back({r.scheme, r.hops, r.delta, format_number(r.target), format_count(r.n),
                          res.rho_star ? format_number(*res.rho_star) : "",
                          res.k_star ? format_count(*res.k_star) : "",
                          res.achieved_plr ? format_number(*res.achieved_plr) : "", format_count(res.evaluations)});
  }
  return table;
}

inline Table cmd_rate(const Scenario& s) { return rate_table(run_rate(s)); }

// ---------------------------------------------------------------------------
// CSV input

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline Table read_csv(std::istream& is, const std::string& source) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError(source + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                      " columns, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw DataError(source + ": no header row");
  return t;
}

inline std::size_t column(const Table& t, const std::string& name, const std::string& source) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  throw DataError(source + ": missing column '" + name + "'");
}

inline double to_double(const std::string& cell, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used == cell.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError(what + ": not a number: '" + cell + "'");
}

inline std::size_t to_count(const std::string& cell, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(cell, &used);
    if (used == cell.size()) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw DataError(what + ": not a non-negative integer: '" + cell + "'");
}

}  // namespace detail

// Parses a rate table written by rate_table.
inline std::vector<RateRecord> parse_rate_table(std::istream& is, const std::string& source) {
  const Table t = detail::read_csv(is, source);
  if (t.header != kRateHeader) throw DataError(source + ": header does not match the rate table columns");
  std::vector<RateRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = source + " row " + std::to_string(i + 1);
    RateRecord r;
    r.scheme = row[0];
    r.hops = row[1];
    r.delta = row[2];
    r.target = detail::to_double(row[3], where);
    r.n = detail::to_count(row[4], where);
    if (!row[5].empty()) {
      r.result.rho_star = detail::to_double(row[5], where);
      if (!row[6].empty()) r.result.k_star = detail::to_count(row[6], where);
      if (!row[7].empty()) r.result.achieved_plr = detail::to_double(row[7], where);
    }
    r.result.evaluations = detail::to_count(row[8], where);
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// slope and fit

struct SlopeRecord {
  RateRecord key;  // scheme, hops, delta, target
  ExpFit fit;
  SlopeSummary slope;
};

// Fits each (scheme, network, target) curve over its feasible points in
// [N1, N2]; N1/N2 default to the smallest/largest N of that curve.
inline std::vector<SlopeRecord> fit_rate_curves(const std::vector<RateRecord>& records, std::size_t n1,
                                                std::size_t n2) {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const RateRecord*>> groups;
  for (const auto& r : records) {
    Key key{r.scheme, r.hops, r.delta, r.target};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SlopeRecord> out;
  for (const auto& key : order) {
    const auto& rows = groups.at(key);
    std::size_t lo = n1, hi = n2;
    if (lo == 0 || hi == 0) {
      std::size_t min_n = rows.front()->n, max_n = rows.front()->n;
      for (const auto* r : rows) {
        min_n = std::min(min_n, r->n);
        max_n = std::max(max_n, r->n);
      }
      if (lo == 0) lo = min_n;
      if (hi == 0) hi = max_n;
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto* r : rows) {
      if (r->result.feasible() && r->n >= lo && r->n <= hi) pts.emplace_back(double(r->n), *r->result.rho_star);
    }
    std::sort(pts.begin(), pts.end());
    const auto& first = *rows.front();
    const std::string label = first.scheme + " hops=" + first.hops + " delta=" + first.delta +
                              " target=" + format_number(first.target);
    if (pts.size() < 4) {
      throw DataError("slope: " + label + ": only " + std::to_string(pts.size()) +
                      " feasible points in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], need 4");
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].first == pts[i - 1].first) throw DataError("slope: " + label + ": duplicate N in input");
    }
    if (!(lo < hi)) throw DataError("slope: " + label + ": need N1 < N2");
    const ExpFit fit = fit_saturating_exp(pts);
    out.push_back({first, fit, average_slope(fit, double(lo), double(hi))});
  }
  return out;
}

inline Table slope_table(const std::vector<SlopeRecord>& records) {
  Table table{kSlopeHeader, {}};
  for (const auto& r : records) {
    table.rows.push_back({r.key.scheme, r.key.hops, r.key.delta, format_number(r.key.target), format_number(r.fit.a),
                          format_number(r.fit.b), format_number(r.fit.c), format_number(r.fit.residual),
                          format_number(r.slope.theta), format_number(r.slope.n1), format_number(r.slope.n2)});
  }
  return table;
}

inline Table cmd_slope(const Scenario& s) { return slope_table(fit_rate_curves(run_rate(s), s.n1, s.n2)); }

inline Table cmd_slope(const Scenario& s, std::istream& rate_csv, const std::string& source) {
  return slope_table(fit_rate_curves(parse_rate_table(rate_csv, source), s.n1, s.n2));
}

// Fits arbitrary (N, rho) points. Accepts a column named rho or rho_star;
// rows with an empty rho are skipped.
inline Table cmd_fit(std::istream& points_csv, const std::string& source, std::size_t n1, std::size_t n2) {
  const Table t = detail::read_csv(points_csv, source);
  const std::size_t n_col = detail::column(t, "N", source);
  std::size_t rho_col = 0;
  try {
    rho_col = detail::column(t, "rho", source);
  } catch (const DataError&) {
    rho_col = detail::column(t, "rho_star", source);
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::string where = source + " row " + std::to_string(i + 1);
    if (t.rows[i][rho_col].empty()) continue;
    const double n = detail::to_double(t.rows[i][n_col], where);
    if ((n1 != 0 && n < double(n1)) || (n2 != 0 && n > double(n2))) continue;
    pts.emplace_back(n, detail::to_double(t.rows[i][rho_col], where));
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 4) throw DataError("fit: " + source + ": only " + std::to_string(pts.size()) + " points, need 4");
  ExpFit fit;
  try {
    fit = fit_saturating_exp(pts);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("fit: ") + source + ": " + e.what());
  }
  const double lo = n1 != 0 ? double(n1) : pts.front().first;
  const double hi = n2 != 0 ? double(n2) : pts.back().first;
  if (!(lo < hi)) throw DataError("fit: need N1 < N2");
  const SlopeSummary slope = average_slope(fit, lo, hi);
  return Table{kFitHeader,
               {{format_number(fit.a), format_number(fit.b), format_number(fit.c), format_number(fit.residual),
                 fit.degenerate ? "1" : "0", format_number(slope.theta), format_number(lo), format_number(hi)}}};
}

// ---------------------------------------------------------------------------
// simulate

inline Table cmd_simulate(const Scenario& s) {
  s.validate(true);
  struct Task {
    Scheme scheme;
    const LineNetwork* net;
    std::size_t n, k;
  };
  std::vector<Task> tasks;
  for (Scheme scheme : s.schemes)
    for (const auto& net : s.networks)
      for (std::size_t n : s.n_values)
        for (std::size_t k : s.k_grid(scheme, n)) tasks.push_back({scheme, &net, n, k});

  const auto estimates = parallel_map(s.jobs, tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    const PlrModel model = s.model(t.scheme, PlrMethod::montecarlo);
    return estimate_plr(model.spec(t.k, t.n), *t.net, s.trials, s.seed, model.montecarlo);
  });

  Table table{kSimulateHeader, {}};
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    const PlrEstimate& e = estimates[i];
    table.rows.push_back({std::string(to_string(t.scheme)), hops_cell(*t.net), delta_cell(*t.net), format_count(t.n),
                          format_count(t.k), format_number(RatePoint{t.k, t.n}.rate()), format_count(e.trials),
                          format_count(e.packets_observed), format_number(e.mean), format_number(e.ci_halfwidth),
                          format_number(e.trial_ci_halfwidth), format_number(e.report_failure_rate),
                          format_number(e.report_ci_halfwidth)});
  }
  return table;
}

}  // namespace ncrate::cli
