// ncrate: command-line front-end for loss-rate tables, optimal-rate sweeps
// and rate-curve fits.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncrate/cli/commands.hpp"

namespace {

using namespace ncrate;
using namespace ncrate::cli;

struct Flags {
  std::string config;
  std::vector<std::string> schemes;
  std::string field;
  std::vector<std::size_t> hops;
  std::vector<double> delta;
  std::string n_values;
  std::string k_values;
  std::vector<double> targets;
  std::vector<std::string> methods;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> groups;
  std::optional<std::size_t> warmup;
  std::optional<std::size_t> decoding_window;
  std::optional<std::size_t> n1;
  std::optional<std::size_t> n2;
  std::optional<unsigned> jobs;
  std::string output;
  std::string input;
};

// "16", "8,16,32" or "8:128:8" (from:to:step).
nlohmann::json parse_int_list(const std::string& text, const std::string& flag) {
  if (text.find(':') != std::string::npos) {
    std::vector<std::size_t> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
      try {
        parts.push_back(std::stoul(item));
      } catch (const std::exception&) {
        throw ConfigError("flag " + flag + ": not an integer: '" + item + "'");
      }
    }
    if (parts.size() < 2 || parts.size() > 3) throw ConfigError("flag " + flag + ": expected from:to[:step]");
    return {{"from", parts[0]}, {"to", parts[1]}, {"step", parts.size() == 3 ? parts[2] : 1}};
  }
  nlohmann::json list = nlohmann::json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      list.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw ConfigError("flag " + flag + ": not an integer: '" + item + "'");
    }
  }
  return list;
}

nlohmann::json overrides(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.schemes.empty()) j["schemes"] = f.schemes;
  if (!f.field.empty()) {
    if (f.field == "infinite") {
      j["field"] = "infinite";
    } else {
      try {
        j["field"] = std::stoull(f.field, nullptr, 0);
      } catch (const std::exception&) {
        throw ConfigError("flag --field: expected q or 'infinite', got '" + f.field + "'");
      }
    }
  }
  if (!f.hops.empty()) j["hops"] = f.hops;
  if (!f.delta.empty()) j["delta"] = f.delta;
  if (!f.n_values.empty()) j["N"] = parse_int_list(f.n_values, "--N");
  if (!f.k_values.empty()) j["K"] = parse_int_list(f.k_values, "--K");
  if (!f.targets.empty()) j["targets"] = f.targets;
  if (!f.methods.empty()) j["methods"] = f.methods;
  if (f.trials) j["trials"] = *f.trials;
  if (f.seed) j["seed"] = *f.seed;
  if (f.groups) j["swnc_groups"] = *f.groups;
  if (f.warmup) j["warmup_groups"] = *f.warmup;
  if (f.decoding_window) j["decoding_window"] = *f.decoding_window;
  if (f.n1) j["N1"] = *f.n1;
  if (f.n2) j["N2"] = *f.n2;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (!f.output.empty()) j["output"] = f.output;
  return j;
}

Scenario load_scenario(const Flags& f) {
  Scenario s;
  s.seed = default_seed();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("config: cannot open '" + f.config + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      s = parse_scenario(buf.str());
    } catch (const ConfigError& e) {
      throw ConfigError(f.config + ": " + e.what());
    }
  }
  apply_json(s, overrides(f));
  return s;
}

void emit(const Scenario& s, const std::string& command, const Table& table) {
  const std::string comment = provenance(command, s);
  if (s.output.empty()) {
    write_csv(std::cout, table, comment);
    return;
  }
  std::ofstream out(s.output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + s.output + "'");
  write_csv(out, table, comment);
}

void add_scenario_flags(CLI::App* cmd, Flags& f, bool sweep) {
  cmd->add_option("-c,--config", f.config, "JSON scenario file; flags override its keys");
  cmd->add_option("-s,--scheme", f.schemes, "RLNC, SNC, SNC-S or SWNC (repeatable; default RLNC)");
  cmd->add_option("--field", f.field, "field size q = 2^m (m = 1..16) or 'infinite' (default 256)");
  cmd->add_option("--hops", f.hops, "hop counts, crossed with --delta (default 2)");
  cmd->add_option("--delta", f.delta, "per-link erasure probabilities (default 0.05)");
  cmd->add_option("-N,--N", f.n_values, "blocklengths: 16, 8,16,32 or 8:128:8 (default 16)");
  cmd->add_option("--trials", f.trials, "Monte Carlo trials per point (default 10000)");
  cmd->add_option("--seed", f.seed, "base seed (default 20180101, or $NCRATE_SEED)");
  cmd->add_option("--groups", f.groups, "SWNC groups per trial (default 12)");
  cmd->add_option("--warmup", f.warmup, "SWNC leading groups excluded from statistics (default 2)");
  cmd->add_option("--decoding-window", f.decoding_window, "SWNC decoding window w_d (default w_e)");
  cmd->add_option("-j,--jobs", f.jobs, "worker threads (default 1; output does not depend on it)");
  cmd->add_option("-o,--output", f.output, "output CSV path (default standard output)");
  if (sweep) {
    cmd->add_option("-K,--K", f.k_values, "K (or w_e) values: list or from:to:step (default all valid)");
  }
}

void add_target_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("-t,--target", f.targets, "target packet loss rates (default 1e-3)");
  cmd->add_option("-m,--method", f.methods,
                  "auto, analytic-eq1, analytic-bound or montecarlo (default auto: analytic-eq1 for RLNC, "
                  "montecarlo otherwise)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-length coding rate analysis for network-coded line networks"};
  app.require_subcommand(1);
  Flags f;

  auto* plr = app.add_subcommand("plr", "packet loss rate per (scheme, network, N, K, method)");
  add_scenario_flags(plr, f, true);
  plr->add_option("-m,--method", f.methods, "auto, analytic-eq1, analytic-bound or montecarlo (default auto)");

  auto* rate = app.add_subcommand("rate", "largest rate meeting each target, per N");
  add_scenario_flags(rate, f, false);
  add_target_flags(rate, f);

  auto* slope = app.add_subcommand("slope", "saturating-exponential fit and average slope of rate curves");
  add_scenario_flags(slope, f, false);
  add_target_flags(slope, f);
  slope->add_option("-i,--input", f.input, "read a rate table instead of running the search");
  slope->add_option("--N1", f.n1, "slope interval start (default smallest N of each curve)");
  slope->add_option("--N2", f.n2, "slope interval end (default largest N of each curve)");

  auto* fit = app.add_subcommand("fit", "fit c - a exp(-b N) to (N, rho) points from a CSV file");
  fit->add_option("-i,--input", f.input, "CSV with columns N and rho (or rho_star)")->required();
  fit->add_option("--N1", f.n1, "slope interval start and lower data bound (default smallest N)");
  fit->add_option("--N2", f.n2, "slope interval end and upper data bound (default largest N)");
  fit->add_option("-o,--output", f.output, "output CSV path (default standard output)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates with all interval statistics");
  add_scenario_flags(simulate, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (fit->parsed()) {
      std::ifstream in(f.input);
      if (!in) throw ConfigError("cannot open '" + f.input + "'");
      const Table t = cmd_fit(in, f.input, f.n1.value_or(0), f.n2.value_or(0));
      Scenario s;
      s.seed = 0;
      s.output = f.output;
      emit(s, "fit", t);
      return kOk;
    }

    const Scenario s = load_scenario(f);
    if (plr->parsed()) {
      emit(s, "plr", cmd_plr(s));
    } else if (simulate->parsed()) {
      emit(s, "simulate", cmd_simulate(s));
    } else if (rate->parsed()) {
      const auto records = run_rate(s);
      emit(s, "rate", rate_table(records));
      if (!any_feasible(records)) {
        std::cerr << "rate: no blocklength meets any target\n";
        return kInfeasible;
      }
    } else if (slope->parsed()) {
      if (!f.input.empty()) {
        s.validate(false);
        std::ifstream in(f.input);
        if (!in) throw ConfigError("cannot open '" + f.input + "'");
        emit(s, "slope", cmd_slope(s, in, f.input));
      } else {
        const auto records = run_rate(s);
        if (!any_feasible(records)) {
          std::cerr << "slope: no blocklength meets any target\n";
          return kInfeasible;
        }
        emit(s, "slope", slope_table(fit_rate_curves(records, s.n1, s.n2)));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
