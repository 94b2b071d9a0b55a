// Experiment scenario: which schemes, networks, blocklengths and targets a
// sweep covers. Loaded from a JSON file and then overridden by flags.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncrate/network.hpp"
#include "ncrate/optimizer.hpp"
#include "ncrate/schemes.hpp"

namespace ncrate::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20180101;
inline constexpr const char* kSeedEnv = "NCRATE_SEED";

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("environment: ") + kSeedEnv + " is not an unsigned integer: '" + env + "'");
  }
  return kDefaultSeed;
}

struct Scenario {
  std::vector<Scheme> schemes{Scheme::rlnc};
  // Field GF(2^field_bits); ignored by analytic methods when infinite_field.
  unsigned field_bits = 8;
  bool infinite_field = false;
  std::vector<LineNetwork> networks{LineNetwork::uniform(2, 0.05)};
  std::vector<std::size_t> n_values{16};
  // plr only: K (or w_e) values to tabulate; empty means every valid value.
  std::vector<std::size_t> k_values;
  std::vector<double> targets{1e-3};
  // "auto" picks analytic-eq1 for RLNC and montecarlo otherwise.
  std::vector<std::string> methods{"auto"};
  std::size_t trials = 10000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t swnc_groups = 12;
  std::size_t warmup_groups = 2;
  std::size_t decoding_window = 0;
  // slope: fit interval; 0 means the first/last blocklength of the sweep.
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  unsigned jobs = 1;
  std::string output;  // empty: standard output

  const GfField& field() const { return GfField::standard(field_bits); }

  std::vector<PlrMethod> methods_for(Scheme s) const {
    std::vector<PlrMethod> out;
    for (const auto& m : methods) {
      if (m == "auto") {
        out.push_back(s == Scheme::rlnc ? PlrMethod::analytic_eq1 : PlrMethod::montecarlo);
      } else {
        out.push_back(*parse_method(m));
      }
    }
    return out;
  }

  PlrModel model(Scheme s, PlrMethod m) const {
    PlrModel pm;
    pm.scheme = s;
    pm.method = m;
    pm.field = &field();
    pm.infinite_field = infinite_field;
    pm.trials = trials;
    pm.seed = seed;
    pm.montecarlo.swnc_groups = swnc_groups;
    pm.montecarlo.warmup_groups = warmup_groups;
    pm.montecarlo.jobs = 1;
    pm.decoding_window = decoding_window;
    return pm;
  }

  // Valid K (or w_e) values of one scheme at blocklength n.
  std::vector<std::size_t> k_grid(Scheme s, std::size_t n) const {
    if (k_values.empty()) return RateSet::all_valid(s, n).k_values();
    std::vector<std::size_t> out;
    for (std::size_t k : k_values)
      if (k <= n) out.push_back(k);
    return out;
  }

  // Checks every referenced parameter combination before any work starts.
  void validate(bool need_k_grid) const {
    if (schemes.empty()) throw ConfigError("field 'schemes': at least one scheme is required");
    if (networks.empty()) throw ConfigError("field 'networks': at least one network is required");
    if (n_values.empty()) throw ConfigError("field 'N': at least one blocklength is required");
    if (targets.empty()) throw ConfigError("field 'targets': at least one target is required");
    if (methods.empty()) throw ConfigError("field 'methods': at least one method is required");
    if (trials < 1) throw ConfigError("field 'trials': must be >= 1");
    if (field_bits < 1 || field_bits > GfField::kMaxDegree) {
      throw ConfigError("field 'field_bits': must be in [1, 16], got " + std::to_string(field_bits));
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
      if (methods[i] != "auto" && !parse_method(methods[i])) {
        throw ConfigError("field 'methods[" + std::to_string(i) + "]': unknown method '" + methods[i] +
                          "' (expected auto, analytic-eq1, analytic-bound or montecarlo)");
      }
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (!(targets[i] > 0.0 && targets[i] < 1.0)) {
        throw ConfigError("field 'targets[" + std::to_string(i) + "]': target PLR must lie in (0, 1)");
      }
    }
    for (std::size_t n : n_values) {
      if (n < 1) throw ConfigError("field 'N': blocklengths must be >= 1");
    }
    if (swnc_groups <= warmup_groups) {
      throw ConfigError("field 'swnc_groups': must exceed 'warmup_groups'");
    }
    for (Scheme s : schemes) {
      for (PlrMethod m : methods_for(s)) {
        try {
          model(s, m).validate();
        } catch (const SpecError& e) {
          throw ConfigError(std::string("field 'methods': ") + e.what());
        }
      }
      if (!need_k_grid) continue;
      for (std::size_t n : n_values) {
        for (std::size_t k : k_values) {
          if (k > n) continue;
          try {
            CodeSpec{s, k, n, decoding_window, &field()}.validate();
          } catch (const SpecError& e) {
            throw ConfigError("field 'K': " + std::string(e.what()));
          }
        }
      }
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    std::vector<std::string> names;
    for (Scheme s : schemes) names.emplace_back(to_string(s));
    j["schemes"] = names;
    j["field_bits"] = field_bits;
    j["infinite_field"] = infinite_field;
    nlohmann::json nets = nlohmann::json::array();
    for (const auto& net : networks) nets.push_back({{"erasures", net.erasure_probs()}});
    j["networks"] = nets;
    j["N"] = n_values;
    j["K"] = k_values;
    j["targets"] = targets;
    j["methods"] = methods;
    j["trials"] = trials;
    j["seed"] = seed;
    j["swnc_groups"] = swnc_groups;
    j["warmup_groups"] = warmup_groups;
    j["decoding_window"] = decoding_window;
    j["N1"] = n1;
    j["N2"] = n2;
    return j;
  }
};

namespace detail {

template <class T>
T get_field(const nlohmann::json& j, const std::string& name) {
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + name + "': " + e.what());
  }
}

inline std::vector<std::size_t> parse_n_values(const nlohmann::json& v, const std::string& name) {
  if (v.is_number_unsigned()) return {v.get<std::size_t>()};
  if (v.is_array()) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_unsigned()) {
        throw ConfigError("field '" + name + "[" + std::to_string(i) + "]': expected a positive integer");
      }
      out.push_back(v[i].get<std::size_t>());
    }
    return out;
  }
  if (v.is_object()) {
    const auto from = get_field<std::size_t>(v, "from");
    const auto to = get_field<std::size_t>(v, "to");
    const std::size_t step = v.contains("step") ? get_field<std::size_t>(v, "step") : 1;
    if (step == 0 || from > to) throw ConfigError("field '" + name + "': need from <= to and step >= 1");
    std::vector<std::size_t> out;
    for (std::size_t n = from; n <= to; n += step) out.push_back(n);
    return out;
  }
  throw ConfigError("field '" + name + "': expected an integer, a list, or {from, to, step}");
}

inline LineNetwork parse_network(const nlohmann::json& v, const std::string& name) {
  try {
    if (v.contains("erasures")) return LineNetwork(v.at("erasures").get<std::vector<double>>());
    const auto hops = v.at("hops").get<std::size_t>();
    const auto delta = v.at("delta").get<double>();
    return LineNetwork::uniform(hops, delta);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("field '" + name + "': expected {hops, delta} or {erasures: [...]}: " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("field '" + name + "': " + e.what());
  }
}

}  // namespace detail

// Overlays the keys present in `j` on `s`.
inline void apply_json(Scenario& s, const nlohmann::json& j) {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const std::vector<std::string> known = {
      "schemes", "field_bits", "field", "infinite_field", "networks", "hops", "delta", "N", "K",
      "targets", "methods", "method", "trials", "seed", "swnc_groups", "warmup_groups", "decoding_window",
      "N1", "N2", "jobs", "output"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("field '" + key + "': unknown key");
    }
  }

  if (j.contains("schemes")) {
    s.schemes.clear();
    const auto names = get_field<std::vector<std::string>>(j, "schemes");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto scheme = parse_scheme(names[i]);
      if (!scheme) {
        throw ConfigError("field 'schemes[" + std::to_string(i) + "]': unknown scheme '" + names[i] +
                          "' (expected RLNC, SNC, SNC-S or SWNC)");
      }
      s.schemes.push_back(*scheme);
    }
  }
  if (j.contains("field_bits")) s.field_bits = get_field<unsigned>(j, "field_bits");
  if (j.contains("field")) {
    const auto& f = j.at("field");
    if (f.is_string() && f.get<std::string>() == "infinite") {
      s.infinite_field = true;
    } else if (f.is_number_unsigned()) {
      const auto q = f.get<std::uint64_t>();
      unsigned bits = 0;
      while ((std::uint64_t{1} << bits) < q) ++bits;
      if ((std::uint64_t{1} << bits) != q || bits < 1) {
        throw ConfigError("field 'field': q must be a power of two or \"infinite\"");
      }
      s.field_bits = bits;
      s.infinite_field = false;
    } else {
      throw ConfigError("field 'field': expected q (a power of two) or \"infinite\"");
    }
  }
  if (j.contains("infinite_field")) s.infinite_field = get_field<bool>(j, "infinite_field");

  if (j.contains("networks")) {
    s.networks.clear();
    const auto& nets = j.at("networks");
    if (!nets.is_array()) throw ConfigError("field 'networks': expected a list");
    for (std::size_t i = 0; i < nets.size(); ++i) {
      s.networks.push_back(detail::parse_network(nets[i], "networks[" + std::to_string(i) + "]"));
    }
  } else if (j.contains("hops") || j.contains("delta")) {
    // Shorthand: cross product of hop counts and uniform erasure rates.
    const auto hops = j.contains("hops") ? detail::parse_n_values(j.at("hops"), "hops")
                                         : std::vector<std::size_t>{2};
    std::vector<double> deltas{0.05};
    if (j.contains("delta")) {
      const auto& d = j.at("delta");
      deltas = d.is_array() ? get_field<std::vector<double>>(j, "delta") : std::vector<double>{get_field<double>(j, "delta")};
    }
    s.networks.clear();
    for (std::size_t h : hops) {
      for (double d : deltas) {
        try {
          s.networks.push_back(LineNetwork::uniform(h, d));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("field 'hops'/'delta': ") + e.what());
        }
      }
    }
  }
  if (j.contains("N")) s.n_values = detail::parse_n_values(j.at("N"), "N");
  if (j.contains("K")) s.k_values = detail::parse_n_values(j.at("K"), "K");
  if (j.contains("targets")) {
    const auto& t = j.at("targets");
    s.targets = t.is_array() ? get_field<std::vector<double>>(j, "targets") : std::vector<double>{get_field<double>(j, "targets")};
  }
  if (j.contains("methods")) s.methods = get_field<std::vector<std::string>>(j, "methods");
  if (j.contains("method")) s.methods = {get_field<std::string>(j, "method")};
  if (j.contains("trials")) s.trials = get_field<std::size_t>(j, "trials");
  if (j.contains("seed")) s.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("swnc_groups")) s.swnc_groups = get_field<std::size_t>(j, "swnc_groups");
  if (j.contains("warmup_groups")) s.warmup_groups = get_field<std::size_t>(j, "warmup_groups");
  if (j.contains("decoding_window")) s.decoding_window = get_field<std::size_t>(j, "decoding_window");
  if (j.contains("N1")) s.n1 = get_field<std::size_t>(j, "N1");
  if (j.contains("N2")) s.n2 = get_field<std::size_t>(j, "N2");
  if (j.contains("jobs")) s.jobs = get_field<unsigned>(j, "jobs");
  if (j.contains("output")) s.output = get_field<std::string>(j, "output");
}

inline Scenario parse_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Scenario s;
  s.seed = default_seed();
  apply_json(s, j);
  return s;
}

// FNV-1a over the canonical JSON form of the scenario.
inline std::uint64_t config_hash(const Scenario& s) {
  const std::string text = s.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ncrate::cli
