// Encoders, per-hop re-encoders and decoders for the four coding schemes.
//
// Block schemes (RLNC, SNC, SNC-S) are simulated one generation at a time;
// SWNC is simulated as a stream of groups with a sliding encoding window at
// the source and a sliding decoding window at the destination.
//
// Timing model. SNC, SNC-S and SWNC relays work cut-through: in slot t a relay
// first receives the upstream slot-t packet, then transmits its own slot-t
// packet. RLNC relays store a complete generation and then send N fresh
// combinations of it (generation g goes out while g + 1 comes in).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ncrate/gf.hpp"
#include "ncrate/linalg.hpp"
#include "ncrate/network.hpp"

namespace ncrate {

enum class Scheme { rlnc, snc, snc_s, swnc };

inline std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::rlnc: return "RLNC";
    case Scheme::snc: return "SNC";
    case Scheme::snc_s: return "SNC-S";
    case Scheme::swnc: return "SWNC";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  if (name == "RLNC" || name == "rlnc") return Scheme::rlnc;
  if (name == "SNC" || name == "snc") return Scheme::snc;
  if (name == "SNC-S" || name == "SNC_S" || name == "snc-s" || name == "snc_s") return Scheme::snc_s;
  if (name == "SWNC" || name == "swnc") return Scheme::swnc;
  return std::nullopt;
}

inline bool is_systematic(Scheme s) noexcept { return s != Scheme::rlnc; }

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CodeSpec {
  Scheme scheme = Scheme::rlnc;
  // Generation size K, or the encoding window w_e for SWNC.
  std::size_t k = 1;
  // Blocklength N in timeslots (per window cycle of two groups for SWNC).
  std::size_t n = 1;
  // SWNC decoding window w_d in packets; 0 selects w_d = w_e.
  std::size_t decoding_window = 0;
  const GfField* field = &GfField::standard(8);

  static CodeSpec make(Scheme scheme, std::size_t k, std::size_t n, const GfField& field = GfField::standard(8),
                       std::size_t decoding_window = 0) {
    CodeSpec s{scheme, k, n, decoding_window, &field};
    s.validate();
    return s;
  }

  double rate() const noexcept { return static_cast<double>(k) / static_cast<double>(n); }

  // Coded packets per half cycle (SNC-S, SWNC).
  std::size_t coded_per_half() const noexcept { return (n - k) / 2; }

  // Information packets per SWNC group (K_s = w_e / 2).
  std::size_t group_size() const noexcept { return scheme == Scheme::swnc ? k / 2 : k; }

  // Slots per node per report: a generation, or one SWNC group.
  std::size_t slots_per_report() const noexcept {
    return scheme == Scheme::swnc ? group_size() + coded_per_half() : n;
  }

  std::size_t effective_decoding_window() const noexcept { return decoding_window == 0 ? k : decoding_window; }

  void validate() const {
    if (field == nullptr) throw SpecError("code spec: no field configured");
    if (n < 1) throw SpecError("code spec: blocklength N must be >= 1");
    const std::string name(to_string(scheme));
    if (k < 1 || k > n) {
      throw SpecError(name + ": need 1 <= " + (scheme == Scheme::swnc ? "w_e" : "K") + " <= N (got " +
                      std::to_string(k) + ", N=" + std::to_string(n) + ")");
    }
    if (scheme == Scheme::snc_s) {
      if (k % 2 != 0) throw SpecError("SNC-S: K must be even (got K=" + std::to_string(k) + ")");
      if ((n - k) % 2 != 0) {
        throw SpecError("SNC-S: N - K must be even so that N = K + 2*n_c (got K=" + std::to_string(k) +
                        ", N=" + std::to_string(n) + ")");
      }
    }
    if (scheme == Scheme::swnc) {
      if (k % 2 != 0) throw SpecError("SWNC: w_e must be even (got w_e=" + std::to_string(k) + ")");
      if ((n - k) % 2 != 0) {
        throw SpecError("SWNC: N - w_e must be even so that N = w_e + 2*n_c (got w_e=" + std::to_string(k) +
                        ", N=" + std::to_string(n) + ")");
      }
      if (decoding_window != 0 && decoding_window < k) {
        throw SpecError("SWNC: decoding window w_d must be >= w_e (got w_d=" + std::to_string(decoding_window) +
                        ", w_e=" + std::to_string(k) + ")");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Schedules

enum class SlotKind { systematic, coded };

struct Slot {
  SlotKind kind = SlotKind::systematic;
  // Information packet sent in a systematic slot (global sequence number).
  std::size_t packet = 0;
  // Packets a source-coded slot combines, [span_begin, span_end).
  std::size_t span_begin = 0;
  std::size_t span_end = 0;
  // Packets a relay may recombine in this slot, [recode_begin, recode_end).
  std::size_t recode_begin = 0;
  std::size_t recode_end = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

using TransmitSchedule = std::vector<Slot>;

namespace detail {

inline Slot systematic_slot(std::size_t packet, std::size_t lo, std::size_t hi) {
  return Slot{SlotKind::systematic, packet, 0, 0, lo, hi};
}

inline Slot coded_slot(std::size_t span_lo, std::size_t span_hi, std::size_t lo, std::size_t hi) {
  return Slot{SlotKind::coded, 0, span_lo, span_hi, lo, hi};
}

// Recode range of SWNC group x (1-based).
inline std::pair<std::size_t, std::size_t> swnc_range(std::size_t group_size, std::size_t x) {
  if (x == 1) return {0, group_size};
  return {(x - 2) * group_size, x * group_size};
}

}  // namespace detail

// Per-node transmit schedule of one generation, or of SWNC group `group`
// (1-based, global sequence numbers).
inline TransmitSchedule transmit_schedule(const CodeSpec& spec, std::size_t group = 1) {
  spec.validate();
  const std::size_t k = spec.k;
  TransmitSchedule s;
  s.reserve(spec.slots_per_report());
  switch (spec.scheme) {
    case Scheme::rlnc:
      for (std::size_t t = 0; t < spec.n; ++t) s.push_back(detail::coded_slot(0, k, 0, k));
      break;
    case Scheme::snc:
      for (std::size_t i = 0; i < k; ++i) s.push_back(detail::systematic_slot(i, 0, k));
      for (std::size_t t = k; t < spec.n; ++t) s.push_back(detail::coded_slot(0, k, 0, k));
      break;
    case Scheme::snc_s: {
      const std::size_t half = k / 2;
      const std::size_t nc = spec.coded_per_half();
      for (std::size_t i = 0; i < half; ++i) s.push_back(detail::systematic_slot(i, 0, k));
      for (std::size_t j = 0; j < nc; ++j) s.push_back(detail::coded_slot(0, half, 0, k));
      for (std::size_t i = half; i < k; ++i) s.push_back(detail::systematic_slot(i, 0, k));
      for (std::size_t j = 0; j < nc; ++j) s.push_back(detail::coded_slot(0, k, 0, k));
      break;
    }
    case Scheme::swnc: {
      if (group < 1) throw SpecError("SWNC: group numbers start at 1");
      const std::size_t ks = spec.group_size();
      const auto [lo, hi] = detail::swnc_range(ks, group);
      for (std::size_t i = 0; i < ks; ++i) s.push_back(detail::systematic_slot((group - 1) * ks + i, lo, hi));
      for (std::size_t j = 0; j < spec.coded_per_half(); ++j) s.push_back(detail::coded_slot(lo, hi, lo, hi));
      break;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Generator matrices

namespace detail {

constexpr std::uint64_t kSourceNode = 0;

// Global slot index of slot `t` of SWNC group x (or of a block generation).
inline std::uint64_t global_slot(const CodeSpec& spec, std::size_t group, std::size_t t) {
  return static_cast<std::uint64_t>(group - 1) * spec.slots_per_report() + t;
}

}  // namespace detail

// Generator of one generation: K x N for block schemes with systematic columns
// as unit vectors. For SWNC, the w_e x n_c matrix of group `group`; row i is
// window position i, i.e. packet (group - 2) * K_s + i (rows of packets before
// the stream start are zero).
inline GfMatrix build_generator(const CodeSpec& spec, const RngStream& stream, std::size_t group = 1) {
  const TransmitSchedule schedule = transmit_schedule(spec, group);
  const GfField& f = *spec.field;
  if (spec.scheme == Scheme::swnc) {
    const std::size_t ks = spec.group_size();
    const std::size_t nc = spec.coded_per_half();
    GfMatrix g(f, spec.k, nc);
    for (std::size_t j = 0; j < nc; ++j) {
      const Slot& slot = schedule[ks + j];
      auto draws = stream.symbols(f, detail::kSourceNode, detail::global_slot(spec, group, ks + j));
      for (std::size_t p = slot.span_begin; p < slot.span_end; ++p) {
        g(p + 2 * ks - group * ks, j) = draws.next();
      }
    }
    return g;
  }
  GfMatrix g(f, spec.k, spec.n);
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    const Slot& slot = schedule[t];
    if (slot.kind == SlotKind::systematic) {
      g(slot.packet, t) = 1;
      continue;
    }
    auto draws = stream.symbols(f, detail::kSourceNode, detail::global_slot(spec, 1, t));
    for (std::size_t p = slot.span_begin; p < slot.span_end; ++p) g(p, t) = draws.next();
  }
  return g;
}

// ---------------------------------------------------------------------------
// Simulation

struct DeliveryReport {
  // Generation index, or SWNC group number (1-based).
  std::size_t id = 0;
  std::size_t offered = 0;
  std::size_t decoded_count = 0;
  std::vector<bool> decoded;
  // Rank of the destination decoder when the report was closed.
  std::size_t destination_rank = 0;
  // Per transmitting node (source first): slots used, and slots that carried
  // a nonzero coefficient vector.
  std::vector<std::size_t> sent;
  std::vector<std::size_t> useful;

  bool all_decoded() const noexcept { return decoded_count == offered; }
};

namespace detail {

// Coefficient vector over packets [base, base + coeffs.size()).
struct Packet {
  std::size_t base = 0;
  std::vector<Symbol> coeffs;
  bool information = false;  // unmodified systematic packet

  std::size_t end() const noexcept { return base + coeffs.size(); }
};

inline bool is_zero(std::span<const Symbol> v) noexcept {
  for (Symbol s : v)
    if (s != 0) return false;
  return true;
}

// Support bounds of a packet's nonzero coefficients.
struct Support {
  std::size_t lo;
  std::size_t hi;
};

inline Support support(const Packet& p) noexcept {
  std::size_t lo = 0;
  while (lo < p.coeffs.size() && p.coeffs[lo] == 0) ++lo;
  std::size_t hi = p.coeffs.size();
  while (hi > lo && p.coeffs[hi - 1] == 0) --hi;
  return {p.base + lo, p.base + hi};
}

using SlotTraffic = std::vector<std::optional<Packet>>;

struct BufferedPacket {
  Packet packet;
  Support span;
};

// Random combination of the buffered packets whose support lies in
// [lo, hi). Returns nothing when no packet qualifies or the draw is zero.
inline std::optional<Packet> recombine(const GfField& f, const std::vector<BufferedPacket>& buffer, std::size_t lo,
                                       std::size_t hi, SymbolDraws draws) {
  Packet out{lo, std::vector<Symbol>(hi - lo, 0), false};
  bool any = false;
  for (const auto& b : buffer) {
    if (b.span.lo < lo || b.span.hi > hi) continue;
    any = true;
    const Symbol c = draws.next();
    if (c == 0) continue;
    const std::size_t from = b.span.lo;
    const std::size_t to = b.span.hi;
    f.axpy(std::span<Symbol>(out.coeffs).subspan(from - lo, to - from), c,
           std::span<const Symbol>(b.packet.coeffs).subspan(from - b.packet.base, to - from));
  }
  if (!any || is_zero(out.coeffs)) return std::nullopt;
  return out;
}

// Cut-through relay for the systematic schemes. Returns the relay's
// transmissions for every slot of `schedule` (global slot offset `slot0`).
inline SlotTraffic relay_systematic(const CodeSpec& spec, std::span<const Slot> schedule, std::uint64_t slot0,
                                    const SlotTraffic& received, std::uint64_t node, const RngStream& stream,
                                    std::vector<BufferedPacket>& buffer) {
  const GfField& f = *spec.field;
  SlotTraffic out(schedule.size());
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    const Slot& slot = schedule[t];
    // Drop entries that start before the recode range.
    std::erase_if(buffer, [&](const BufferedPacket& b) { return b.span.lo < slot.recode_begin; });

    const auto& in = received[t];
    if (in) buffer.push_back(BufferedPacket{*in, support(*in)});

    bool forward = false;
    if (in) {
      if (slot.kind == SlotKind::systematic) {
        forward = in->information;
      } else {
        forward = spec.scheme == Scheme::snc_s;
      }
    }
    if (forward) {
      out[t] = *in;
    } else {
      out[t] = recombine(f, buffer, slot.recode_begin, slot.recode_end, stream.symbols(f, node, slot0 + t));
    }
  }
  return out;
}

inline SlotTraffic source_traffic(const CodeSpec& spec, std::span<const Slot> schedule, std::uint64_t slot0,
                                  const RngStream& stream) {
  const GfField& f = *spec.field;
  SlotTraffic out(schedule.size());
  for (std::size_t t = 0; t < schedule.size(); ++t) {
    const Slot& slot = schedule[t];
    if (slot.kind == SlotKind::systematic) {
      Packet p{slot.packet, {1}, true};
      out[t] = std::move(p);
      continue;
    }
    Packet p{slot.span_begin, std::vector<Symbol>(slot.span_end - slot.span_begin), false};
    auto draws = stream.symbols(f, kSourceNode, slot0 + t);
    for (auto& c : p.coeffs) c = draws.next();
    if (!is_zero(p.coeffs)) out[t] = std::move(p);
  }
  return out;
}

inline SlotTraffic transmit_over(const LineNetwork& net, std::size_t link, std::uint64_t slot0,
                                 const SlotTraffic& sent, const RngStream& stream) {
  SlotTraffic out(sent.size());
  for (std::size_t t = 0; t < sent.size(); ++t) {
    if (sent[t] && !net.erased(link, slot0 + t, stream)) out[t] = sent[t];
  }
  return out;
}

inline std::size_t count_useful(const SlotTraffic& traffic) {
  std::size_t n = 0;
  for (const auto& p : traffic)
    if (p) ++n;
  return n;
}

inline std::vector<Symbol> dense(const Packet& p, std::size_t unknowns) {
  std::vector<Symbol> v(unknowns, 0);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) v[p.base + i] = p.coeffs[i];
  return v;
}

// RLNC relay: N fresh combinations of everything received for the generation.
inline SlotTraffic relay_rlnc(const CodeSpec& spec, const SlotTraffic& received, std::uint64_t node,
                              const RngStream& stream) {
  std::vector<BufferedPacket> buffer;
  for (const auto& p : received)
    if (p) buffer.push_back(BufferedPacket{*p, Support{0, spec.k}});
  SlotTraffic out(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) {
    out[t] = recombine(*spec.field, buffer, 0, spec.k, stream.symbols(*spec.field, node, t));
  }
  return out;
}

}  // namespace detail

// One generation of a block scheme (RLNC, SNC, SNC-S) through every hop.
inline DeliveryReport run_generation(const CodeSpec& spec, const LineNetwork& net, const RngStream& stream) {
  spec.validate();
  if (spec.scheme == Scheme::swnc) throw SpecError("run_generation: SWNC is simulated with run_stream_swnc");
  const TransmitSchedule schedule = transmit_schedule(spec);

  DeliveryReport report;
  report.offered = spec.k;

  detail::SlotTraffic sent = detail::source_traffic(spec, schedule, 0, stream);
  for (std::size_t link = 0; link < net.hops(); ++link) {
    report.sent.push_back(spec.n);
    report.useful.push_back(detail::count_useful(sent));
    detail::SlotTraffic received = detail::transmit_over(net, link, 0, sent, stream);
    if (link + 1 == net.hops()) {
      ProgressiveDecoder decoder(*spec.field, spec.k);
      for (const auto& p : received) {
        if (p) decoder.ingest(detail::dense(*p, spec.k));
      }
      report.decoded = decoder.decoded_mask();
      report.decoded_count = decoder.decoded_count();
      report.destination_rank = decoder.rank();
      break;
    }
    const std::uint64_t node = link + 1;
    if (spec.scheme == Scheme::rlnc) {
      sent = detail::relay_rlnc(spec, received, node, stream);
    } else {
      std::vector<detail::BufferedPacket> buffer;
      sent = detail::relay_systematic(spec, schedule, 0, received, node, stream, buffer);
    }
  }
  return report;
}

// A stream of `groups` SWNC groups. One report per group; a packet's decoded
// flag is fixed when its group leaves the decoding window, or at stream end.
inline std::vector<DeliveryReport> run_stream_swnc(const CodeSpec& spec, const LineNetwork& net, std::size_t groups,
                                                   const RngStream& stream) {
  spec.validate();
  if (spec.scheme != Scheme::swnc) throw SpecError("run_stream_swnc: scheme must be SWNC");
  if (groups < 1) throw SpecError("run_stream_swnc: need at least one group");

  const std::size_t ks = spec.group_size();
  const std::size_t per_group = spec.slots_per_report();
  const std::size_t window_groups = spec.effective_decoding_window() / ks;

  TransmitSchedule schedule;
  schedule.reserve(groups * per_group);
  for (std::size_t x = 1; x <= groups; ++x) {
    const TransmitSchedule g = transmit_schedule(spec, x);
    schedule.insert(schedule.end(), g.begin(), g.end());
  }

  std::vector<DeliveryReport> reports(groups);
  for (std::size_t x = 0; x < groups; ++x) {
    reports[x].id = x + 1;
    reports[x].offered = ks;
  }

  detail::SlotTraffic sent = detail::source_traffic(spec, schedule, 0, stream);
  for (std::size_t link = 0; link < net.hops(); ++link) {
    for (std::size_t x = 0; x < groups; ++x) {
      std::size_t useful = 0;
      for (std::size_t t = x * per_group; t < (x + 1) * per_group; ++t)
        if (sent[t]) ++useful;
      reports[x].sent.push_back(per_group);
      reports[x].useful.push_back(useful);
    }
    detail::SlotTraffic received = detail::transmit_over(net, link, 0, sent, stream);
    if (link + 1 < net.hops()) {
      std::vector<detail::BufferedPacket> buffer;
      sent = detail::relay_systematic(spec, schedule, 0, received, link + 1, stream, buffer);
      continue;
    }

    // Destination: decoding window over whole groups, oldest first.
    ProgressiveDecoder decoder(*spec.field, 0);
    std::size_t first_group = 1;  // oldest group in the window
    auto close_oldest = [&] {
      DeliveryReport& r = reports[first_group - 1];
      r.decoded.assign(decoder.decoded_mask().begin(), decoder.decoded_mask().begin() + static_cast<long>(ks));
      r.decoded_count = static_cast<std::size_t>(std::count(r.decoded.begin(), r.decoded.end(), true));
      r.destination_rank = decoder.rank();
      std::vector<std::size_t> drop(ks);
      for (std::size_t i = 0; i < ks; ++i) drop[i] = i;
      decoder = decoder.project(drop);
      ++first_group;
    };
    for (std::size_t x = 1; x <= groups; ++x) {
      if (x - first_group + 1 > window_groups) close_oldest();
      decoder.append_unknowns(ks);
      const std::size_t window_begin = (first_group - 1) * ks;
      for (std::size_t t = (x - 1) * per_group; t < x * per_group; ++t) {
        const auto& p = received[t];
        if (!p) continue;
        const detail::Support s = detail::support(*p);
        if (s.lo < window_begin) continue;  // touches expired unknowns
        std::vector<Symbol> row(decoder.unknown_count(), 0);
        for (std::size_t g = s.lo; g < s.hi; ++g) row[g - window_begin] = p->coeffs[g - p->base];
        decoder.ingest(row);
      }
    }
    while (first_group <= groups) close_oldest();
  }
  return reports;
}

}  // namespace ncrate
