// Line network of memoryless erasure links and counter-based random streams.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncrate/gf.hpp"

namespace ncrate {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_words(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                          std::uint64_t c, std::uint64_t d) noexcept {
  std::uint64_t h = splitmix64(seed ^ 0x6A09E667F3BCC908ull);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x3C6EF372FE94F82Bull));
  h = splitmix64(h ^ (c + 0xA54FF53A5F1D36F1ull));
  h = splitmix64(h ^ (d + 0x510E527FADE682D1ull));
  return h;
}

}  // namespace detail

// What a draw is used for. Part of the stream key.
enum class StreamPurpose : std::uint64_t {
  erasure = 1,
  coefficients = 2,
};

// Uniform symbols from one (seed, trial, purpose, index, slot) key.
class SymbolDraws {
 public:
  SymbolDraws(std::uint64_t state, std::uint32_t field_size) noexcept
      : state_(state), mask_(field_size - 1) {}

  Symbol next() noexcept {
    if (bits_left_ < 16) {
      buffer_ = detail::splitmix64(state_++);
      bits_left_ = 64;
    }
    const auto s = static_cast<Symbol>(buffer_ & mask_);
    buffer_ >>= 16;
    bits_left_ -= 16;
    return s;
  }

 private:
  std::uint64_t state_;
  std::uint64_t buffer_ = 0;
  unsigned bits_left_ = 0;
  std::uint32_t mask_;
};

// Random stream of one Monte Carlo trial. Every draw is a pure function of
// (seed, trial, purpose, index, slot).
class RngStream {
 public:
  constexpr RngStream(std::uint64_t seed, std::uint64_t trial) noexcept : seed_(seed), trial_(trial) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t trial() const noexcept { return trial_; }

  constexpr std::uint64_t key(StreamPurpose purpose, std::uint64_t index, std::uint64_t slot) const noexcept {
    return detail::hash_words(seed_, trial_, static_cast<std::uint64_t>(purpose), index, slot);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(StreamPurpose purpose, std::uint64_t index, std::uint64_t slot) const noexcept {
    return static_cast<double>(key(purpose, index, slot) >> 11) * 0x1.0p-53;
  }

  SymbolDraws symbols(const GfField& field, std::uint64_t node, std::uint64_t slot) const noexcept {
    return {key(StreamPurpose::coefficients, node, slot), field.size()};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t trial_;
};

class LineNetwork {
 public:
  explicit LineNetwork(std::vector<double> erasure_probs) : erasure_(std::move(erasure_probs)) {
    if (erasure_.empty()) throw std::invalid_argument("line network needs at least one link");
    for (std::size_t i = 0; i < erasure_.size(); ++i) {
      const double d = erasure_[i];
      if (!(d >= 0.0 && d < 1.0)) {
        throw std::invalid_argument("link " + std::to_string(i + 1) + ": erasure probability must be in [0, 1), got " +
                                    std::to_string(d));
      }
    }
  }

  static LineNetwork uniform(std::size_t hops, double delta) {
    return LineNetwork(std::vector<double>(hops, delta));
  }

  std::size_t hops() const noexcept { return erasure_.size(); }
  std::size_t node_count() const noexcept { return erasure_.size() + 1; }
  double erasure(std::size_t link) const { return erasure_.at(link); }
  const std::vector<double>& erasure_probs() const noexcept { return erasure_; }

  // Capacity of the line: min over links of (1 - delta_i).
  double min_cut() const noexcept {
    return 1.0 - *std::max_element(erasure_.begin(), erasure_.end());
  }

  // Links are numbered from 0 (source -> first relay).
  bool erased(std::size_t link, std::uint64_t slot, const RngStream& stream) const {
    const double d = erasure_.at(link);
    if (d <= 0.0) return false;
    return stream.uniform(StreamPurpose::erasure, link, slot) < d;
  }

  friend bool operator==(const LineNetwork&, const LineNetwork&) = default;

 private:
  std::vector<double> erasure_;
};

}  // namespace ncrate
