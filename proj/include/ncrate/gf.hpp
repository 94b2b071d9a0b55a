// Arithmetic over GF(2^m) with log/antilog tables.
//
// Elements are 16-bit symbols; one field type covers degrees 1 to 16. Tables are built once per field object and
// never mutated afterwards.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncrate {

using Symbol = std::uint16_t;

class GfField {
 public:
  static constexpr unsigned kMaxDegree = 16;

  // Primitive polynomials, indexed by degree. Index 0 is unused.
  static constexpr std::array<std::uint32_t, kMaxDegree + 1> kDefaultPolynomials = {
      0x0,    0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,    0x11D,
      0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

  GfField(unsigned degree, std::uint32_t polynomial) : degree_(degree), polynomial_(polynomial) {
    if (degree < 1 || degree > kMaxDegree) {
      throw std::invalid_argument("GF(2^m): degree must be in [1, 16], got " + std::to_string(degree));
    }
    if ((polynomial >> degree) != 1u) {
      throw std::invalid_argument("GF(2^m): reduction polynomial must have degree exactly m");
    }
    order_ = 1u << degree;
    const std::uint32_t group = order_ - 1;
    log_.assign(order_, 0);
    exp_.assign(2 * static_cast<std::size_t>(group), 0);

    std::uint32_t v = 1;
    for (std::uint32_t i = 0; i < group; ++i) {
      if (i > 0 && v == 1) {
        throw std::invalid_argument("GF(2^m): reduction polynomial is not primitive");
      }
      exp_[i] = static_cast<Symbol>(v);
      exp_[i + group] = static_cast<Symbol>(v);
      log_[v] = static_cast<Symbol>(i);
      v <<= 1;
      if (v & order_) v ^= polynomial;
    }
    if (v != 1) {
      throw std::invalid_argument("GF(2^m): reduction polynomial is not primitive");
    }

    // Full product table for m <= 8.
    if (degree <= 8) {
      product_.assign(static_cast<std::size_t>(order_) * order_, 0);
      for (std::uint32_t a = 1; a < order_; ++a) {
        for (std::uint32_t b = 1; b < order_; ++b) {
          product_[a * order_ + b] = exp_[log_[a] + log_[b]];
        }
      }
    }
  }

  explicit GfField(unsigned degree = 8)
      : GfField(degree, degree >= 1 && degree <= kMaxDegree ? kDefaultPolynomials[degree] : 0) {}

  // Shared immutable instance with the default polynomial for `degree`.
  static const GfField& standard(unsigned degree) {
    if (degree < 1 || degree > kMaxDegree) {
      throw std::invalid_argument("GF(2^m): degree must be in [1, 16], got " + std::to_string(degree));
    }
    static const std::vector<GfField> fields = [] {
      std::vector<GfField> out;
      out.reserve(kMaxDegree);
      for (unsigned m = 1; m <= kMaxDegree; ++m) out.emplace_back(m);
      return out;
    }();
    return fields[degree - 1];
  }

  unsigned degree() const noexcept { return degree_; }
  std::uint32_t polynomial() const noexcept { return polynomial_; }
  std::uint32_t size() const noexcept { return order_; }
  bool contains(std::uint32_t value) const noexcept { return value < order_; }

  Symbol add(Symbol a, Symbol b) const noexcept { return static_cast<Symbol>(a ^ b); }
  Symbol sub(Symbol a, Symbol b) const noexcept { return static_cast<Symbol>(a ^ b); }

  Symbol mul(Symbol a, Symbol b) const noexcept {
    if (a == 0 || b == 0) return 0;
    if (!product_.empty()) return product_[static_cast<std::size_t>(a) * order_ + b];
    return exp_[static_cast<std::size_t>(log_[a]) + log_[b]];
  }

  Symbol inv(Symbol a) const {
    if (a == 0) throw std::domain_error("GF(2^m): zero has no multiplicative inverse");
    const std::uint32_t group = order_ - 1;
    return exp_[(group - log_[a]) % group];
  }

  Symbol div(Symbol a, Symbol b) const { return mul(a, inv(b)); }

  // y += c * x
  void axpy(std::span<Symbol> y, Symbol c, std::span<const Symbol> x) const noexcept {
    if (c == 0) return;
    const std::size_t n = y.size() < x.size() ? y.size() : x.size();
    if (c == 1) {
      for (std::size_t i = 0; i < n; ++i) y[i] ^= x[i];
      return;
    }
    if (!product_.empty()) {
      const Symbol* row = product_.data() + static_cast<std::size_t>(c) * order_;
      for (std::size_t i = 0; i < n; ++i) y[i] ^= row[x[i]];
      return;
    }
    const std::size_t lc = log_[c];
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] != 0) y[i] ^= exp_[lc + log_[x[i]]];
    }
  }

  // y *= c
  void scale(std::span<Symbol> y, Symbol c) const noexcept {
    if (c == 1) return;
    for (auto& v : y) v = mul(v, c);
  }

 private:
  unsigned degree_;
  std::uint32_t polynomial_;
  std::uint32_t order_ = 0;
  std::vector<Symbol> log_;
  std::vector<Symbol> exp_;
  std::vector<Symbol> product_;
};

}  // namespace ncrate
