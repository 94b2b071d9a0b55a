// Dense matrices over GF(2^m) and the progressive Gauss-Jordan decoder.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncrate/gf.hpp"

namespace ncrate {

class GfMatrix {
 public:
  GfMatrix(const GfField& field, std::size_t rows, std::size_t cols)
      : field_(&field), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

  static GfMatrix identity(const GfField& field, std::size_t n) {
    GfMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  const GfField& field() const noexcept { return *field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Symbol& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  Symbol operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<Symbol> row(std::size_t r) { return {entries_.data() + r * cols_, cols_}; }
  std::span<const Symbol> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }

  std::vector<Symbol> column(std::size_t c) const {
    std::vector<Symbol> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  GfMatrix transposed() const {
    GfMatrix t(*field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const GfMatrix& a, const GfMatrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  const GfField* field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Symbol> entries_;
};

// Row rank by forward elimination on a copy.
inline std::size_t rank(const GfMatrix& m) {
  const GfField& f = m.field();
  GfMatrix work = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < work.cols() && r < work.rows(); ++c) {
    std::size_t pivot = r;
    while (pivot < work.rows() && work(pivot, c) == 0) ++pivot;
    if (pivot == work.rows()) continue;
    if (pivot != r) std::swap_ranges(work.row(pivot).begin(), work.row(pivot).end(), work.row(r).begin());
    const Symbol inv = f.inv(work(r, c));
    for (std::size_t i = r + 1; i < work.rows(); ++i) {
      if (work(i, c) != 0) f.axpy(work.row(i), f.mul(work(i, c), inv), work.row(r));
    }
    ++r;
  }
  return r;
}

struct IngestOutcome {
  bool innovative = false;
  std::vector<std::size_t> newly_decoded;
};

// Received coefficient rows in reduced row-echelon form. An unknown is
// reported decoded on the first ingest that isolates it.
class ProgressiveDecoder {
 public:
  ProgressiveDecoder(const GfField& field, std::size_t unknowns)
      : field_(&field), unknowns_(unknowns), decoded_(unknowns, false) {}

  const GfField& field() const noexcept { return *field_; }
  std::size_t unknown_count() const noexcept { return unknowns_; }
  std::size_t rank() const noexcept { return rows_.size(); }
  bool complete() const noexcept { return rows_.size() == unknowns_; }
  bool decoded(std::size_t unknown) const { return decoded_.at(unknown); }
  const std::vector<bool>& decoded_mask() const noexcept { return decoded_; }
  std::size_t decoded_count() const noexcept { return decoded_count_; }

  // Stored rows in reduced row-echelon form.
  std::vector<std::vector<Symbol>> rows() const {
    std::vector<std::vector<Symbol>> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.coeffs);
    return out;
  }

  IngestOutcome ingest(std::span<const Symbol> coeffs) {
    if (coeffs.size() != unknowns_) {
      throw std::invalid_argument("decoder ingest: row has " + std::to_string(coeffs.size()) +
                                  " coefficients, expected " + std::to_string(unknowns_));
    }
    IngestOutcome out;
    if (complete()) return out;

    std::vector<Symbol> r(coeffs.begin(), coeffs.end());
    for (const auto& s : rows_) {
      if (r[s.pivot] != 0) field_->axpy(r, r[s.pivot], s.coeffs);
    }
    std::size_t pivot = 0;
    while (pivot < unknowns_ && r[pivot] == 0) ++pivot;
    if (pivot == unknowns_) return out;

    field_->scale(r, field_->inv(r[pivot]));
    for (auto& s : rows_) {
      if (s.coeffs[pivot] != 0) {
        field_->axpy(s.coeffs, s.coeffs[pivot], r);
        s.weight = weight(s.coeffs);
        if (s.weight == 1) mark_decoded(s.pivot, out);
      }
    }
    rows_.push_back(Row{std::move(r), pivot, 0});
    rows_.back().weight = weight(rows_.back().coeffs);
    if (rows_.back().weight == 1) mark_decoded(pivot, out);

    out.innovative = true;
    std::sort(out.newly_decoded.begin(), out.newly_decoded.end());
    return out;
  }

  // Decoder over the unknowns not in `drop`, kept in ascending order. Only
  // equations that can be combined to be free of every dropped unknown survive.
  ProgressiveDecoder project(std::span<const std::size_t> drop) const {
    std::vector<bool> dropped(unknowns_, false);
    for (std::size_t d : drop) {
      if (d >= unknowns_) throw std::out_of_range("decoder project: unknown index out of range");
      dropped[d] = true;
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < unknowns_; ++i)
      if (!dropped[i]) keep.push_back(i);

    std::vector<std::vector<Symbol>> work = rows();
    for (std::size_t c = 0; c < unknowns_; ++c) {
      if (!dropped[c]) continue;
      auto it = std::find_if(work.begin(), work.end(), [c](const auto& w) { return w[c] != 0; });
      if (it == work.end()) continue;
      std::vector<Symbol> eliminator = std::move(*it);
      work.erase(it);
      const Symbol inv = field_->inv(eliminator[c]);
      for (auto& w : work) {
        if (w[c] != 0) field_->axpy(w, field_->mul(w[c], inv), eliminator);
      }
    }

    ProgressiveDecoder out(*field_, keep.size());
    std::vector<Symbol> compact(keep.size());
    for (const auto& w : work) {
      for (std::size_t i = 0; i < keep.size(); ++i) compact[i] = w[keep[i]];
      out.ingest(compact);
    }
    return out;
  }

  // Adds `count` fresh unknowns after the existing ones.
  void append_unknowns(std::size_t count) {
    unknowns_ += count;
    for (auto& r : rows_) r.coeffs.resize(unknowns_, 0);
    decoded_.resize(unknowns_, false);
  }

 private:
  struct Row {
    std::vector<Symbol> coeffs;
    std::size_t pivot;
    std::size_t weight;
  };

  static std::size_t weight(const std::vector<Symbol>& v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](Symbol s) { return s != 0; }));
  }

  void mark_decoded(std::size_t unknown, IngestOutcome& out) {
    if (decoded_[unknown]) return;
    decoded_[unknown] = true;
    ++decoded_count_;
    out.newly_decoded.push_back(unknown);
  }

  const GfField* field_;
  std::size_t unknowns_;
  std::vector<Row> rows_;
  std::vector<bool> decoded_;
  std::size_t decoded_count_ = 0;
};

}  // namespace ncrate
