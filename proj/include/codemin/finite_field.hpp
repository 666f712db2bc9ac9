#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "codemin/rng.hpp"

namespace codemin {

using FieldElement = std::uint16_t;

/// GF(2^m) for 1 <= m <= 16, built from a fixed primitive reduction
/// polynomial per m (see reduction_polynomial). Log/antilog tables make
/// multiplication and inversion O(1). Immutable after construction.
class GaloisField {
 public:
  explicit GaloisField(int bits);

  int bits() const { return bits_; }
  std::uint32_t order() const { return order_; }
  std::uint32_t polynomial() const { return poly_; }

  static FieldElement add(FieldElement a, FieldElement b) { return a ^ b; }
  FieldElement mul(FieldElement a, FieldElement b) const {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  FieldElement inv(FieldElement a) const;  // throws Error(Invalid) on 0
  FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

  /// Uniform over the whole field, or over its nonzero elements.
  FieldElement random_element(Rng& rng, bool nonzero_only = false) const {
    if (nonzero_only) return static_cast<FieldElement>(1 + rng.below(order_ - 1));
    return static_cast<FieldElement>(rng.below(order_));
  }

  /// Primitive polynomial used for GF(2^bits), including the x^bits term.
  static std::uint32_t reduction_polynomial(int bits);

 private:
  int bits_;
  std::uint32_t order_;
  std::uint32_t poly_;
  std::vector<FieldElement> exp_;  // doubled so log a + log b needs no reduction
  std::vector<std::uint32_t> log_;
};

/// Dense row-major matrix over a GaloisField.
class FieldMatrix {
 public:
  FieldMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  FieldElement& at(int r, int c) { return data_[r * cols_ + c]; }
  FieldElement at(int r, int c) const { return data_[r * cols_ + c]; }
  std::span<FieldElement> row(int r) { return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)}; }
  std::span<const FieldElement> row(int r) const {
    return {data_.data() + r * cols_, static_cast<std::size_t>(cols_)};
  }

  FieldMatrix multiply(const FieldMatrix& other, const GaloisField& f) const;

 private:
  int rows_, cols_;
  std::vector<FieldElement> data_;
};

/// Rank by Gaussian elimination; the argument is taken by value and reduced
/// in place.
int rank(FieldMatrix m, const GaloisField& f);

/// Rank of `rows` vectors of length `cols` stored contiguously. Stops early
/// once `target` independent rows are found.
int rank_of_rows(std::span<const FieldElement> data, int rows, int cols, const GaloisField& f,
                 int target = -1);

}  // namespace codemin
