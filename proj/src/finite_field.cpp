#include "codemin/finite_field.hpp"

#include <algorithm>
#include <string>

#include "codemin/error.hpp"

namespace codemin {

std::uint32_t GaloisField::reduction_polynomial(int bits) {
  // x^m + ... ; every entry is primitive, checked when the tables are built
  static constexpr std::uint32_t kPoly[17] = {
      0,      0x3,    0x7,    0xB,    0x13,   0x25,   0x43,   0x89,   0x11D,
      0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
  };
  if (bits < 1 || bits > 16) {
    throw Error(ErrorKind::Invalid, "field size 2^" + std::to_string(bits) + " outside 2^1..2^16");
  }
  return kPoly[bits];
}

GaloisField::GaloisField(int bits)
    : bits_(bits), order_(1u << bits), poly_(reduction_polynomial(bits)) {
  exp_.assign(2 * order_, 0);
  log_.assign(order_, 0);
  std::uint32_t x = 1;
  for (std::uint32_t i = 0; i < order_ - 1; ++i) {
    if (i > 0 && x == 1) {
      throw Error(ErrorKind::Internal, "reduction polynomial for 2^" + std::to_string(bits) +
                                           " is not primitive");
    }
    exp_[i] = static_cast<FieldElement>(x);
    log_[x] = i;
    x <<= 1;
    if (x & order_) x ^= poly_;
  }
  for (std::uint32_t i = order_ - 1; i < 2 * order_; ++i) exp_[i] = exp_[i - (order_ - 1)];
}

FieldElement GaloisField::inv(FieldElement a) const {
  if (a == 0) throw Error(ErrorKind::Invalid, "inverse of zero");
  return exp_[(order_ - 1 - log_[a]) % (order_ - 1)];
}

FieldMatrix FieldMatrix::multiply(const FieldMatrix& other, const GaloisField& f) const {
  FieldMatrix out(rows_, other.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const FieldElement a = at(i, k);
      if (a == 0) continue;
      for (int j = 0; j < other.cols_; ++j) out.at(i, j) ^= f.mul(a, other.at(k, j));
    }
  return out;
}

int rank_of_rows(std::span<const FieldElement> data, int rows, int cols, const GaloisField& f,
                 int target) {
  std::vector<FieldElement> m(data.begin(), data.begin() + static_cast<std::size_t>(rows) * cols);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pivot = -1;
    for (int i = r; i < rows; ++i) {
      if (m[i * cols + c] != 0) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != r) {
      std::swap_ranges(m.begin() + pivot * cols, m.begin() + (pivot + 1) * cols, m.begin() + r * cols);
    }
    const FieldElement inv = f.inv(m[r * cols + c]);
    for (int j = c; j < cols; ++j) m[r * cols + j] = f.mul(m[r * cols + j], inv);
    for (int i = r + 1; i < rows; ++i) {
      const FieldElement factor = m[i * cols + c];
      if (factor == 0) continue;
      for (int j = c; j < cols; ++j) m[i * cols + j] ^= f.mul(factor, m[r * cols + j]);
    }
    ++r;
    if (r == target) break;
  }
  return r;
}

int rank(FieldMatrix m, const GaloisField& f) {
  std::vector<FieldElement> flat;
  flat.reserve(static_cast<std::size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return rank_of_rows(flat, m.rows(), m.cols(), f);
}

}  // namespace codemin
