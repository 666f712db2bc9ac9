#include <vector>

#include "codemin/error.hpp"
#include "codemin/finite_field.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace codemin;

TEST_SUITE("finite_field") {

TEST_CASE("multiplication matches polynomial arithmetic") {
  for (int m = 1; m <= 8; ++m) {
    const GaloisField f(m);
    CHECK(f.order() == (1u << m));
    for (std::uint32_t a = 0; a < f.order(); ++a) {
      for (std::uint32_t b = 0; b < f.order(); ++b) {
        REQUIRE(f.mul(a, b) == oracle::gf_mul(a, b, f.polynomial(), m));
      }
    }
  }
  Rng rng(1);
  for (int m : {9, 12, 15, 16}) {
    const GaloisField f(m);
    for (int i = 0; i < 20000; ++i) {
      const auto a = f.random_element(rng);
      const auto b = f.random_element(rng);
      REQUIRE(f.mul(a, b) == oracle::gf_mul(a, b, f.polynomial(), m));
    }
  }
}

TEST_CASE("reduction polynomials are primitive") {
  for (int m = 2; m <= 16; ++m) {
    const std::uint32_t poly = GaloisField::reduction_polynomial(m);
    CHECK((poly >> m) == 1u);
    // x generates the whole multiplicative group
    std::uint32_t x = 1;
    std::uint32_t order = 0;
    do {
      x = oracle::gf_mul(x, 2, poly, m);
      ++order;
    } while (x != 1 && order <= (1u << m));
    CHECK(order == (1u << m) - 1);
  }
}

TEST_CASE("field axioms and inverses") {
  const GaloisField f(16);
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const auto a = f.random_element(rng, true);
    const auto b = f.random_element(rng);
    const auto c = f.random_element(rng);
    CHECK(f.mul(a, f.inv(a)) == 1);
    CHECK(f.div(f.mul(a, b), a) == b);
    CHECK(f.mul(a, GaloisField::add(b, c)) == GaloisField::add(f.mul(a, b), f.mul(a, c)));
  }
  CHECK_THROWS_AS(f.inv(0), Error);
  CHECK_THROWS_AS(GaloisField(0), Error);
  CHECK_THROWS_AS(GaloisField(17), Error);
}

TEST_CASE("random elements are uniform") {
  const GaloisField f(4);
  Rng rng(9);
  std::vector<long> counts(16, 0), nonzero(15, 0);
  for (int i = 0; i < 160000; ++i) ++counts[f.random_element(rng)];
  for (int i = 0; i < 150000; ++i) {
    const auto x = f.random_element(rng, true);
    REQUIRE(x != 0);
    ++nonzero[x - 1];
  }
  CHECK(oracle::chi_square_uniform(counts) < oracle::chi_square_critical(15));
  CHECK(oracle::chi_square_uniform(nonzero) < oracle::chi_square_critical(14));
}

TEST_CASE("rank matches exhaustive search over small fields") {
  Rng rng(4);
  for (int m : {1, 2, 3}) {
    const GaloisField f(m);
    for (int trial = 0; trial < 150; ++trial) {
      const int rows = 1 + static_cast<int>(rng.below(4));
      const int cols = 1 + static_cast<int>(rng.below(3));
      FieldMatrix mat(rows, cols);
      std::vector<std::vector<std::uint32_t>> plain(rows, std::vector<std::uint32_t>(cols));
      std::vector<FieldElement> flat;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          // sparse entries make dependent rows common
          const auto x = rng.below(3) == 0 ? FieldElement{0} : f.random_element(rng);
          mat.at(r, c) = x;
          plain[r][c] = x;
          flat.push_back(x);
        }
      }
      const int expect = oracle::brute_rank(plain, f.polynomial(), m);
      CHECK(rank(mat, f) == expect);
      CHECK(rank_of_rows(flat, rows, cols, f) == expect);
      CHECK(rank_of_rows(flat, rows, cols, f, 1) == std::min(expect, 1));
    }
  }
}

TEST_CASE("matrix product and rank bounds") {
  const GaloisField f(8);
  Rng rng(6);
  FieldMatrix a(3, 4), b(4, 2);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) a.at(r, c) = f.random_element(rng);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 2; ++c) b.at(r, c) = f.random_element(rng);
  const FieldMatrix p = a.multiply(b, f);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) {
      FieldElement acc = 0;
      for (int k = 0; k < 4; ++k) acc ^= oracle::gf_mul(a.at(r, k), b.at(k, c), f.polynomial(), 8);
      CHECK(p.at(r, c) == acc);
    }
  }
  CHECK(rank(p, f) <= std::min(rank(a, f), rank(b, f)));

  FieldMatrix id(3, 3);
  for (int i = 0; i < 3; ++i) id.at(i, i) = 1;
  CHECK(rank(id, f) == 3);
  CHECK(rank(FieldMatrix(2, 5), f) == 0);
}

}  // TEST_SUITE
