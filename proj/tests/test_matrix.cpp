#include <random>

#include "doctest.h"
#include "sugra/matrix.hpp"

using namespace sugra;

namespace {

QMat random_qmat(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_int_distribution<long> d(-5, 5);
  QMat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = GaussianRational(rat(d(rng)), rat(d(rng)));
  return m;
}

}  // namespace

TEST_CASE("rank of frozen matrices") {
  QMat m(3, 3);
  // Rows: (1,2,3), (2,4,6), (0,1,1) -> rank 2.
  long vals[3][3] = {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = grat(vals[r][c]);
  CHECK(m.rank() == 2);
  CHECK(QMat::identity(5).rank() == 5);
  CHECK(QMat(4, 7).rank() == 0);
}

TEST_CASE("nullspace vectors are annihilated and count matches rank") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 20; ++it) {
    QMat m = random_qmat(rng, 4, 6);
    auto basis = m.nullspace();
    CHECK(int(basis.size()) == 6 - m.rank());
    for (const auto& v : basis) {
      for (int r = 0; r < m.rows(); ++r) {
        GaussianRational acc;
        for (int c = 0; c < m.cols(); ++c) acc += m(r, c) * v[c];
        CHECK(acc.is_zero());
      }
    }
  }
}

TEST_CASE("inverse round-trips") {
  std::mt19937_64 rng(103);
  int found = 0;
  for (int it = 0; it < 20 && found < 10; ++it) {
    QMat m = random_qmat(rng, 4, 4);
    auto inv = m.inverse();
    if (!inv) continue;
    ++found;
    CHECK(*inv * m == QMat::identity(4));
    CHECK(m * *inv == QMat::identity(4));
  }
  CHECK(found >= 5);
}

TEST_CASE("solve on consistent and inconsistent systems") {
  QMat m(2, 2);
  m(0, 0) = grat(1);
  m(0, 1) = grat(2);
  m(1, 0) = grat(2);
  m(1, 1) = grat(4);
  // Consistent: b in column span.
  auto x = m.solve({grat(3), grat(6)});
  REQUIRE(x.has_value());
  CHECK((*x)[0] + (*x)[1] * grat(2) == grat(3));
  // Inconsistent.
  CHECK_FALSE(m.solve({grat(1), grat(0)}).has_value());
}

TEST_CASE("grassmann matrix inverse with nilpotent perturbation") {
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<long> d(-3, 3);
  std::uniform_int_distribution<int> pick(1, 9);
  for (int it = 0; it < 8; ++it) {
    int n = 4;
    QMat body = random_qmat(rng, n, n);
    if (!body.inverse()) continue;
    GMat m = GMat::lift(body);
    // Even-parity soul entries.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        int i = pick(rng), j = pick(rng);
        if (i == j) continue;
        m(r, c) += Grassmann::generator(i) * Grassmann::generator(j) * grat(d(rng));
      }
    auto inv = m.inverse();
    REQUIRE(inv.has_value());
    GMat prod = *inv * m;
    GMat diff = prod - GMat::identity(n);
    CHECK(diff.is_zero());
  }
}

TEST_CASE("grassmann solve") {
  GMat m = GMat::identity(3);
  m(0, 1) = Grassmann::generator(1) * Grassmann::generator(2);
  m(2, 2) = Grassmann(grat(2)) + Grassmann::generator(3) * Grassmann::generator(4);
  std::vector<Grassmann> y = {Grassmann(grat(1)), Grassmann::generator(5),
                              Grassmann(grat(4))};
  auto x = m.solve(y);
  // Verify m * x == y.
  for (int r = 0; r < 3; ++r) {
    Grassmann acc;
    for (int c = 0; c < 3; ++c) acc += m(r, c) * x[c];
    CHECK(acc == y[r]);
  }
}
