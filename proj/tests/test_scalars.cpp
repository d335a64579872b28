#include <random>

#include "doctest.h"
#include "sugra/grassmann.hpp"
#include "sugra/rational.hpp"

using namespace sugra;

namespace {

Grassmann random_element(std::mt19937_64& rng, int n_gens, int max_terms) {
  std::uniform_int_distribution<int> mask_dist(0, (1 << n_gens) - 1);
  std::uniform_int_distribution<long> coef_dist(-4, 4);
  Grassmann g;
  for (int t = 0; t < max_terms; ++t) {
    GaussianRational c(rat(coef_dist(rng), 1 + std::abs(coef_dist(rng))),
                       rat(coef_dist(rng), 1 + std::abs(coef_dist(rng))));
    g += Grassmann::monomial(GrassmannMask(mask_dist(rng)), c);
  }
  return g;
}

Grassmann random_homogeneous(std::mt19937_64& rng, int n_gens, int parity, int max_terms) {
  std::uniform_int_distribution<int> mask_dist(0, (1 << n_gens) - 1);
  std::uniform_int_distribution<long> coef_dist(-4, 4);
  Grassmann g;
  for (int t = 0; t < max_terms; ++t) {
    GrassmannMask m = GrassmannMask(mask_dist(rng));
    if ((std::popcount(unsigned(m)) & 1) != parity) continue;
    g += Grassmann::monomial(m, GaussianRational(rat(coef_dist(rng))));
  }
  return g;
}

}  // namespace

TEST_CASE("gaussian rational field arithmetic") {
  GaussianRational i = GaussianRational::unit_i();
  CHECK(i * i == grat(-1));
  GaussianRational z(rat(3, 4), rat(-2, 5));
  CHECK(z * z.inverse() == grat(1));
  CHECK(z.conj().conj() == z);
  CHECK((z * z.conj()).is_real());
  CHECK_THROWS_AS(GaussianRational().inverse(), std::domain_error);
}

TEST_CASE("generators anticommute and square to zero") {
  Grassmann t1 = Grassmann::generator(1);
  Grassmann t2 = Grassmann::generator(2);
  CHECK(t1 * t1 == Grassmann());
  CHECK(t1 * t2 == -(t2 * t1));
  CHECK((t1 * t2) * t1 == Grassmann());
}

TEST_CASE("supercommutativity from parity") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 50; ++it) {
    for (int pa = 0; pa < 2; ++pa) {
      for (int pb = 0; pb < 2; ++pb) {
        Grassmann a = random_homogeneous(rng, 8, pa, 5);
        Grassmann b = random_homogeneous(rng, 8, pb, 5);
        Grassmann ab = a * b;
        Grassmann ba = b * a;
        if (pa == 1 && pb == 1)
          CHECK(ab == -ba);
        else
          CHECK(ab == ba);
      }
    }
  }
}

TEST_CASE("odd elements square to zero") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 30; ++it) {
    Grassmann a = random_homogeneous(rng, 10, 1, 6);
    CHECK(a * a == Grassmann());
  }
}

TEST_CASE("associativity and distributivity") {
  std::mt19937_64 rng(13);
  for (int it = 0; it < 40; ++it) {
    Grassmann a = random_element(rng, 8, 4);
    Grassmann b = random_element(rng, 8, 4);
    Grassmann c = random_element(rng, 8, 4);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
  }
}

TEST_CASE("graded star is an anti-involution with i* = -i") {
  Grassmann t1 = Grassmann::generator(1);
  Grassmann t2 = Grassmann::generator(2);
  CHECK((t1 * t2).star() == t2 * t1);
  Grassmann zi = Grassmann::monomial(0, GaussianRational::unit_i());
  CHECK(zi.star() == -zi);
  std::mt19937_64 rng(17);
  for (int it = 0; it < 40; ++it) {
    Grassmann a = random_element(rng, 8, 4);
    Grassmann b = random_element(rng, 8, 4);
    CHECK(a.star().star() == a);
    CHECK((a * b).star() == b.star() * a.star());
  }
}

TEST_CASE("inverse: frozen example") {
  // x = 2 + t1 t2 has inverse 1/2 - (1/4) t1 t2.
  Grassmann x = Grassmann(grat(2)) + Grassmann::generator(1) * Grassmann::generator(2);
  Grassmann expected =
      Grassmann(grat(1, 2)) + Grassmann::generator(1) * Grassmann::generator(2) * grat(-1, 4);
  CHECK(x.inverse() == expected);
  CHECK(x * x.inverse() == Grassmann(grat(1)));
}

TEST_CASE("inverse: random invertible elements round-trip") {
  std::mt19937_64 rng(19);
  for (int it = 0; it < 25; ++it) {
    Grassmann a = random_element(rng, 9, 6);
    Grassmann x = Grassmann(grat(3, 2)) + a.soul();
    CHECK(x * x.inverse() == Grassmann(grat(1)));
    CHECK(x.inverse() * x == Grassmann(grat(1)));
  }
}

TEST_CASE("inverse requires nonzero body") {
  Grassmann x = Grassmann::generator(1) + Grassmann::generator(2) * Grassmann::generator(3);
  CHECK_THROWS_AS(x.inverse(), std::domain_error);
}

TEST_CASE("epsilon linear part extraction") {
  Grassmann eps = Grassmann::generator(kEpsilonGenerator);
  Grassmann t1 = Grassmann::generator(1);
  Grassmann t2 = Grassmann::generator(2);
  Grassmann t3 = Grassmann::generator(3);
  Grassmann x = Grassmann(grat(3)) + eps * (t1 * grat(2)) + t2 * t3;
  CHECK(x.epsilon_linear_part() == t1 * grat(2));
  CHECK(x.epsilon_free_part() == Grassmann(grat(3)) + t2 * t3);
  // x = free + eps*linear reconstructs.
  CHECK(x.epsilon_free_part() + eps * x.epsilon_linear_part() == x);

  std::mt19937_64 rng(23);
  for (int it = 0; it < 30; ++it) {
    Grassmann a = random_element(rng, 8, 6);
    CHECK(a.epsilon_free_part() + eps * a.epsilon_linear_part() == a);
  }
}

TEST_CASE("parity and homogeneity") {
  Grassmann even = Grassmann(grat(2)) + Grassmann::generator(1) * Grassmann::generator(2);
  Grassmann odd = Grassmann::generator(3);
  CHECK(even.parity() == 0);
  CHECK(odd.parity() == 1);
  CHECK_FALSE((even + odd).is_homogeneous());
  CHECK_THROWS_AS((even + odd).parity(), std::domain_error);
}
