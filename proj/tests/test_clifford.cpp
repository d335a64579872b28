#include <random>

#include "doctest.h"
#include "sugra/clifford.hpp"

using namespace sugra;

namespace {
const GammaRep& rep() {
  static GammaRep r = build_gamma_rep();
  return r;
}
const std::vector<int> kOddPool{1, 2, 3, 4, 5};
const std::vector<int> kGhostPool{6, 7, 8};
}  // namespace

TEST_CASE("anticommutator table and squares") {
  // {g_a, g_b} = -2 eta_ab enforced at construction; spot-check squares.
  CHECK(rep().gamma[0] * rep().gamma[0] == QMat::identity(4));
  CHECK(rep().gamma[1] * rep().gamma[1] == grat(-1) * QMat::identity(4));
  CHECK(rep().gamma[2] * rep().gamma[2] == grat(-1) * QMat::identity(4));
  CHECK(rep().gamma[3] * rep().gamma[3] == grat(-1) * QMat::identity(4));
}

TEST_CASE("charge conjugation: frozen solved matrix") {
  // The null-space solve is unique up to scale; the normalized result is a
  // regression constant of the representation.
  QMat expected(4, 4);
  expected(0, 3) = grat(-1);
  expected(1, 2) = grat(1);
  expected(2, 1) = grat(-1);
  expected(3, 0) = grat(1);
  CHECK(rep().C == expected);
  // Antisymmetry and the symmetric rank-1 combination.
  CHECK((rep().C.transpose() + rep().C).is_zero());
  for (int a = 0; a < 4; ++a) {
    QMat cg = rep().C * rep().gamma[a];
    CHECK(cg.transpose() == cg);
  }
}

TEST_CASE("antisymmetrized gamma") {
  CHECK(antisymmetrized_gamma(rep(), {0, 0}).is_zero());
  CHECK(antisymmetrized_gamma(rep(), {0, 1}) == rep().gamma[0] * rep().gamma[1]);
  QMat g0123 = rep().gamma[0] * rep().gamma[1] * rep().gamma[2] * rep().gamma[3];
  CHECK(antisymmetrized_gamma(rep(), {0, 1, 2, 3}) == g0123);
  CHECK(g0123 == (-GaussianRational::unit_i()) * rep().gamma5);
}

TEST_CASE("gamma identity suite is exact") {
  for (const auto& r : check_gamma_identities(rep())) {
    INFO(r.check_id << " " << r.witness);
    CHECK(r.exact_zero);
  }
}

TEST_CASE("majorana sampling: constraint, parity, determinism") {
  std::mt19937_64 rng1(99), rng2(99);
  for (int parity = 0; parity < 2; ++parity) {
    GSpinor a = majorana_sample(rep(), parity, kOddPool, rng1);
    GSpinor b = majorana_sample(rep(), parity, kOddPool, rng2);
    CHECK(is_majorana(rep(), a));
    for (int i = 0; i < 4; ++i) {
      CHECK(a[i] == b[i]);  // determinism
      CHECK(a[i].is_homogeneous());
      if (!a[i].is_zero()) CHECK(a[i].parity() == parity);
    }
  }
  GSpinor ghost = majorana_sample_nilpotent_even(rep(), kGhostPool, rng1);
  CHECK(is_majorana(rep(), ghost));
  for (int i = 0; i < 4; ++i) CHECK(ghost[i].body().is_zero());
}

TEST_CASE("majorana projector is idempotent") {
  std::mt19937_64 rng(17);
  GSpinor mu = majorana_sample(rep(), 1, kOddPool, rng);
  // Perturb away from the constraint and re-project.
  mu[0] += Grassmann::generator(2) * GaussianRational::unit_i();
  GSpinor p1 = majorana_project(rep(), mu);
  GSpinor p2 = majorana_project(rep(), p1);
  CHECK(is_majorana(rep(), p1));
  for (int i = 0; i < 4; ++i) CHECK(p1[i] == p2[i]);
}

TEST_CASE("flip relations for all ranks and parity patterns") {
  std::mt19937_64 rng(2024);
  for (int N = 0; N <= 3; ++N)
    for (int p1 = 0; p1 < 2; ++p1)
      for (int p2 = 0; p2 < 2; ++p2)
        for (int rep_count = 0; rep_count < 12; ++rep_count) {
          GSpinor psi = majorana_sample(rep(), p1, kOddPool, rng);
          GSpinor chi = majorana_sample(rep(), p2, kOddPool, rng);
          Grassmann res = check_flip(rep(), N, psi, p1, chi, p2);
          INFO("N=" << N << " parities " << p1 << p2);
          CHECK(res.is_zero());
        }
}

TEST_CASE("flip rejects non-majorana input") {
  std::mt19937_64 rng(5);
  GSpinor psi = majorana_sample(rep(), 1, kOddPool, rng);
  GSpinor bad = psi;
  bad[1] += Grassmann::generator(3) * GaussianRational::unit_i();
  if (is_majorana(rep(), bad)) return;  // vanishingly unlikely
  CHECK_THROWS_AS(check_flip(rep(), 1, bad, 1, psi, 1), std::invalid_argument);
}

TEST_CASE("flip of zero spinor") {
  GSpinor zero{};
  std::mt19937_64 rng(6);
  GSpinor chi = majorana_sample(rep(), 0, kOddPool, rng);
  CHECK(check_flip(rep(), 2, zero, 1, chi, 0).is_zero());
}

TEST_CASE("fierz suite over all parity quadruples") {
  std::mt19937_64 rng(31337);
  for (int pat = 0; pat < 16; ++pat) {
    std::array<int, 4> p{pat & 1, (pat >> 1) & 1, (pat >> 2) & 1, (pat >> 3) & 1};
    for (int rep_count = 0; rep_count < 3; ++rep_count) {
      std::array<GSpinor, 4> l;
      for (int i = 0; i < 4; ++i) l[i] = majorana_sample(rep(), p[i], kOddPool, rng);
      for (const auto& r : check_fierz(rep(), l, p)) {
        INFO(r.check_id << " pattern " << pat);
        CHECK(r.exact_zero);
      }
    }
  }
}

TEST_CASE("quartic vanishing identities need a nilpotent even spinor") {
  std::mt19937_64 rng(271828);
  for (int it = 0; it < 10; ++it) {
    int pl = it & 1;
    GSpinor lam = majorana_sample(rep(), pl, kOddPool, rng);
    GSpinor chi = majorana_sample_nilpotent_even(rep(), kGhostPool, rng);
    GSpinor psi = majorana_sample(rep(), 1, kOddPool, rng);
    for (const auto& r : check_fierz_lemma(rep(), lam, pl, chi, psi)) {
      INFO(r.check_id);
      CHECK(r.exact_zero);
    }
  }
  // Negative control: a bodied even spinor breaks the identities.
  GSpinor lam = majorana_sample(rep(), 0, kOddPool, rng);
  GSpinor chi = majorana_sample(rep(), 0, kGhostPool, rng);
  GSpinor psi = majorana_sample(rep(), 1, kOddPool, rng);
  bool all_zero = true;
  for (const auto& r : check_fierz_lemma(rep(), lam, 0, chi, psi)) all_zero &= r.exact_zero;
  CHECK_FALSE(all_zero);
}
