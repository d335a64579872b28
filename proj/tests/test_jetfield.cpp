#include <random>

#include "doctest.h"
#include "sugra/config.hpp"
#include "sugra/jetfield.hpp"

using namespace sugra;

namespace {
const GammaRep& rep() {
  static GammaRep r = build_gamma_rep();
  return r;
}
const std::vector<int> kOddPool{1, 2, 3, 4, 5};
const std::vector<int> kEvenPool{6, 7, 8, 9, 10, 11};

Field lam_const(int a) {
  Field f(1, 1, 2);
  JetKey k;
  k.lam_mask = std::uint8_t(1) << a;
  f.add_term(k, Grassmann(grat(1)));
  return f;
}
}  // namespace

TEST_CASE("product respects total-parity supercommutativity and associativity") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> deg(0, 2), par(0, 1);
  for (int it = 0; it < 25; ++it) {
    int ia = deg(rng), ja = deg(rng), pa = par(rng);
    int ib = deg(rng), jb = deg(rng), pb = par(rng);
    Field a = sample_form_field(ia, ja, pa, kOddPool, rng, 1);
    Field b = sample_form_field(ib, jb, pb, kOddPool, rng, 1);
    int ta = (pa + ia + ja) & 1, tb = (pb + ib + jb) & 1;
    Field ba = mul(b, a);
    Field comm = mul(a, b) - ((ta && tb) ? ba.scaled(rat(-1)) : ba);
    CHECK(comm.is_zero());
    Field c = sample_form_field(deg(rng), deg(rng), 0, kEvenPool, rng, 1);
    CHECK((mul(mul(a, b), c) - mul(a, mul(b, c))).is_zero());
  }
}

TEST_CASE("exterior derivative: squares to zero and graded Leibniz") {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> deg(0, 2), par(0, 1);
  for (int it = 0; it < 10; ++it) {
    int ia = deg(rng), ja = deg(rng), pa = par(rng);
    Field a = sample_form_field(ia, ja, pa, kOddPool, rng, 2);
    CHECK(jet_d(jet_d(a)).is_zero());
    Field b = sample_form_field(deg(rng), deg(rng), par(rng), kEvenPool, rng, 2);
    int ta = (pa + ia + ja) & 1;
    Field adb = mul(a, jet_d(b));
    Field leib = jet_d(mul(a, b)) - mul(jet_d(a), b) - (ta ? adb.scaled(rat(-1)) : adb);
    CHECK(leib.is_zero());
  }
}

TEST_CASE("Leibniz rule on jets: frozen example") {
  // f = 2 + 3 x0 + x0 x1,  g = x1:   d(fg) coefficient bookkeeping.
  Field f(1, 1, 2), g(1, 1, 2);
  JetKey k;
  f.add_term(k, Grassmann(grat(2)));
  k.deriv = {1, 0, 0, 0};
  f.add_term(k, Grassmann(grat(3)));
  k.deriv = {1, 1, 0, 0};
  f.add_term(k, Grassmann(grat(1)));
  k.deriv = {0, 1, 0, 0};
  g.add_term(k, Grassmann(grat(1)));

  Field prod = mul(f, g);
  JetKey q;  // (fg) vanishes at the point
  CHECK(prod.coefficient(q).is_zero());
  q.deriv = {0, 1, 0, 0};  // d/dx1 (fg) = f at the point
  CHECK(q.deriv == std::array<std::uint8_t, 4>{0, 1, 0, 0});
  CHECK(prod.coefficient(q) == Grassmann(grat(2)));
  q.deriv = {1, 1, 0, 0};  // d2/dx0dx1 (fg) = f_{01} g_1 + f_0 g_1 = 3 (order 2 jet)
  CHECK(prod.coefficient(q) == Grassmann(grat(3)));
}

TEST_CASE("frame inversion round-trips") {
  std::mt19937_64 rng(103);
  BVConfig cfg = sample_config(rep(), 7);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Field acc;
      for (int a = 0; a < 4; ++a) acc += mul(cfg.einv[mu][a], cfg.frame[a][nu]);
      Field expect;
      if (mu == nu) expect = Field::scalar_constant(Grassmann(grat(1)));
      CHECK(acc == expect);
    }
}

TEST_CASE("coframe bracket with the canonical endomorphism") {
  BVConfig cfg = sample_config(rep(), 11);
  Field lhs = eta_bracket(cfg.e, gamma_field(rep()));
  // expected: gamma_a e^a_mu dx^mu
  Field rhs(4, 4, cfg.jet_order);
  for (int mu = 0; mu < 4; ++mu)
    for (int a = 0; a < 4; ++a)
      for (const auto& [k, g] : cfg.frame[a][mu].terms())
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) {
            if (rep().gamma[a](r, c).is_zero()) continue;
            JetKey nk = k;
            nk.form_mask = std::uint8_t(1) << mu;
            nk.row = std::uint8_t(r);
            nk.col = std::uint8_t(c);
            rhs.add_term(nk, rep().gamma[a](r, c) * g);
          }
  CHECK(lhs == rhs);
  CHECK(lhs == cfg.gamma_und);
}

TEST_CASE("v-contraction recursion on powers of the canonical endomorphism") {
  Field gam = gamma_field(rep());
  for (int N = 1; N <= 4; ++N)
    for (int a = 0; a < 4; ++a) {
      Field va = lam_const(a);
      Field lhs = eta_bracket(va, gamma_wedge_field(rep(), N));
      Field rhs =
          mul(eta_bracket(va, gam), gamma_wedge_field(rep(), N - 1)).scaled(rat(N));
      if (N >= 2)
        rhs += mul(va, gamma_wedge_field(rep(), N - 2)).scaled(rat(N * (N - 1)));
      CHECK((lhs - rhs).is_zero());
    }
}

TEST_CASE("spin action matches the v-bracket identity") {
  std::mt19937_64 rng(104);
  Field gam = gamma_field(rep());
  Field gam3 = gamma_wedge_field(rep(), 3);
  for (int it = 0; it < 5; ++it) {
    Field alpha = sample_form_field(0, 2, 0, kEvenPool, rng, 2);
    Field psi = sample_spinor_form(rep(), 0, 1, kOddPool, rng, 2);
    Field chib = bar_field(rep(), sample_spinor_form(rep(), 0, 1, kOddPool, rng, 2));
    Field lhs = mul(chib, mul(gam3, rep_action(rep(), alpha, psi)));
    Field rhs = mul(mul(chib, mul(gam, psi)), alpha).scaled(rat(3)) +
                mul(chib, mul(eta_bracket(alpha, gam3), psi)).scaled(rat(1, 2));
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("curvature: Bianchi identity and squared covariant derivative") {
  std::mt19937_64 rng(105);
  for (int it = 0; it < 3; ++it) {
    Field omega = sample_form_field(1, 2, 0, kEvenPool, rng, 2);
    Field f = curvature(omega);
    CHECK((jet_d(f) + eta_bracket(omega, f).truncate_jet(0)).is_zero());

    Field psi = sample_spinor_form(rep(), 1, 1, kOddPool, rng, 2);
    Field dd = covariant_d(rep(), omega, covariant_d(rep(), omega, psi));
    CHECK((dd - rep_action(rep(), f, psi).truncate_jet(0)).is_zero());

    Field x = sample_form_field(1, 1, 1, kOddPool, rng, 2);
    Field dd2 = covariant_d(rep(), omega, covariant_d(rep(), omega, x));
    CHECK((dd2 - eta_bracket(f, x).truncate_jet(0)).is_zero());
  }
}

TEST_CASE("vector contraction is a derivation of the expected parity") {
  std::mt19937_64 rng(106);
  std::uniform_int_distribution<int> deg(0, 2), par(0, 1);
  std::array<Field, 4> xi, zeta;
  for (int mu = 0; mu < 4; ++mu) {
    xi[mu] = sample_scalar_jet(1, kEvenPool, rng, 2);
    zeta[mu] = sample_scalar_jet(0, kEvenPool, rng, 2);
  }
  for (int it = 0; it < 8; ++it) {
    int ia = deg(rng), ja = deg(rng), pa = par(rng);
    Field a = sample_form_field(ia, ja, pa, kOddPool, rng, 1);
    Field b = sample_form_field(deg(rng), deg(rng), par(rng), kEvenPool, rng, 1);
    int ta = (pa + ia + ja) & 1;

    // odd coefficients give an even (unsigned) contraction operator
    Field lhs = iota_vector(xi, 1, mul(a, b));
    Field rhs = mul(iota_vector(xi, 1, a), b) + mul(a, iota_vector(xi, 1, b));
    CHECK((lhs - rhs).is_zero());

    // even coefficients give an odd derivation
    Field lhs2 = iota_vector(zeta, 0, mul(a, b));
    Field aib = mul(a, iota_vector(zeta, 0, b));
    Field rhs2 = mul(iota_vector(zeta, 0, a), b) + (ta ? aib.scaled(rat(-1)) : aib);
    CHECK((lhs2 - rhs2).is_zero());
  }
}

TEST_CASE("matrix-vector contraction and coframe pairing on the coframe") {
  BVConfig cfg = sample_config(rep(), 23);
  CHECK((iota_gamma_hat(rep(), cfg.einv, cfg.e) - gamma_field(rep())).is_zero());
  CHECK(e_pair(cfg.einv, cfg.e).is_zero());
}

TEST_CASE("coframe pairing inverts the coframe bracket on twisted derivatives") {
  std::mt19937_64 rng(107);
  BVConfig cfg = sample_config(rep(), 31);
  Field dpsi = covariant_d(rep(), cfg.omega, cfg.psi);
  Field lhs = eta_bracket(cfg.e, e_pair(cfg.einv, dpsi));
  CHECK((lhs - dpsi.scaled(rat(2))).is_zero());
}

TEST_CASE("epsilon split reconstructs the field") {
  std::mt19937_64 rng(108);
  Field a = sample_form_field(1, 1, 1, kOddPool, rng, 2);
  Field shift = sample_form_field(1, 1, 0, kEvenPool, rng, 2);
  Field eps = Field::scalar_constant(Grassmann::generator(kEpsilonGenerator));
  Field total = a + mul(eps, shift);
  CHECK(total.epsilon_free_part() == a);
  CHECK((total.epsilon_linear_part() - shift).is_zero());
}
