#include "doctest.h"
#include "sugra/bv.hpp"

using namespace sugra;

namespace {

const GammaRep& rep() {
  static GammaRep r = build_gamma_rep();
  return r;
}

BVConfig cfg_at(std::uint64_t seed, int jet_order = 2) {
  SamplerOptions opt;
  opt.jet_order = jet_order;
  return sample_config(rep(), seed, opt);
}

BVConfig pure_gravity_at(std::uint64_t seed, int jet_order = 2) {
  SamplerOptions opt;
  opt.jet_order = jet_order;
  return sample_config_pure_gravity(rep(), seed, opt);
}

void check_zero(const char* name, const Field& f) {
  INFO(first_witness(name, f));
  CHECK(f.is_zero());
}

}  // namespace

TEST_CASE("classical density matches the brute-force component oracle") {
  for (std::uint64_t seed : {101ull, 102ull}) {
    BVConfig g = pure_gravity_at(seed, 1);
    check_zero("oracle-pure", lagrangian_density(rep(), g) - lagrangian_density_oracle(rep(), g));
    BVConfig c = cfg_at(seed, 1);
    check_zero("oracle-full", lagrangian_density(rep(), c) - lagrangian_density_oracle(rep(), c));
  }
}

TEST_CASE("gravitino equation reduces through the top multivector") {
  for (std::uint64_t seed : {111ull, 112ull})
    check_zero("psi-reduction", eom_psi_reduced_residual(rep(), cfg_at(seed, 1)));
}

TEST_CASE("first variation splits into bulk equations and an exact boundary term") {
  std::mt19937_64 rng(2024);
  for (std::uint64_t seed : {121ull, 122ull}) {
    BVConfig c = cfg_at(seed, 2);
    Field de = sample_form_field(1, 1, 0, SamplerOptions{}.fermion_pool, rng, 2);
    Field dw = sample_form_field(1, 2, 1, SamplerOptions{}.fermion_pool, rng, 2);
    Field dp = sample_spinor_form(rep(), 1, 1, SamplerOptions{}.fermion_pool, rng, 2);
    check_zero("variational", variational_residual(rep(), c, de, dw, dp));
  }
}

TEST_CASE("connection variation solve agrees with its closed form") {
  for (std::uint64_t seed : {131ull, 132ull}) {
    BVConfig c = cfg_at(seed, 1);
    Field dco = delta_chi_omega(rep(), c);
    check_zero("dco-closed", dco - delta_chi_omega_closed(rep(), c));
    check_zero("dco-e-bracket", eta_bracket(c.e, dco) - e_bracket_dco_closed(rep(), c));
    check_zero("dco-chi-bracket", rep_action(rep(), dco, c.chi) - dco_chi_bracket_closed(rep(), c));
  }
}

TEST_CASE("contraction by the bracketed vector reduces to covariant pieces") {
  // (1/2) iota_[xi,xi] A = -(1/2) iota iota dA + iota d iota A - (1/2) d iota iota A
  for (std::uint64_t seed : {141ull}) {
    BVConfig c = cfg_at(seed, 2);
    Field A = c.omega;
    std::array<Field, 4> brk;
    {
      BVConfig tmp = c;
      for (int m = 0; m < 4; ++m) {
        Field acc(1, 1, 1);
        for (int n = 0; n < 4; ++n) {
          Field dn(1, 1, 1);
          for (const auto& [k, g] : c.xi[m].terms())
            if (k.deriv[n] > 0) {
              JetKey nk = k;
              nk.deriv[n] = std::uint8_t(nk.deriv[n] - 1);
              if (nk.deriv_order() <= 1) dn.add_term(nk, g);
            }
          acc += mul(c.xi[n], dn);
        }
        brk[m] = acc;
      }
      (void)tmp;
    }
    auto ixi = [&](const Field& x) { return iota_vector(c.xi, 1, x); };
    auto dw = [&](const Field& x) { return covariant_d(rep(), c.omega, x); };
    Field lhs = iota_vector(brk, 0, A);
    Field rhs = ixi(dw(ixi(A))) - ixi(ixi(dw(A))).scaled(rat(1, 2)) -
                dw(ixi(ixi(A))).scaled(rat(1, 2));
    check_zero("bracket-contraction", lhs - rhs);
  }
}

TEST_CASE("square of the gauge layer matches the printed on-shell terms") {
  for (std::uint64_t seed : {151ull}) {
    Q0SquaredResiduals r = q0_squared_residuals(rep(), cfg_at(seed, 2));
    check_zero("q0sq-e", r.e);
    check_zero("q0sq-psi", r.psi);
    check_zero("q0sq-omega", r.omega_e);
    check_zero("q0sq-c", r.c);
    check_zero("q0sq-chi", r.chi);
    for (int m = 0; m < 4; ++m) check_zero("q0sq-xi", r.xi[m]);
  }
}
