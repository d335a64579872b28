#include "doctest.h"
#include "sugra/config.hpp"

using namespace sugra;

namespace {
const GammaRep& rep() {
  static GammaRep r = build_gamma_rep();
  return r;
}

// Collect the spinor at one (form, deriv) slot of a column-spinor field.
GSpinor slot(const Field& f, std::uint8_t form_mask, const std::array<std::uint8_t, 4>& d) {
  GSpinor s{};
  for (int r = 0; r < 4; ++r) {
    JetKey k;
    k.form_mask = form_mask;
    k.row = std::uint8_t(r);
    k.deriv = d;
    s[r] = f.coefficient(k);
  }
  return s;
}
}  // namespace

TEST_CASE("sampling is deterministic in the seed") {
  BVConfig a = sample_config(rep(), 42);
  BVConfig b = sample_config(rep(), 42);
  BVConfig c = sample_config(rep(), 43);
  CHECK(a.e == b.e);
  CHECK(a.omega == b.omega);
  CHECK(a.psi == b.psi);
  CHECK(a.c == b.c);
  CHECK(a.e_dag == b.e_dag);
  CHECK(a.e != c.e);
}

TEST_CASE("sampled degrees and parities") {
  BVConfig cfg = sample_config(rep(), 5);
  CHECK(cfg.e.form_degree() == 1);
  CHECK(cfg.e.lam_degree() == 1);
  CHECK(cfg.e.coeff_parity() == 0);
  CHECK(cfg.omega.form_degree() == 1);
  CHECK(cfg.omega.lam_degree() == 2);
  CHECK(cfg.psi.form_degree() == 1);
  CHECK(cfg.psi.coeff_parity() == 1);
  CHECK(cfg.c.lam_degree() == 2);
  CHECK(cfg.c.coeff_parity() == 1);
  CHECK(cfg.chi.coeff_parity() == 0);
  CHECK(cfg.omega_check.form_degree() == 2);
  CHECK(cfg.omega_check.lam_degree() == 1);
  CHECK(cfg.c_check.form_degree() == 2);
  CHECK(cfg.c_check.lam_degree() == 0);
  CHECK(cfg.psi0_dag.coeff_parity() == 0);
  CHECK(cfg.e_dag.form_degree() == 3);
  CHECK(cfg.e_dag.lam_degree() == 3);
  // supersymmetry ghost is nilpotent: no value-level body anywhere
  for (const auto& [k, g] : cfg.chi.terms()) CHECK(g.body().is_zero());
}

TEST_CASE("sampled spinor fields satisfy the reality constraint slotwise") {
  BVConfig cfg = sample_config(rep(), 9);
  for (int mu = 0; mu < 4; ++mu) {
    std::uint8_t fm = std::uint8_t(1) << mu;
    CHECK(is_majorana(rep(), slot(cfg.psi, fm, {0, 0, 0, 0})));
    CHECK(is_majorana(rep(), slot(cfg.psi, fm, {1, 0, 0, 0})));
    CHECK(is_majorana(rep(), slot(cfg.psi0_dag, fm, {0, 1, 0, 0})));
  }
  CHECK(is_majorana(rep(), slot(cfg.chi, 0, {0, 0, 0, 0})));
  CHECK(is_majorana(rep(), slot(cfg.chi, 0, {0, 0, 2, 0})));
}

TEST_CASE("derived data: frame contraction of the squared-ghost vector field") {
  BVConfig cfg = sample_config(rep(), 13);
  // phi^mu e^a_mu = bar(chi) gamma^a chi
  Field chib = bar_field(rep(), cfg.chi);
  for (int a = 0; a < 4; ++a) {
    Field acc;
    for (int mu = 0; mu < 4; ++mu) acc += mul(cfg.phi[mu], cfg.frame[a][mu]);
    QMat up = (eta_sign(a) < 0) ? grat(-1) * rep().gamma[a] : rep().gamma[a];
    Field bil = mul(chib, mul(Field::matrix_constant(up, cfg.jet_order), cfg.chi));
    CHECK((acc - bil).is_zero());
    // nilpotent and even
    for (const auto& [k, g] : cfg.phi[a].terms()) {
      CHECK(g.body().is_zero());
      CHECK(g.parity() == 0);
    }
  }
}

TEST_CASE("antifield reparametrization composite has the right degrees") {
  BVConfig cfg = sample_config(rep(), 17);
  CHECK(cfg.psi_dag.form_degree() == 3);
  CHECK(cfg.psi_dag.lam_degree() == 4);
  CHECK(cfg.psi_dag.coeff_parity() == 0);
}

TEST_CASE("pure-gravity degeneration") {
  BVConfig cfg = sample_config_pure_gravity(rep(), 21);
  CHECK(cfg.psi.is_zero());
  CHECK(cfg.chi.is_zero());
  CHECK(cfg.psi_dag.is_zero());
  for (int mu = 0; mu < 4; ++mu) CHECK(cfg.phi[mu].is_zero());
  CHECK_FALSE(cfg.e.is_zero());
  CHECK_FALSE(cfg.omega.is_zero());
}

TEST_CASE("JSON round trip") {
  BVConfig cfg = sample_config(rep(), 99);
  std::string text = dump_config(cfg);
  BVConfig back = load_config(text, rep());
  CHECK(back.jet_order == cfg.jet_order);
  CHECK(back.e == cfg.e);
  CHECK(back.omega == cfg.omega);
  CHECK(back.psi == cfg.psi);
  for (int mu = 0; mu < 4; ++mu) CHECK(back.xi[mu] == cfg.xi[mu]);
  CHECK(back.c == cfg.c);
  CHECK(back.chi == cfg.chi);
  CHECK(back.omega_check == cfg.omega_check);
  CHECK(back.c_check == cfg.c_check);
  CHECK(back.psi0_dag == cfg.psi0_dag);
  CHECK(back.e_dag == cfg.e_dag);
  CHECK(back.psi_dag == cfg.psi_dag);
  // byte-identical re-serialization
  CHECK(dump_config(back) == text);
}
