#include <random>

#include "doctest.h"
#include "sugra/config.hpp"
#include "sugra/structure_maps.hpp"

using namespace sugra;

namespace {

const GammaRep& rep() {
  static GammaRep r = build_gamma_rep();
  return r;
}

BVConfig cfg_at(std::uint64_t seed) {
  SamplerOptions opt;
  return sample_config(rep(), seed, opt);
}

// Generic spinor-valued (i,j)-form (no reality constraint), column or row.
Field sample_spinor_block(int i, int j, bool column, int parity,
                          std::mt19937_64& rng, int jet_order) {
  int rows = column ? 4 : 1;
  int cols = column ? 1 : 4;
  Field f(rows, cols, jet_order);
  for (const JetKey& base : fiber_basis(i, j, rows, cols)) {
    Field s = sample_scalar_jet(parity, SamplerOptions{}.fermion_pool, rng, jet_order);
    for (const auto& [k, g] : s.terms()) {
      JetKey key = base;
      key.deriv = k.deriv;
      f.add_term(key, g);
    }
  }
  return f;
}

}  // namespace

TEST_CASE("fiber basis dimensions are C(4,i)*C(4,j)*rows*cols") {
  auto binom4 = [](int k) { return k == 0 || k == 4 ? 1 : (k == 1 || k == 3 ? 4 : 6); };
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j)
      CHECK(int(fiber_basis(i, j, 1, 1).size()) == binom4(i) * binom4(j));
  CHECK(fiber_basis(1, 0, 4, 1).size() == 16);
  CHECK(fiber_basis(3, 4, 1, 4).size() == 16);
}

TEST_CASE("coframe wedge and bracket maps have the expected ranks") {
  BVConfig cfg = cfg_at(401);
  auto results = check_map_ranks(rep(), cfg.e, cfg.gamma_und);
  CHECK(results.size() == 16 + 6 + 6);
  for (const auto& r : results) {
    INFO(r.check_id << " " << r.witness);
    CHECK(r.exact_zero);
  }
}

TEST_CASE("solving e x = y on (1,2) round-trips") {
  BVConfig cfg = cfg_at(402);
  std::mt19937_64 rng(7);
  Field x = sample_form_field(1, 2, /*coeff_parity=*/0, SamplerOptions{}.ghost_pool,
                              rng, cfg.jet_order);
  Field y = w_apply(cfg.e, 1, x);
  Field xs = invert_w1_12(cfg.e, y);
  CHECK((xs - x).is_zero());
  CHECK((w_apply(cfg.e, 1, xs) - y).is_zero());
}

TEST_CASE("solving e^2/2 x = y on (0,2) round-trips") {
  BVConfig cfg = cfg_at(403);
  std::mt19937_64 rng(8);
  Field x = sample_form_field(0, 2, /*coeff_parity=*/1, SamplerOptions{}.ghost_pool,
                              rng, cfg.jet_order);
  Field y = w_apply(cfg.e, 2, x);
  Field xs = invert_w2_02(cfg.e, y);
  CHECK((xs - x).is_zero());
}

TEST_CASE("solver handles mixed-parity and derivative-carrying values") {
  BVConfig cfg = cfg_at(404);
  std::mt19937_64 rng(9);
  Field xe = sample_form_field(1, 2, 0, SamplerOptions{}.ghost_pool, rng, cfg.jet_order);
  Field xo = sample_form_field(1, 2, 1, SamplerOptions{}.fermion_pool, rng, cfg.jet_order);
  Field x = xe + xo;
  Field y = w_apply(cfg.e, 1, x);
  CHECK((invert_w1_12(cfg.e, y) - x).is_zero());
}

TEST_CASE("solver throws when the value is outside the image") {
  BVConfig cfg = cfg_at(405);
  // Wedging a scalar with e lands in a 4-dimensional subspace of the
  // 16-dimensional (1,1) fiber; a generic (1,1)-form is outside it.
  std::mt19937_64 rng(10);
  Field y = sample_form_field(1, 1, 0, SamplerOptions{}.ghost_pool, rng, cfg.jet_order);
  FiberOp op = make_w_op(cfg.e, 1, 0, 0, 1, 1);
  CHECK_THROWS_AS((void)solve_fiber_op(op, y), std::domain_error);
}

TEST_CASE("column splitting of a (3,1) spinor form") {
  BVConfig cfg = cfg_at(406);
  std::mt19937_64 rng(11);
  Field theta = sample_spinor_block(3, 1, /*column=*/true, 1, rng, /*jet_order=*/1);
  Split31 s = split_31(rep(), cfg.e, cfg.gamma_und, theta);
  Field gam3 = gamma_wedge_field(rep(), 3, cfg.jet_order);

  Field recon = mul(cfg.e, mul(cfg.gamma_und, s.alpha)).scaled(GaussianRational::unit_i())
                + s.beta;
  CHECK((recon - theta).is_zero());
  CHECK(mul(gam3, s.beta).is_zero());

  // Uniqueness: splitting a pure e gamma_und alpha piece returns alpha itself.
  std::mt19937_64 rng2(12);
  Field a = sample_spinor_block(1, 0, /*column=*/true, 1, rng2, /*jet_order=*/1);
  Field pure = mul(cfg.e, mul(cfg.gamma_und, a)).scaled(GaussianRational::unit_i());
  Split31 sp = split_31(rep(), cfg.e, cfg.gamma_und, pure);
  CHECK((sp.alpha - a).is_zero());
  CHECK(sp.beta.is_zero());

  // Idempotence: the kernel part splits to (0, itself).
  Split31 sk = split_31(rep(), cfg.e, cfg.gamma_und, s.beta);
  CHECK(sk.alpha.is_zero());
  CHECK((sk.beta - s.beta).is_zero());
}

TEST_CASE("row splitting of a (3,1) spinor form") {
  BVConfig cfg = cfg_at(407);
  std::mt19937_64 rng(13);
  Field theta = sample_spinor_block(3, 1, /*column=*/false, 1, rng, /*jet_order=*/1);
  Split31 s = split_31_row(rep(), cfg.e, cfg.gamma_und, theta);
  Field gam3 = gamma_wedge_field(rep(), 3, cfg.jet_order);
  Field recon = mul(mul(cfg.e, s.alpha), cfg.gamma_und).scaled(GaussianRational::unit_i())
                + s.beta;
  CHECK((recon - theta).is_zero());
  CHECK(mul(s.beta, gam3).is_zero());
}

TEST_CASE("column splitting of a (2,1) spinor form") {
  BVConfig cfg = cfg_at(408);
  std::mt19937_64 rng(14);
  Field theta = sample_spinor_block(2, 1, /*column=*/true, 1, rng, /*jet_order=*/1);
  Split21 s = split_21(rep(), cfg.e, cfg.gamma_und, theta);
  Field gam3 = gamma_wedge_field(rep(), 3, cfg.jet_order);
  CHECK((mul(cfg.e, s.kappa) + s.vark - theta).is_zero());
  CHECK(mul(cfg.gamma_und, mul(gam3, s.vark)).is_zero());

  Split21 sk = split_21(rep(), cfg.e, cfg.gamma_und, s.vark);
  CHECK(sk.kappa.is_zero());
}

TEST_CASE("row splitting of a (2,1) spinor form") {
  BVConfig cfg = cfg_at(409);
  std::mt19937_64 rng(15);
  Field theta = sample_spinor_block(2, 1, /*column=*/false, 1, rng, /*jet_order=*/1);
  Split21 s = split_21_row(rep(), cfg.e, cfg.gamma_und, theta);
  Field gam3 = gamma_wedge_field(rep(), 3, cfg.jet_order);
  CHECK((mul(cfg.e, s.kappa) + s.vark - theta).is_zero());
  CHECK(mul(mul(s.vark, gam3), cfg.gamma_und).is_zero());
}
