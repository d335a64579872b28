#include "sugra/bv.hpp"

#include <bit>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

namespace sugra {

namespace {

constexpr int kProbeGen = kMaxGrassmannGenerators - 1;  // never sampled

// Global orientation of the symplectic pairing used by the variational
// extraction; a single sign shared by every block so that the two layers of
// the vector field stay mutually consistent.
const Rational kVaryOrientation = rat(1);

Rational frac(long num, long den) { return rat(num, den); }
GaussianRational ifrac(long num, long den) { return GaussianRational(rat(0), rat(num, den)); }

Field gmul(const Grassmann& g, const Field& x) {
  return mul(Field::scalar_constant(g, x.jet_order()), x);
}

// The scalar jet of the monomial x^alpha / alpha!: the single raw derivative
// slot alpha carries coefficient one.
Field monomial_jet(const std::array<std::uint8_t, 4>& alpha, int order) {
  Field f(1, 1, order);
  JetKey k;
  k.deriv = alpha;
  f.add_term(k, Grassmann(grat(1)));
  return f;
}

// Jet of the mu-th partial derivative: slot d of the result is slot d + e_mu
// of the input (raw derivative values, no combinatorial factor).
Field jet_partial(const Field& x, int mu) {
  Field r(x.spin_rows(), x.spin_cols(), std::max(x.jet_order() - 1, 0));
  for (const auto& [k, g] : x.terms()) {
    if (k.deriv[mu] == 0) continue;
    JetKey nk = k;
    nk.deriv[mu] = std::uint8_t(nk.deriv[mu] - 1);
    if (nk.deriv_order() <= r.jet_order()) r.add_term(nk, g);
  }
  return r;
}

// Inverse of the Dirac adjoint on row-spinor fields: psi_r = sum_c row_c (C^-1)_{c r}.
Field unbar_field(const GammaRep& rep, const Field& row) {
  if (row.spin_rows() != 1 || row.spin_cols() != 4)
    throw std::invalid_argument("unbar_field: expects a row spinor field");
  Field col(4, 1, row.jet_order());
  for (const auto& [k, g] : row.terms())
    for (int r = 0; r < 4; ++r) {
      GaussianRational c = rep.Cinv(k.col, r);
      if (c.is_zero()) continue;
      JetKey nk = k;
      nk.col = 0;
      nk.row = std::uint8_t(r);
      col.add_term(nk, c * g);
    }
  return col;
}

// Four rational-coefficient spinors spanning the real form singled out by the
// reality matrix, obtained by projecting unit spinors and their i-multiples.
std::array<std::array<GaussianRational, 4>, 4> majorana_direction_basis(const GammaRep& rep) {
  std::vector<std::array<GaussianRational, 4>> picked;
  for (int s = 0; s < 4 && picked.size() < 4; ++s)
    for (int im = 0; im < 2 && picked.size() < 4; ++im) {
      GSpinor mu{};
      mu[s] = Grassmann(im ? GaussianRational::unit_i() : grat(1));
      GSpinor p = majorana_project(rep, mu);
      std::array<GaussianRational, 4> v{};
      bool zero = true;
      for (int r = 0; r < 4; ++r) {
        v[r] = p[r].body();
        if (!v[r].is_zero()) zero = false;
      }
      if (zero) continue;
      QMat test(int(picked.size()) + 1, 4);
      for (size_t i = 0; i < picked.size(); ++i)
        for (int c = 0; c < 4; ++c) test(int(i), c) = picked[i][c];
      for (int c = 0; c < 4; ++c) test(int(picked.size()), c) = v[c];
      if (test.rank() == int(picked.size()) + 1) picked.push_back(v);
    }
  if (picked.size() != 4)
    throw std::logic_error("majorana_direction_basis: projection is rank deficient");
  return {picked[0], picked[1], picked[2], picked[3]};
}

Field constant_spinor_form(int form_mask, int lam_mask,
                           const std::array<GaussianRational, 4>& m, int order) {
  Field f(4, 1, order);
  for (int r = 0; r < 4; ++r) {
    if (m[r].is_zero()) continue;
    JetKey k;
    k.form_mask = std::uint8_t(form_mask);
    k.lam_mask = std::uint8_t(lam_mask);
    k.row = std::uint8_t(r);
    f.add_term(k, Grassmann(m[r]));
  }
  return f;
}

Field unit_field(const JetKey& key, int rows, int cols, int order) {
  Field f(rows, cols, order);
  f.add_term(key, Grassmann(grat(1)));
  return f;
}

// The isomorphism x -> (1/3!) e gamma^3 gamma_und x from (1,0) column spinors
// to (3,4) column spinors (exactly the reparametrization used by finalize()).
FiberOp make_theta_op(const GammaRep& rep, const Field& e, const Field& gamma_und) {
  int order = e.jet_order();
  Field g3 = gamma_wedge_field(rep, 3, order);
  Field ecopy = e;
  Field gu = gamma_und;
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 4, 1);
  op.cod_basis = fiber_basis(3, 4, 4, 1);
  op.dom_rows = op.cod_rows = 4;
  op.apply = [ecopy, g3, gu](const Field& x) {
    return mul(ecopy, mul(g3, mul(gu, x))).scaled(rat(1, 6));
  };
  return op;
}

Field solve_theta(const GammaRep& rep, const Field& e, const Field& gamma_und,
                  const Field& psi_dag_value) {
  return solve_fiber_op(make_theta_op(rep, e, gamma_und), psi_dag_value);
}

// Scalar analogue of the (2,1) splitting: the unique scalar (1,0)-form kappa
// with gamma_und gamma^3 (e kappa) = gamma_und gamma^3 theta.
Field kappa_scalar(const GammaRep& rep, const Field& e, const Field& gamma_und,
                   const Field& theta) {
  int order = e.jet_order();
  Field pre = mul(gamma_und, gamma_wedge_field(rep, 3, order));
  Field ecopy = e;
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 1, 1);
  op.cod_basis = fiber_basis(3, 4, 4, 4);
  op.cod_rows = op.cod_cols = 4;
  op.apply = [pre, ecopy](const Field& x) { return mul(pre, mul(ecopy, x)); };
  return solve_fiber_op(op, mul(pre, theta));
}

// Common per-configuration composites.
struct Ctx {
  const GammaRep& rep;
  const BVConfig& cfg;
  int order;
  Field gammaF, g3, g5, gu, gu2, psib, chib;

  Ctx(const GammaRep& r, const BVConfig& c)
      : rep(r), cfg(c), order(c.e.jet_order()) {
    gammaF = gamma_field(r, order);
    g3 = gamma_wedge_field(r, 3, order);
    g5 = Field::matrix_constant(r.gamma5, order);
    gu = c.gamma_und;
    gu2 = mul(gu, gu);
    psib = bar_field(r, c.psi);
    chib = bar_field(r, c.chi);
  }

  Field iphi(const Field& x) const { return iota_vector(cfg.phi, 0, x); }
  Field ixi(const Field& x) const { return iota_vector(cfg.xi, 1, x); }
  Field ighat(const Field& x) const { return iota_gamma_hat(rep, cfg.einv, x); }
  Field epair(const Field& x) const { return e_pair(cfg.einv, x); }
};

Field vol_v_field(int order) {
  Field f(1, 1, order);
  JetKey k;
  k.lam_mask = 0x0F;
  f.add_term(k, Grassmann(grat(1)));
  return f;
}

std::array<Field, 4> xi_bracket_half(const BVConfig& cfg) {
  // (1/2)[xi,xi]^mu = xi^nu d_nu xi^mu for odd components
  std::array<Field, 4> b;
  for (int m = 0; m < 4; ++m) {
    Field acc(1, 1, std::max(cfg.jet_order - 1, 0));
    for (int n = 0; n < 4; ++n) acc += mul(cfg.xi[n], jet_partial(cfg.xi[m], n));
    b[m] = acc;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Independent oracle machinery: supercommutative reordering signs computed
// from scratch (coefficients and single dx / v letters form one odd family).

// A word in canonical order: coefficient, then sorted dx letters, then sorted
// v letters.  Coefficients are scalar jets; every dx / v letter is odd, and a
// coefficient contributes its own Grassmann parity.
struct Word {
  int dx = 0;
  int lam = 0;
  Field coeff;  // 1x1 scalar jet
};

Field field_parity_part(const Field& f, int parity) {
  Field out(f.spin_rows(), f.spin_cols(), f.jet_order());
  for (const auto& [k, g] : f.terms()) {
    Grassmann p = g.parity_part(parity);
    if (!p.is_zero()) out.add_term(k, p);
  }
  return out;
}

// Sign of merging two sorted odd-letter strings (count of transpositions).
int merge_sign(int a, int b) {
  int inversions = 0;
  for (int i = 0; i < 16; ++i)
    if (b & (1 << i)) inversions += std::popcount(unsigned(a) >> (i + 1));
  return inversions % 2 ? -1 : 1;
}

// Graded product of canonical words, independent of the main field product:
// signs come from explicitly walking the right word's pieces to the left.
Word word_mul(const Word& a, const Word& b, int b_coeff_parity) {
  Word out;
  out.coeff = Field(1, 1, std::min(a.coeff.jet_order(), b.coeff.jet_order()));
  if ((a.dx & b.dx) || (a.lam & b.lam)) return out;
  int a_letters = std::popcount(unsigned(a.dx)) + std::popcount(unsigned(a.lam));
  int sign = 1;
  if (b_coeff_parity && (a_letters % 2)) sign = -sign;                 // coeff of b past a's letters
  if ((std::popcount(unsigned(a.lam)) * std::popcount(unsigned(b.dx))) % 2) sign = -sign;
  sign *= merge_sign(a.dx, b.dx) * merge_sign(a.lam, b.lam);
  out.dx = a.dx | b.dx;
  out.lam = a.lam | b.lam;
  out.coeff = mul(a.coeff, field_parity_part(b.coeff, b_coeff_parity)).scaled(rat(sign));
  return out;
}

Word word_mul(const Word& a, const Word& b) {
  Word even = word_mul(a, b, 0);
  Word odd = word_mul(a, b, 1);
  Word out = even;
  out.coeff = even.coeff + odd.coeff;
  return out;
}

Field scalar_component(const Field& x, int fm, int lm, int r, int c) {
  Field s(1, 1, x.jet_order());
  for (const auto& [k, g] : x.terms()) {
    if (k.form_mask != fm || k.lam_mask != lm || k.row != r || k.col != c) continue;
    JetKey nk;
    nk.deriv = k.deriv;
    s.add_term(nk, g);
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Classical layer.

Field lagrangian_density(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field F = curvature(cfg.omega);
  Field e2h = mul(cfg.e, cfg.e).scaled(frac(1, 2));
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  return mul(e2h, F) + mul(cfg.e, mul(x.psib, mul(x.g3, dpsi))).scaled(frac(1, 6));
}

// Component-level recomputation of the classical density through the
// independent word algebra above, keeping only the top-degree coefficient.
Field lagrangian_density_oracle(const GammaRep& rep, const BVConfig& cfg) {
  const int order = cfg.e.jet_order();
  // Component jets.
  Field E[4][4];  // E[a][mu]
  for (int a = 0; a < 4; ++a)
    for (int mu = 0; mu < 4; ++mu)
      E[a][mu] = scalar_component(cfg.e, 1 << mu, 1 << a, 0, 0);
  Field W[4][4][4];  // W[a][b][mu], antisymmetric in (a,b), from the a<b storage
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int mu = 0; mu < 4; ++mu) {
        if (a < b)
          W[a][b][mu] = scalar_component(cfg.omega, 1 << mu, (1 << a) | (1 << b), 0, 0);
        else if (a > b)
          W[a][b][mu] = scalar_component(cfg.omega, 1 << mu, (1 << a) | (1 << b), 0, 0).scaled(frac(-1, 1));
        else
          W[a][b][mu] = Field(1, 1, order);
      }
  Field P[4][4];   // gravitino one-form components P[mu][spin row]
  Field Pb[4][4];  // adjoint one-form components Pb[mu][spin col]
  {
    Field pbar = bar_field(rep, cfg.psi);
    for (int mu = 0; mu < 4; ++mu)
      for (int r = 0; r < 4; ++r) {
        P[mu][r] = scalar_component(cfg.psi, 1 << mu, 0, r, 0);
        Pb[mu][r] = scalar_component(pbar, 1 << mu, 0, 0, r);
      }
  }

  // Curvature components F[c][d][rho][sigma] (antisymmetric in both pairs):
  //   d_rho W_sigma - d_sigma W_rho + (W_rho eta W_sigma - W_sigma eta W_rho)^{cd}.
  Field Fc[4][4][4][4];
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 4; ++d)
      for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) {
          Field acc = jet_partial(W[c][d][s], r) - jet_partial(W[c][d][r], s);
          for (int m = 0; m < 4; ++m) {
            Rational sgn = rat(eta_sign(m));
            acc += mul(W[c][m][r], W[m][d][s]).scaled(sgn);
            acc -= mul(W[c][m][s], W[m][d][r]).scaled(sgn);
          }
          Fc[c][d][r][s] = acc;
        }

  // Covariant derivative of the gravitino one-form, componentwise over
  // ordered index pairs rho < sigma (the odd gravitino coefficient crossing
  // the connection's form letter accounts for the sign of the rho-term):
  //   T_{rs} = d_r P_s - d_s P_r
  //            + (1/2) sum_{a<b} (g_a g_b)(W^{ab}_r P_s - W^{ab}_s P_r).
  Field T[4][4][4];  // [rho][sigma][spin row], rho < sigma
  for (int r = 0; r < 4; ++r)
    for (int s = r + 1; s < 4; ++s) {
      // The letter dx^rho introduced by the derivative crosses the odd part
      // of the gravitino coefficient.
      Field comp[4];
      for (int q = 0; q < 4; ++q) {
        Field ds = jet_partial(P[s][q], r) - jet_partial(P[r][q], s);
        comp[q] = field_parity_part(ds, 0) - field_parity_part(ds, 1);
      }
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          QMat m = rep.gamma[a] * rep.gamma[b];
          for (int q = 0; q < 4; ++q)
            for (int u = 0; u < 4; ++u) {
              if (m(q, u).is_zero()) continue;
              comp[q] += (mul(W[a][b][r], P[s][u]) - mul(W[a][b][s], P[r][u]))
                             .scaled(m(q, u) * grat(1, 2));
            }
        }
      for (int q = 0; q < 4; ++q) T[r][s][q] = comp[q];
    }

  Field acc(1, 1, order);
  auto accumulate_top = [&](const Word& w, const Rational& scale) {
    if (w.dx != 0x0F || w.lam != 0x0F) return;
    acc += w.coeff.scaled(scale);
  };

  // (1/2) e e F.
  for (int mu = 0; mu < 4; ++mu)
    for (int a = 0; a < 4; ++a)
      for (int nu = 0; nu < 4; ++nu)
        for (int b = 0; b < 4; ++b) {
          Word we1{1 << mu, 1 << a, E[a][mu]};
          Word we2{1 << nu, 1 << b, E[b][nu]};
          Word e2w = word_mul(we1, we2);
          if (e2w.dx == 0 && e2w.lam == 0) continue;
          for (int r = 0; r < 4; ++r)
            for (int s = r + 1; s < 4; ++s)
              for (int c = 0; c < 4; ++c)
                for (int d = c + 1; d < 4; ++d) {
                  Word wf{(1 << r) | (1 << s), (1 << c) | (1 << d), Fc[c][d][r][s]};
                  accumulate_top(word_mul(e2w, wf), frac(1, 2));
                }
        }

  // (1/3!) e psibar g3 Dpsi, with the triple wedge assembled from
  // lowered-index gamma matrices in ascending order.
  std::map<int, QMat> g3m;
  for (int j1 = 0; j1 < 4; ++j1)
    for (int j2 = j1 + 1; j2 < 4; ++j2)
      for (int j3 = j2 + 1; j3 < 4; ++j3)
        g3m.emplace((1 << j1) | (1 << j2) | (1 << j3),
                    rep.gamma_lower(j1) * rep.gamma_lower(j2) * rep.gamma_lower(j3));
  for (int mu = 0; mu < 4; ++mu)
    for (int a = 0; a < 4; ++a) {
      Word we{1 << mu, 1 << a, E[a][mu]};
      for (int ka = 0; ka < 4; ++ka)
        for (const auto& [jmask, m3] : g3m) {
          for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q) {
              if (m3(p, q).is_zero()) continue;
              Word wb{1 << ka, 0, Pb[ka][p]};
              Word wg{0, int(jmask), Field::scalar_constant(Grassmann(m3(p, q)), order)};
              for (int r = 0; r < 4; ++r)
                for (int s = r + 1; s < 4; ++s) {
                  Word wt{(1 << r) | (1 << s), 0, T[r][s][q]};
                  // The density's triple wedge is the sum over all 3! letter
                  // orderings, which cancels the 1/3! normalization against a
                  // single ascending product.
                  accumulate_top(word_mul(word_mul(word_mul(we, wb), wg), wt), frac(1, 1));
                }
            }
        }
    }

  Field out(1, 1, order);
  for (const auto& [k, g] : acc.terms()) {
    JetKey nk = k;
    nk.form_mask = 0x0F;
    nk.lam_mask = 0x0F;
    out.add_term(nk, g);
  }
  return out;
}

EomSet eom_all(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field F = curvature(cfg.omega);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field dpsib = covariant_d(rep, cfg.omega, x.psib);
  Field dwe = covariant_d(rep, cfg.omega, cfg.e);
  EomSet eom;
  eom.e = mul(cfg.e, F) + mul(x.psib, mul(x.g3, dpsi)).scaled(frac(1, 6));
  eom.torsion = dwe - mul(x.psib, mul(x.gammaF, cfg.psi)).scaled(frac(1, 2));
  eom.psi_row = mul(cfg.e, mul(dpsib, x.g3)) + mul(dwe, mul(x.psib, x.g3)).scaled(frac(1, 2));
  eom.psi_col = (mul(cfg.e, mul(x.g3, dpsi)) - mul(dwe, mul(x.g3, cfg.psi)).scaled(frac(1, 2)))
                    .scaled(ifrac(-1, 3));
  return eom;
}

Field eom_psi_reduced_residual(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field dwe = covariant_d(rep, cfg.omega, cfg.e);
  Field inner = mul(x.gu, dpsi) - mul(eta_bracket(dwe, x.gammaF), cfg.psi).scaled(frac(1, 2));
  // The factor 2 (rather than a fraction) reflects the unnormalized wedge
  // and volume conventions of this representation.
  Field reduced = mul(mul(x.g5, inner), vol_v_field(x.order)).scaled(frac(2, 1));
  return eom_all(rep, cfg).psi_col - reduced;
}

Field variational_residual(const GammaRep& rep, const BVConfig& cfg,
                           const Field& de, const Field& domega, const Field& dpsi) {
  const Grassmann th = Grassmann::generator(kVariationGenerator);
  BVConfig sh = cfg;
  sh.e = cfg.e + gmul(th, de);
  sh.omega = cfg.omega + gmul(th, domega);
  sh.psi = cfg.psi + gmul(th, dpsi);
  sh.finalize(rep);
  Field lin = lagrangian_density(rep, sh).linear_part(kVariationGenerator);

  Ctx x(rep, cfg);
  EomSet eom = eom_all(rep, cfg);
  Field dE = gmul(th, de), dW = gmul(th, domega), dP = gmul(th, dpsi);
  Field bulk = mul(eom.e, dE) + mul(mul(cfg.e, eom.torsion), dW) +
               mul(eom.psi_row, dP).scaled(frac(1, 3));
  Field bdy = mul(mul(cfg.e, cfg.e).scaled(frac(1, 2)), dW) +
              mul(cfg.e, mul(x.psib, mul(x.g3, dP))).scaled(frac(1, 6));
  Field expected = (bulk - jet_d(bdy)).linear_part(kVariationGenerator);
  return lin - expected;
}

Field delta_chi_omega(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field rhs = mul(x.chib, mul(x.g3, dpsi)).scaled(frac(-1, 6));
  return invert_w1_12(cfg.e, rhs);
}

Field delta_chi_omega_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field g2 = gamma_wedge_field(rep, 2, x.order);
  Field t1 = mul(x.chib, x.ighat(mul(g2, dpsi))).scaled(frac(1, 2));
  Field t2 = mul(x.chib, mul(x.gammaF, x.epair(dpsi)));
  Field t3 = mul(cfg.e, mul(x.chib, x.ighat(x.ighat(mul(x.gammaF, dpsi))))).scaled(frac(1, 4));
  Field t4 = mul(cfg.e, mul(x.chib, x.ighat(x.epair(dpsi)))).scaled(frac(1, 2));
  return t1 - t2 + t3 - t4;
}

Field e_bracket_dco_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field gu_dpsi = mul(x.gu, dpsi);
  Field t1 = mul(x.chib, mul(x.gammaF, dpsi));
  Field t2 = mul(x.chib, mul(x.gammaF, x.ighat(gu_dpsi)));
  Field t3 = mul(x.chib, x.epair(gu_dpsi));
  Field t4 = mul(cfg.e, mul(x.chib, x.ighat(x.ighat(gu_dpsi)))).scaled(frac(1, 4));
  return t1 + t2 + t3 + t4;
}

Field dco_chi_bracket_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field gu_dpsi = mul(x.gu, dpsi);
  Field kap = split_21(rep, cfg.e, x.gu, x.epair(gu_dpsi)).kappa;
  Field scalar = mul(x.chib, kap) + mul(x.chib, x.ighat(x.ighat(gu_dpsi))).scaled(frac(1, 8));
  return mul(scalar, cfg.chi);
}

// ---------------------------------------------------------------------------
// Antifield-linear layer: gauge transformations.

QImage q0_apply(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field F = curvature(cfg.omega);
  Field dco = delta_chi_omega(rep, cfg);
  QImage img;
  img.e = lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.e) - rep_action(rep, cfg.c, cfg.e) +
          mul(x.chib, mul(x.gammaF, cfg.psi));
  img.omega = x.ixi(F) - covariant_d(rep, cfg.omega, cfg.c) + dco;
  img.psi = lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.psi) -
            rep_action(rep, cfg.c, cfg.psi) - covariant_d(rep, cfg.omega, cfg.chi);
  img.c = (x.ixi(x.ixi(F)) - eta_bracket(cfg.c, cfg.c)).scaled(frac(1, 2)) + x.ixi(dco);
  img.chi = lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.chi) -
            rep_action(rep, cfg.c, cfg.chi) - x.iphi(cfg.psi).scaled(frac(1, 2));
  std::array<Field, 4> half_brk = xi_bracket_half(cfg);
  for (int m = 0; m < 4; ++m) img.xi[m] = half_brk[m] + cfg.phi[m].scaled(frac(1, 2));
  return img;
}

// ---------------------------------------------------------------------------
// Action densities.

Field s1_density(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field F = curvature(cfg.omega);
  Field dco = delta_chi_omega(rep, cfg);
  Field chi_dag = w_apply(cfg.e, 4, cfg.chi0_dag);
  Field omega_dag = mul(cfg.e, cfg.omega_check);
  Field c_dag = w_apply(cfg.e, 2, cfg.c_check);

  Field q0e = lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.e) -
              rep_action(rep, cfg.c, cfg.e) + mul(x.chib, mul(x.gammaF, cfg.psi));
  Field q0om = x.ixi(F) - covariant_d(rep, cfg.omega, cfg.c) + dco;
  Field q0psib = lie_covariant(rep, cfg.xi, 1, cfg.omega, x.psib) -
                 rep_action(rep, cfg.c, x.psib) - covariant_d(rep, cfg.omega, x.chib);
  Field q0c = (x.ixi(x.ixi(F)) - eta_bracket(cfg.c, cfg.c)).scaled(frac(1, 2)) + x.ixi(dco);
  Field q0chib = lie_covariant(rep, cfg.xi, 1, cfg.omega, x.chib) -
                 rep_action(rep, cfg.c, x.chib) - x.iphi(x.psib).scaled(frac(1, 2));

  Field density = lagrangian_density(rep, cfg);
  density -= mul(q0e, cfg.e_dag);
  density += mul(q0om, omega_dag);
  density -= mul(q0psib, cfg.psi_dag).scaled(GaussianRational::unit_i());
  density += mul(q0c, c_dag);
  std::array<Field, 4> half_brk = xi_bracket_half(cfg);
  for (int m = 0; m < 4; ++m)
    density += mul(half_brk[m] + cfg.phi[m].scaled(frac(1, 2)), cfg.xi_dag[m]);
  density -= mul(q0chib, chi_dag).scaled(GaussianRational::unit_i());
  return density;
}

Field s2_density(const GammaRep& rep, const BVConfig& cfg, unsigned line_mask) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& oc = cfg.omega_check;
  const Field& cc = cfg.c_check;
  Field pd0b = bar_field(rep, cfg.psi0_dag);
  Field A = x.ixi(cc);                 // (1,0) scalar
  Field Bf = mul(cc, x.ixi(e));        // (2,1) scalar
  Field a_om_r = split_31_row(rep, e, x.gu, mul(oc, x.psib)).alpha;
  Field a_b_r = split_31_row(rep, e, x.gu, mul(Bf, x.psib)).alpha;
  Field oc_br_psi = mul(eta_bracket(oc, x.gammaF), cfg.psi);  // [omega_check, gamma] psi, (3,0)
  Field gu2_pd0 = mul(x.gu2, cfg.psi0_dag);                   // (3,0)
  const GaussianRational I = GaussianRational::unit_i();

  Field out(1, 1, x.order);
  if (line_mask & 1u) {
    Field w1 = oc - mul(e, A).scaled(frac(1, 2)) - Bf;
    out += mul(w1, x.iphi(cfg.e_dag)).scaled(frac(1, 2));
  }
  if (line_mask & 2u) {
    Field r2 = mul(pd0b, x.gu).scaled(frac(1, 2)) + mul(a_om_r, x.gu) -
               mul(A, x.psib).scaled(I * grat(1, 2)) - mul(a_b_r, x.gu) -
               mul(cc, x.chib).scaled(I * grat(1, 2));
    out += mul(r2, x.iphi(cfg.psi_dag)).scaled(frac(1, 4));
  }
  if (line_mask & 4u) {
    Field r3 = mul(a_om_r, x.gu).scaled(frac(1, 2)) - mul(A, x.psib).scaled(I * grat(1, 2)) -
               mul(a_b_r, x.gu) - mul(cc, x.chib).scaled(I * grat(1, 2));
    out += mul(r3, mul(x.g3, x.iphi(mul(oc, cfg.psi)))).scaled(ifrac(1, 24));
  }
  if (line_mask & 8u) {
    Field r4 = mul(pd0b, x.gu).scaled(frac(1, 2)) + mul(a_om_r, x.gu).scaled(frac(1, 2)) -
               mul(A, x.psib).scaled(I * grat(1, 2)) - mul(a_b_r, x.gu);
    Field s4 = x.epair(mul(x.chib, oc_br_psi));
    out += mul(r4, mul(mul(x.g3, cfg.chi), s4)).scaled(ifrac(-1, 12));
  }
  if (line_mask & 16u) {
    Field r5 = mul(pd0b, x.gu).scaled(frac(1, 4)) - mul(A, x.psib).scaled(I * grat(1, 2)) -
               mul(a_b_r, x.gu);
    Field s5 = x.epair(mul(x.chib, gu2_pd0));
    out += mul(r5, mul(mul(x.g3, cfg.chi), s5)).scaled(frac(1, 12));
  }
  if (line_mask & 32u) {
    Field p6 = mul(bar_field(rep, cfg.psi_dag), cfg.chi).scaled(I) +
               mul(oc - mul(e, A) - Bf.scaled(frac(2, 1)),
                   mul(x.psib, mul(x.g3, cfg.chi))).scaled(frac(1, 6));
    Field t6 = mul(x.chib, x.ighat(x.ighat(oc_br_psi)));
    out += mul(p6, t6).scaled(frac(-1, 32));
  }
  if (line_mask & 64u) {
    Field p7 = mul(bar_field(rep, cfg.psi_dag), cfg.chi).scaled(I) +
               mul(mul(e, A) + Bf.scaled(frac(2, 1)),
                   mul(x.psib, mul(x.g3, cfg.chi))).scaled(frac(1, 6));
    Field t7 = mul(x.chib, x.ighat(x.ighat(gu2_pd0)));
    out += mul(p7, t7).scaled(ifrac(-1, 32));
  }
  return out;
}

Field l_correction_field(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& cc = cfg.c_check;
  Field A = x.ixi(cc);
  Field Bf = mul(cc, x.ixi(e));
  Field inner = mul(x.gu, mul(A, cfg.psi)).scaled(frac(1, 2)) +
                mul(x.ixi(x.gu), mul(cc, cfg.psi));
  Field a_b_c = split_31(rep, e, x.gu, mul(Bf, cfg.psi)).alpha;
  Field psg3chi = mul(x.psib, mul(x.g3, cfg.chi));
  Field el = mul(A, mul(x.psib, mul(x.g3, x.iphi(cfg.psi)))).scaled(frac(-1, 48));
  el += mul(x.psib, mul(x.g3, x.iphi(mul(x.gu, a_b_c)))).scaled(ifrac(-1, 24));
  el += mul(psg3chi, kappa_scalar(rep, e, x.gu, x.epair(mul(x.chib, inner))))
            .scaled(frac(-1, 12));
  el += mul(psg3chi, mul(x.chib, x.ighat(x.ighat(inner)))).scaled(frac(-1, 96));
  return invert_w1_12(e, el);
}

Field quadratic_density(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  Field out = s2_density(rep, cfg, opt.density_line_mask);
  if (opt.l_correction) {
    Field l = l_correction_field(rep, cfg);
    Field c_dag = w_apply(cfg.e, 2, cfg.c_check);
    out += mul(c_dag, iota_vector(cfg.xi, 1, l)).scaled(frac(1, 2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Printed closed forms for the quadratic layer.

Field qq_e_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field A = x.ixi(cfg.c_check);
  return x.iphi(cfg.omega_check).scaled(frac(1, 2)) -
         mul(x.iphi(cfg.c_check), x.ixi(cfg.e)).scaled(frac(1, 2)) -
         x.iphi(mul(cfg.e, A)).scaled(frac(1, 4));
}

Field e_qq_omega_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& oc = cfg.omega_check;
  const Field& cc = cfg.c_check;
  Field pd0b = bar_field(rep, cfg.psi0_dag);
  Field A = x.ixi(cc);
  Field Bf = mul(cc, x.ixi(e));
  Field a_om_c = split_31(rep, e, x.gu, mul(oc, cfg.psi)).alpha;
  Field a_b_c = split_31(rep, e, x.gu, mul(Bf, cfg.psi)).alpha;
  Field psg3chi = mul(x.psib, mul(x.g3, cfg.chi));
  Field inner = mul(x.gu2, cfg.psi0_dag).scaled(ifrac(-1, 2)) -
                mul(eta_bracket(oc, x.gammaF), cfg.psi) -
                mul(x.gu, mul(A, cfg.psi)).scaled(frac(1, 2)) -
                mul(x.ixi(x.gu), mul(cc, cfg.psi));

  Field out = x.iphi(cfg.e_dag).scaled(frac(1, 2));
  out += mul(x.iphi(mul(pd0b, x.gu)), mul(x.g3, cfg.psi)).scaled(ifrac(1, 24));
  out += mul(x.psib, mul(x.g3, x.iphi(mul(x.gu, a_om_c)))).scaled(ifrac(1, 24));
  out -= mul(x.iphi(cc), mul(x.chib, mul(x.g3, cfg.psi))).scaled(frac(1, 48));
  out -= mul(A, mul(x.psib, mul(x.g3, x.iphi(cfg.psi)))).scaled(frac(1, 48));
  out -= mul(x.psib, mul(x.g3, x.iphi(mul(x.gu, a_b_c)))).scaled(ifrac(1, 24));
  out += mul(psg3chi, kappa_scalar(rep, e, x.gu, x.epair(mul(x.chib, inner))))
             .scaled(frac(1, 12));
  out += mul(psg3chi, mul(x.chib, x.ighat(x.ighat(inner)))).scaled(frac(1, 96));
  return out;
}

Field qq_psi_closed(const GammaRep& rep, const BVConfig& cfg, int psi_variant) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& oc = cfg.omega_check;
  const Field& cc = cfg.c_check;
  Field A = x.ixi(cc);
  Field Bf = mul(cc, x.ixi(e));
  Field a_om_c = split_31(rep, e, x.gu, mul(oc, cfg.psi)).alpha;
  Field a_b_c = split_31(rep, e, x.gu, mul(Bf, cfg.psi)).alpha;
  Field X = (psi_variant == 0)
                ? oc - mul(A, e).scaled(frac(1, 2)) - mul(x.ixi(e), cc)
                : oc - mul(A, e).scaled(ifrac(1, 2)) + mul(x.ixi(e), cc);
  Field inner = mul(x.gu2, cfg.psi0_dag) +
                mul(eta_bracket(X, x.gammaF), cfg.psi).scaled(GaussianRational::unit_i());

  Field out = x.iphi(mul(x.gu, cfg.psi0_dag)).scaled(ifrac(1, 4));
  out -= x.iphi(mul(x.gu, a_om_c)).scaled(ifrac(1, 4));
  out -= x.iphi(mul(x.gu, a_b_c)).scaled(ifrac(1, 4));
  out += mul(x.iphi(cc), cfg.chi).scaled(frac(1, 8));
  out -= x.iphi(mul(A, cfg.psi)).scaled(frac(1, 8));
  out += mul(cfg.chi, kappa_scalar(rep, e, x.gu, x.epair(mul(x.chib, inner))))
             .scaled(ifrac(1, 4));
  out += mul(cfg.chi, mul(x.chib, x.ighat(x.ighat(inner)))).scaled(frac(1, 16));
  return out;
}

Field e2_qq_c_closed(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& oc = cfg.omega_check;
  const Field& cc = cfg.c_check;
  Field pd0b = bar_field(rep, cfg.psi0_dag);
  Field a_om_r = split_31_row(rep, e, x.gu, mul(oc, x.psib)).alpha;
  Field psg3chi = mul(x.psib, mul(x.g3, cfg.chi));
  Field inner = mul(eta_bracket(oc, x.gammaF), cfg.psi) +
                mul(x.gu2, cfg.psi0_dag).scaled(GaussianRational::unit_i());
  Field ighat2_inner = mul(x.chib, x.ighat(x.ighat(inner)));

  Field out = mul(x.chib, x.iphi(cfg.psi_dag)).scaled(ifrac(-1, 8));
  out -= x.iphi(mul(oc, mul(x.chib, mul(x.g3, cfg.psi)))).scaled(ifrac(1, 48));
  out -= mul(x.ixi(e), x.iphi(cfg.e_dag)).scaled(frac(1, 2));
  out += x.ixi(mul(e, x.iphi(cfg.e_dag))).scaled(frac(1, 4));
  out -= mul(x.iphi(mul(pd0b, x.gu)), mul(x.g3, mul(x.ixi(e), cfg.psi))).scaled(ifrac(1, 24));
  out += mul(x.iphi(mul(a_om_r, x.gu)), mul(x.g3, mul(x.ixi(e), cfg.psi))).scaled(ifrac(1, 24));
  out -= x.ixi(mul(x.psib, x.iphi(cfg.psi_dag))).scaled(ifrac(1, 8));
  out -= x.ixi(mul(oc, mul(x.psib, mul(x.g3, x.iphi(cfg.psi))))).scaled(frac(1, 48));
  out += x.ixi(mul(psg3chi, x.epair(mul(x.chib, inner)))).scaled(frac(1, 24));
  out -= mul(x.ixi(e),
             mul(psg3chi, kappa_scalar(rep, e, x.gu, x.epair(mul(x.chib, inner)))))
             .scaled(frac(1, 12));
  out += mul(x.ixi(e), mul(psg3chi, ighat2_inner)).scaled(frac(1, 192));
  out -= mul(e, x.ixi(mul(psg3chi, ighat2_inner))).scaled(frac(1, 192));
  return out;
}

// ---------------------------------------------------------------------------
// Variational extraction.

namespace {

struct BlockSpec {
  std::vector<Field> shift_dirs;    // constant directions added to the coordinate
  std::vector<Field> extract_dirs;  // directions in the pairing model
  bool unknown_on_right = true;     // response = mul(dir, U) : else mul(U, dir)
  std::vector<JetKey> dom_basis;
  int dom_rows = 1, dom_cols = 1;
  int probe_parity = 0;
  GaussianRational post_scale = grat(1);
  bool unbar_result = false;
};

BlockSpec make_block_spec(const GammaRep& rep, VaryBlock block, int order) {
  BlockSpec s;
  auto scalar_dirs = [&](int i, int j) {
    std::vector<Field> dirs;
    for (const JetKey& k : fiber_basis(i, j, 1, 1)) dirs.push_back(unit_field(k, 1, 1, order));
    return dirs;
  };
  switch (block) {
    case VaryBlock::kEDagShift:
      s.shift_dirs = scalar_dirs(3, 3);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = false;
      s.dom_basis = fiber_basis(1, 1, 1, 1);
      s.probe_parity = 1;
      s.post_scale = grat(-1);
      break;
    case VaryBlock::kEShift:
      s.shift_dirs = scalar_dirs(1, 1);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = true;
      s.dom_basis = fiber_basis(3, 3, 1, 1);
      break;
    case VaryBlock::kOmegaCheckShift:
      s.shift_dirs = scalar_dirs(2, 1);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = false;
      s.dom_basis = fiber_basis(2, 3, 1, 1);
      break;
    case VaryBlock::kCCheckShift:
      s.shift_dirs = scalar_dirs(2, 0);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = false;
      s.dom_basis = fiber_basis(2, 4, 1, 1);
      break;
    case VaryBlock::kOmegaShift:
      s.shift_dirs = scalar_dirs(1, 2);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = true;
      s.dom_basis = fiber_basis(3, 2, 1, 1);
      break;
    case VaryBlock::kCShift:
      s.shift_dirs = scalar_dirs(0, 2);
      s.extract_dirs = s.shift_dirs;
      s.unknown_on_right = true;
      s.dom_basis = fiber_basis(4, 2, 1, 1);
      break;
    case VaryBlock::kPsiShift: {
      auto mb = majorana_direction_basis(rep);
      for (int mu = 0; mu < 4; ++mu)
        for (int m = 0; m < 4; ++m) {
          Field d = constant_spinor_form(1 << mu, 0, mb[m], order);
          s.shift_dirs.push_back(d);
          s.extract_dirs.push_back(bar_field(rep, d));
        }
      s.unknown_on_right = true;
      s.dom_basis = fiber_basis(3, 4, 4, 1);
      s.dom_rows = 4;
      s.probe_parity = 1;
      s.post_scale = ifrac(-1, 1);  // pairing carries a factor i
      break;
    }
    case VaryBlock::kPsiDagShift: {
      auto mb = majorana_direction_basis(rep);
      for (int fm = 0; fm < 16; ++fm) {
        if (std::popcount(unsigned(fm)) != 3) continue;
        for (int m = 0; m < 4; ++m) {
          Field d = constant_spinor_form(fm, 0x0F, mb[m], order);
          s.shift_dirs.push_back(d);
          s.extract_dirs.push_back(d);
        }
      }
      s.unknown_on_right = false;
      s.dom_basis = fiber_basis(1, 0, 1, 4);
      s.dom_cols = 4;
      // response = -i mul(X_psibar, dir); invert the factor and undo the bar
      s.post_scale = GaussianRational::unit_i();
      s.unbar_result = true;
      break;
    }
  }
  return s;
}

BVConfig apply_block_shift(const GammaRep& rep, const BVConfig& cfg, VaryBlock block,
                           const Field& delta) {
  BVConfig sh = cfg;
  switch (block) {
    case VaryBlock::kEShift: {
      sh.e = cfg.e + delta;
      sh.finalize(rep);
      // hold the gravitino and susy-ghost momenta fixed across the coframe
      // reparametrizations
      sh.psi0_dag = solve_theta(rep, sh.e, sh.gamma_und, cfg.psi_dag);
      Field chi_dag_fixed = w_apply(cfg.e, 4, cfg.chi0_dag);
      sh.chi0_dag = solve_fiber_op(make_w_op(sh.e, 4, 0, 0, 4, 1), chi_dag_fixed);
      sh.finalize(rep);
      break;
    }
    case VaryBlock::kPsiShift:
      sh.psi = cfg.psi + delta;
      sh.finalize(rep);
      break;
    case VaryBlock::kOmegaShift:
      sh.omega = cfg.omega + delta;
      break;
    case VaryBlock::kCShift:
      sh.c = cfg.c + delta;
      break;
    case VaryBlock::kEDagShift:
      sh.e_dag = cfg.e_dag + delta;
      break;
    case VaryBlock::kOmegaCheckShift:
      sh.omega_check = cfg.omega_check + delta;
      break;
    case VaryBlock::kCCheckShift:
      sh.c_check = cfg.c_check + delta;
      break;
    case VaryBlock::kPsiDagShift:
      sh.psi0_dag = solve_theta(rep, cfg.e, cfg.gamma_und, cfg.psi_dag + delta);
      sh.finalize(rep);
      break;
  }
  return sh;
}

}  // namespace

Field vary_density(const GammaRep& rep, const BVConfig& cfg, const DensityFn& density,
                   bool density_has_derivatives, VaryBlock block) {
  const int order = cfg.e.jet_order();
  BlockSpec spec = make_block_spec(rep, block, order);
  const Grassmann th = Grassmann::generator(kVariationGenerator);
  const size_t ndir = spec.shift_dirs.size();

  auto response = [&](const Field& dir_jet) {
    BVConfig sh = apply_block_shift(rep, cfg, block, gmul(th, dir_jet));
    return density(sh).linear_part(kVariationGenerator);
  };

  // Euler-Lagrange corrected linear response per constant direction.
  auto corrected = [&](const Field& dir) {
    Field g0 = response(dir);
    if (!density_has_derivatives) return g0;
    Field total = g0;
    for (int mu = 0; mu < 4; ++mu) {
      std::array<std::uint8_t, 4> emu{};
      emu[mu] = 1;
      Field xmu = monomial_jet(emu, order);
      Field gmu = response(mul(xmu, dir));
      Field hmu = gmu - mul(xmu, g0);
      total -= jet_partial(hmu, mu);
    }
    return total;
  };

  std::vector<Field> L(ndir);
  {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<Field>> futs(ndir);
    for (size_t k = 0; k < ndir; ++k)
      futs[k] = std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                           [&, k] { return corrected(spec.shift_dirs[k]); });
    for (size_t k = 0; k < ndir; ++k) L[k] = futs[k].get();
  }

  // Transfer coefficients of the pairing model on unit probes.
  const size_t n = spec.dom_basis.size();
  const Grassmann probe = spec.probe_parity ? Grassmann::generator(kProbeGen)
                                            : Grassmann(grat(1));
  const GrassmannMask probe_mask =
      spec.probe_parity ? GrassmannMask(GrassmannMask(1) << kProbeGen) : GrassmannMask(0);

  std::map<std::pair<size_t, JetKey>, std::vector<GaussianRational>> rows;
  for (size_t k = 0; k < ndir; ++k)
    for (size_t b = 0; b < n; ++b) {
      Field u = unit_field(spec.dom_basis[b], spec.dom_rows, spec.dom_cols, 0);
      Field probed = gmul(probe, u);
      Field p = spec.unknown_on_right ? mul(spec.extract_dirs[k], probed)
                                      : mul(probed, spec.extract_dirs[k]);
      for (const auto& [key, g] : p.terms()) {
        JetKey cod = key;
        cod.deriv = {};
        GaussianRational c = g.coefficient(probe_mask);
        if (c.is_zero()) continue;
        auto& row = rows[{k, cod}];
        if (row.empty()) row.assign(n, GaussianRational{});
        row[b] += c;
      }
    }

  // Select an invertible square subsystem.
  std::vector<std::pair<std::pair<size_t, JetKey>, std::vector<GaussianRational>>> all(
      rows.begin(), rows.end());
  std::vector<size_t> sel;
  {
    for (size_t i = 0; i < all.size() && sel.size() < n; ++i) {
      QMat test(int(sel.size()) + 1, int(n));
      for (size_t r = 0; r < sel.size(); ++r)
        for (size_t c = 0; c < n; ++c) test(int(r), int(c)) = all[sel[r]].second[c];
      for (size_t c = 0; c < n; ++c) test(int(sel.size()), int(c)) = all[i].second[c];
      if (test.rank() == int(sel.size()) + 1) sel.push_back(i);
    }
  }
  if (sel.size() != n)
    throw std::domain_error("vary_density: pairing model is rank deficient");

  QMat m(static_cast<int>(n), static_cast<int>(n));
  for (size_t r = 0; r < n; ++r)
    for (size_t c = 0; c < n; ++c) m(int(r), int(c)) = all[sel[r]].second[c];
  std::optional<QMat> minv = m.inverse();
  if (!minv) throw std::domain_error("vary_density: subsystem not invertible");

  // Collect all derivative slots present in the responses.
  int out_order = order;
  for (const Field& f : L) out_order = std::min(out_order, f.jet_order());
  std::vector<std::array<std::uint8_t, 4>> slots;
  {
    std::map<std::array<std::uint8_t, 4>, bool> seen;
    for (const Field& f : L)
      for (const auto& [k, g] : f.terms()) seen[k.deriv] = true;
    for (const auto& [d, v] : seen) slots.push_back(d);
  }

  Field u_out(spec.dom_rows, spec.dom_cols, out_order);
  for (const auto& d : slots) {
    std::vector<Grassmann> rhs(n);
    for (size_t r = 0; r < n; ++r) {
      size_t k = all[sel[r]].first.first;
      JetKey key = all[sel[r]].first.second;
      key.deriv = d;
      rhs[r] = L[k].coefficient(key);
    }
    for (size_t b = 0; b < n; ++b) {
      Grassmann acc;
      for (size_t r = 0; r < n; ++r) {
        const GaussianRational& c = (*minv)(int(b), int(r));
        if (c.is_zero() || rhs[r].is_zero()) continue;
        acc += c * rhs[r];
      }
      if (acc.is_zero()) continue;
      JetKey key = spec.dom_basis[b];
      key.deriv = d;
      u_out.add_term(key, acc);
    }
  }

  Field result = u_out.scaled(spec.post_scale).scaled(kVaryOrientation);
  if (spec.unbar_result) result = unbar_field(rep, result);
  return result;
}

// ---------------------------------------------------------------------------
// Momentum transformations of the antifield-linear layer.

Field q0_e_dag(const GammaRep& rep, const BVConfig& cfg) {
  DensityFn d = [&rep](const BVConfig& c) { return s1_density(rep, c); };
  Field u = vary_density(rep, cfg, d, true, VaryBlock::kEShift);
  QImage q0 = q0_apply(rep, cfg);
  return u - mul(q0.omega, cfg.omega_check) - mul(cfg.e, mul(q0.c, cfg.c_check));
}

Field q0_omega_check(const GammaRep& rep, const BVConfig& cfg) {
  DensityFn d = [&rep](const BVConfig& c) { return s1_density(rep, c); };
  Field u = vary_density(rep, cfg, d, true, VaryBlock::kOmegaShift);
  QImage q0 = q0_apply(rep, cfg);
  Field e_q0_oc = u - mul(cfg.omega_check, q0.e);
  return solve_fiber_op(make_w_op(cfg.e, 1, 2, 1, 1, 1), e_q0_oc);
}

Field q0_c_check(const GammaRep& rep, const BVConfig& cfg) {
  DensityFn d = [&rep](const BVConfig& c) { return s1_density(rep, c); };
  Field u = vary_density(rep, cfg, d, true, VaryBlock::kCShift);
  QImage q0 = q0_apply(rep, cfg);
  Field e2_q0_cc = u - mul(cfg.e, mul(cfg.c_check, q0.e));
  return solve_fiber_op(make_w_op(cfg.e, 2, 2, 0, 1, 1), e2_q0_cc);
}

Field q0_psi_dag(const GammaRep& rep, const BVConfig& cfg) {
  DensityFn d = [&rep](const BVConfig& c) { return s1_density(rep, c); };
  return vary_density(rep, cfg, d, true, VaryBlock::kPsiShift);
}

namespace {

// theta-image correction: the generator-linear part of the reparametrization
// prefactor along the coframe image, so that coordinate images compose as a
// left derivation through the reparametrization.
Field psi0_dag_image_from_psi_dag_image(const GammaRep& rep, const BVConfig& cfg,
                                        const Field& psi_dag_image, const Field& e_image) {
  const Grassmann th = Grassmann::generator(kVariationGenerator);
  int order = cfg.e.jet_order();
  Field esh = cfg.e + gmul(th, e_image);
  Field gush = eta_bracket(esh, gamma_field(rep, order));
  Field pre_lin =
      mul(esh, mul(gamma_wedge_field(rep, 3, order), mul(gush, cfg.psi0_dag)))
          .scaled(frac(1, 6))
          .linear_part(kVariationGenerator);
  return solve_theta(rep, cfg.e, cfg.gamma_und, psi_dag_image - pre_lin);
}

}  // namespace

Field q0_psi0_dag(const GammaRep& rep, const BVConfig& cfg) {
  QImage q0 = q0_apply(rep, cfg);
  return psi0_dag_image_from_psi_dag_image(rep, cfg, q0_psi_dag(rep, cfg), q0.e);
}

// ---------------------------------------------------------------------------
// Printed momentum displays.

Field q0_e_dag_display(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  Field dco = delta_chi_omega(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field chig3dpsi = mul(x.chib, mul(x.g3, dpsi));
  Field e3 = mul(cfg.e, mul(cfg.e, cfg.e));

  Field out = eom_all(rep, cfg).e;
  out += lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.e_dag);
  out -= rep_action(rep, cfg.c, cfg.e_dag);
  out += mul(x.iphi(mul(e3, x.psib)), cfg.chi0_dag).scaled(ifrac(-1, 12));
  for (int c = 0; c < 4; ++c) {
    Field vc(1, 1, x.order);
    JetKey k;
    k.lam_mask = std::uint8_t(1 << c);
    vc.add_term(k, Grassmann(grat(1)));
    // sum_mu e^mu_c eta^{cc} xi_dag_mu
    Field acc44(1, 1, x.order);
    for (int mu = 0; mu < 4; ++mu)
      acc44 += mul(cfg.einv[mu][c], cfg.xi_dag[mu]).scaled(rat(eta_sign(c)));
    out += x.iphi(eta_bracket(vc, acc44)).scaled(frac(1, 2));
  }
  // degree-repaired candidate for the mismatched printed term
  out -= mul(x.ixi(cfg.c_check), chig3dpsi).scaled(frac(1, 12));
  out += x.ixi(mul(chig3dpsi, cfg.c_check)).scaled(frac(1, 6));
  out -= mul(cfg.omega_check, dco);
  out -= mul(cfg.e, mul(cfg.c_check, x.ixi(dco)));
  return out;
}

Field e_q0_omega_check_display(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  const Field& oc = cfg.omega_check;
  const Field& cc = cfg.c_check;
  Field pd0b = bar_field(rep, cfg.psi0_dag);
  Field c0b = bar_field(rep, cfg.chi0_dag);
  Field c_dag = w_apply(e, 2, cc);
  Field chigampsi = mul(x.chib, mul(x.gammaF, cfg.psi));
  Field g3f = x.g3;
  Field A = x.ixi(cc);
  Field Bf = mul(cc, x.ixi(e));
  Field e2f = mul(e, e);

  Field out = mul(e, eom_all(rep, cfg).torsion);
  out -= x.ixi(eta_bracket(cfg.e_dag, e));
  out -= covariant_d(rep, cfg.omega, x.ixi(mul(e, oc)));
  out -= mul(e, rep_action(rep, cfg.c, oc));
  out += covariant_d(rep, cfg.omega, x.ixi(x.ixi(c_dag))).scaled(frac(1, 2));
  out -= mul(oc, lie_covariant(rep, cfg.xi, 1, cfg.omega, e));
  out -= mul(chigampsi, oc).scaled(frac(1, 2));
  out -= mul(x.chib, mul(eta_bracket(oc, g3f), cfg.psi)).scaled(frac(1, 12));
  out -= mul(chigampsi, Bf + mul(e, A).scaled(frac(1, 2))).scaled(frac(1, 2));
  out += mul(x.chib, mul(eta_bracket(Bf + mul(e, A).scaled(frac(1, 2)), g3f), cfg.psi))
             .scaled(frac(1, 12));
  Field t = mul(e, mul(pd0b, mul(x.gu, mul(x.gammaF, cfg.psi)))) -
            mul(pd0b, mul(x.gu, mul(eta_bracket(e, g3f), cfg.psi))).scaled(frac(1, 6));
  out += x.ixi(t).scaled(ifrac(1, 2));
  out += mul(e, mul(pd0b, mul(x.gu, mul(x.gammaF, cfg.chi)))).scaled(ifrac(1, 2));
  out -= mul(pd0b, mul(x.gu, mul(eta_bracket(e, g3f), cfg.chi))).scaled(ifrac(1, 12));
  out += x.ixi(mul(e2f, mul(c0b, mul(x.gu2, cfg.chi)))).scaled(ifrac(1, 8));
  return out;
}

Field e2_q0_c_check_display(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  Field pd0b = bar_field(rep, cfg.psi0_dag);
  Field c0b = bar_field(rep, cfg.chi0_dag);
  Field e2f = mul(e, e);
  Field chigampsi = mul(x.chib, mul(x.gammaF, cfg.psi));

  Field out = -covariant_d(rep, cfg.omega, mul(e, cfg.omega_check));
  out -= eta_bracket(e, cfg.e_dag);
  out += mul(e2f, mul(c0b, mul(x.gu2, cfg.chi))).scaled(ifrac(1, 8));
  out += mul(e, mul(pd0b, mul(x.gu, mul(x.gammaF, cfg.psi)))).scaled(ifrac(1, 2));
  out -= mul(pd0b, mul(x.gu, mul(eta_bracket(e, x.g3), cfg.psi))).scaled(ifrac(1, 12));
  out -= mul(cfg.c_check, lie_covariant(rep, cfg.xi, 1, cfg.omega, e2f)).scaled(frac(1, 2));
  out -= mul(cfg.c_check, mul(e, chigampsi));
  return out;
}

Field q0_psi_dag_display(const GammaRep& rep, const BVConfig& cfg) {
  Ctx x(rep, cfg);
  const Field& e = cfg.e;
  Field A = x.ixi(cfg.c_check);
  Field Bf = mul(cfg.c_check, x.ixi(e));
  Field chi_dag = w_apply(e, 4, cfg.chi0_dag);

  Field out = eom_all(rep, cfg).psi_col;
  out -= mul(x.g3, covariant_d(rep, cfg.omega, mul(cfg.omega_check, cfg.chi))).scaled(ifrac(1, 6));
  out += lie_covariant(rep, cfg.xi, 1, cfg.omega, cfg.psi_dag);
  out -= rep_action(rep, cfg.c, cfg.psi_dag);
  out += mul(mul(x.gammaF, cfg.chi), cfg.e_dag).scaled(GaussianRational::unit_i());
  out -= covariant_d(rep, cfg.omega,
                     mul(Bf, mul(x.g3, cfg.chi)) +
                         mul(mul(e, A).scaled(frac(1, 2)), mul(x.g3, cfg.chi)))
             .scaled(ifrac(1, 6));
  out -= x.iphi(chi_dag).scaled(frac(1, 2));
  return out;
}

// ---------------------------------------------------------------------------
// Squares and assembly.

Q0SquaredResiduals q0_squared_residuals(const GammaRep& rep, const BVConfig& cfg) {
  const Grassmann eps = Grassmann::generator(0);
  QImage q1 = q0_apply(rep, cfg);
  BVConfig sh = cfg;
  sh.e = cfg.e + gmul(eps, q1.e);
  sh.omega = cfg.omega + gmul(eps, q1.omega);
  sh.psi = cfg.psi + gmul(eps, q1.psi);
  sh.c = cfg.c + gmul(eps, q1.c);
  sh.chi = cfg.chi + gmul(eps, q1.chi);
  for (int m = 0; m < 4; ++m) sh.xi[m] = cfg.xi[m] + gmul(eps, q1.xi[m]);
  sh.finalize(rep);
  QImage q2 = q0_apply(rep, sh);

  Ctx x(rep, cfg);
  EomSet eom = eom_all(rep, cfg);
  Field dpsi = covariant_d(rep, cfg.omega, cfg.psi);
  Field dco = delta_chi_omega(rep, cfg);
  Field bracket_closed = dco_chi_bracket_closed(rep, cfg);
  Field gu_dpsi = mul(x.gu, dpsi);
  Field kap = split_21(rep, cfg.e, x.gu, x.epair(gu_dpsi)).kappa;
  Field scalar = mul(x.chib, kap) + mul(x.chib, x.ighat(x.ighat(gu_dpsi))).scaled(frac(1, 8));

  Q0SquaredResiduals res;
  res.e = q2.e.epsilon_linear_part() - x.iphi(eom.torsion).scaled(frac(1, 2));
  res.psi = q2.psi.epsilon_linear_part() -
            (x.iphi(dpsi).scaled(frac(1, 2)) - bracket_closed);
  Field q2omega = q2.omega.epsilon_linear_part();
  res.omega_e = mul(cfg.e, q2omega) -
                (x.iphi(eom.e).scaled(frac(1, 2)) +
                 mul(x.psib, mul(x.g3, x.iphi(dpsi))).scaled(frac(1, 12)) -
                 mul(mul(x.psib, mul(x.g3, cfg.chi)), scalar).scaled(frac(1, 6)));
  res.c = q2.c.epsilon_linear_part() -
          (x.iphi(dco).scaled(frac(1, 2)) + x.ixi(q2omega));
  res.chi = q2.chi.epsilon_linear_part();
  for (int m = 0; m < 4; ++m) res.xi[m] = q2.xi[m].epsilon_linear_part();
  return res;
}

namespace {

// Field and ghost components of the quadratic layer (used on both the base
// and the shifted configuration).
struct QqFieldPart {
  Field e, omega, psi, c;
};

QqFieldPart qq_field_part(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  QqFieldPart out;
  if (opt.mechanical_fields) {
    DensityFn d = [&rep, &opt](const BVConfig& c) { return quadratic_density(rep, c, opt); };
    out.e = vary_density(rep, cfg, d, false, VaryBlock::kEDagShift);
    Field e_qq_omega = vary_density(rep, cfg, d, false, VaryBlock::kOmegaCheckShift);
    Field e2_qq_c = vary_density(rep, cfg, d, false, VaryBlock::kCCheckShift);
    out.omega = invert_w1_12(cfg.e, e_qq_omega);
    out.c = solve_fiber_op(make_w_op(cfg.e, 2, 0, 2, 1, 1), e2_qq_c);
    out.psi = vary_density(rep, cfg, d, false, VaryBlock::kPsiDagShift);
  } else {
    out.e = qq_e_closed(rep, cfg);
    out.omega = invert_w1_12(cfg.e, e_qq_omega_closed(rep, cfg));
    out.psi = qq_psi_closed(rep, cfg, opt.psi_variant);
    Field e2c = e2_qq_c_closed(rep, cfg);
    if (opt.l_correction) {
      DensityFn corr = [&rep](const BVConfig& c) {
        Field l = l_correction_field(rep, c);
        return mul(w_apply(c.e, 2, c.c_check), iota_vector(c.xi, 1, l)).scaled(frac(1, 2));
      };
      e2c += vary_density(rep, cfg, corr, false, VaryBlock::kCCheckShift);
    }
    out.c = solve_fiber_op(make_w_op(cfg.e, 2, 0, 2, 1, 1), e2c);
  }
  return out;
}

}  // namespace

QImage qq_apply(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  const int order = cfg.e.jet_order();
  DensityFn d = [&rep, &opt](const BVConfig& c) { return quadratic_density(rep, c, opt); };
  QqFieldPart fp = qq_field_part(rep, cfg, opt);

  QImage img;
  img.e = fp.e;
  img.omega = fp.omega;
  img.psi = fp.psi;
  img.c = fp.c;
  img.chi = Field(4, 1, order);
  for (int m = 0; m < 4; ++m) img.xi[m] = Field(1, 1, order);

  Field u_e = vary_density(rep, cfg, d, false, VaryBlock::kEShift);
  img.e_dag = u_e - mul(img.omega, cfg.omega_check) - mul(cfg.e, mul(img.c, cfg.c_check));
  Field psi_dag_img = vary_density(rep, cfg, d, false, VaryBlock::kPsiShift);
  img.psi0_dag = psi0_dag_image_from_psi_dag_image(rep, cfg, psi_dag_img, img.e);

  // The density carries no connection or rotation-ghost dependence, so the
  // corresponding pairing lines force these momentum components.
  img.omega_check = solve_fiber_op(make_w_op(cfg.e, 1, 2, 1, 1, 1),
                                   -mul(cfg.omega_check, img.e));
  img.c_check = solve_fiber_op(make_w_op(cfg.e, 2, 2, 0, 1, 1),
                               -mul(cfg.e, mul(cfg.c_check, img.e)));
  return img;
}

QImage q_total_apply(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  QImage q0 = q0_apply(rep, cfg);
  QImage qq = qq_apply(rep, cfg, opt);

  QImage img;
  img.e = q0.e + qq.e;
  img.omega = q0.omega + qq.omega;
  img.psi = q0.psi + qq.psi;
  img.c = q0.c + qq.c;
  img.chi = q0.chi;
  for (int m = 0; m < 4; ++m) img.xi[m] = q0.xi[m];

  DensityFn s1 = [&rep](const BVConfig& c) { return s1_density(rep, c); };
  Field u_e = vary_density(rep, cfg, s1, true, VaryBlock::kEShift);
  Field q0_edag = u_e - mul(q0.omega, cfg.omega_check) - mul(cfg.e, mul(q0.c, cfg.c_check));
  img.e_dag = q0_edag + qq.e_dag;

  Field u_om = vary_density(rep, cfg, s1, true, VaryBlock::kOmegaShift);
  Field e_q0_oc = u_om - mul(cfg.omega_check, q0.e);
  img.omega_check = solve_fiber_op(make_w_op(cfg.e, 1, 2, 1, 1, 1), e_q0_oc) + qq.omega_check;

  Field u_c = vary_density(rep, cfg, s1, true, VaryBlock::kCShift);
  Field e2_q0_cc = u_c - mul(cfg.e, mul(cfg.c_check, q0.e));
  img.c_check = solve_fiber_op(make_w_op(cfg.e, 2, 2, 0, 1, 1), e2_q0_cc) + qq.c_check;

  Field psi_dag_q0 = vary_density(rep, cfg, s1, true, VaryBlock::kPsiShift);
  img.psi0_dag = psi0_dag_image_from_psi_dag_image(rep, cfg, psi_dag_q0, q0.e) + qq.psi0_dag;
  return img;
}

BVConfig shift_config(const GammaRep& rep, const BVConfig& cfg, const QImage& img) {
  const Grassmann eps = Grassmann::generator(0);
  BVConfig sh = cfg;
  sh.e = cfg.e + gmul(eps, img.e);
  sh.omega = cfg.omega + gmul(eps, img.omega);
  sh.psi = cfg.psi + gmul(eps, img.psi);
  sh.c = cfg.c + gmul(eps, img.c);
  sh.chi = cfg.chi + gmul(eps, img.chi);
  for (int m = 0; m < 4; ++m) sh.xi[m] = cfg.xi[m] + gmul(eps, img.xi[m]);
  sh.e_dag = cfg.e_dag + gmul(eps, img.e_dag);
  sh.omega_check = cfg.omega_check + gmul(eps, img.omega_check);
  sh.c_check = cfg.c_check + gmul(eps, img.c_check);
  sh.psi0_dag = cfg.psi0_dag + gmul(eps, img.psi0_dag);
  sh.finalize(rep);
  return sh;
}

CmeResiduals cme_residuals(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  auto check = [&](const Field& f) {
    if (field_uses_generator(f, 0) || field_uses_generator(f, kVariationGenerator) ||
        field_uses_generator(f, kProbeGen))
      throw std::invalid_argument("cme_residuals: configuration uses a reserved generator");
  };
  check(cfg.e);
  check(cfg.omega);
  check(cfg.psi);
  check(cfg.c);
  check(cfg.chi);
  for (int m = 0; m < 4; ++m) check(cfg.xi[m]);
  check(cfg.e_dag);
  check(cfg.omega_check);
  check(cfg.c_check);
  check(cfg.psi0_dag);

  QImage img = q_total_apply(rep, cfg, opt);
  BVConfig sh = shift_config(rep, cfg, img);

  QImage q0b = q0_apply(rep, sh);
  QqFieldPart qqb = qq_field_part(rep, sh, opt);

  CmeResiduals res;
  res.e = (q0b.e + qqb.e).epsilon_linear_part();
  res.psi = (q0b.psi + qqb.psi).epsilon_linear_part();
  res.omega_e = mul(cfg.e, (q0b.omega + qqb.omega).epsilon_linear_part());
  res.c_e2 = w_apply(cfg.e, 2, (q0b.c + qqb.c).epsilon_linear_part());
  res.chi = q0b.chi.epsilon_linear_part();
  for (int m = 0; m < 4; ++m) res.xi[m] = q0b.xi[m].epsilon_linear_part();
  return res;
}

std::array<Field, 4> qq_phi(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  const Grassmann eps = Grassmann::generator(0);
  QqFieldPart fp = qq_field_part(rep, cfg, opt);
  BVConfig sh = cfg;
  sh.e = cfg.e + gmul(eps, fp.e);
  sh.finalize(rep);
  std::array<Field, 4> res;
  for (int m = 0; m < 4; ++m) res[m] = sh.phi[m].epsilon_linear_part();
  return res;
}

Field qq_squared_e(const GammaRep& rep, const BVConfig& cfg, const BVOptions& opt) {
  const Grassmann eps = Grassmann::generator(0);
  QImage qq = qq_apply(rep, cfg, opt);
  BVConfig sh = cfg;
  sh.e = cfg.e + gmul(eps, qq.e);
  sh.omega = cfg.omega + gmul(eps, qq.omega);
  sh.psi = cfg.psi + gmul(eps, qq.psi);
  sh.c = cfg.c + gmul(eps, qq.c);
  sh.e_dag = cfg.e_dag + gmul(eps, qq.e_dag);
  sh.omega_check = cfg.omega_check + gmul(eps, qq.omega_check);
  sh.c_check = cfg.c_check + gmul(eps, qq.c_check);
  sh.psi0_dag = cfg.psi0_dag + gmul(eps, qq.psi0_dag);
  sh.finalize(rep);
  Field qe2 = qq_field_part(rep, sh, opt).e.epsilon_linear_part();
  return w_apply(cfg.e, 2, qe2);
}

bool field_uses_generator(const Field& f, int g) {
  const GrassmannMask bit = GrassmannMask(GrassmannMask(1) << g);
  for (const auto& [k, gr] : f.terms())
    for (const auto& [mask, c] : gr.terms())
      if (mask & bit) return true;
  return false;
}

std::string first_witness(const std::string& name, const Field& f) {
  if (f.is_zero()) return std::string();
  const auto& [k, g] = *f.terms().begin();
  const auto& [mask, coeff] = *g.terms().begin();
  std::ostringstream os;
  os << name << ";form=" << int(k.form_mask) << ";lam=" << int(k.lam_mask)
     << ";spin=" << int(k.row) << "," << int(k.col) << ";deriv=" << int(k.deriv[0])
     << int(k.deriv[1]) << int(k.deriv[2]) << int(k.deriv[3]) << ";monomial=0x"
     << std::hex << (unsigned long)(mask) << std::dec << ";coeff=" << coeff.str();
  return os.str();
}

}  // namespace sugra
