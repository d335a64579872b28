#include "sugra/structure_maps.hpp"

#include <bit>
#include <chrono>
#include <map>
#include <stdexcept>

namespace sugra {

namespace {

constexpr int kProbeGenerator = kMaxGrassmannGenerators - 1;  // never sampled

QMat conj_transpose(const QMat& a) {
  QMat r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j).conj();
  return r;
}

// Left inverse (A^H A)^{-1} A^H of an injective matrix.
QMat left_inverse(const QMat& a) {
  QMat ah = conj_transpose(a);
  auto gram_inv = (ah * a).inverse();
  if (!gram_inv) throw std::domain_error("left_inverse: body matrix not injective");
  return (*gram_inv) * ah;
}

Field basis_field(const JetKey& key, int rows, int cols, const Grassmann& coeff) {
  Field f(rows, cols, Field::kDefaultJetOrder);
  f.add_term(key, coeff);
  return f;
}

GaussianRational mask_coefficient(const Grassmann& g, GrassmannMask mask) {
  for (const auto& [m, c] : g.terms())
    if (m == mask) return c;
  return GaussianRational{};
}

}  // namespace

std::vector<JetKey> fiber_basis(int form_deg, int lam_deg, int spin_rows,
                                int spin_cols) {
  std::vector<JetKey> basis;
  for (int fm = 0; fm < 16; ++fm) {
    if (std::popcount(unsigned(fm)) != form_deg) continue;
    for (int lm = 0; lm < 16; ++lm) {
      if (std::popcount(unsigned(lm)) != lam_deg) continue;
      for (int r = 0; r < spin_rows; ++r)
        for (int c = 0; c < spin_cols; ++c) {
          JetKey k;
          k.form_mask = std::uint8_t(fm);
          k.lam_mask = std::uint8_t(lm);
          k.row = std::uint8_t(r);
          k.col = std::uint8_t(c);
          basis.push_back(k);
        }
    }
  }
  return basis;
}

FiberOp make_w_op(const Field& e, int k, int i, int j, int spin_rows, int spin_cols) {
  Field ek = Field::scalar_constant(Grassmann(grat(1)), e.jet_order());
  Rational factorial(1);
  for (int n = 1; n <= k; ++n) {
    ek = mul(ek, e);
    factorial *= n;
  }
  ek = ek.scaled(Rational(1) / factorial);
  FiberOp op;
  op.dom_basis = fiber_basis(i, j, spin_rows, spin_cols);
  op.cod_basis = fiber_basis(i + k, j + k, spin_rows, spin_cols);
  op.dom_rows = spin_rows;
  op.dom_cols = spin_cols;
  op.cod_rows = spin_rows;
  op.cod_cols = spin_cols;
  op.apply = [ek](const Field& x) { return mul(ek, x); };
  return op;
}

FiberOp make_rho_op(const Field& e, int i, int j, int spin_rows, int spin_cols) {
  FiberOp op;
  op.dom_basis = fiber_basis(i, j, spin_rows, spin_cols);
  op.cod_basis = fiber_basis(i + 1, j - 1, spin_rows, spin_cols);
  op.dom_rows = spin_rows;
  op.dom_cols = spin_cols;
  op.cod_rows = spin_rows;
  op.cod_cols = spin_cols;
  Field ecopy = e;
  op.apply = [ecopy](const Field& x) { return eta_bracket(ecopy, x); };
  return op;
}

QMat fiber_body_matrix(const FiberOp& op, int coeff_parity) {
  Grassmann probe = coeff_parity == 0 ? Grassmann(grat(1))
                                      : Grassmann::generator(kProbeGenerator);
  GrassmannMask probe_mask =
      coeff_parity == 0 ? GrassmannMask(0) : GrassmannMask(1) << kProbeGenerator;

  std::map<JetKey, int> cod_index;
  for (size_t n = 0; n < op.cod_basis.size(); ++n)
    cod_index[op.cod_basis[n]] = int(n);

  QMat m(int(op.cod_basis.size()), int(op.dom_basis.size()));
  for (size_t col = 0; col < op.dom_basis.size(); ++col) {
    Field image = op.apply(basis_field(op.dom_basis[col], op.dom_rows, op.dom_cols, probe));
    for (const auto& [k, g] : image.terms()) {
      if (k.deriv_order() != 0) continue;
      auto it = cod_index.find(k);
      if (it == cod_index.end())
        throw std::domain_error("fiber_body_matrix: image outside codomain fiber");
      m(it->second, int(col)) = mask_coefficient(g, probe_mask);
    }
  }
  return m;
}

Field solve_fiber_op(const FiberOp& op, const Field& y) {
  QMat p_even = left_inverse(fiber_body_matrix(op, 0));
  QMat p_odd = left_inverse(fiber_body_matrix(op, 1));

  std::map<JetKey, int> cod_index;
  for (size_t n = 0; n < op.cod_basis.size(); ++n)
    cod_index[op.cod_basis[n]] = int(n);

  auto approx_solve = [&](const Field& r) {
    // slot decomposition: (derivative index, Grassmann monomial) -> vector
    std::map<std::pair<std::array<std::uint8_t, 4>, GrassmannMask>,
             std::vector<GaussianRational>>
        slots;
    for (const auto& [k, g] : r.terms()) {
      JetKey reduced = k;
      reduced.deriv = {};
      auto it = cod_index.find(reduced);
      if (it == cod_index.end())
        throw std::domain_error("solve_fiber_op: value outside codomain fiber");
      for (const auto& [mask, coeff] : g.terms()) {
        auto& vec = slots[{k.deriv, mask}];
        if (vec.empty()) vec.assign(op.cod_basis.size(), GaussianRational{});
        vec[it->second] = coeff;
      }
    }
    Field dx(op.dom_rows, op.dom_cols, y.jet_order());
    for (const auto& [slot, vec] : slots) {
      int parity = std::popcount(unsigned(slot.second)) & 1;
      const QMat& p = parity == 0 ? p_even : p_odd;
      for (int row = 0; row < p.rows(); ++row) {
        GaussianRational acc{};
        for (int coln = 0; coln < p.cols(); ++coln) acc += p(row, coln) * vec[coln];
        if (acc.is_zero()) continue;
        JetKey k = op.dom_basis[size_t(row)];
        k.deriv = slot.first;
        dx.add_term(k, Grassmann::monomial(slot.second, acc));
      }
    }
    return dx;
  };

  Field x(op.dom_rows, op.dom_cols, y.jet_order());
  Field r = y;
  for (int iter = 0; iter < 64; ++iter) {
    if (r.is_zero()) return x;
    Field dx = approx_solve(r);
    if (dx.is_zero()) break;
    x += dx;
    r -= op.apply(dx);
  }
  if (r.is_zero()) return x;
  throw std::domain_error("solve_fiber_op: no exact solution (value not in image)");
}

Field w_apply(const Field& e, int k, const Field& x) {
  Field ek = Field::scalar_constant(Grassmann(grat(1)), e.jet_order());
  Rational factorial(1);
  for (int n = 1; n <= k; ++n) {
    ek = mul(ek, e);
    factorial *= n;
  }
  return mul(ek.scaled(Rational(1) / factorial), x);
}

Field invert_w1_12(const Field& e, const Field& y) {
  return solve_fiber_op(make_w_op(e, 1, 1, 2, 1, 1), y);
}

Field invert_w2_02(const Field& e, const Field& y) {
  return solve_fiber_op(make_w_op(e, 2, 0, 2, 1, 1), y);
}

Split31 split_31(const GammaRep& rep, const Field& e, const Field& gamma_und,
                 const Field& theta) {
  Field gam3 = gamma_wedge_field(rep, 3, e.jet_order());
  Field eg = mul(e, gamma_und);
  Field k_op = mul(gam3, eg).scaled(GaussianRational::unit_i());
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 4, 1);
  op.cod_basis = fiber_basis(3, 4, 4, 1);
  op.dom_rows = op.cod_rows = 4;
  op.apply = [k_op](const Field& a) { return mul(k_op, a); };
  Split31 s;
  s.alpha = solve_fiber_op(op, mul(gam3, theta));
  s.beta = theta - mul(eg, s.alpha).scaled(GaussianRational::unit_i());
  return s;
}

Split31 split_31_row(const GammaRep& rep, const Field& e, const Field& gamma_und,
                     const Field& theta) {
  Field gam3 = gamma_wedge_field(rep, 3, e.jet_order());
  Field r_op = mul(gamma_und, gam3);
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 1, 4);
  op.cod_basis = fiber_basis(3, 4, 1, 4);
  op.dom_cols = op.cod_cols = 4;
  op.apply = [&e, r_op](const Field& a) {
    return mul(mul(e, a), r_op).scaled(GaussianRational::unit_i());
  };
  Split31 s;
  s.alpha = solve_fiber_op(op, mul(theta, gam3));
  s.beta = theta - mul(mul(e, s.alpha), gamma_und).scaled(GaussianRational::unit_i());
  return s;
}

Split21 split_21(const GammaRep& rep, const Field& e, const Field& gamma_und,
                 const Field& theta) {
  Field gam3 = gamma_wedge_field(rep, 3, e.jet_order());
  Field pre = mul(gamma_und, gam3);
  Field k_op = mul(pre, e);
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 4, 1);
  op.cod_basis = fiber_basis(3, 4, 4, 1);
  op.dom_rows = op.cod_rows = 4;
  op.apply = [k_op](const Field& a) { return mul(k_op, a); };
  Split21 s;
  s.kappa = solve_fiber_op(op, mul(pre, theta));
  s.vark = theta - mul(e, s.kappa);
  return s;
}

Split21 split_21_row(const GammaRep& rep, const Field& e, const Field& gamma_und,
                     const Field& theta) {
  Field gam3 = gamma_wedge_field(rep, 3, e.jet_order());
  Field r_op = mul(gam3, gamma_und);
  FiberOp op;
  op.dom_basis = fiber_basis(1, 0, 1, 4);
  op.cod_basis = fiber_basis(3, 4, 1, 4);
  op.dom_cols = op.cod_cols = 4;
  op.apply = [&e, r_op](const Field& a) { return mul(mul(e, a), r_op); };
  Split21 s;
  s.kappa = solve_fiber_op(op, mul(theta, r_op));
  s.vark = theta - mul(e, s.kappa);
  return s;
}

std::vector<CheckResult> check_map_ranks(const GammaRep& rep, const Field& e,
                                         const Field& gamma_und) {
  std::vector<CheckResult> out;
  auto record = [&out](const std::string& id, bool ok, const std::string& witness) {
    CheckResult r;
    r.suite = "structure_maps";
    r.check_id = id;
    r.exact_zero = ok;
    r.witness = ok ? "" : witness;
    out.push_back(r);
  };

  struct Arrow {
    int i, j;
    bool injective, surjective;
  };
  // Wedge-once arrows on the 5x5 grid of fibers.
  const Arrow arrows[] = {
      {0, 0, true, false},  {0, 1, true, false}, {0, 2, true, false},
      {0, 3, true, true},   {1, 0, true, false}, {1, 1, true, false},
      {1, 2, true, true},   {1, 3, false, true}, {2, 0, true, false},
      {2, 1, true, true},   {2, 2, false, true}, {2, 3, false, true},
      {3, 0, true, true},   {3, 1, false, true}, {3, 2, false, true},
      {3, 3, false, true},
  };
  for (const Arrow& a : arrows) {
    FiberOp op = make_w_op(e, 1, a.i, a.j, 1, 1);
    QMat m = fiber_body_matrix(op, 0);
    int rank = m.rank();
    bool inj = rank == int(op.dom_basis.size());
    bool surj = rank == int(op.cod_basis.size());
    bool ok = (inj == a.injective) && (surj == a.surjective);
    record("w1-" + std::to_string(a.i) + std::to_string(a.j), ok,
           "rank " + std::to_string(rank));
  }

  // Squared-wedge and bracket isomorphisms.
  struct Iso {
    std::string id;
    FiberOp op;
  };
  std::vector<Iso> isos;
  isos.push_back({"w2-02", make_w_op(e, 2, 0, 2, 1, 1)});
  isos.push_back({"w2-20", make_w_op(e, 2, 2, 0, 1, 1)});
  isos.push_back({"w2-11", make_w_op(e, 2, 1, 1, 1, 1)});
  isos.push_back({"w4-00", make_w_op(e, 4, 0, 0, 1, 1)});
  isos.push_back({"rho-01", make_rho_op(e, 0, 1, 1, 1)});
  isos.push_back({"rho-34", make_rho_op(e, 3, 4, 1, 1)});
  for (const auto& iso : isos) {
    QMat m = fiber_body_matrix(iso.op, 0);
    bool ok = m.rows() == m.cols() && m.rank() == m.rows();
    record(iso.id, ok, "rank " + std::to_string(m.rank()));
  }

  // Spinor-sector maps, both coefficient parities.
  Field gam3 = gamma_wedge_field(rep, 3, e.jet_order());
  auto spinor_op = [&](const Field& left_e, bool pre_gamma_und, bool post_gamma_und) {
    FiberOp op;
    op.dom_basis = fiber_basis(1, 0, 4, 1);
    op.dom_rows = op.cod_rows = 4;
    op.apply = [left_e, gam3, gamma_und, pre_gamma_und, post_gamma_und](const Field& x) {
      Field inner = x;
      if (post_gamma_und) inner = mul(gamma_und, inner);
      inner = mul(gam3, inner);
      if (pre_gamma_und) inner = mul(gamma_und, inner);
      return mul(left_e, inner).scaled(rat(1, 6));
    };
    return op;
  };
  for (int parity = 0; parity < 2; ++parity) {
    std::string tag = parity == 0 ? "-even" : "-odd";
    {
      FiberOp op = spinor_op(e, false, false);  // (1/3!) e gamma^3 psi
      op.cod_basis = fiber_basis(2, 4, 4, 1);
      QMat m = fiber_body_matrix(op, parity);
      record("theta-24" + tag, m.rank() == 16, "rank " + std::to_string(m.rank()));
    }
    {
      FiberOp op = spinor_op(e, false, true);  // (1/3!) e gamma^3 gamma_und psi
      op.cod_basis = fiber_basis(3, 4, 4, 1);
      QMat m = fiber_body_matrix(op, parity);
      record("theta-34" + tag, m.rows() == 16 && m.rank() == 16,
             "rank " + std::to_string(m.rank()));
    }
    {
      FiberOp op = spinor_op(e, true, false);  // (1/3!) e gamma_und gamma^3 psi
      op.cod_basis = fiber_basis(3, 4, 4, 1);
      QMat m = fiber_body_matrix(op, parity);
      record("theta-34-swapped" + tag, m.rows() == 16 && m.rank() == 16,
             "rank " + std::to_string(m.rank()));
    }
  }
  return out;
}

}  // namespace sugra
