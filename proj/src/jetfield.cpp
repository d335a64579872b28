#include "sugra/jetfield.hpp"

#include <bit>
#include <sstream>

namespace sugra {

namespace {

int popcount8(std::uint8_t m) { return std::popcount(static_cast<unsigned>(m)); }

Rational binomial(int n, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= rat(n - i, i + 1);
  return r;
}

Rational leibniz_weight(const std::array<std::uint8_t, 4>& a,
                        const std::array<std::uint8_t, 4>& b) {
  Rational w(1);
  for (int mu = 0; mu < 4; ++mu) w *= binomial(a[mu] + b[mu], a[mu]);
  return w;
}

// Spin-shape composition for binary operations.  A 1x1 factor composes with
// anything; otherwise inner dimensions must match.
void compose_shapes(int ra, int ca, int rb, int cb, int* rr, int* rc) {
  if (ra == 1 && ca == 1) {
    *rr = rb;
    *rc = cb;
  } else if (rb == 1 && cb == 1) {
    *rr = ra;
    *rc = ca;
  } else if (ca == rb) {
    *rr = ra;
    *rc = cb;
  } else {
    throw std::invalid_argument("Field: incompatible spin shapes");
  }
}

// Dispatch the spin indices of one product term.  Returns false when the
// inner indices do not match (term pair contributes nothing).
bool compose_indices(const Field& a, const Field& b, const JetKey& ka,
                     const JetKey& kb, std::uint8_t* row, std::uint8_t* col) {
  if (a.spin_rows() == 1 && a.spin_cols() == 1) {
    *row = kb.row;
    *col = kb.col;
    return true;
  }
  if (b.spin_rows() == 1 && b.spin_cols() == 1) {
    *row = ka.row;
    *col = ka.col;
    return true;
  }
  if (ka.col != kb.row) return false;
  *row = ka.row;
  *col = kb.col;
  return true;
}

// Degree -2 bracket on exterior monomials of V, determined by the pairing
// eta = diag(-1,1,1,1) via
//   [v_a, v_b y] = eta_ab y - v_b [v_a, y]
//   [v_a x, y]   = v_a [x, y] + (-1)^{|x||y|} [v_a, y] x.
using LamPoly = std::map<std::uint8_t, Rational>;

void lam_add(LamPoly* p, std::uint8_t mask, const Rational& c) {
  Rational& slot = (*p)[mask];
  slot += c;
  if (slot == 0) p->erase(mask);
}

LamPoly lam_prepend(int a, const LamPoly& p) {
  LamPoly r;
  std::uint8_t bit = std::uint8_t(1) << a;
  for (const auto& [m, c] : p) {
    if (m & bit) continue;
    lam_add(&r, std::uint8_t(bit | m), merge_sign(bit, m) < 0 ? Rational(-c) : c);
  }
  return r;
}

LamPoly lam_append(const LamPoly& p, std::uint8_t x) {
  LamPoly r;
  for (const auto& [m, c] : p) {
    if (m & x) continue;
    lam_add(&r, std::uint8_t(m | x), merge_sign(m, x) < 0 ? Rational(-c) : c);
  }
  return r;
}

LamPoly lam_bracket(std::uint8_t A, std::uint8_t B) {
  static std::map<std::pair<std::uint8_t, std::uint8_t>, LamPoly> cache;
  auto it = cache.find({A, B});
  if (it != cache.end()) return it->second;

  LamPoly result;
  if (A != 0 && B != 0) {
    int a = std::countr_zero(static_cast<unsigned>(A));
    std::uint8_t rest = std::uint8_t(A & (A - 1));
    if (rest == 0) {
      // [v_a, v_b y] = eta_ab y - v_b [v_a, y]
      int b = std::countr_zero(static_cast<unsigned>(B));
      std::uint8_t tail = std::uint8_t(B & (B - 1));
      if (a == b) lam_add(&result, tail, Rational(eta_sign(a)));
      LamPoly inner = lam_bracket(A, tail);
      for (const auto& [m, c] : lam_prepend(b, inner)) lam_add(&result, m, -c);
    } else {
      // [v_a x, y] = v_a [x, y] + (-1)^{|x||y|} [v_a, y] x
      for (const auto& [m, c] : lam_prepend(a, lam_bracket(rest, B)))
        lam_add(&result, m, c);
      int sign = ((popcount8(rest) * popcount8(B)) % 2 == 0) ? 1 : -1;
      LamPoly single = lam_bracket(std::uint8_t(1) << a, B);
      for (const auto& [m, c] : lam_append(single, rest))
        lam_add(&result, m, sign > 0 ? c : Rational(-c));
    }
  }
  cache[{A, B}] = result;
  return result;
}

const Grassmann kZeroGrassmann{};

}  // namespace

Field::Field(int spin_rows, int spin_cols, int jet_order)
    : spin_rows_(spin_rows), spin_cols_(spin_cols), jet_order_(jet_order) {
  if ((spin_rows != 1 && spin_rows != 4) || (spin_cols != 1 && spin_cols != 4))
    throw std::invalid_argument("Field: spin dimensions must be 1 or 4");
}

Field Field::scalar_constant(const Grassmann& g, int jet_order) {
  Field f(1, 1, jet_order);
  f.add_term(JetKey{}, g);
  return f;
}

Field Field::matrix_constant(const QMat& m, int jet_order) {
  Field f(4, 4, jet_order);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      JetKey k;
      k.row = std::uint8_t(r);
      k.col = std::uint8_t(c);
      f.add_term(k, Grassmann(m(r, c)));
    }
  return f;
}

void Field::add_term(const JetKey& key, const Grassmann& value) {
  if (value.is_zero()) return;
  if (key.deriv_order() > jet_order_) return;
  auto [it, inserted] = terms_.try_emplace(key, value);
  if (!inserted) {
    it->second += value;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

const Grassmann& Field::coefficient(const JetKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? kZeroGrassmann : it->second;
}

Field Field::operator+(const Field& o) const {
  Field r = *this;
  r += o;
  return r;
}

Field& Field::operator+=(const Field& o) {
  // A zero field carries no information: adopt the other operand wholesale.
  if (terms_.empty()) return *this = o;
  if (o.terms_.empty()) return *this;
  if (spin_rows_ != o.spin_rows_ || spin_cols_ != o.spin_cols_)
    throw std::invalid_argument("Field: adding different spin shapes");
  int order = std::min(jet_order_, o.jet_order_);
  *this = truncate_jet(order);
  for (const auto& [k, v] : o.terms_) add_term(k, v);
  return *this;
}

Field Field::operator-(const Field& o) const { return *this + (-o); }

Field& Field::operator-=(const Field& o) { return *this += -o; }

Field Field::operator-() const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  for (const auto& [k, v] : terms_) r.terms_.emplace(k, -v);
  return r;
}

bool Field::operator==(const Field& o) const {
  if (!is_zero() && !o.is_zero() &&
      (spin_rows_ != o.spin_rows_ || spin_cols_ != o.spin_cols_))
    return false;
  return terms_ == o.terms_;
}

Field Field::scaled(const GaussianRational& c) const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  if (c.is_zero()) return r;
  for (const auto& [k, v] : terms_) r.terms_.emplace(k, c * v);
  return r;
}

Field Field::scaled(const Rational& c) const { return scaled(GaussianRational(c)); }

int Field::form_degree() const {
  int d = -1;
  for (const auto& [k, v] : terms_) {
    int kd = popcount8(k.form_mask);
    if (d == -1) d = kd;
    if (d != kd) throw std::domain_error("Field::form_degree: inhomogeneous");
  }
  return d == -1 ? 0 : d;
}

int Field::lam_degree() const {
  int d = -1;
  for (const auto& [k, v] : terms_) {
    int kd = popcount8(k.lam_mask);
    if (d == -1) d = kd;
    if (d != kd) throw std::domain_error("Field::lam_degree: inhomogeneous");
  }
  return d == -1 ? 0 : d;
}

int Field::coeff_parity() const {
  int p = -1;
  for (const auto& [k, v] : terms_) {
    int vp = v.parity();
    if (p == -1) p = vp;
    if (p != vp) throw std::domain_error("Field::coeff_parity: inhomogeneous");
  }
  return p == -1 ? 0 : p;
}

int Field::total_parity() const {
  int p = -1;
  for (const auto& [k, v] : terms_) {
    int tp = (v.parity() + popcount8(k.form_mask) + popcount8(k.lam_mask)) & 1;
    if (p == -1) p = tp;
    if (p != tp) throw std::domain_error("Field::total_parity: inhomogeneous");
  }
  return p == -1 ? 0 : p;
}

int Field::max_coeff_degree() const {
  int d = 0;
  for (const auto& [k, v] : terms_) d = std::max(d, v.max_degree());
  return d;
}

Field Field::truncate_jet(int order) const {
  Field r(spin_rows_, spin_cols_, order);
  for (const auto& [k, v] : terms_)
    if (k.deriv_order() <= order) r.terms_.emplace(k, v);
  return r;
}

Field Field::epsilon_linear_part() const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  for (const auto& [k, v] : terms_) r.add_term(k, v.epsilon_linear_part());
  return r;
}

Field Field::epsilon_free_part() const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  for (const auto& [k, v] : terms_) r.add_term(k, v.epsilon_free_part());
  return r;
}

Field Field::linear_part(int g) const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  for (const auto& [k, v] : terms_) r.add_term(k, v.linear_part(g));
  return r;
}

Field Field::free_part(int g) const {
  Field r(spin_rows_, spin_cols_, jet_order_);
  for (const auto& [k, v] : terms_) r.add_term(k, v.free_part(g));
  return r;
}

std::string Field::str() const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : terms_) {
    if (!first) out << "  +  ";
    first = false;
    out << "(" << v.str() << ")";
    for (int mu = 0; mu < 4; ++mu)
      if (k.form_mask & (1 << mu)) out << " dx" << mu;
    for (int a = 0; a < 4; ++a)
      if (k.lam_mask & (1 << a)) out << " v" << a;
    if (spin_rows_ != 1 || spin_cols_ != 1)
      out << " [" << int(k.row) << "," << int(k.col) << "]";
    if (k.deriv_order() > 0) {
      out << " @(" << int(k.deriv[0]) << int(k.deriv[1]) << int(k.deriv[2])
          << int(k.deriv[3]) << ")";
    }
  }
  return out.str();
}

Field mul(const Field& a, const Field& b) {
  int rr, rc;
  compose_shapes(a.spin_rows(), a.spin_cols(), b.spin_rows(), b.spin_cols(), &rr, &rc);
  Field result(rr, rc, std::min(a.jet_order(), b.jet_order()));
  for (const auto& [ka, ga] : a.terms()) {
    int ia = popcount8(ka.form_mask);
    int ja = popcount8(ka.lam_mask);
    for (const auto& [kb, gb] : b.terms()) {
      if (ka.form_mask & kb.form_mask) continue;
      if (ka.lam_mask & kb.lam_mask) continue;
      JetKey k;
      if (!compose_indices(a, b, ka, kb, &k.row, &k.col)) continue;
      k.form_mask = std::uint8_t(ka.form_mask | kb.form_mask);
      k.lam_mask = std::uint8_t(ka.lam_mask | kb.lam_mask);
      int order = 0;
      for (int mu = 0; mu < 4; ++mu) {
        k.deriv[mu] = std::uint8_t(ka.deriv[mu] + kb.deriv[mu]);
        order += k.deriv[mu];
      }
      if (order > result.jet_order()) continue;
      int sign0 = merge_sign(ka.form_mask, kb.form_mask) *
                  merge_sign(ka.lam_mask, kb.lam_mask);
      if ((popcount8(kb.form_mask) * ja) % 2 != 0) sign0 = -sign0;
      Rational w0 = leibniz_weight(ka.deriv, kb.deriv);
      for (int pb = 0; pb < 2; ++pb) {
        Grassmann gbp = gb.parity_part(pb);
        if (gbp.is_zero()) continue;
        int sign = (pb * (ia + ja)) % 2 != 0 ? -sign0 : sign0;
        result.add_term(k, GaussianRational(sign < 0 ? -w0 : w0) * (ga * gbp));
      }
    }
  }
  return result;
}

Field jet_d(const Field& x) {
  Field result(x.spin_rows(), x.spin_cols(), x.jet_order() - 1);
  for (const auto& [k, g] : x.terms()) {
    for (int gp = 0; gp < 2; ++gp) {
      Grassmann part = g.parity_part(gp);
      if (part.is_zero()) continue;
      for (int mu = 0; mu < 4; ++mu) {
        if (k.deriv[mu] == 0) continue;
        std::uint8_t bit = std::uint8_t(1) << mu;
        if (k.form_mask & bit) continue;
        JetKey nk = k;
        nk.deriv[mu] -= 1;
        nk.form_mask = std::uint8_t(k.form_mask | bit);
        int sign = merge_sign(bit, k.form_mask);
        if (gp == 1) sign = -sign;
        result.add_term(nk, sign < 0 ? -part : part);
      }
    }
  }
  return result;
}

Field contract_dx(const Field& x, int mu, int p_iota) {
  Field result(x.spin_rows(), x.spin_cols(), x.jet_order());
  std::uint8_t bit = std::uint8_t(1) << mu;
  for (const auto& [k, g] : x.terms()) {
    if (!(k.form_mask & bit)) continue;
    JetKey nk = k;
    nk.form_mask = std::uint8_t(k.form_mask & ~bit);
    int below = popcount8(std::uint8_t(k.form_mask & (bit - 1)));
    for (int gp = 0; gp < 2; ++gp) {
      Grassmann part = g.parity_part(gp);
      if (part.is_zero()) continue;
      int exponent = p_iota * gp + below;
      result.add_term(nk, (exponent % 2 != 0) ? -part : part);
    }
  }
  return result;
}

Field contract_lam(const Field& x, int a, int p_iota) {
  Field result(x.spin_rows(), x.spin_cols(), x.jet_order());
  std::uint8_t bit = std::uint8_t(1) << a;
  for (const auto& [k, g] : x.terms()) {
    if (!(k.lam_mask & bit)) continue;
    JetKey nk = k;
    nk.lam_mask = std::uint8_t(k.lam_mask & ~bit);
    // The v factor sits to the right of the form factor: the contraction
    // operator first crosses the coefficient and the whole dx block.
    int below = popcount8(std::uint8_t(k.lam_mask & (bit - 1)));
    for (int gp = 0; gp < 2; ++gp) {
      Grassmann part = g.parity_part(gp);
      if (part.is_zero()) continue;
      int exponent = p_iota * (gp + popcount8(k.form_mask)) + below;
      result.add_term(nk, (exponent % 2 != 0) ? -part : part);
    }
  }
  return result;
}

Field scalar_mul_right(const Field& x, const Field& s) {
  if (s.spin_rows() != 1 || s.spin_cols() != 1)
    throw std::invalid_argument("scalar_mul_right: multiplier must be spin 1x1");
  Field result(x.spin_rows(), x.spin_cols(), std::min(x.jet_order(), s.jet_order()));
  for (const auto& [ka, ga] : x.terms())
    for (const auto& [kb, gb] : s.terms()) {
      if (kb.form_mask != 0 || kb.lam_mask != 0)
        throw std::invalid_argument("scalar_mul_right: multiplier must be a scalar jet");
      JetKey k = ka;
      int order = 0;
      for (int mu = 0; mu < 4; ++mu) {
        k.deriv[mu] = std::uint8_t(ka.deriv[mu] + kb.deriv[mu]);
        order += k.deriv[mu];
      }
      if (order > result.jet_order()) continue;
      result.add_term(k, GaussianRational(leibniz_weight(ka.deriv, kb.deriv)) * (ga * gb));
    }
  return result;
}

Field iota_vector(const std::array<Field, 4>& xi, int xi_parity, const Field& x) {
  int p_iota = (xi_parity + 1) & 1;
  Field result(x.spin_rows(), x.spin_cols(), x.jet_order());
  for (int mu = 0; mu < 4; ++mu) {
    if (xi[mu].is_zero()) continue;
    result += scalar_mul_right(contract_dx(x, mu, p_iota), xi[mu]);
  }
  return result;
}

Field eta_bracket(const Field& a, const Field& b) {
  int rr, rc;
  compose_shapes(a.spin_rows(), a.spin_cols(), b.spin_rows(), b.spin_cols(), &rr, &rc);
  Field result(rr, rc, std::min(a.jet_order(), b.jet_order()));
  for (const auto& [ka, ga] : a.terms()) {
    int ia = popcount8(ka.form_mask);
    int ja = popcount8(ka.lam_mask);
    for (const auto& [kb, gb] : b.terms()) {
      if (ka.form_mask & kb.form_mask) continue;
      JetKey base;
      if (!compose_indices(a, b, ka, kb, &base.row, &base.col)) continue;
      base.form_mask = std::uint8_t(ka.form_mask | kb.form_mask);
      int order = 0;
      for (int mu = 0; mu < 4; ++mu) {
        base.deriv[mu] = std::uint8_t(ka.deriv[mu] + kb.deriv[mu]);
        order += base.deriv[mu];
      }
      if (order > result.jet_order()) continue;
      int sign0 = merge_sign(ka.form_mask, kb.form_mask);
      if ((popcount8(kb.form_mask) * ja) % 2 != 0) sign0 = -sign0;
      Rational w0 = leibniz_weight(ka.deriv, kb.deriv);
      for (int pb = 0; pb < 2; ++pb) {
        Grassmann gbp = gb.parity_part(pb);
        if (gbp.is_zero()) continue;
        int sign = (pb * (ia + ja)) % 2 != 0 ? -sign0 : sign0;
        Rational w = sign < 0 ? -w0 : w0;
        Grassmann coeff = ga * gbp;
        for (const auto& [mask, c] : lam_bracket(ka.lam_mask, kb.lam_mask)) {
          JetKey k = base;
          k.lam_mask = mask;
          result.add_term(k, GaussianRational(w * c) * coeff);
        }
      }
    }
  }
  return result;
}

Field rep_action(const GammaRep& rep, const Field& omega, const Field& x) {
  Field result = eta_bracket(omega, x);
  if (x.spin_rows() == 1 && x.spin_cols() == 1) return result;

  Field spin_part(x.spin_rows(), x.spin_cols(), std::min(omega.jet_order(), x.jet_order()));
  for (const auto& [ko, go] : omega.terms()) {
    if (popcount8(ko.lam_mask) != 2)
      throw std::invalid_argument("rep_action: operator must be Lambda^2 valued");
    if (ko.row != 0 || ko.col != 0)
      throw std::invalid_argument("rep_action: operator must be spin-scalar");
    int a = std::countr_zero(static_cast<unsigned>(ko.lam_mask));
    int b = std::countr_zero(static_cast<unsigned>(ko.lam_mask & (ko.lam_mask - 1)));
    // v_a v_b acts on the spin factor by -(1/2) g_a g_b.
    QMat m = grat(-1, 2) * (rep.gamma[a] * rep.gamma[b]);
    for (const auto& [kx, gx] : x.terms()) {
      if (ko.form_mask & kx.form_mask) continue;
      JetKey base;
      base.form_mask = std::uint8_t(ko.form_mask | kx.form_mask);
      base.lam_mask = kx.lam_mask;
      int order = 0;
      for (int mu = 0; mu < 4; ++mu) {
        base.deriv[mu] = std::uint8_t(ko.deriv[mu] + kx.deriv[mu]);
        order += base.deriv[mu];
      }
      if (order > spin_part.jet_order()) continue;
      int sign = merge_sign(ko.form_mask, kx.form_mask);
      Grassmann gx_signed = gx;
      if (popcount8(ko.form_mask) % 2 != 0)
        gx_signed = gx.parity_part(0) - gx.parity_part(1);
      Rational w = leibniz_weight(ko.deriv, kx.deriv);
      if (sign < 0) w = -w;
      Grassmann coeff = GaussianRational(w) * (go * gx_signed);
      if (x.spin_rows() == 4) {
        // Left multiplication on the row index.
        for (int r = 0; r < 4; ++r) {
          if (m(r, kx.row).is_zero()) continue;
          JetKey k = base;
          k.row = std::uint8_t(r);
          k.col = kx.col;
          spin_part.add_term(k, m(r, kx.row) * coeff);
        }
      }
      if (x.spin_cols() == 4) {
        // Negated right multiplication on the column index (so that scalar
        // pairings of rows against columns are invariant, and endomorphisms
        // transform by the commutator).
        for (int c = 0; c < 4; ++c) {
          if (m(kx.col, c).is_zero()) continue;
          JetKey k = base;
          k.row = kx.row;
          k.col = std::uint8_t(c);
          spin_part.add_term(k, -(m(kx.col, c) * coeff));
        }
      }
    }
  }
  return result + spin_part;
}

Field covariant_d(const GammaRep& rep, const Field& omega, const Field& x) {
  return jet_d(x) + rep_action(rep, omega, x).truncate_jet(x.jet_order() - 1);
}

Field curvature(const Field& omega) {
  return jet_d(omega) +
         eta_bracket(omega, omega).scaled(rat(1, 2)).truncate_jet(omega.jet_order() - 1);
}

Field lie_covariant(const GammaRep& rep, const std::array<Field, 4>& xi,
                    int xi_parity, const Field& omega, const Field& x) {
  int p_iota = (xi_parity + 1) & 1;
  Field first = iota_vector(xi, xi_parity, covariant_d(rep, omega, x));
  Field second = covariant_d(rep, omega, iota_vector(xi, xi_parity, x));
  return (p_iota % 2 == 0) ? first - second : first + second;
}

Field gamma_field(const GammaRep& rep, int jet_order) {
  Field f(4, 4, jet_order);
  for (int a = 0; a < 4; ++a) {
    QMat up = (eta_sign(a) < 0) ? grat(-1) * rep.gamma[a] : rep.gamma[a];
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        if (up(r, c).is_zero()) continue;
        JetKey k;
        k.lam_mask = std::uint8_t(1) << a;
        k.row = std::uint8_t(r);
        k.col = std::uint8_t(c);
        f.add_term(k, Grassmann(up(r, c)));
      }
  }
  return f;
}

Field gamma_wedge_field(const GammaRep& rep, int n, int jet_order) {
  Field g = gamma_field(rep, jet_order);
  Field acc = Field::matrix_constant(QMat::identity(4), jet_order);
  for (int i = 0; i < n; ++i) acc = mul(acc, g);
  return acc;
}

Field iota_gamma_hat(const GammaRep& rep,
                     const std::array<std::array<Field, 4>, 4>& einv,
                     const Field& x) {
  Field result;
  for (int mu = 0; mu < 4; ++mu) {
    Field m(4, 4, x.jet_order());
    for (int a = 0; a < 4; ++a) {
      Field entry = einv[mu][a];
      if (eta_sign(a) < 0) entry = entry.scaled(rat(-1));
      // entry * g_a as a matrix-valued scalar jet
      for (const auto& [k, g] : entry.terms())
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c) {
            if (rep.gamma[a](r, c).is_zero()) continue;
            JetKey nk = k;
            nk.row = std::uint8_t(r);
            nk.col = std::uint8_t(c);
            m.add_term(nk, rep.gamma[a](r, c) * g);
          }
    }
    result += mul(m, contract_dx(x, mu, 1));
  }
  return result;
}

JetMatrix invert_jet_matrix(const JetMatrix& m) {
  int order = Field::kDefaultJetOrder;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!m[i][j].is_zero()) order = std::min(order, m[i][j].jet_order());

  // Invert the value at the point (including its nilpotent soul).
  GMat point(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) point(i, j) = m[i][j].coefficient(JetKey{});
  auto point_inv_opt = point.inverse();
  if (!point_inv_opt) throw std::domain_error("invert_jet_matrix: singular at the point");
  GMat point_inv = *point_inv_opt;

  JetMatrix r0{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r0[i][j] = Field::scalar_constant(point_inv(i, j), order);

  auto mat_mul = [](const JetMatrix& a, const JetMatrix& b) {
    JetMatrix c{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) c[i][j] += mul(a[i][k], b[k][j]);
    return c;
  };
  auto is_zero_mat = [](const JetMatrix& a) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (!a[i][j].is_zero()) return false;
    return true;
  };

  // m * r0 = 1 + n with n free of value-at-the-point terms, hence nilpotent.
  JetMatrix n = mat_mul(m, r0);
  for (int i = 0; i < 4; ++i) n[i][i] -= Field::scalar_constant(Grassmann(grat(1)), order);

  JetMatrix result = r0;
  JetMatrix power = r0;  // r0 * (-n)^k accumulator
  for (int k = 1; k <= order + 1; ++k) {
    JetMatrix next = mat_mul(power, n);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) next[i][j] = -next[i][j];
    if (is_zero_mat(next)) break;
    power = next;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) result[i][j] += power[i][j];
  }
  return result;
}

Field e_pair(const std::array<std::array<Field, 4>, 4>& einv, const Field& x) {
  Field result;
  for (int mu = 0; mu < 4; ++mu) {
    Field vmu(1, 1, x.jet_order());
    for (int a = 0; a < 4; ++a) {
      Field entry = einv[mu][a];
      if (eta_sign(a) < 0) entry = entry.scaled(rat(-1));
      for (const auto& [k, g] : entry.terms()) {
        JetKey nk = k;
        nk.lam_mask = std::uint8_t(1) << a;
        vmu.add_term(nk, g);
      }
    }
    result += mul(vmu, contract_dx(x, mu, 1));
  }
  return result;
}

}  // namespace sugra
