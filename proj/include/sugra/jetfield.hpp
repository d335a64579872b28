#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sugra/clifford.hpp"
#include "sugra/grassmann.hpp"
#include "sugra/matrix.hpp"

namespace sugra {

// A field germ at a point: a finite jet of a section of
//   Lambda^i T*M  (x)  Lambda^j V  (x)  (spin factor),
// where M is a 4-manifold, V a 4-dimensional metric vector space with
// signature (-,+,+,+), and the spin factor is trivial (1), a column spinor
// (4x1), a row spinor (1x4), or an endomorphism (4x4).
//
// Every term is stored as   coefficient * dx^I * v^J   with the coefficient a
// Grassmann algebra element; dx generators and v generators are both odd, and
// all commutation signs are produced by the single Koszul oracle implemented
// in mul().  Spin indices never contribute signs.
//
// Jets are truncated at a fixed order; the stored values are raw derivatives
// evaluated at the point, so products use the general Leibniz rule with
// binomial weights and the exterior derivative lowers the order by one.

struct JetKey {
  std::uint8_t form_mask = 0;            // subset of {dx^0..dx^3}
  std::uint8_t lam_mask = 0;             // subset of {v_0..v_3}
  std::uint8_t row = 0;                  // spin row (0 when the factor is 1)
  std::uint8_t col = 0;                  // spin column
  std::array<std::uint8_t, 4> deriv{};   // symmetric derivative counts

  bool operator<(const JetKey& o) const {
    if (form_mask != o.form_mask) return form_mask < o.form_mask;
    if (lam_mask != o.lam_mask) return lam_mask < o.lam_mask;
    if (row != o.row) return row < o.row;
    if (col != o.col) return col < o.col;
    return deriv < o.deriv;
  }
  bool operator==(const JetKey& o) const {
    return form_mask == o.form_mask && lam_mask == o.lam_mask && row == o.row &&
           col == o.col && deriv == o.deriv;
  }
  int deriv_order() const { return deriv[0] + deriv[1] + deriv[2] + deriv[3]; }
};

class Field {
 public:
  static constexpr int kDefaultJetOrder = 2;

  Field() = default;
  Field(int spin_rows, int spin_cols, int jet_order = kDefaultJetOrder);

  static Field scalar_constant(const Grassmann& g, int jet_order = kDefaultJetOrder);
  static Field matrix_constant(const QMat& m, int jet_order = kDefaultJetOrder);

  int spin_rows() const { return spin_rows_; }
  int spin_cols() const { return spin_cols_; }
  int jet_order() const { return jet_order_; }

  const std::map<JetKey, Grassmann>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const JetKey& key, const Grassmann& value);
  const Grassmann& coefficient(const JetKey& key) const;

  Field operator+(const Field& o) const;
  Field operator-(const Field& o) const;
  Field operator-() const;
  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  bool operator==(const Field& o) const;
  bool operator!=(const Field& o) const { return !(*this == o); }

  Field scaled(const GaussianRational& c) const;
  Field scaled(const Rational& c) const;

  // Degree / parity inspection.  Throw when the field is not homogeneous.
  int form_degree() const;
  int lam_degree() const;
  int coeff_parity() const;
  int total_parity() const;  // coefficient parity + form degree + v degree
  int max_coeff_degree() const;

  Field truncate_jet(int order) const;
  Field epsilon_linear_part() const;  // per-coefficient extraction
  Field epsilon_free_part() const;
  Field linear_part(int g) const;  // coefficient of an arbitrary generator
  Field free_part(int g) const;

  std::string str() const;

 private:
  int spin_rows_ = 1;
  int spin_cols_ = 1;
  int jet_order_ = kDefaultJetOrder;
  std::map<JetKey, Grassmann> terms_;
};

// Graded product: wedge on dx and v factors, matrix composition on the spin
// factor, general-Leibniz combination of jets.  The Koszul sign for a term
// pair (a, b) is
//   (-1)^{|g_b| (i_a + j_a)} * (-1)^{i_b j_a} * shuffle(I_a,I_b) * shuffle(J_a,J_b).
Field mul(const Field& a, const Field& b);

// Exterior derivative at the jet level; lowers the jet order by one.
Field jet_d(const Field& x);

// Contraction of dx^mu (an odd operator of declared parity p_iota applied to
// the leftmost slot): a term g dx^I v^J with mu the k-th element of I maps to
// (-1)^{p_iota |g| + (k-1)} g dx^{I \ mu} v^J.
Field contract_dx(const Field& x, int mu, int p_iota);

// Same for the v factor.
Field contract_lam(const Field& x, int a, int p_iota);

// Pointwise multiplication of every coefficient from the right by a scalar
// jet (no dx, no v, spin 1x1); no form/v Koszul sign is applied.
Field scalar_mul_right(const Field& x, const Field& s);

// Contraction with a vector field given by four scalar jets xi^mu of
// coefficient parity xi_parity; the operator parity is xi_parity + 1.
Field iota_vector(const std::array<Field, 4>& xi, int xi_parity, const Field& x);

// Bracket induced by the metric pairing on the v factor: bilinear over the
// form/coefficient part with the same pre-signs as mul(), with the wedge
// v^A v^B replaced by the degree -2 bracket determined by
//   [v_a, v_b y] = eta_ab y - v_b [v_a, y],
//   [v_a x, y]   = v_a [x, y] + (-1)^{|x||y|} [v_a, y] x.
Field eta_bracket(const Field& a, const Field& b);

// Action of a Lambda^2 V valued form on a field: the v-factor part acts by
// eta_bracket and the spin part by the matrix -(1/2) g_a g_b per v_a v_b
// component (left multiplication on columns, negated right multiplication on
// rows, commutator on endomorphisms).
Field rep_action(const GammaRep& rep, const Field& omega, const Field& x);

Field covariant_d(const GammaRep& rep, const Field& omega, const Field& x);
Field curvature(const Field& omega);  // d omega + 1/2 [omega, omega]

// Graded commutator [iota_xi, d_omega].
Field lie_covariant(const GammaRep& rep, const std::array<Field, 4>& xi,
                    int xi_parity, const Field& omega, const Field& x);

// The v-valued endomorphism  g^a v_a  (indices raised with eta), as a field.
Field gamma_field(const GammaRep& rep, int jet_order = Field::kDefaultJetOrder);

// Wedge powers g^a g^b ... v_a v_b ... of gamma_field (n = 0..4).
Field gamma_wedge_field(const GammaRep& rep, int n,
                        int jet_order = Field::kDefaultJetOrder);

// Contraction where the vector-field slot is the spin-matrix valued vector
// g^a e^mu_a built from the inverse coframe (einv[mu][a] = e^mu_a scalar
// jets); the contracted term is left-multiplied by the matrix.
Field iota_gamma_hat(const GammaRep& rep,
                     const std::array<std::array<Field, 4>, 4>& einv,
                     const Field& x);

// Exact inverse of a 4x4 matrix of even scalar jets (invertible at the point):
// the value-at-the-point part is inverted by Grassmann linear algebra and the
// derivative part by a terminating geometric series.
using JetMatrix = std::array<std::array<Field, 4>, 4>;
JetMatrix invert_jet_matrix(const JetMatrix& m);

// Pairing with the inverse coframe:  sum_mu (v_a eta^{ab} e^mu_b) wedge
// (contraction of dx^mu), raising the v degree by one and lowering the form
// degree by one.
Field e_pair(const std::array<std::array<Field, 4>, 4>& einv, const Field& x);

}  // namespace sugra
