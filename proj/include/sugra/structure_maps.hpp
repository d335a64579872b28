#pragma once

#include <functional>
#include <vector>

#include "sugra/clifford.hpp"
#include "sugra/jetfield.hpp"
#include "sugra/report.hpp"

namespace sugra {

// Pointwise linear operators between the fibers
//   Omega^(i,j)  (possibly tensored with the spinor factor)
// induced by wedging with powers of the coframe and by the coframe bracket.
// Their value-at-the-point body matrices certify the injectivity/surjectivity
// pattern, and a terminating iteration against the body inverse solves linear
// equations exactly over the jet/Grassmann ring.

// Basis keys (derivative index zero) of one fiber.
std::vector<JetKey> fiber_basis(int form_deg, int lam_deg, int spin_rows,
                                int spin_cols);

struct FiberOp {
  std::vector<JetKey> dom_basis;
  std::vector<JetKey> cod_basis;
  int dom_rows = 1, dom_cols = 1;
  int cod_rows = 1, cod_cols = 1;
  std::function<Field(const Field&)> apply;
};

// wedge with e^k / k! acting on (i,j) with the given spin factor
FiberOp make_w_op(const Field& e, int k, int i, int j, int spin_rows, int spin_cols);
// coframe bracket [e, .] on (i,j)
FiberOp make_rho_op(const Field& e, int i, int j, int spin_rows, int spin_cols);

// Body matrix of the operator at the point, computed on inputs whose
// coefficients have the given parity (left-multiplication by a matrix with an
// odd v-degree flips sign with the coefficient parity).
QMat fiber_body_matrix(const FiberOp& op, int coeff_parity);

// Solve op(x) = y exactly.  Requires the body matrix to be injective; throws
// if the iteration does not terminate (y not in the image).
Field solve_fiber_op(const FiberOp& op, const Field& y);

// Named wedge helpers.
Field w_apply(const Field& e, int k, const Field& x);
Field invert_w1_12(const Field& e, const Field& y);  // x in (1,2) with e x = y
Field invert_w2_02(const Field& e, const Field& y);  // x in (0,2) with e^2/2 x = y

// Unique decomposition theta = i e gamma_und alpha + beta on column-spinor
// (3,1)-forms, with gamma^3 beta = 0.
struct Split31 {
  Field alpha;  // (1,0) column spinor
  Field beta;
};
Split31 split_31(const GammaRep& rep, const Field& e, const Field& gamma_und,
                 const Field& theta);
// Row variant: theta = i e alpha gamma_und + beta with beta gamma^3 = 0.
Split31 split_31_row(const GammaRep& rep, const Field& e, const Field& gamma_und,
                     const Field& theta);

// Unique decomposition theta = e kappa + vark on column-spinor (2,1)-forms,
// with gamma_und gamma^3 vark = 0.
struct Split21 {
  Field kappa;  // (1,0) column spinor
  Field vark;
};
Split21 split_21(const GammaRep& rep, const Field& e, const Field& gamma_und,
                 const Field& theta);
// Row variant: theta = e kappa + vark with vark gamma^3 gamma_und = 0.
Split21 split_21_row(const GammaRep& rep, const Field& e, const Field& gamma_und,
                     const Field& theta);

// Certify the injectivity/surjectivity pattern of the coframe wedge maps, the
// six squared/bracket isomorphisms and the spinor-sector maps at a given
// (generic, invertible) coframe.
std::vector<CheckResult> check_map_ranks(const GammaRep& rep, const Field& e,
                                         const Field& gamma_und);

}  // namespace sugra
