// Gamma-matrix representation in D=4 Lorentzian signature (-,+,+,+) with the
// anticommutator convention {gamma_a, gamma_b} = -2 eta_ab, charge
// conjugation solved exactly from its defining symmetry relations, and
// Majorana spinors over the Grassmann coefficient ring.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "sugra/grassmann.hpp"
#include "sugra/matrix.hpp"
#include "sugra/report.hpp"

namespace sugra {

// Frame metric eta = diag(-1,+1,+1,+1).
inline int eta_sign(int a) { return a == 0 ? -1 : 1; }

// Levi-Civita symbol with upper frame indices; the overall sign convention
// (epsilon^{0123} = +1) is certified by the identity suite.
int epsilon_upper(int a, int b, int c, int d);

// Spinor with Grassmann-algebra components.
using GSpinor = std::array<Grassmann, 4>;

inline bool gspinor_is_zero(const GSpinor& s) {
  return s[0].is_zero() && s[1].is_zero() && s[2].is_zero() && s[3].is_zero();
}

struct GammaRep {
  std::array<QMat, 4> gamma;  // gamma[a], entries in {0, +-1, +-i}
  QMat gamma5;                // i g0 g1 g2 g3
  QMat C;                     // charge conjugation
  QMat Cinv;
  QMat B;     // Majorana reality matrix: lambda is Majorana iff star(lambda) = B lambda
  QMat Binv;  // = entrywise conjugate of B

  QMat gamma_upper(int a) const { return gamma[a]; }
  QMat gamma_lower(int a) const {
    return eta_sign(a) < 0 ? GaussianRational(rat(-1)) * gamma[a] : gamma[a];
  }
};

// Constructs the representation and solves for C from C^t = -C and
// (C gamma_a)^t = C gamma_a; verifies the full symmetry table t_N = (1,-1,-1,1)
// and normalizes so the Majorana constraint is consistent (conj(B) B = 1).
// Throws std::runtime_error on any internal convention failure.
GammaRep build_gamma_rep();

// Antisymmetrized product gamma_{[a_1} ... gamma_{a_n]} (average over signed
// permutations); equals the plain product for pairwise distinct indices.
QMat antisymmetrized_gamma(const GammaRep& rep, const std::vector<int>& indices);

// The four gamma identities plus representation regression constants.
std::vector<CheckResult> check_gamma_identities(const GammaRep& rep);

// Matrix-vector with Grassmann components: (M s)_a = sum_b M_ab s_b.
GSpinor mat_apply(const QMat& m, const GSpinor& s);

// Dirac adjoint as a row vector: bar(lambda)_b = sum_a lambda_a C_ab.
GSpinor bar(const GammaRep& rep, const GSpinor& s);

// bar(chi) M psi = sum_{a,b} chi_a (C M)_ab psi_b.
Grassmann bilinear(const GammaRep& rep, const GSpinor& chi, const QMat& m, const GSpinor& psi);
Grassmann bilinear(const GammaRep& rep, const GSpinor& chi, const GSpinor& psi);

// Exact Majorana check: star(lambda) - B lambda = 0 componentwise
// (equivalent to lambda^dagger gamma^0 = lambda^t C).
bool is_majorana(const GammaRep& rep, const GSpinor& s);

// Projection onto Majorana spinors: (mu + Binv star(mu))/2; idempotent,
// parity preserving.
GSpinor majorana_project(const GammaRep& rep, const GSpinor& mu);

// Random Majorana spinor with homogeneous components of the given parity
// (0: degrees 0 and 2; 1: degrees 1 and 3) over the generator pool.
GSpinor majorana_sample(const GammaRep& rep, int parity, const std::vector<int>& generator_pool,
                        std::mt19937_64& rng);

// Even-parity Majorana spinor whose components are nilpotent (degree-2
// monomials only); this is the shape of even ghost values and is a
// precondition of the quartic vanishing identities.
GSpinor majorana_sample_nilpotent_even(const GammaRep& rep,
                                       const std::vector<int>& generator_pool,
                                       std::mt19937_64& rng);

// Flip residual chi-bar gamma^(N) psi + t_N (-1)^{N(|psi|+|chi|)+|psi||chi|}
// psi-bar gamma^(N) chi, maximized over ascending multi-indices of length N.
// Exact zero for Majorana inputs.  Throws std::invalid_argument if an input
// is not Majorana.
Grassmann check_flip(const GammaRep& rep, int N, const GSpinor& psi, int psi_parity,
                     const GSpinor& chi, int chi_parity);

// Multivector-valued matrices: map from ascending frame-index bitmask (4 bits)
// to a 4x4 matrix; used for wedge powers of gamma := gamma^a v_a.
using LVMat = std::map<std::uint8_t, QMat>;

// gamma^wedge(n): n-fold wedge power of gamma^a v_a with matrix product on
// the spin factor ((gamma^n)_{a1<...<an} = sum over permutations with sign).
LVMat gamma_wedge(const GammaRep& rep, int n);

// Coefficient of the top multivector v0 v1 v2 v3 in (bar l1 A l2)(bar l3 B l4)
// where A, B are multivector-valued matrices, products taken in the written
// order, in the canonical ordering convention (Grassmann coefficients moved
// left of the odd multivector generators).  p2, p3, p4 are the Grassmann
// parities of l2, l3, l4.
Grassmann top_coefficient_pair(const GammaRep& rep, const GSpinor& l1, const LVMat& A,
                               const GSpinor& l2, const GSpinor& l3, const LVMat& B,
                               const GSpinor& l4, int p2, int p3, int p4);

// The Fierz suite: completeness symmetrization, the two four-spinor
// rearrangement identities for the given quadruple (with parities), and the
// three special identities for |chi| = 0, |psi| = 1 triples.
std::vector<CheckResult> check_fierz(const GammaRep& rep, const std::array<GSpinor, 4>& l,
                                     const std::array<int, 4>& parity);
std::vector<CheckResult> check_fierz_lemma(const GammaRep& rep, const GSpinor& lambda,
                                           int lambda_parity, const GSpinor& chi_even,
                                           const GSpinor& psi_odd);

}  // namespace sugra
