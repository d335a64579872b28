#include "sugra/clifford.hpp"

#include <algorithm>
#include <stdexcept>

namespace sugra {

namespace {

QMat zero4() { return QMat(4, 4); }

// Permutation sign over an index list; 0 when indices repeat.
int perm_sign(std::vector<int> idx) {
  int sign = 1;
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = i + 1; j < idx.size(); ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) {
        std::swap(idx[i], idx[j]);
        sign = -sign;
      }
    }
  }
  return sign;
}

GSpinor star(const GSpinor& s) {
  return {s[0].star(), s[1].star(), s[2].star(), s[3].star()};
}

}  // namespace

int epsilon_upper(int a, int b, int c, int d) { return perm_sign({a, b, c, d}); }

GSpinor mat_apply(const QMat& m, const GSpinor& s) {
  GSpinor r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (m(i, j).is_zero() || s[j].is_zero()) continue;
      r[i] += s[j] * m(i, j);
    }
  return r;
}

GSpinor bar(const GammaRep& rep, const GSpinor& s) {
  GSpinor r;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) {
      if (rep.C(a, b).is_zero() || s[a].is_zero()) continue;
      r[b] += s[a] * rep.C(a, b);
    }
  return r;
}

Grassmann bilinear(const GammaRep& rep, const GSpinor& chi, const QMat& m, const GSpinor& psi) {
  QMat cm = rep.C * m;
  Grassmann acc;
  for (int a = 0; a < 4; ++a) {
    if (chi[a].is_zero()) continue;
    for (int b = 0; b < 4; ++b) {
      if (cm(a, b).is_zero() || psi[b].is_zero()) continue;
      acc += (chi[a] * psi[b]) * cm(a, b);
    }
  }
  return acc;
}

Grassmann bilinear(const GammaRep& rep, const GSpinor& chi, const GSpinor& psi) {
  return bilinear(rep, chi, QMat::identity(4), psi);
}

GammaRep build_gamma_rep() {
  GammaRep rep;
  const GaussianRational one = grat(1);
  const GaussianRational mone = grat(-1);
  const GaussianRational im = GaussianRational::unit_i();
  const GaussianRational mim = -im;

  // Dirac basis adapted to {gamma_a, gamma_b} = -2 eta_ab, eta = (-+++):
  // gamma0 = diag(1,1,-1,-1), gammak = [[0, sigma_k], [-sigma_k, 0]].
  for (auto& g : rep.gamma) g = zero4();
  rep.gamma[0](0, 0) = one;
  rep.gamma[0](1, 1) = one;
  rep.gamma[0](2, 2) = mone;
  rep.gamma[0](3, 3) = mone;

  rep.gamma[1](0, 3) = one;
  rep.gamma[1](1, 2) = one;
  rep.gamma[1](2, 1) = mone;
  rep.gamma[1](3, 0) = mone;

  rep.gamma[2](0, 3) = mim;
  rep.gamma[2](1, 2) = im;
  rep.gamma[2](2, 1) = im;
  rep.gamma[2](3, 0) = mim;

  rep.gamma[3](0, 2) = one;
  rep.gamma[3](1, 3) = mone;
  rep.gamma[3](2, 0) = mone;
  rep.gamma[3](3, 1) = one;

  // Anticommutator table.
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      QMat anti = rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a];
      QMat expected = (a == b) ? grat(-2 * eta_sign(a)) * QMat::identity(4) : QMat(4, 4);
      if (!(anti == expected))
        throw std::runtime_error("build_gamma_rep: anticommutator table violated");
    }

  rep.gamma5 = im * (rep.gamma[0] * rep.gamma[1] * rep.gamma[2] * rep.gamma[3]);

  // Solve for C: C^t = -C and (C gamma_a)^t = C gamma_a for every a.
  // Unknown vector x with 16 entries, C(i,j) = x[4i+j].
  std::vector<std::vector<GaussianRational>> rows;
  auto add_row = [&rows](std::vector<GaussianRational> r) { rows.push_back(std::move(r)); };
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      // C(j,i) + C(i,j) = 0
      std::vector<GaussianRational> r(16);
      r[4 * j + i] += grat(1);
      r[4 * i + j] += grat(1);
      add_row(std::move(r));
    }
  for (int a = 0; a < 4; ++a) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        // (C g)_{ji} - (C g)_{ij} = 0 with (C g)_{ij} = sum_k C
        // (i,k) g(k,j).
        std::vector<GaussianRational> r(16);
        for (int k = 0; k < 4; ++k) {
          r[4 * j + k] += rep.gamma[a](k, i);
          r[4 * i + k] -= rep.gamma[a](k, j);
        }
        add_row(std::move(r));
      }
  }
  QMat sys(int(rows.size()), 16);
  for (int r = 0; r < int(rows.size()); ++r)
    for (int c = 0; c < 16; ++c) sys(r, c) = rows[r][c];
  auto null = sys.nullspace();
  if (null.size() != 1)
    throw std::runtime_error("build_gamma_rep: charge conjugation null space is not 1-dimensional");
  rep.C = QMat(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rep.C(i, j) = null[0][4 * i + j];

  // Verify the full symmetry table (C gamma^(N))^t = -t_N C gamma^(N).
  const int tN[4] = {1, -1, -1, 1};
  for (int N = 0; N <= 3; ++N) {
    std::vector<int> idx;
    for (int a = 0; a < 4 && int(idx.size()) < N; ++a) idx.push_back(a);
    // all ascending multi-indices of length N
    std::vector<std::vector<int>> multi;
    if (N == 0) multi.push_back({});
    for (int a = 0; a < 4; ++a) {
      if (N == 1) multi.push_back({a});
      for (int b = a + 1; b < 4; ++b) {
        if (N == 2) multi.push_back({a, b});
        for (int c = b + 1; c < 4; ++c)
          if (N == 3) multi.push_back({a, b, c});
      }
    }
    for (const auto& mi : multi) {
      QMat g = QMat::identity(4);
      for (int a : mi) g = g * rep.gamma[a];
      QMat cg = rep.C * g;
      QMat res = cg.transpose() + grat(tN[N]) * cg;
      if (!res.is_zero()) throw std::runtime_error("build_gamma_rep: t_N symmetry table violated");
    }
  }

  // Normalize so the Majorana constraint star(l) = B l is an involution:
  // B = (gamma0^t)^{-1} C^t must satisfy conj(B) B = 1.
  auto compute_B = [&rep]() {
    QMat g0t_inv = *rep.gamma[0].transpose().inverse();
    return g0t_inv * rep.C.transpose();
  };
  rep.B = compute_B();
  QMat bconj(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) bconj(i, j) = rep.B(i, j).conj();
  QMat bb = bconj * rep.B;
  // bb must be rho * Id with rho a positive rational.
  GaussianRational rho = bb(0, 0);
  if (!(bb == rho * QMat::identity(4)) || !rho.is_real() || rho.re <= 0)
    throw std::runtime_error("build_gamma_rep: Majorana consistency matrix is not scalar");
  // Find s in Q(i) with |s|^2 = 1/rho and rescale C by s.
  GaussianRational scale;
  bool found = false;
  for (long p = 1; p <= 40 && !found; ++p)
    for (long q = 0; q <= p && !found; ++q)
      for (long r = 1; r <= 40 && !found; ++r) {
        Rational n2 = rat(p * p + q * q, r * r);
        if (n2 * rho.re == 1) {
          scale = GaussianRational(rat(p, r), rat(q, r));
          found = true;
        }
      }
  if (!found) throw std::runtime_error("build_gamma_rep: no Gaussian-rational normalization of C");
  rep.C = scale * rep.C;
  rep.B = compute_B();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) bconj(i, j) = rep.B(i, j).conj();
  if (!(bconj * rep.B == QMat::identity(4)))
    throw std::runtime_error("build_gamma_rep: Majorana involution failed after rescaling");
  rep.Binv = bconj;
  rep.Cinv = *rep.C.inverse();
  return rep;
}

QMat antisymmetrized_gamma(const GammaRep& rep, const std::vector<int>& indices) {
  const int n = int(indices.size());
  if (n == 0) return QMat::identity(4);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  QMat acc(4, 4);
  long count = 0;
  do {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = indices[perm[i]];
    int s = perm_sign(perm);
    QMat prod = QMat::identity(4);
    for (int i : idx) prod = prod * rep.gamma[i];
    acc = acc + grat(s) * prod;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return grat(1, count) * acc;
}

bool is_majorana(const GammaRep& rep, const GSpinor& s) {
  GSpinor lhs = star(s);
  GSpinor rhs = mat_apply(rep.B, s);
  for (int i = 0; i < 4; ++i)
    if (!(lhs[i] == rhs[i])) return false;
  return true;
}

GSpinor majorana_project(const GammaRep& rep, const GSpinor& mu) {
  GSpinor j = mat_apply(rep.Binv, star(mu));
  GSpinor r;
  for (int i = 0; i < 4; ++i) r[i] = (mu[i] + j[i]) * grat(1, 2);
  return r;
}

GSpinor majorana_sample_nilpotent_even(const GammaRep& rep,
                                       const std::vector<int>& generator_pool,
                                       std::mt19937_64& rng) {
  // Even-parity Majorana spinor with purely nilpotent (degree-2) components,
  // the shape taken by even ghost values.
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<size_t> pick(0, generator_pool.size() - 1);
  GSpinor mu;
  for (int i = 0; i < 4; ++i) {
    Grassmann c;
    for (int t = 0; t < 3; ++t) {
      int g1 = generator_pool[pick(rng)];
      int g2 = generator_pool[pick(rng)];
      if (g1 == g2) continue;
      c += Grassmann::generator(g1) * Grassmann::generator(g2) *
           GaussianRational(rat(coef(rng)), rat(coef(rng), 2));
    }
    mu[i] = c;
  }
  return majorana_project(rep, mu);
}

GSpinor majorana_sample(const GammaRep& rep, int parity, const std::vector<int>& generator_pool,
                        std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(-3, 3);
  std::uniform_int_distribution<size_t> pick(0, generator_pool.empty() ? 0 : generator_pool.size() - 1);
  GSpinor mu;
  for (int i = 0; i < 4; ++i) {
    Grassmann c;
    if (parity == 0) {
      c += Grassmann(GaussianRational(rat(coef(rng)), rat(coef(rng), 2)));
      if (generator_pool.size() >= 2) {
        int g1 = generator_pool[pick(rng)];
        int g2 = generator_pool[pick(rng)];
        if (g1 != g2)
          c += Grassmann::generator(g1) * Grassmann::generator(g2) *
               GaussianRational(rat(coef(rng)), rat(coef(rng)));
      }
    } else {
      for (int t = 0; t < 2; ++t) {
        int g = generator_pool[pick(rng)];
        c += Grassmann::generator(g) * GaussianRational(rat(coef(rng)), rat(coef(rng), 3));
      }
      if (generator_pool.size() >= 3) {
        int g1 = generator_pool[pick(rng)];
        int g2 = generator_pool[pick(rng)];
        int g3 = generator_pool[pick(rng)];
        if (g1 != g2 && g1 != g3 && g2 != g3)
          c += Grassmann::generator(g1) * Grassmann::generator(g2) * Grassmann::generator(g3) *
               GaussianRational(rat(coef(rng)));
      }
    }
    mu[i] = c;
  }
  return majorana_project(rep, mu);
}

Grassmann check_flip(const GammaRep& rep, int N, const GSpinor& psi, int psi_parity,
                     const GSpinor& chi, int chi_parity) {
  if (!is_majorana(rep, psi) || !is_majorana(rep, chi))
    throw std::invalid_argument("check_flip: inputs must be Majorana");
  const int tN[4] = {1, -1, -1, 1};
  int exponent = N * (psi_parity + chi_parity) + psi_parity * chi_parity;
  int sign = (exponent % 2 == 0) ? 1 : -1;
  Grassmann worst;
  std::vector<std::vector<int>> multi;
  if (N == 0) multi.push_back({});
  for (int a = 0; a < 4; ++a) {
    if (N == 1) multi.push_back({a});
    for (int b = a + 1; b < 4; ++b) {
      if (N == 2) multi.push_back({a, b});
      for (int c = b + 1; c < 4; ++c)
        if (N == 3) multi.push_back({a, b, c});
    }
  }
  for (const auto& mi : multi) {
    QMat g = QMat::identity(4);
    for (int a : mi) g = g * rep.gamma[a];
    // The two sides are multivector-valued; writing each side in canonical
    // order (Grassmann coefficients to the left of the N odd multivector
    // factors) contributes (-1)^{N |right spinor|} per side.
    int lhs_cross = (N * psi_parity) % 2 ? -1 : 1;
    int rhs_cross = (N * chi_parity) % 2 ? -1 : 1;
    Grassmann res = bilinear(rep, chi, g, psi) * grat(lhs_cross) +
                    bilinear(rep, psi, g, chi) * grat(tN[N] * sign * rhs_cross);
    if (!res.is_zero()) worst = res;
  }
  return worst;
}

LVMat gamma_wedge(const GammaRep& rep, int n) {
  LVMat acc;
  acc[0] = QMat::identity(4);
  for (int step = 0; step < n; ++step) {
    LVMat next;
    for (const auto& [mask, m] : acc) {
      for (int a = 0; a < 4; ++a) {
        std::uint8_t bit = std::uint8_t(1) << a;
        if (mask & bit) continue;
        int sign = merge_sign(GrassmannMask(mask), GrassmannMask(bit));
        QMat term = grat(sign) * (m * rep.gamma[a]);
        auto [it, inserted] = next.try_emplace(std::uint8_t(mask | bit), term);
        if (!inserted) it->second = it->second + term;
      }
    }
    // prune zeros
    for (auto it = next.begin(); it != next.end();) {
      if (it->second.is_zero())
        it = next.erase(it);
      else
        ++it;
    }
    acc = std::move(next);
  }
  return acc;
}

Grassmann top_coefficient_pair(const GammaRep& rep, const GSpinor& l1, const LVMat& A,
                               const GSpinor& l2, const GSpinor& l3, const LVMat& B,
                               const GSpinor& l4, int p2, int p3, int p4) {
  // Coefficient of v0v1v2v3 of (bar l1 A l2) wedge (bar l3 B l4) written in
  // canonical order (all Grassmann coefficients left of the odd multivector
  // factors): the right spinor coefficient of each bilinear crosses its own
  // multivector degree, and the whole second bilinear coefficient crosses the
  // first factor's multivector degree.
  Grassmann acc;
  for (const auto& [ma, mA] : A) {
    for (const auto& [mb, mB] : B) {
      if ((ma & mb) != 0 || (ma | mb) != 0xF) continue;
      int sign = merge_sign(GrassmannMask(ma), GrassmannMask(mb));
      Grassmann b1 = bilinear(rep, l1, mA, l2);
      Grassmann b2 = bilinear(rep, l3, mB, l4);
      if (b2.is_zero() || b1.is_zero()) continue;
      int deg_a = std::popcount(unsigned(ma));
      int deg_b = std::popcount(unsigned(mb));
      int cross = (deg_a * p2 + deg_b * p4 + deg_a * (p3 + p4)) % 2 ? -1 : 1;
      acc += (b1 * b2) * grat(sign * cross);
    }
  }
  return acc;
}

std::vector<CheckResult> check_gamma_identities(const GammaRep& rep) {
  std::vector<CheckResult> out;
  auto push = [&out](const std::string& id, const std::string& anchor, bool ok,
                     const std::string& witness) {
    CheckResult r;
    r.suite = "gamma";
    r.check_id = id;
    r.anchor = anchor;
    r.exact_zero = ok;
    r.witness = ok ? "" : witness;
    out.push_back(std::move(r));
  };

  // 1) sum_a gamma^a g^b g^c g^d gamma_a = 2 g^d g^c g^b.
  {
    bool ok = true;
    std::string w;
    for (int b = 0; b < 4 && ok; ++b)
      for (int c = 0; c < 4 && ok; ++c)
        for (int d = 0; d < 4 && ok; ++d) {
          QMat lhs(4, 4);
          for (int a = 0; a < 4; ++a)
            lhs = lhs + rep.gamma[a] * rep.gamma[b] * rep.gamma[c] * rep.gamma[d] *
                            rep.gamma_lower(a);
          QMat rhs = grat(2) * (rep.gamma[d] * rep.gamma[c] * rep.gamma[b]);
          if (!(lhs - rhs).is_zero()) {
            ok = false;
            w = "indices " + std::to_string(b) + std::to_string(c) + std::to_string(d);
          }
        }
    push("gamma-contract-5to3", "five-gamma index contraction", ok, w);
  }

  // 2) g^a g^b g^c = -eta^{ab} g^c - eta^{bc} g^a + eta^{ac} g^b
  //    + i eps^{dabc} gamma_d gamma5.
  {
    bool ok = true;
    std::string w;
    for (int a = 0; a < 4 && ok; ++a)
      for (int b = 0; b < 4 && ok; ++b)
        for (int c = 0; c < 4 && ok; ++c) {
          QMat lhs = rep.gamma[a] * rep.gamma[b] * rep.gamma[c];
          QMat rhs(4, 4);
          if (a == b) rhs = rhs - grat(eta_sign(a)) * rep.gamma[c];
          if (b == c) rhs = rhs - grat(eta_sign(b)) * rep.gamma[a];
          if (a == c) rhs = rhs + grat(eta_sign(a)) * rep.gamma[b];
          for (int d = 0; d < 4; ++d) {
            int eps = epsilon_upper(d, a, b, c);
            if (eps == 0) continue;
            rhs = rhs + (GaussianRational::unit_i() * grat(eps)) *
                            (rep.gamma_lower(d) * rep.gamma5);
          }
          if (!(lhs - rhs).is_zero()) {
            ok = false;
            w = "indices " + std::to_string(a) + std::to_string(b) + std::to_string(c);
          }
        }
    push("gamma-triple-product", "triple product expansion with dual term", ok, w);
  }

  // 3) gamma5 g^{[c} g^{d]} = -(i/2) eps_{abcd-oriented} gamma^{ab}-duality.
  // The dual-pair and dual-triple identities hold with the orientation of the
  // permutation symbol opposite to the one entering the triple-product
  // expansion; both orientations are certified exactly, so the pair is kept
  // as a representation regression.
  {
    bool ok = true;
    std::string w;
    for (int c = 0; c < 4 && ok; ++c)
      for (int d = 0; d < 4 && ok; ++d) {
        QMat lhs = rep.gamma5 * antisymmetrized_gamma(rep, {c, d});
        QMat rhs(4, 4);
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            int eps = epsilon_upper(a, b, c, d);
            if (eps == 0) continue;
            QMat gab = rep.gamma_lower(a) * rep.gamma_lower(b);  // a != b here
            rhs = rhs + (GaussianRational(rat(0), rat(eps, 2))) * gab;
          }
        if (!(lhs - rhs).is_zero()) {
          ok = false;
          w = "indices " + std::to_string(c) + std::to_string(d);
        }
      }
    push("gamma5-pair-dual", "gamma5 times antisymmetric pair as dual", ok, w);
  }

  // 4) gamma5 g^c = (i/6) eps^{abcd} gamma_{abd order as written}.
  {
    bool ok = true;
    std::string w;
    for (int c = 0; c < 4 && ok; ++c) {
      QMat lhs = rep.gamma5 * rep.gamma[c];
      QMat rhs(4, 4);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int d = 0; d < 4; ++d) {
            int eps = epsilon_upper(a, b, c, d);
            if (eps == 0) continue;
            QMat gabd =
                rep.gamma_lower(a) * rep.gamma_lower(b) * rep.gamma_lower(d);  // distinct
            rhs = rhs + (GaussianRational(rat(0), rat(-eps, 6))) * gabd;
          }
      if (!(lhs - rhs).is_zero()) {
        ok = false;
        w = "index " + std::to_string(c);
      }
    }
    push("gamma5-single-dual", "gamma5 times gamma as dual triple", ok, w);
  }

  // Regression constants of the representation.
  {
    QMat g5sq = rep.gamma5 * rep.gamma5;
    push("gamma5-square", "gamma5 squares to +1 in this convention",
         g5sq == QMat::identity(4), "gamma5^2 != +1");
    QMat g0123 = rep.gamma[0] * rep.gamma[1] * rep.gamma[2] * rep.gamma[3];
    push("gamma0123", "plain product equals -i gamma5",
         (g0123 - (-GaussianRational::unit_i()) * rep.gamma5).is_zero(), "mismatch");
  }
  return out;
}

std::vector<CheckResult> check_fierz(const GammaRep& rep, const std::array<GSpinor, 4>& l,
                                     const std::array<int, 4>& parity) {
  std::vector<CheckResult> out;
  auto push = [&out](const std::string& id, const std::string& anchor, bool ok,
                     const std::string& w) {
    CheckResult r;
    r.suite = "fierz";
    r.check_id = id;
    r.anchor = anchor;
    r.exact_zero = ok;
    r.witness = ok ? "" : w;
    out.push_back(std::move(r));
  };

  // Completeness: symmetrization of (C gamma^a)_{alpha delta}(C gamma_a)_{rho
  // beta} over (delta, rho, beta) vanishes.
  {
    bool ok = true;
    std::string w;
    std::array<QMat, 4> cg;
    for (int a = 0; a < 4; ++a) cg[a] = rep.C * rep.gamma[a];
    for (int al = 0; al < 4 && ok; ++al)
      for (int de = 0; de < 4 && ok; ++de)
        for (int ro = 0; ro < 4 && ok; ++ro)
          for (int be = 0; be < 4 && ok; ++be) {
            GaussianRational acc;
            int idx[3] = {de, ro, be};
            int perm[3] = {0, 1, 2};
            // sum over the 6 permutations of (delta, rho, beta)
            do {
              for (int a = 0; a < 4; ++a)
                acc += grat(eta_sign(a)) * cg[a](al, idx[perm[0]]) *
                       cg[a](idx[perm[1]], idx[perm[2]]);
            } while (std::next_permutation(perm, perm + 3));
            if (!acc.is_zero()) {
              ok = false;
              w = "component " + std::to_string(al) + std::to_string(de) + std::to_string(ro) +
                  std::to_string(be);
            }
          }
    push("fierz-completeness", "clifford completeness symmetrization", ok, w);
  }

  LVMat g1 = gamma_wedge(rep, 1);
  LVMat g3 = gamma_wedge(rep, 3);
  auto p = [&parity](int i) { return parity[size_t(i - 1)]; };
  auto sgn = [](int e) { return (e % 2 == 0) ? 1 : -1; };

  // Rearrangement 1.
  {
    Grassmann lhs =
        top_coefficient_pair(rep, l[0], g3, l[1], l[2], g1, l[3], p(2), p(3), p(4));
    Grassmann r1 =
        top_coefficient_pair(rep, l[0], g1, l[2], l[1], g3, l[3], p(3), p(2), p(4)) *
        grat(sgn(p(2) * p(3)));
    Grassmann r2 =
        top_coefficient_pair(rep, l[0], g1, l[3], l[1], g3, l[2], p(4), p(2), p(3)) *
        grat(sgn(p(4) * (p(2) + p(3) + 1) + p(3)));
    // In the single canonical ordering convention the mixed-rank shape swap
    // (rank 3 wedge rank 1 versus rank 1 wedge rank 3) carries an extra
    // Koszul sign, certified over all 16 parity patterns.
    Grassmann res = lhs + r1 + r2;
    push("fierz-rearrange-1", "four-spinor rearrangement, mixed ranks", res.is_zero(),
         res.is_zero() ? "" : res.str());
  }
  // Rearrangement 2.
  {
    Grassmann lhs =
        top_coefficient_pair(rep, l[0], g3, l[1], l[2], g1, l[3], p(2), p(3), p(4));
    Grassmann r1 =
        top_coefficient_pair(rep, l[0], g3, l[2], l[1], g1, l[3], p(3), p(2), p(4)) *
        grat(-sgn(p(2) * p(3)));
    Grassmann r2 =
        top_coefficient_pair(rep, l[0], g3, l[3], l[1], g1, l[2], p(4), p(2), p(3)) *
        grat(-sgn(p(4) * (p(2) + p(3) + 1) + p(3)));
    Grassmann res = lhs - r1 - r2;
    push("fierz-rearrange-2", "four-spinor rearrangement, equal ranks", res.is_zero(),
         res.is_zero() ? "" : res.str());
  }
  return out;
}

std::vector<CheckResult> check_fierz_lemma(const GammaRep& rep, const GSpinor& lambda,
                                           int lambda_parity, const GSpinor& chi_even,
                                           const GSpinor& psi_odd) {
  std::vector<CheckResult> out;
  LVMat g1 = gamma_wedge(rep, 1);
  LVMat g3 = gamma_wedge(rep, 3);
  auto push = [&out](const std::string& id, const Grassmann& res) {
    CheckResult r;
    r.suite = "fierz";
    r.check_id = id;
    r.anchor = "vanishing quartic spinor combinations";
    r.exact_zero = res.is_zero();
    r.witness = res.is_zero() ? "" : res.str();
    out.push_back(std::move(r));
  };
  const int pl = lambda_parity;
  push("fierz-lemma-1",
       top_coefficient_pair(rep, lambda, g3, chi_even, chi_even, g1, psi_odd, 0, 0, 1));
  push("fierz-lemma-2",
       top_coefficient_pair(rep, chi_even, g1, chi_even, lambda, g3, psi_odd, 0, pl, 1));
  push("fierz-lemma-3",
       top_coefficient_pair(rep, lambda, g1, chi_even, chi_even, g3, psi_odd, 0, 0, 1));
  return out;
}

}  // namespace sugra
