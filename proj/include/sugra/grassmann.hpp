// Finite-dimensional Grassmann algebra over the Gaussian rationals.
//
// Generators theta_0 .. theta_{N-1} anticommute; elements are sparse maps
// bitmask -> coefficient with eager zero pruning, so structural equality is
// semantic equality.  Generator 0 is reserved by callers as the odd shift
// parameter used to extract first derivatives of polynomial expressions
// (see epsilon_linear_part).
#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <vector>
#include <stdexcept>
#include <string>

#include "sugra/rational.hpp"

namespace sugra {

constexpr int kMaxGrassmannGenerators = 16;
constexpr int kDefaultGrassmannGenerators = 12;

// Index of the reserved odd shift generator.
constexpr int kEpsilonGenerator = 0;

using GrassmannMask = std::uint16_t;

// Sign (-1)^t where t is the number of transpositions needed to merge the
// ascending products theta_A * theta_B into ascending order.  Requires the
// masks to be disjoint.
inline int merge_sign(GrassmannMask a, GrassmannMask b) {
  int swaps = 0;
  while (b != 0) {
    GrassmannMask low = b & GrassmannMask(-b);
    // Bits of `a` strictly above the lowest bit of `b` must hop over it.
    swaps += std::popcount(static_cast<unsigned>(a & ~(low | (low - 1))));
    b ^= low;
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

class Grassmann {
 public:
  Grassmann() = default;
  explicit Grassmann(const GaussianRational& scalar) {
    if (!scalar.is_zero()) terms_[0] = scalar;
  }
  Grassmann(const Rational& r) : Grassmann(GaussianRational(r)) {}  // NOLINT
  Grassmann(long n) : Grassmann(GaussianRational(n)) {}             // NOLINT

  static Grassmann generator(int i) {
    if (i < 0 || i >= kMaxGrassmannGenerators)
      throw std::out_of_range("Grassmann::generator: index out of range");
    Grassmann g;
    g.terms_[GrassmannMask(1) << i] = grat(1);
    return g;
  }

  static Grassmann monomial(GrassmannMask mask, const GaussianRational& c) {
    Grassmann g;
    if (!c.is_zero()) g.terms_[mask] = c;
    return g;
  }

  bool is_zero() const { return terms_.empty(); }

  const std::map<GrassmannMask, GaussianRational>& terms() const { return terms_; }

  GaussianRational coefficient(GrassmannMask mask) const {
    auto it = terms_.find(mask);
    return it == terms_.end() ? GaussianRational() : it->second;
  }

  // Scalar (degree-zero) part.
  GaussianRational body() const { return coefficient(0); }

  // Nilpotent part.
  Grassmann soul() const {
    Grassmann s = *this;
    s.terms_.erase(0);
    return s;
  }

  // 0 for even, 1 for odd; throws if the element mixes parities.
  // Zero is reported as even.
  int parity() const {
    int p = -1;
    for (const auto& [mask, c] : terms_) {
      int mp = std::popcount(static_cast<unsigned>(mask)) & 1;
      if (p == -1) p = mp;
      if (p != mp) throw std::domain_error("Grassmann::parity: inhomogeneous element");
    }
    return p == -1 ? 0 : p;
  }

  // Projection onto the even (p=0) or odd (p=1) monomials.
  Grassmann parity_part(int p) const {
    Grassmann r;
    for (const auto& [mask, c] : terms_)
      if ((std::popcount(static_cast<unsigned>(mask)) & 1) == p) r.terms_[mask] = c;
    return r;
  }

  bool is_homogeneous() const {
    int p = -1;
    for (const auto& [mask, c] : terms_) {
      int mp = std::popcount(static_cast<unsigned>(mask)) & 1;
      if (p == -1) p = mp;
      if (p != mp) return false;
    }
    return true;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& [mask, c] : terms_) d = std::max(d, std::popcount(static_cast<unsigned>(mask)));
    return d;
  }

  Grassmann operator-() const {
    Grassmann r = *this;
    for (auto& [mask, c] : r.terms_) c = -c;
    return r;
  }

  Grassmann& operator+=(const Grassmann& o) {
    for (const auto& [mask, c] : o.terms_) add_term(mask, c);
    return *this;
  }
  Grassmann& operator-=(const Grassmann& o) {
    for (const auto& [mask, c] : o.terms_) add_term(mask, -c);
    return *this;
  }

  friend Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
  friend Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }

  friend Grassmann operator*(const Grassmann& a, const Grassmann& b) {
    Grassmann r;
    if (a.terms_.empty() || b.terms_.empty()) return r;
    // Dense scratch accumulator over the mask space: avoids per-pair tree
    // lookups in the hot path.
    static thread_local std::vector<GaussianRational> acc(
        std::size_t(1) << kMaxGrassmannGenerators);
    static thread_local std::vector<char> used(std::size_t(1) << kMaxGrassmannGenerators, 0);
    static thread_local std::vector<GrassmannMask> touched;
    touched.clear();
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        if (ma & mb) continue;  // repeated generator annihilates
        GaussianRational c = ca * cb;
        if (merge_sign(ma, mb) < 0) c.negate();
        GrassmannMask m = ma | mb;
        if (!used[m]) {
          used[m] = 1;
          touched.push_back(m);
          acc[m] = std::move(c);
        } else {
          acc[m] += c;
        }
      }
    }
    std::sort(touched.begin(), touched.end());
    for (GrassmannMask m : touched) {
      used[m] = 0;
      if (!acc[m].is_zero()) r.terms_.emplace_hint(r.terms_.end(), m, std::move(acc[m]));
      acc[m] = GaussianRational{};
    }
    return r;
  }
  Grassmann& operator*=(const Grassmann& o) { return *this = *this * o; }

  friend Grassmann operator*(const GaussianRational& s, const Grassmann& g) {
    Grassmann r;
    if (s.is_zero()) return r;
    for (const auto& [mask, c] : g.terms_) r.terms_.emplace_hint(r.terms_.end(), mask, s * c);
    return r;
  }
  friend Grassmann operator*(const Grassmann& g, const GaussianRational& s) { return s * g; }

  friend bool operator==(const Grassmann& a, const Grassmann& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Grassmann& a, const Grassmann& b) { return !(a == b); }

  // Graded star: theta_i* = theta_i, (xy)* = y* x*, i* = -i.  On a degree-k
  // monomial the product reversal contributes (-1)^{k(k-1)/2}.
  Grassmann star() const {
    Grassmann r;
    for (const auto& [mask, c] : terms_) {
      int k = std::popcount(static_cast<unsigned>(mask));
      GaussianRational cc = c.conj();
      if (((k * (k - 1) / 2) % 2) != 0) cc = -cc;
      r.terms_[mask] = cc;
    }
    return r;
  }

  // Multiplicative inverse: exists iff body() != 0.  Uses the terminating
  // Neumann series (soul is nilpotent).
  Grassmann inverse() const {
    GaussianRational b = body();
    if (b.is_zero()) throw std::domain_error("Grassmann::inverse: zero body is not invertible");
    GaussianRational binv = b.inverse();
    Grassmann n = (-binv) * soul();  // x = b(1 - n), inverse = (sum n^k)/b
    Grassmann acc(grat(1));
    Grassmann pow(grat(1));
    while (true) {
      pow = pow * n;
      if (pow.is_zero()) break;
      acc += pow;
    }
    return binv * acc;
  }

  // Writes x = a + eps*b with eps = theta_{kEpsilonGenerator} and neither a
  // nor b containing eps; returns b.  Since eps is the lowest generator no
  // reordering sign arises.
  Grassmann epsilon_linear_part() const {
    constexpr GrassmannMask eps_bit = GrassmannMask(1) << kEpsilonGenerator;
    Grassmann r;
    for (const auto& [mask, c] : terms_) {
      if (mask & eps_bit) r.terms_[mask & ~eps_bit] = c;
    }
    return r;
  }

  // Generalization of epsilon_linear_part to an arbitrary generator g:
  // writes x = a + theta_g*b with neither part containing theta_g and
  // returns b.  Moving theta_g to the front of a monomial crosses every
  // lower-index generator present, contributing one sign flip each.
  Grassmann linear_part(int g) const {
    const GrassmannMask bit = GrassmannMask(1) << g;
    const GrassmannMask lower = bit - 1;
    Grassmann r;
    for (const auto& [mask, c] : terms_) {
      if (!(mask & bit)) continue;
      int crossings = std::popcount(static_cast<unsigned>(mask & lower));
      r.terms_[mask & ~bit] = (crossings % 2 == 0) ? c : -c;
    }
    return r;
  }

  // Companion to linear_part: the terms not containing theta_g.
  Grassmann free_part(int g) const {
    const GrassmannMask bit = GrassmannMask(1) << g;
    Grassmann r;
    for (const auto& [mask, c] : terms_) {
      if (!(mask & bit)) r.terms_[mask] = c;
    }
    return r;
  }

  Grassmann epsilon_free_part() const {
    constexpr GrassmannMask eps_bit = GrassmannMask(1) << kEpsilonGenerator;
    Grassmann r;
    for (const auto& [mask, c] : terms_) {
      if (!(mask & eps_bit)) r.terms_[mask] = c;
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [mask, c] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += "(" + c.str() + ")";
      for (int i = 0; i < kMaxGrassmannGenerators; ++i) {
        if (mask & (GrassmannMask(1) << i)) s += "*t" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void add_term(GrassmannMask mask, const GaussianRational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(mask, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  std::map<GrassmannMask, GaussianRational> terms_;
};

}  // namespace sugra
