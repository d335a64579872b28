// Exact scalar kernel: arbitrary-precision rationals (GMP) and Gaussian
// rationals Q(i).  All arithmetic in the engine bottoms out here; there is
// no floating point anywhere in the verification path.
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sugra {

using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Element of Q(i), i^2 = -1.  Stored as re + im*i with canonical mpq parts.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(const Rational& r) : re(r) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long n) : re(rat(n)) {}        // NOLINT(google-explicit-constructor)
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational unit_i() { return GaussianRational(rat(0), rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational operator-() const { return {Rational(-re), Rational(-im)}; }
  void negate() {
    mpq_neg(re.get_mpq_t(), re.get_mpq_t());
    mpq_neg(im.get_mpq_t(), im.get_mpq_t());
  }
  // Complex conjugation (the only "star" at scalar level: i -> -i).
  GaussianRational conj() const { return {re, Rational(-im)}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    if (o.re != 0) re += o.re;
    if (o.im != 0) im += o.im;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    if (o.re != 0) re -= o.re;
    if (o.im != 0) im -= o.im;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    // Fast paths for the common purely-real / purely-imaginary operands.
    const bool a_im0 = (im == 0), b_im0 = (o.im == 0);
    if (b_im0) {
      if (o.re == 0) {
        re = 0;
        im = 0;
      } else {
        re *= o.re;
        if (!a_im0) im *= o.re;
      }
      return *this;
    }
    if (a_im0) {
      if (re == 0) return *this;
      im = re * o.im;
      re *= o.re;
      return *this;
    }
    const bool a_re0 = (re == 0), b_re0 = (o.re == 0);
    if (a_re0 && b_re0) {
      re = im * o.im;
      re = -re;
      im = 0;
      return *this;
    }
    if (a_re0) {
      re = im * o.im;
      re = -re;
      im *= o.re;
      return *this;
    }
    if (b_re0) {
      Rational r = im * o.im;
      im = re * o.im;
      re = std::move(r);
      re = -re;
      return *this;
    }
    Rational r = re * o.re - im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  // |z|^2 = z * conj(z), a nonnegative rational; zero iff z == 0.
  Rational norm2() const { return re * re + im * im; }

  GaussianRational inverse() const {
    if (is_zero()) throw std::domain_error("GaussianRational::inverse: division by zero");
    Rational n = norm2();
    return {Rational(re / n), Rational(-im / n)};
  }

  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    return a * b.inverse();
  }

  std::string str() const {
    std::string s = re.get_str();
    if (im != 0) {
      s += (im > 0 ? "+" : "") + im.get_str() + "i";
    }
    return s;
  }
};

inline GaussianRational grat(long num, long den = 1) { return GaussianRational(rat(num, den)); }

}  // namespace sugra
