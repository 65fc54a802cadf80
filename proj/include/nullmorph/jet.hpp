#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "nullmorph/errors.hpp"

namespace nullmorph {

using Complex = std::complex<double>;

inline constexpr int kMaxJetOrder = 7;
inline constexpr int kDefaultJetOrder = 3;

/// Truncated Taylor expansion of a holomorphic function of one parameter.
///
/// Coefficients are Taylor-normalized: coeff(k) = f^(k)(s0) / k!. Binary
/// operations require equal orders; mixing a jet with a plain complex number
/// treats the number as a constant.
class Jet {
 public:
  Jet() = default;

  explicit Jet(int order, Complex value = {}) : order_(order) {
    if (order < 0 || order > kMaxJetOrder) {
      throw Error(ErrorKind::insufficient_jet_order, "jet order out of range");
    }
    coeffs_[0] = value;
  }

  static Jet constant(int order, Complex value) { return Jet(order, value); }

  /// The identity function s around s0.
  static Jet variable(int order, Complex s0) {
    Jet j(order, s0);
    if (order >= 1) j.coeffs_[1] = 1.0;
    return j;
  }

  static Jet from_coeffs(std::span<const Complex> coeffs) {
    Jet j(static_cast<int>(coeffs.size()) - 1);
    std::copy(coeffs.begin(), coeffs.end(), j.coeffs_.begin());
    return j;
  }

  int order() const noexcept { return order_; }
  Complex value() const noexcept { return coeffs_[0]; }
  Complex coeff(int k) const { return k <= order_ ? coeffs_[static_cast<size_t>(k)] : Complex{}; }
  Complex& coeff(int k) { return coeffs_.at(static_cast<size_t>(k)); }

  /// k-th derivative at the expansion point.
  Complex derivative(int k) const {
    if (k > order_) throw Error(ErrorKind::insufficient_jet_order, "derivative beyond jet order");
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return fact * coeffs_[static_cast<size_t>(k)];
  }

  /// d/ds, one order lower.
  Jet differentiate() const {
    if (order_ == 0) throw Error(ErrorKind::insufficient_jet_order, "cannot differentiate order-0 jet");
    Jet d(order_ - 1);
    for (int k = 0; k < order_; ++k) d.coeffs_[k] = static_cast<double>(k + 1) * coeffs_[k + 1];
    return d;
  }

  Jet truncated(int order) const {
    Jet t(std::min(order, order_));
    std::copy_n(coeffs_.begin(), t.order_ + 1, t.coeffs_.begin());
    return t;
  }

  Jet& operator+=(const Jet& o) {
    check_order(o);
    for (int k = 0; k <= order_; ++k) coeffs_[k] += o.coeffs_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_order(o);
    for (int k = 0; k <= order_; ++k) coeffs_[k] -= o.coeffs_[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }
  Jet& operator+=(Complex c) { coeffs_[0] += c; return *this; }
  Jet& operator-=(Complex c) { coeffs_[0] -= c; return *this; }
  Jet& operator*=(Complex c) {
    for (int k = 0; k <= order_; ++k) coeffs_[k] *= c;
    return *this;
  }

  friend Jet operator-(Jet a) {
    for (int k = 0; k <= a.order_; ++k) a.coeffs_[k] = -a.coeffs_[k];
    return a;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, Complex c) { return a += c; }
  friend Jet operator+(Complex c, Jet a) { return a += c; }
  friend Jet operator-(Jet a, Complex c) { return a -= c; }
  friend Jet operator-(Complex c, const Jet& a) { return -a + c; }
  friend Jet operator*(Jet a, Complex c) { return a *= c; }
  friend Jet operator*(Complex c, Jet a) { return a *= c; }
  friend Jet operator/(Jet a, Complex c) { return a *= (1.0 / c); }

  // Leibniz rule, truncated.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_order(b);
    Jet r(a.order_);
    for (int k = 0; k <= a.order_; ++k) {
      Complex sum{};
      for (int i = 0; i <= k; ++i) sum += a.coeffs_[i] * b.coeffs_[k - i];
      r.coeffs_[k] = sum;
    }
    return r;
  }

  // Quotient series: r = a / b solves b * r = a term by term.
  friend Jet operator/(const Jet& a, const Jet& b) {
    a.check_order(b);
    if (!(std::abs(b.coeffs_[0]) > kSingularJetTolerance)) {
      throw Error(ErrorKind::division_by_singular_jet, "divisor jet vanishes at expansion point");
    }
    Jet r(a.order_);
    for (int k = 0; k <= a.order_; ++k) {
      Complex sum = a.coeffs_[k];
      for (int i = 1; i <= k; ++i) sum -= b.coeffs_[i] * r.coeffs_[k - i];
      r.coeffs_[k] = sum / b.coeffs_[0];
    }
    return r;
  }

  friend Jet operator/(Complex c, const Jet& b) { return Jet::constant(b.order_, c) / b; }

  friend bool operator==(const Jet& a, const Jet& b) {
    if (a.order_ != b.order_) return false;
    return std::equal(a.coeffs_.begin(), a.coeffs_.begin() + a.order_ + 1, b.coeffs_.begin());
  }

  static constexpr double kSingularJetTolerance = 1e-300;

 private:
  void check_order(const Jet& o) const {
    if (o.order_ != order_) throw Error(ErrorKind::order_mismatch, "jet orders differ");
  }

  int order_ = 0;
  std::array<Complex, kMaxJetOrder + 1> coeffs_{};
};

inline Complex value_of(Complex c) { return c; }
inline Complex value_of(const Jet& j) { return j.value(); }

/// Polynomial with complex coefficients, lowest power first.
using Poly = std::vector<Complex>;

inline Complex eval_poly(const Poly& p, Complex s) {
  Complex acc{};
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

/// Exact Taylor coefficients of p(s0 + t) up to the given order.
inline Jet eval_poly_jet(const Poly& p, Complex s0, int order) {
  Jet j(order);
  // Repeated synthetic division by (s - s0) yields the Taylor coefficients.
  Poly work = p;
  for (int k = 0; k <= order && !work.empty(); ++k) {
    Complex acc{};
    Poly quotient(work.size() > 1 ? work.size() - 1 : 0);
    for (size_t i = work.size(); i-- > 0;) {
      acc = acc * s0 + work[i];
      if (i > 0) quotient[i - 1] = acc;
    }
    j.coeff(k) = acc;
    work = std::move(quotient);
  }
  return j;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly d(p.size() - 1);
  for (size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

/// Antiderivative vanishing at s = 0.
inline Poly poly_integral(const Poly& p) {
  Poly r(p.size() + 1);
  for (size_t i = 0; i < p.size(); ++i) r[i + 1] = p[i] / static_cast<double>(i + 1);
  return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return r;
}

inline bool poly_is_zero(const Poly& p) {
  return std::all_of(p.begin(), p.end(), [](Complex c) { return c == Complex{}; });
}

/// Composition p(q(s)).
inline Poly poly_compose(const Poly& p, const Poly& q) {
  Poly r;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    r = poly_mul(r, q);
    r = poly_add(r, Poly{*it});
  }
  return r;
}

}  // namespace nullmorph
