#pragma once

// Truncated Taylor series in one variable with complex coefficients c_j = f^{(j)}(x0) / j!.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gfio/common.hpp"

namespace gfio {

class Jet {
 public:
  Jet() : c_(1, cplx(0.0)) {}
  explicit Jet(int order, cplx value = 0.0) : c_(static_cast<std::size_t>(order) + 1, cplx(0.0)) { c_[0] = value; }
  explicit Jet(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  /// The identity map x ↦ x expanded at x0.
  static Jet variable(int order, double x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](int k) const { return k <= order() ? c_[static_cast<std::size_t>(k)] : cplx(0.0); }
  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  /// Coefficients of f^{(a)}/a! as a jet: c'_m = C(a+m, m) c_{a+m}, truncated to the given order.
  Jet shifted(int a, int new_order) const {
    Jet r(new_order);
    for (int m = 0; m <= new_order; ++m) {
      double binom = 1.0;
      for (int i = 1; i <= m; ++i) binom = binom * (a + i) / i;
      r.c_[static_cast<std::size_t>(m)] = binom * (*this)[a + m];
    }
    return r;
  }

  Jet truncated(int new_order) const {
    Jet r(new_order);
    for (int k = 0; k <= new_order; ++k) r.c_[static_cast<std::size_t>(k)] = (*this)[k];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    if (o.order() > order()) c_.resize(o.c_.size(), cplx(0.0));
    for (int k = 0; k <= o.order(); ++k) c_[static_cast<std::size_t>(k)] += o[k];
    return *this;
  }
  Jet& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }
  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(Jet a, double s) { return a *= cplx(s); }
  friend Jet operator*(const Jet& a, const Jet& b) {
    const int p = std::min(a.order(), b.order());
    Jet r(p);
    for (int k = 0; k <= p; ++k) {
      cplx acc = 0.0;
      for (int j = 0; j <= k; ++j) acc += a[j] * b[k - j];
      r.c_[static_cast<std::size_t>(k)] = acc;
    }
    return r;
  }

  friend Jet exp(const Jet& f) {
    const int p = f.order();
    Jet r(p);
    r.c_[0] = std::exp(f[0]);
    for (int k = 1; k <= p; ++k) {
      cplx acc = 0.0;
      for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * f[j] * r[k - j];
      r.c_[static_cast<std::size_t>(k)] = acc / static_cast<double>(k);
    }
    return r;
  }

  friend Jet log(const Jet& f) {
    const int p = f.order();
    if (f[0] == cplx(0.0)) throw ArgumentError("jet log: zero constant term");
    Jet r(p);
    r.c_[0] = std::log(f[0]);
    for (int k = 1; k <= p; ++k) {
      cplx acc = 0.0;
      for (int j = 1; j < k; ++j) acc += static_cast<double>(j) * r[j] * f[k - j];
      r.c_[static_cast<std::size_t>(k)] = (f[k] - acc / static_cast<double>(k)) / f[0];
    }
    return r;
  }

  friend Jet pow(const Jet& f, cplx a) { return exp(a * log(f)); }

  /// k-th derivative value f^{(k)}(x0) = k! c_k
  cplx derivative(int k) const {
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return fact * (*this)[k];
  }

 private:
  std::vector<cplx> c_;
};

}  // namespace gfio
