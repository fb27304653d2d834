#pragma once

// Truncated multivariate Taylor arithmetic: 4 variables, total degree <= 3.
//
// A Jet stores the 35 coefficients c[alpha] = D^alpha f / alpha! at a base
// point, ordered by total degree; within a degree the exponent of the first
// variable decreases first, then the second, and so on.  Coefficients of
// degree above the jet's order are kept identically zero; binary operations
// return the minimum order of their operands.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "fourframes/common.hpp"

namespace fourframes {

inline constexpr int kJetVars = 4;
inline constexpr int kJetOrder = 3;
inline constexpr int kJetCoeffs = 35;

inline constexpr std::array<std::array<int, 4>, kJetCoeffs> kMidx = {{
    {0, 0, 0, 0},
    {1, 0, 0, 0},
    {0, 1, 0, 0},
    {0, 0, 1, 0},
    {0, 0, 0, 1},
    {2, 0, 0, 0},
    {1, 1, 0, 0},
    {1, 0, 1, 0},
    {1, 0, 0, 1},
    {0, 2, 0, 0},
    {0, 1, 1, 0},
    {0, 1, 0, 1},
    {0, 0, 2, 0},
    {0, 0, 1, 1},
    {0, 0, 0, 2},
    {3, 0, 0, 0},
    {2, 1, 0, 0},
    {2, 0, 1, 0},
    {2, 0, 0, 1},
    {1, 2, 0, 0},
    {1, 1, 1, 0},
    {1, 1, 0, 1},
    {1, 0, 2, 0},
    {1, 0, 1, 1},
    {1, 0, 0, 2},
    {0, 3, 0, 0},
    {0, 2, 1, 0},
    {0, 2, 0, 1},
    {0, 1, 2, 0},
    {0, 1, 1, 1},
    {0, 1, 0, 2},
    {0, 0, 3, 0},
    {0, 0, 2, 1},
    {0, 0, 1, 2},
    {0, 0, 0, 3},
}};

inline constexpr std::array<int, kJetCoeffs> kMidxDeg = [] {
  std::array<int, kJetCoeffs> d{};
  for (int i = 0; i < kJetCoeffs; ++i) {
    d[i] = kMidx[i][0] + kMidx[i][1] + kMidx[i][2] + kMidx[i][3];
  }
  return d;
}();

namespace detail {
inline constexpr std::array<int, 256> kMidxPos = [] {
  std::array<int, 256> p{};
  for (auto& x : p) x = -1;
  for (int i = 0; i < kJetCoeffs; ++i) {
    int key = ((kMidx[i][0] * 4 + kMidx[i][1]) * 4 + kMidx[i][2]) * 4 +
              kMidx[i][3];
    p[key] = i;
  }
  return p;
}();
}  // namespace detail

// Table index of a multi-index, or -1 if the degree exceeds 3.
inline constexpr int midx_position(const std::array<int, 4>& a) {
  for (int v = 0; v < 4; ++v) {
    if (a[v] < 0 || a[v] > kJetOrder) return -1;
  }
  if (a[0] + a[1] + a[2] + a[3] > kJetOrder) return -1;
  return detail::kMidxPos[((a[0] * 4 + a[1]) * 4 + a[2]) * 4 + a[3]];
}

namespace detail {

struct MulEntry {
  int i, j, k;
};

// All coefficient pairs whose product lands inside degree 3 (165 entries).
inline const std::vector<MulEntry>& mul_table() {
  static const std::vector<MulEntry> table = [] {
    std::vector<MulEntry> t;
    for (int i = 0; i < kJetCoeffs; ++i) {
      for (int j = 0; j < kJetCoeffs; ++j) {
        if (kMidxDeg[i] + kMidxDeg[j] > kJetOrder) continue;
        std::array<int, 4> s{};
        for (int v = 0; v < 4; ++v) s[v] = kMidx[i][v] + kMidx[j][v];
        t.push_back({i, j, midx_position(s)});
      }
    }
    return t;
  }();
  return table;
}

struct ShiftEntry {
  int dst, src;
  double factor;
};

// partial_v: c'[beta] = (beta_v + 1) * c[beta + e_v].
inline const std::array<std::vector<ShiftEntry>, 4>& shift_tables() {
  static const std::array<std::vector<ShiftEntry>, 4> tables = [] {
    std::array<std::vector<ShiftEntry>, 4> t;
    for (int v = 0; v < 4; ++v) {
      for (int dst = 0; dst < kJetCoeffs; ++dst) {
        if (kMidxDeg[dst] >= kJetOrder) continue;
        std::array<int, 4> a = kMidx[dst];
        a[v] += 1;
        t[v].push_back({dst, midx_position(a), double(a[v])});
      }
    }
    return t;
  }();
  return tables;
}

}  // namespace detail

struct Jet {
  std::array<double, kJetCoeffs> c{};
  int ord = kJetOrder;
  Vec4 base{};

  double value() const { return c[0]; }

  double coefficient(const std::array<int, 4>& alpha) const {
    int pos = midx_position(alpha);
    if (pos < 0) {
      throw Error(ErrorKind::order_exhausted, "multi-index beyond degree 3",
                  base);
    }
    if (kMidxDeg[pos] > ord) {
      throw Error(ErrorKind::order_exhausted,
                  "coefficient beyond jet order " + std::to_string(ord), base);
    }
    return c[pos];
  }
};

inline Jet jet_constant(double v, const Vec4& base, int ord = kJetOrder) {
  Jet j;
  j.c[0] = v;
  j.ord = ord;
  j.base = base;
  return j;
}

inline Jet jet_coordinate(int var, const Vec4& base, int ord = kJetOrder) {
  Jet j;
  j.ord = ord;
  j.base = base;
  j.c[0] = base[var];
  if (ord >= 1) j.c[1 + var] = 1.0;
  return j;
}

inline void require_same_base(const Jet& a, const Jet& b) {
  if (a.base != b.base) {
    throw Error(ErrorKind::base_mismatch, "jet base points differ", a.base);
  }
}

namespace detail {
inline void truncate_above(Jet& a) {
  for (int i = 0; i < kJetCoeffs; ++i) {
    if (kMidxDeg[i] > a.ord) a.c[i] = 0.0;
  }
}
}  // namespace detail

inline Jet operator+(const Jet& a, const Jet& b) {
  require_same_base(a, b);
  Jet r = a;
  r.ord = std::min(a.ord, b.ord);
  for (int i = 0; i < kJetCoeffs; ++i) r.c[i] += b.c[i];
  detail::truncate_above(r);
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  require_same_base(a, b);
  Jet r = a;
  r.ord = std::min(a.ord, b.ord);
  for (int i = 0; i < kJetCoeffs; ++i) r.c[i] -= b.c[i];
  detail::truncate_above(r);
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

inline Jet operator*(const Jet& a, double s) {
  Jet r = a;
  for (auto& x : r.c) x *= s;
  return r;
}

inline Jet operator*(double s, const Jet& a) { return a * s; }

inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.c[0] += s;
  return r;
}

inline Jet operator+(double s, const Jet& a) { return a + s; }

inline Jet operator-(const Jet& a, double s) { return a + (-s); }

inline Jet operator-(double s, const Jet& a) { return (-a) + s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  require_same_base(a, b);
  Jet r;
  r.ord = std::min(a.ord, b.ord);
  r.base = a.base;
  for (const auto& e : detail::mul_table()) {
    if (kMidxDeg[e.k] > r.ord) continue;
    r.c[e.k] += a.c[e.i] * b.c[e.j];
  }
  return r;
}

inline Jet partial(const Jet& a, int var) {
  if (a.ord <= 0) {
    throw Error(ErrorKind::order_exhausted, "derivative of an order-0 jet",
                a.base);
  }
  Jet r;
  r.ord = a.ord - 1;
  r.base = a.base;
  for (const auto& e : detail::shift_tables()[var]) {
    if (kMidxDeg[e.dst] > r.ord) continue;
    r.c[e.dst] = e.factor * a.c[e.src];
  }
  return r;
}

// Sum of f0 + f1 h + f2 h^2 + f3 h^3 where h is x with its constant removed.
// f_k must be the k-th Taylor coefficient (derivative over k!) of the outer
// function at x.value().
inline Jet apply_series(const Jet& x, double f0, double f1, double f2,
                        double f3) {
  Jet h = x;
  h.c[0] = 0.0;
  Jet r = h * f3;
  r.c[0] += f2;
  r = r * h;
  r.c[0] += f1;
  r = r * h;
  r.c[0] += f0;
  return r;
}

inline Jet jet_exp(const Jet& x) {
  double e = std::exp(x.value());
  return apply_series(x, e, e, e / 2.0, e / 6.0);
}

inline Jet jet_log(const Jet& x) {
  double v = x.value();
  if (!(v > 0.0)) {
    throw Error(ErrorKind::analytic_domain, "log of a non-positive value",
                x.base);
  }
  return apply_series(x, std::log(v), 1.0 / v, -0.5 / (v * v),
                      1.0 / (3.0 * v * v * v));
}

inline Jet jet_sqrt(const Jet& x) {
  double v = x.value();
  if (!(v > 0.0)) {
    throw Error(ErrorKind::analytic_domain, "sqrt of a non-positive value",
                x.base);
  }
  double s = std::sqrt(v);
  return apply_series(x, s, 0.5 / s, -1.0 / (8.0 * s * v),
                      1.0 / (16.0 * s * v * v));
}

// Real cube root; defined for either sign of the argument, singular at 0.
inline Jet jet_cbrt(const Jet& x) {
  double v = x.value();
  if (v == 0.0) {
    throw Error(ErrorKind::analytic_domain, "cbrt at zero", x.base);
  }
  double r = std::cbrt(v);
  return apply_series(x, r, r / (3.0 * v), -r / (9.0 * v * v),
                      5.0 * r / (81.0 * v * v * v));
}

inline Jet jet_sin(const Jet& x) {
  double s = std::sin(x.value());
  double c = std::cos(x.value());
  return apply_series(x, s, c, -s / 2.0, -c / 6.0);
}

inline Jet jet_cos(const Jet& x) {
  double s = std::sin(x.value());
  double c = std::cos(x.value());
  return apply_series(x, c, -s, -c / 2.0, s / 6.0);
}

inline Jet jet_recip(const Jet& x) {
  double v = x.value();
  if (v == 0.0) {
    throw Error(ErrorKind::division_by_zero, "reciprocal of a zero jet",
                x.base);
  }
  return apply_series(x, 1.0 / v, -1.0 / (v * v), 1.0 / (v * v * v),
                      -1.0 / (v * v * v * v));
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * jet_recip(b); }

inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

inline Jet operator/(double s, const Jet& a) { return jet_recip(a) * s; }

// Real power for a positive argument.
inline Jet jet_pow(const Jet& x, double p) {
  double v = x.value();
  if (!(v > 0.0)) {
    throw Error(ErrorKind::analytic_domain, "pow of a non-positive value",
                x.base);
  }
  double f0 = std::pow(v, p);
  double f1 = p * std::pow(v, p - 1.0);
  double f2 = p * (p - 1.0) * std::pow(v, p - 2.0) / 2.0;
  double f3 = p * (p - 1.0) * (p - 2.0) * std::pow(v, p - 3.0) / 6.0;
  return apply_series(x, f0, f1, f2, f3);
}

// Integer power via repeated multiplication; valid for any argument.
inline Jet jet_powi(const Jet& x, int n) {
  if (n < 0) return jet_recip(jet_powi(x, -n));
  Jet r = jet_constant(1.0, x.base, x.ord);
  for (int k = 0; k < n; ++k) r = r * x;
  return r;
}

// Substitute the four jets g (all at one base point p) into f, a jet based at
// q = (g[0].value(), ..., g[3].value()).  The result is based at p; its order
// is the minimum of the orders involved.
inline Jet compose(const Jet& f, const std::array<Jet, 4>& g) {
  for (int v = 1; v < 4; ++v) require_same_base(g[0], g[v]);
  int ord = f.ord;
  for (int v = 0; v < 4; ++v) ord = std::min(ord, g[v].ord);
  for (int v = 0; v < 4; ++v) {
    if (f.base[v] != g[v].c[0]) {
      throw Error(ErrorKind::base_mismatch,
                  "outer jet base does not match inner values", g[0].base);
    }
  }
  const Vec4& p = g[0].base;
  std::array<std::array<Jet, 4>, 4> pw;
  for (int v = 0; v < 4; ++v) {
    Jet h = g[v];
    h.c[0] = 0.0;
    h.ord = ord;
    detail::truncate_above(h);
    pw[v][0] = jet_constant(1.0, p, ord);
    pw[v][1] = h;
    pw[v][2] = h * h;
    pw[v][3] = pw[v][2] * h;
  }
  Jet r = jet_constant(0.0, p, ord);
  for (int i = 0; i < kJetCoeffs; ++i) {
    if (kMidxDeg[i] > f.ord) continue;
    double fc = f.c[i];
    if (fc == 0.0) continue;
    Jet term = pw[0][kMidx[i][0]] * pw[1][kMidx[i][1]];
    term = term * pw[2][kMidx[i][2]];
    term = term * pw[3][kMidx[i][3]];
    r = r + term * fc;
  }
  return r;
}

inline bool jet_finite(const Jet& a) {
  for (double x : a.c) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace fourframes
