#pragma once

// Differential forms with jet coefficients on a 4-dimensional chart, plus the
// metric value type that drives raising, Hodge duality and codifferentials.
//
// Component order is graded lexicographic: 2-forms (01,02,03,12,13,23) and
// 3-forms (012,013,023,123).

#include <array>
#include <functional>
#include <utility>

#include "fourframes/field.hpp"
#include "fourframes/linalg.hpp"

namespace fourframes {

inline constexpr std::array<std::array<int, 2>, 6> kInc2 = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kInc3 = {
    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

inline constexpr int form_comp_count(int deg) {
  constexpr int counts[5] = {1, 4, 6, 4, 1};
  return counts[deg];
}

inline constexpr int inc2_pos(int i, int j) {
  for (int p = 0; p < 6; ++p) {
    if (kInc2[p][0] == i && kInc2[p][1] == j) return p;
  }
  return -1;
}

inline constexpr int inc3_pos(int i, int j, int k) {
  for (int p = 0; p < 4; ++p) {
    if (kInc3[p][0] == i && kInc3[p][1] == j && kInc3[p][2] == k) return p;
  }
  return -1;
}

namespace detail {

// Sorts a tuple of distinct indices; returns the permutation sign, or 0 on a
// repeated index.
inline int sort_tuple(int* idx, int len) {
  int sign = 1;
  for (int i = 0; i < len; ++i) {
    for (int j = i + 1; j < len; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) {
        std::swap(idx[i], idx[j]);
        sign = -sign;
      }
    }
  }
  return sign;
}

inline int tuple_position(const int* idx, int len) {
  switch (len) {
    case 0: return 0;
    case 1: return idx[0];
    case 2: return inc2_pos(idx[0], idx[1]);
    case 3: return inc3_pos(idx[0], idx[1], idx[2]);
    case 4: return 0;
    default: return -1;
  }
}

inline void tuple_of(int deg, int pos, int* out) {
  switch (deg) {
    case 0: return;
    case 1: out[0] = pos; return;
    case 2: out[0] = kInc2[pos][0]; out[1] = kInc2[pos][1]; return;
    case 3:
      out[0] = kInc3[pos][0];
      out[1] = kInc3[pos][1];
      out[2] = kInc3[pos][2];
      return;
    case 4: out[0] = 0; out[1] = 1; out[2] = 2; out[3] = 3; return;
    default: return;
  }
}

inline int perm_sign4(const std::array<int, 4>& p) {
  int sign = 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (p[i] > p[j]) sign = -sign;
    }
  }
  return sign;
}

struct Complement {
  int pos;
  int sign;  // parity of (I, complement I) against (0,1,2,3)
};

// Complement table for degree k component index.
inline Complement complement_of(int deg, int pos) {
  int tup[4];
  tuple_of(deg, pos, tup);
  bool used[4] = {false, false, false, false};
  for (int i = 0; i < deg; ++i) used[tup[i]] = true;
  std::array<int, 4> perm{};
  int n = 0;
  for (int i = 0; i < deg; ++i) perm[n++] = tup[i];
  int comp[4];
  int m = 0;
  for (int i = 0; i < 4; ++i) {
    if (!used[i]) {
      comp[m++] = i;
      perm[n++] = i;
    }
  }
  return {tuple_position(comp, 4 - deg), perm_sign4(perm)};
}

}  // namespace detail

struct FormValue {
  int deg = 0;
  Vec4 base{};
  std::array<Jet, 6> c{};

  int ncomp() const { return form_comp_count(deg); }

  static FormValue zero(int deg, const Vec4& base, int ord = kJetOrder) {
    FormValue f;
    f.deg = deg;
    f.base = base;
    for (int i = 0; i < f.ncomp(); ++i) f.c[i] = jet_constant(0.0, base, ord);
    return f;
  }

  // Signed component for an arbitrary index tuple.
  Jet comp(std::initializer_list<int> idx) const {
    int tup[4];
    int len = 0;
    for (int v : idx) tup[len++] = v;
    int sign = detail::sort_tuple(tup, len);
    if (sign == 0) return jet_constant(0.0, base, c[0].ord);
    return c[detail::tuple_position(tup, len)] * double(sign);
  }

  int min_ord() const {
    int o = kJetOrder;
    for (int i = 0; i < ncomp(); ++i) o = std::min(o, c[i].ord);
    return o;
  }
};

inline FormValue operator+(const FormValue& a, const FormValue& b) {
  FormValue r = a;
  for (int i = 0; i < a.ncomp(); ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

inline FormValue operator-(const FormValue& a, const FormValue& b) {
  FormValue r = a;
  for (int i = 0; i < a.ncomp(); ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

inline FormValue operator-(const FormValue& a) {
  FormValue r = a;
  for (int i = 0; i < a.ncomp(); ++i) r.c[i] = -a.c[i];
  return r;
}

inline FormValue operator*(const FormValue& a, double s) {
  FormValue r = a;
  for (int i = 0; i < a.ncomp(); ++i) r.c[i] = a.c[i] * s;
  return r;
}

inline FormValue operator*(double s, const FormValue& a) { return a * s; }

inline FormValue operator*(const FormValue& a, const Jet& s) {
  FormValue r = a;
  for (int i = 0; i < a.ncomp(); ++i) r.c[i] = a.c[i] * s;
  return r;
}

inline FormValue operator*(const Jet& s, const FormValue& a) { return a * s; }

inline double form_max_value(const FormValue& a) {
  double m = 0.0;
  for (int i = 0; i < a.ncomp(); ++i) {
    m = std::max(m, std::fabs(a.c[i].value()));
  }
  return m;
}

inline FormValue wedge(const FormValue& a, const FormValue& b) {
  if (a.deg + b.deg > 4) {
    throw Error(ErrorKind::bad_config, "wedge degree above 4");
  }
  int ord = std::min(a.min_ord(), b.min_ord());
  FormValue r = FormValue::zero(a.deg + b.deg, a.base, ord);
  for (int pa = 0; pa < a.ncomp(); ++pa) {
    for (int pb = 0; pb < b.ncomp(); ++pb) {
      int tup[4];
      detail::tuple_of(a.deg, pa, tup);
      detail::tuple_of(b.deg, pb, tup + a.deg);
      int merged[4];
      for (int i = 0; i < a.deg + b.deg; ++i) merged[i] = tup[i];
      int sign = detail::sort_tuple(merged, a.deg + b.deg);
      if (sign == 0) continue;
      int pos = detail::tuple_position(merged, a.deg + b.deg);
      r.c[pos] = r.c[pos] + a.c[pa] * b.c[pb] * double(sign);
    }
  }
  return r;
}

// Exterior derivative at the value level; costs one jet order.
inline FormValue exterior_d(const FormValue& a) {
  if (a.deg >= 4) {
    FormValue r = FormValue::zero(4, a.base, std::max(a.min_ord() - 1, 0));
    return r;  // top forms are closed
  }
  int ord = a.min_ord() - 1;
  FormValue r = FormValue::zero(a.deg + 1, a.base, ord);
  for (int pk = 0; pk < r.ncomp(); ++pk) {
    int tup[4];
    detail::tuple_of(a.deg + 1, pk, tup);
    Jet s = jet_constant(0.0, a.base, ord);
    for (int m = 0; m <= a.deg; ++m) {
      int sub[4];
      int n = 0;
      for (int i = 0; i <= a.deg; ++i) {
        if (i != m) sub[n++] = tup[i];
      }
      Jet comp = a.c[detail::tuple_position(sub, a.deg)];
      Jet term = partial(comp, tup[m]);
      s = (m % 2 == 0) ? s + term : s - term;
    }
    r.c[pk] = s;
  }
  return r;
}

// Metric value at a point: components, inverse, determinant data and the
// orientation sign of the chart.
struct MetricValue {
  Vec4 base{};
  double orient = 1.0;
  JMat g;
  JMat ginv;
  Jet det;
  Jet sqrt_det;
};

inline MetricValue make_metric_value(const JMat& g, double orient,
                                     const Vec4& base) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (std::fabs(g[i][j].value() - g[j][i].value()) > 1e-12) {
        throw Error(ErrorKind::singular_metric, "metric is not symmetric",
                    base);
      }
    }
  }
  // Positive definiteness via leading principal minors of the value matrix.
  double m1 = g[0][0].value();
  double m2 = m1 * g[1][1].value() - g[0][1].value() * g[1][0].value();
  double m3 = 0.0, m4 = 0.0;
  {
    double a[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = g[i][j].value();
    }
    m3 = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
  MetricValue mv;
  mv.base = base;
  mv.orient = orient;
  mv.g = g;
  auto [inv, det] = invert4(g);
  mv.ginv = inv;
  mv.det = det;
  m4 = det.value();
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(m3 > 0.0) || !(m4 > 0.0)) {
    throw Error(ErrorKind::singular_metric,
                "metric is not positive definite", base);
  }
  mv.sqrt_det = jet_sqrt(det);
  return mv;
}

class MetricField {
 public:
  using Evaluator = std::function<JMat(const Vec4&, int)>;

  MetricField() = default;
  MetricField(Evaluator f, Box domain, double orient, double margin = 0.0)
      : f_(std::move(f)), domain_(domain), orient_(orient), margin_(margin) {}

  const Box& domain() const { return domain_; }
  double orientation() const { return orient_; }
  void set_orientation(double s) { orient_ = s; }

  MetricValue eval(const Vec4& p, int ord = kJetOrder) const {
    if (!domain_.contains(p, margin_)) {
      throw Error(ErrorKind::outside_domain, "metric evaluation", p);
    }
    JMat g = f_(p, ord);
    for (const auto& row : g) {
      for (const auto& x : row) {
        if (!jet_finite(x)) {
          throw Error(ErrorKind::non_finite, "metric component", p);
        }
      }
    }
    return make_metric_value(g, orient_, p);
  }

 private:
  Evaluator f_;
  Box domain_{};
  double orient_ = 1.0;
  double margin_ = 0.0;
};

// Raising and inner products.

inline std::array<Jet, 4> raise1(const MetricValue& mv, const FormValue& a) {
  std::array<Jet, 4> v;
  for (int i = 0; i < 4; ++i) {
    Jet s = mv.ginv[i][0] * a.c[0];
    for (int j = 1; j < 4; ++j) s = s + mv.ginv[i][j] * a.c[j];
    v[i] = s;
  }
  return v;
}

inline Jet inner1(const MetricValue& mv, const FormValue& a,
                  const FormValue& b) {
  auto av = raise1(mv, a);
  Jet s = av[0] * b.c[0];
  for (int i = 1; i < 4; ++i) s = s + av[i] * b.c[i];
  return s;
}

// a^{ij} over increasing pairs, via 2x2 minors of the inverse metric.
inline std::array<Jet, 6> raise2(const MetricValue& mv, const FormValue& a) {
  std::array<Jet, 6> out;
  for (int p = 0; p < 6; ++p) {
    int i = kInc2[p][0], j = kInc2[p][1];
    Jet s = jet_constant(0.0, mv.base, a.c[0].ord);
    for (int q = 0; q < 6; ++q) {
      int k = kInc2[q][0], l = kInc2[q][1];
      Jet minor = mv.ginv[i][k] * mv.ginv[j][l] - mv.ginv[i][l] * mv.ginv[j][k];
      s = s + minor * a.c[q];
    }
    out[p] = s;
  }
  return out;
}

// Full tensor pairing over increasing pairs: <a,b> = sum_{i<j} a^{ij} b_{ij}.
// The standard unit forms e01+e23 have squared norm 2 here.
inline Jet inner_std2(const MetricValue& mv, const FormValue& a,
                      const FormValue& b) {
  auto av = raise2(mv, a);
  Jet s = av[0] * b.c[0];
  for (int p = 1; p < 6; ++p) s = s + av[p] * b.c[p];
  return s;
}

// Frame normalization: half the tensor pairing, so |e01+e23| = 1.
inline Jet form_inner(const MetricValue& mv, const FormValue& a,
                      const FormValue& b) {
  return inner_std2(mv, a, b) * 0.5;
}

inline std::array<Jet, 4> raise3(const MetricValue& mv, const FormValue& a) {
  std::array<Jet, 4> out;
  for (int p = 0; p < 4; ++p) {
    const auto& I = kInc3[p];
    Jet s = jet_constant(0.0, mv.base, a.c[0].ord);
    for (int q = 0; q < 4; ++q) {
      const auto& J = kInc3[q];
      // 3x3 determinant of ginv rows I, columns J.
      Jet det =
          mv.ginv[I[0]][J[0]] * (mv.ginv[I[1]][J[1]] * mv.ginv[I[2]][J[2]] -
                                 mv.ginv[I[1]][J[2]] * mv.ginv[I[2]][J[1]]) -
          mv.ginv[I[0]][J[1]] * (mv.ginv[I[1]][J[0]] * mv.ginv[I[2]][J[2]] -
                                 mv.ginv[I[1]][J[2]] * mv.ginv[I[2]][J[0]]) +
          mv.ginv[I[0]][J[2]] * (mv.ginv[I[1]][J[0]] * mv.ginv[I[2]][J[1]] -
                                 mv.ginv[I[1]][J[1]] * mv.ginv[I[2]][J[0]]);
      s = s + det * a.c[q];
    }
    out[p] = s;
  }
  return out;
}

// Hodge star: (*a)_{comp(I)} = orient * sqrt(det g) * eps(I, comp(I)) * a^I.
inline FormValue hodge(const MetricValue& mv, const FormValue& a) {
  int k = a.deg;
  int ord = a.min_ord();
  FormValue r = FormValue::zero(4 - k, a.base, ord);
  std::array<Jet, 6> raised;
  switch (k) {
    case 0:
      raised[0] = a.c[0];
      break;
    case 1: {
      auto v = raise1(mv, a);
      for (int i = 0; i < 4; ++i) raised[i] = v[i];
      break;
    }
    case 2: {
      auto v = raise2(mv, a);
      for (int i = 0; i < 6; ++i) raised[i] = v[i];
      break;
    }
    case 3: {
      auto v = raise3(mv, a);
      for (int i = 0; i < 4; ++i) raised[i] = v[i];
      break;
    }
    case 4:
      raised[0] = a.c[0] / mv.det;
      break;
  }
  for (int p = 0; p < a.ncomp(); ++p) {
    auto cpl = detail::complement_of(k, p);
    r.c[cpl.pos] =
        raised[p] * mv.sqrt_det * (mv.orient * double(cpl.sign));
  }
  return r;
}

inline FormValue sd_part(const MetricValue& mv, const FormValue& a) {
  return (a + hodge(mv, a)) * 0.5;
}

inline FormValue asd_part(const MetricValue& mv, const FormValue& a) {
  return (a - hodge(mv, a)) * 0.5;
}

// Coefficient of a^b against dx0^dx1^dx2^dx3; metric independent.
inline Jet q_pairing(const FormValue& a, const FormValue& b) {
  if (a.deg + b.deg != 4) {
    throw Error(ErrorKind::bad_config, "q pairing needs complementary degrees");
  }
  return wedge(a, b).c[0];
}

// Codifferential, all degrees: delta = -*d*.
inline FormValue codifferential(const MetricValue& mv, const FormValue& a) {
  return -hodge(mv, exterior_d(hodge(mv, a)));
}

// Lee form of a nondegenerate 2-form: the unique theta with
// d omega = theta ^ omega, solved row-by-row over the four 3-form components.
inline FormValue lee_form(const MetricValue& mv, const FormValue& omega,
                          const FormValue& domega) {
  std::array<std::array<Jet, 4>, 4> m;
  std::array<Jet, 4> rhs;
  for (int row = 0; row < 4; ++row) {
    int a = kInc3[row][0], b = kInc3[row][1], c = kInc3[row][2];
    for (int col = 0; col < 4; ++col) {
      m[row][col] = jet_constant(0.0, omega.base, omega.min_ord());
    }
    m[row][a] = m[row][a] + omega.comp({b, c});
    m[row][b] = m[row][b] - omega.comp({a, c});
    m[row][c] = m[row][c] + omega.comp({a, b});
    rhs[row] = domega.c[row];
  }
  auto theta = solve4(m, rhs);
  FormValue r = FormValue::zero(1, omega.base, domega.min_ord());
  for (int i = 0; i < 4; ++i) r.c[i] = theta[i];
  return r;
}

// Endomorphism A with g(A X, Y) = F(X, Y):  A^a_b = g^{al} F_{bl}.
inline JMat endo_of_form(const MetricValue& mv, const FormValue& f) {
  JMat a = jmat_zero(mv.base, f.min_ord());
  for (int i = 0; i < 4; ++i) {
    for (int b = 0; b < 4; ++b) {
      Jet s = jet_constant(0.0, mv.base, f.min_ord());
      for (int l = 0; l < 4; ++l) {
        if (l == b) continue;
        s = s + mv.ginv[i][l] * f.comp({b, l});
      }
      a[i][b] = s;
    }
  }
  return a;
}

// Inverse of endo_of_form: F_{kl} = g(A d_k, d_l) = A^m_k g_{ml}.
inline FormValue form_of_endo(const MetricValue& mv, const JMat& a) {
  int ord = a[0][0].ord;
  for (const auto& row : a) {
    for (const auto& x : row) ord = std::min(ord, x.ord);
  }
  FormValue f = FormValue::zero(2, mv.base, ord);
  for (int p = 0; p < 6; ++p) {
    int k = kInc2[p][0], l = kInc2[p][1];
    Jet s = a[0][k] * mv.g[0][l];
    for (int m = 1; m < 4; ++m) s = s + a[m][k] * mv.g[m][l];
    f.c[p] = s;
  }
  return f;
}

// Symmetric counterpart of form_of_endo for symmetric endomorphisms; returns
// the full matrix b_{kl} = A^m_k g_{ml}.
inline JMat bilinear_of_endo(const MetricValue& mv, const JMat& a) {
  JMat b = jmat_zero(mv.base, a[0][0].ord);
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      Jet s = a[0][k] * mv.g[0][l];
      for (int m = 1; m < 4; ++m) s = s + a[m][k] * mv.g[m][l];
      b[k][l] = s;
    }
  }
  return b;
}

// Form field over a chart.
class FormField {
 public:
  using Evaluator = std::function<FormValue(const Vec4&, int)>;

  FormField() = default;
  FormField(int deg, Evaluator f, Box domain, int max_order = kJetOrder,
            double margin = 0.0)
      : deg_(deg),
        f_(std::move(f)),
        domain_(domain),
        max_order_(max_order),
        margin_(margin) {}

  int degree() const { return deg_; }
  const Box& domain() const { return domain_; }
  int max_order() const { return max_order_; }

  FormValue eval(const Vec4& p, int ord = -1) const {
    int o = ord < 0 ? max_order_ : ord;
    if (o > max_order_) {
      throw Error(ErrorKind::order_exhausted,
                  "form field supports order " + std::to_string(max_order_),
                  p);
    }
    if (!domain_.contains(p, margin_)) {
      throw Error(ErrorKind::outside_domain, "form field evaluation", p);
    }
    FormValue v = f_(p, o);
    for (int i = 0; i < v.ncomp(); ++i) {
      if (!jet_finite(v.c[i])) {
        throw Error(ErrorKind::non_finite, "form field component", p);
      }
    }
    return v;
  }

 private:
  int deg_ = 0;
  Evaluator f_;
  Box domain_{};
  int max_order_ = kJetOrder;
  double margin_ = 0.0;
};

// Pullbacks along a chart map with Jacobian jets jac[target][source].

inline FormValue pullback1(const FormValue& alpha_at_p,
                           const std::array<std::array<Jet, 4>, 4>& jac,
                           const Vec4& base) {
  FormValue r = FormValue::zero(1, base, alpha_at_p.min_ord());
  for (int a = 0; a < 4; ++a) {
    Jet s = alpha_at_p.c[0] * jac[0][a];
    for (int mu = 1; mu < 4; ++mu) s = s + alpha_at_p.c[mu] * jac[mu][a];
    r.c[a] = s;
  }
  return r;
}

inline FormValue pullback2(const FormValue& alpha_at_p,
                           const std::array<std::array<Jet, 4>, 4>& jac,
                           const Vec4& base) {
  FormValue r = FormValue::zero(2, base, alpha_at_p.min_ord());
  for (int p = 0; p < 6; ++p) {
    int a = kInc2[p][0], b = kInc2[p][1];
    Jet s = jet_constant(0.0, base, alpha_at_p.min_ord());
    for (int q = 0; q < 6; ++q) {
      int mu = kInc2[q][0], nu = kInc2[q][1];
      s = s + alpha_at_p.c[q] *
                  (jac[mu][a] * jac[nu][b] - jac[mu][b] * jac[nu][a]);
    }
    r.c[p] = s;
  }
  return r;
}

inline JMat pullback_metric(const JMat& g_at_p,
                            const std::array<std::array<Jet, 4>, 4>& jac,
                            const Vec4& base) {
  JMat r = jmat_zero(base, g_at_p[0][0].ord);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Jet s = jet_constant(0.0, base, g_at_p[0][0].ord);
      for (int mu = 0; mu < 4; ++mu) {
        for (int nu = 0; nu < 4; ++nu) {
          s = s + g_at_p[mu][nu] * jac[mu][a] * jac[nu][b];
        }
      }
      r[a][b] = s;
    }
  }
  return r;
}

}  // namespace fourframes
