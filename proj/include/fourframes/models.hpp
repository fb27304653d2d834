#pragma once

// The four explicit geometry families, addressable by string id plus a
// parameter map.  Each family resolves to a Model: a metric field, the
// fundamental 2-form (given directly or completed from an orthonormal
// pair), labeled companion forms, an optional 5-form frame, and the traits
// the verification registry keys on.

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fourframes/curvature.hpp"
#include "fourframes/hermitian.hpp"

namespace fourframes {

using ScalarEvaluator = std::function<Jet(const Vec4&, int)>;
using FormEvaluator = FormField::Evaluator;

struct ParamSpec {
  std::string name;
  std::string def;
  std::string desc;
  std::vector<std::string> allowed;  // empty: real-valued
};

struct FamilyInfo {
  std::string id;
  std::string summary;
  std::vector<ParamSpec> params;
};

struct Model {
  std::string id;
  std::map<std::string, std::string> params;  // resolved, defaults filled in
  Box domain;
  std::array<std::string, 4> coords;
  MetricField metric;

  FormField omega_I;
  std::vector<std::pair<std::string, FormField>> named_forms;

  bool has_five_frame = false;
  std::array<FormField, 5> five_frame;

  bool has_omega_J = false;
  FormField omega_J;

  // "hermitian", "almost_kahler", "kahler_J", "hyperkahler", "one_dim_hol"
  std::set<std::string> traits;
  int expected_hol_rank = -1;  // -1: not pinned, only the dimension bound

  // Family-specific hooks consumed by individual checks.
  bool has_flat_angles = false;
  ScalarEvaluator flat_phi, flat_psi;

  bool has_gh_data = false;
  ScalarEvaluator gh_U;
  FormEvaluator gh_Theta;  // 1-form on the spatial slice, no du component

  bool has_ak_data = false;
  ScalarEvaluator ak_w1, ak_w2, ak_V, ak_lambda2;
  // 0: coefficient anti-CR in t+iu; 1: anti-CR in x+iy; -1: constant;
  // -2: neither (the deliberately broken variant)
  int ak_sigma_dep = 0;

  bool has_reference_metric = false;
  MetricField reference_metric;

  bool has_trait(const std::string& t) const { return traits.count(t) > 0; }

  const FormField* named(const std::string& label) const {
    for (const auto& [name, field] : named_forms) {
      if (name == label) return &field;
    }
    return nullptr;
  }
};

namespace detail {

// Evaluation lattice for construction-time preconditions (positivity,
// monopole residual, holomorphy).  3^4 points plus the box corners.
inline std::vector<Vec4> validation_grid(const Box& box) {
  std::vector<Vec4> pts;
  for (int m = 0; m < 81; ++m) {
    int d = m;
    Vec4 p;
    for (int i = 0; i < 4; ++i) {
      int k = d % 3;
      d /= 3;
      p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * (0.5 * k);
    }
    pts.push_back(p);
  }
  return pts;
}

inline std::array<double, 6> sigma_comps(int k) {
  // Selfdual units: e01+e23, e02+e31, e03+e12.
  if (k == 1) return {1, 0, 0, 0, 0, 1};
  if (k == 2) return {0, 1, 0, 0, -1, 0};
  return {0, 0, 1, 1, 0, 0};
}

inline std::array<double, 6> mirror_comps(int k) {
  // Anti-selfdual counterparts: e01-e23, e02-e31, e03-e12.
  if (k == 1) return {1, 0, 0, 0, 0, -1};
  if (k == 2) return {0, 1, 0, 0, 1, 0};
  return {0, 0, 1, -1, 0, 0};
}

inline double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::bad_config,
                "parameter " + key + " expects a real number, got '" + text +
                    "'");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::bad_config,
                "parameter " + key + " expects a real number, got '" + text +
                    "'");
  }
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Flat rotation family: Euclidean chart, fundamental form rotated inside the
// selfdual bundle by two angle fields.

inline Model make_flat_family(const ScalarEvaluator& phi,
                              const ScalarEvaluator& psi) {
  Model m;
  m.id = "flat";
  m.domain = Box{};
  m.coords = {"x0", "x1", "x2", "x3"};
  m.metric = MetricField(
      [](const Vec4& p, int ord) { return jmat_identity(p, ord); }, m.domain,
      1.0);

  auto blend = [](const std::array<Jet, 3>& w, const Vec4& p, int ord) {
    FormValue r = FormValue::zero(2, p, ord);
    for (int k = 1; k <= 3; ++k) {
      auto s = detail::sigma_comps(k);
      for (int c = 0; c < 6; ++c) {
        if (s[c] != 0.0) r.c[c] = r.c[c] + w[k - 1] * s[c];
      }
    }
    return r;
  };

  FormEvaluator omega = [phi, psi, blend](const Vec4& p, int ord) {
    Jet f = phi(p, ord), s = psi(p, ord);
    return blend({jet_cos(f) * jet_cos(s), jet_cos(f) * jet_sin(s),
                  jet_sin(f)},
                 p, ord);
  };
  FormEvaluator omega1 = [phi, psi, blend](const Vec4& p, int ord) {
    Jet f = phi(p, ord), s = psi(p, ord);
    return blend({jet_sin(f) * jet_cos(s), jet_sin(f) * jet_sin(s),
                  -jet_cos(f)},
                 p, ord);
  };
  FormEvaluator omega2 = [phi, psi, blend](const Vec4& p, int ord) {
    Jet f = phi(p, ord), s = psi(p, ord);
    (void)f;
    return blend({-jet_sin(s), jet_cos(s), jet_constant(0.0, p, ord)}, p,
                 ord);
  };

  m.omega_I = FormField(2, omega, m.domain);
  m.named_forms.emplace_back("omega_I1", FormField(2, omega1, m.domain));
  m.named_forms.emplace_back("omega_I2", FormField(2, omega2, m.domain));

  m.has_omega_J = true;
  m.omega_J = FormField(
      2,
      [](const Vec4& p, int ord) {
        return detail::constant_2form(detail::mirror_comps(1), p, ord);
      },
      m.domain);

  m.traits.insert("kahler_J");
  m.traits.insert("hyperkahler");
  m.has_flat_angles = true;
  m.flat_phi = phi;
  m.flat_psi = psi;
  return m;
}

// ---------------------------------------------------------------------------
// Gibbons-Hawking charts over a spatial box, chart order (u, x, y, z).

struct GhData {
  ScalarEvaluator U;     // positive potential, independent of u
  FormEvaluator theta;   // connection 1-form, no du component
};

inline GhData gh_linear(double a, double b) {
  GhData d;
  d.U = [a, b](const Vec4& p, int ord) {
    return jet_coordinate(2, p, ord) * a + b;
  };
  d.theta = [a](const Vec4& p, int ord) {
    FormValue t = FormValue::zero(1, p, ord);
    t.c[1] = jet_coordinate(3, p, ord) * (0.5 * a);   // (a/2) z dx
    t.c[3] = jet_coordinate(1, p, ord) * (-0.5 * a);  // -(a/2) x dz
    return t;
  };
  return d;
}

inline GhData gh_pointlike() {
  GhData d;
  auto r2 = [](const Vec4& p, int ord) {
    Jet x = jet_coordinate(1, p, ord), y = jet_coordinate(2, p, ord),
        z = jet_coordinate(3, p, ord);
    return x * x + y * y + z * z;
  };
  d.U = [r2](const Vec4& p, int ord) {
    return jet_recip(jet_sqrt(r2(p, ord)));
  };
  d.theta = [r2](const Vec4& p, int ord) {
    Jet x = jet_coordinate(1, p, ord), y = jet_coordinate(2, p, ord),
        z = jet_coordinate(3, p, ord);
    Jet r = jet_sqrt(r2(p, ord));
    Jet rho2 = x * x + y * y;
    Jet f = z / (r * rho2);  // Dirac potential away from the z axis
    FormValue t = FormValue::zero(1, p, ord);
    t.c[1] = -f * y;
    t.c[2] = f * x;
    return t;
  };
  return d;
}

inline GhData gh_nonharmonic() {
  GhData d;
  d.U = [](const Vec4& p, int ord) {
    Jet y = jet_coordinate(2, p, ord);
    return y * y + 1.0;
  };
  // Deliberately zero: the monopole equation fails and the registry's
  // negative control can observe the residual.
  d.theta = [](const Vec4& p, int ord) {
    return FormValue::zero(1, p, ord);
  };
  return d;
}

inline JMat gh_metric(const GhData& d, const Vec4& p, int ord) {
  Jet u = d.U(p, ord);
  Jet uinv = jet_recip(u);
  FormValue th = d.theta(p, ord);
  JMat g = jmat_zero(p, ord);
  g[0][0] = uinv;
  for (int i = 1; i < 4; ++i) {
    g[0][i] = uinv * th.c[i];
    g[i][0] = g[0][i];
    for (int j = 1; j < 4; ++j) {
      g[i][j] = uinv * th.c[i] * th.c[j];
      if (i == j) g[i][j] = g[i][j] + u;
    }
  }
  return g;
}

// Frame forms: k = 0,1,2 are the closed triple built on dy^dz, dx^dy, dz^dx;
// k = 3,4,5 are the selfdual companions (same formulas, opposite sign on the
// dx^(du+Theta) leg).
inline FormValue gh_frame_form(const GhData& d, int k, const Vec4& p,
                               int ord) {
  Jet u = d.U(p, ord);
  FormValue th = d.theta(p, ord);
  double s = (k < 3) ? 1.0 : -1.0;  // sign on the (du+Theta) leg
  int axis = k % 3;                 // 0: dx, 1: dz, 2: dy pairing below
  FormValue r = FormValue::zero(2, p, ord);
  Jet one = jet_constant(1.0, p, ord);
  if (axis == 0) {
    // U dy^dz + s dx^(du+Theta)
    r.c[5] = u;
    r.c[0] = -s * one;
    r.c[3] = s * th.c[2];
    r.c[4] = s * th.c[3];
  } else if (axis == 1) {
    // U dx^dy + s dz^(du+Theta)
    r.c[3] = u;
    r.c[2] = -s * one;
    r.c[4] = -s * th.c[1];
    r.c[5] = -s * th.c[2];
  } else {
    // U dz^dx + s dy^(du+Theta)
    r.c[4] = -u;
    r.c[1] = -s * one;
    r.c[3] = -s * th.c[1];
    r.c[5] = s * th.c[3];
  }
  return r;
}

namespace detail {

// Frame rotation: an orthogonal mix of the closed triple and a phase on the
// selfdual pair.  mode 0: identity; 1: constant angles; 2: angle equal to
// the first chart coordinate (breaks closedness on purpose).
inline FormValue gh_rotated_frame(const GhData& d, int mode, int k,
                                  const Vec4& p, int ord) {
  if (mode == 0 || k == 5) return gh_frame_form(d, k, p, ord);
  if (k < 3) {
    if (mode == 2) return gh_frame_form(d, k, p, ord);
    double c = std::cos(0.7), s = std::sin(0.7);
    FormValue j0 = gh_frame_form(d, 0, p, ord);
    FormValue j1 = gh_frame_form(d, 1, p, ord);
    if (k == 0) return j0 * c - j1 * s;
    if (k == 1) return j0 * s + j1 * c;
    return gh_frame_form(d, 2, p, ord);
  }
  FormValue i1 = gh_frame_form(d, 3, p, ord);
  FormValue i2 = gh_frame_form(d, 4, p, ord);
  Jet ang = (mode == 2) ? jet_coordinate(0, p, ord)
                        : jet_constant(0.5, p, ord);
  Jet c = jet_cos(ang), s = jet_sin(ang);
  if (k == 3) return i1 * c + i2 * s;
  return i1 * (-s) + i2 * c;
}

}  // namespace detail

inline Model make_gibbons_hawking(const GhData& data, const Box& box,
                                  int rot_mode, bool check_monopole) {
  Model m;
  m.id = "gibbons-hawking";
  m.domain = box;
  m.coords = {"u", "x", "y", "z"};

  auto grid = detail::validation_grid(box);
  for (const auto& p : grid) {
    Jet u = data.U(p, 1);
    if (!(u.value() > 0.0)) {
      throw Error(ErrorKind::bad_config, "potential not positive", p);
    }
  }
  if (check_monopole) {
    for (const auto& p : grid) {
      Jet u = data.U(p, 2);
      FormValue dth = exterior_d(data.theta(p, 2));
      // star of dU on the spatial slice: dx->dy^dz, dy->dz^dx, dz->dx^dy
      double rx = dth.comp({2, 3}).value() - partial(u, 1).value();
      double ry = -dth.comp({1, 3}).value() - partial(u, 2).value();
      double rz = dth.comp({1, 2}).value() - partial(u, 3).value();
      double rest = std::fabs(dth.c[0].value()) +
                    std::fabs(dth.c[1].value()) +
                    std::fabs(dth.c[2].value());
      double res = std::max(std::max(std::fabs(rx), std::fabs(ry)),
                            std::max(std::fabs(rz), rest));
      if (res > 1e-10) {
        throw Error(ErrorKind::bad_config,
                    "monopole equation residual " + std::to_string(res), p);
      }
    }
  }

  m.metric = MetricField(
      [data](const Vec4& p, int ord) { return gh_metric(data, p, ord); },
      box, 1.0);

  auto frame_eval = [data, rot_mode](int k) {
    return FormEvaluator([data, rot_mode, k](const Vec4& p, int ord) {
      return detail::gh_rotated_frame(data, rot_mode, k, p, ord);
    });
  };

  m.has_five_frame = true;
  const char* frame_labels[6] = {"omega_J1", "omega_J2", "omega_J3",
                                 "omega_I1", "omega_I2", "omega_I3"};
  for (int k = 0; k < 5; ++k) {
    m.five_frame[k] = FormField(2, frame_eval(k), box);
  }
  for (int k = 0; k < 6; ++k) {
    m.named_forms.emplace_back(frame_labels[k],
                               FormField(2, frame_eval(k), box));
  }

  // Fundamental form from the selfdual pair; the completion is invariant
  // under the pair rotation above.
  FormEvaluator omega = [data, rot_mode](const Vec4& p, int ord) {
    MetricValue mv = make_metric_value(gh_metric(data, p, ord), 1.0, p);
    FormValue w4 = detail::gh_rotated_frame(data, rot_mode, 3, p, ord);
    FormValue w5 = detail::gh_rotated_frame(data, rot_mode, 4, p, ord);
    return structure_from_pair(mv, w4, w5).omega;
  };
  m.omega_I = FormField(2, omega, box);

  m.has_omega_J = true;
  m.omega_J = FormField(
      2,
      [data](const Vec4& p, int ord) {
        return gh_frame_form(data, 0, p, ord);
      },
      box);

  m.has_gh_data = true;
  m.gh_U = data.U;
  m.gh_Theta = data.theta;
  return m;
}

// ---------------------------------------------------------------------------
// Cohomogeneity-one chart (t, x1, x2, x3), t > 0: the metric
// dt^2 + (3t/2)^{2/3}(dx1^2 + dx2^2) + (3t/2)^{-2/3}(dx3 + x1 dx2)^2.
// The frame is pulled back from the linear Gibbons-Hawking chart through
// (u, x, y, z) = (x3 + x1 x2/2, x2, (3t/2)^{2/3}, x1).

namespace detail {

struct Nil3Map {
  std::array<Jet, 4> phi;                 // target coordinates as jets
  std::array<std::array<Jet, 4>, 4> jac;  // jac[target][source]
  Vec4 q;                                 // target point
};

inline Nil3Map nil3_map(const Vec4& p, int ord) {
  Nil3Map m;
  Jet t = jet_coordinate(0, p, ord);
  Jet x1 = jet_coordinate(1, p, ord);
  Jet x2 = jet_coordinate(2, p, ord);
  Jet x3 = jet_coordinate(3, p, ord);
  m.phi[0] = x3 + x1 * x2 * 0.5;
  m.phi[1] = x2;
  m.phi[2] = jet_pow(t * 1.5, 2.0 / 3.0);
  m.phi[3] = x1;
  for (int k = 0; k < 4; ++k) m.q[k] = m.phi[k].value();

  Jet zero = jet_constant(0.0, p, ord);
  Jet one = jet_constant(1.0, p, ord);
  m.jac[0] = {zero, x2 * 0.5, x1 * 0.5, one};
  m.jac[1] = {zero, zero, one, zero};
  m.jac[2] = {jet_pow(t * 1.5, -1.0 / 3.0), zero, zero, zero};
  m.jac[3] = {zero, one, zero, zero};
  return m;
}

inline FormValue nil3_pull_2form(const GhData& data, int rot_mode, int k,
                                 const Vec4& p, int ord) {
  Nil3Map m = nil3_map(p, ord);
  FormValue f = gh_rotated_frame(data, rot_mode, k, m.q, ord);
  FormValue composed = FormValue::zero(2, p, ord);
  for (int c = 0; c < 6; ++c) composed.c[c] = compose(f.c[c], m.phi);
  return pullback2(composed, m.jac, p);
}

inline JMat nil3_pull_metric(const GhData& data, const Vec4& p, int ord) {
  Nil3Map m = nil3_map(p, ord);
  JMat g = gh_metric(data, m.q, ord);
  for (auto& row : g) {
    for (auto& x : row) x = compose(x, m.phi);
  }
  return pullback_metric(g, m.jac, p);
}

}  // namespace detail

inline Model make_nil3(const Box& box) {
  if (!(box.lo[0] > 0.0)) {
    throw Error(ErrorKind::bad_config, "the t interval must stay positive");
  }
  Model m;
  m.id = "nil3";
  m.domain = box;
  m.coords = {"t", "x1", "x2", "x3"};

  auto metric_eval = [](const Vec4& p, int ord) {
    Jet f = jet_pow(jet_coordinate(0, p, ord) * 1.5, 2.0 / 3.0);
    Jet finv = jet_recip(f);
    Jet x1 = jet_coordinate(1, p, ord);
    JMat g = jmat_zero(p, ord);
    g[0][0] = jet_constant(1.0, p, ord);
    g[1][1] = f;
    g[2][2] = f + finv * x1 * x1;
    g[2][3] = finv * x1;
    g[3][2] = g[2][3];
    g[3][3] = finv;
    return g;
  };
  m.metric = MetricField(metric_eval, box, 1.0);

  GhData data = gh_linear(1.0, 0.0);

  // The chart map reverses orientation; detect the star sign on the pulled
  // closed form at the box center and orient the chart to keep it
  // anti-selfdual.
  {
    Vec4 c;
    for (int i = 0; i < 4; ++i) c[i] = 0.5 * (box.lo[i] + box.hi[i]);
    MetricValue mv = make_metric_value(metric_eval(c, 2), 1.0, c);
    FormValue j1 = detail::nil3_pull_2form(data, 0, 0, c, 2);
    double sign = inner_std2(mv, hodge(mv, j1), j1).value() /
                  inner_std2(mv, j1, j1).value();
    if (sign > 0.0) m.metric.set_orientation(-1.0);
  }
  double orient = m.metric.orientation();

  auto frame_eval = [data](int k) {
    return FormEvaluator([data, k](const Vec4& p, int ord) {
      return detail::nil3_pull_2form(data, 0, k, p, ord);
    });
  };

  m.has_five_frame = true;
  const char* frame_labels[6] = {"omega_J1", "omega_J2", "omega_J3",
                                 "omega_I1", "omega_I2", "omega_I3"};
  for (int k = 0; k < 5; ++k) {
    m.five_frame[k] = FormField(2, frame_eval(k), box);
  }
  for (int k = 0; k < 6; ++k) {
    m.named_forms.emplace_back(frame_labels[k],
                               FormField(2, frame_eval(k), box));
  }

  FormEvaluator omega = [data, metric_eval, orient](const Vec4& p, int ord) {
    MetricValue mv = make_metric_value(metric_eval(p, ord), orient, p);
    FormValue w4 = detail::nil3_pull_2form(data, 0, 3, p, ord);
    FormValue w5 = detail::nil3_pull_2form(data, 0, 4, p, ord);
    return structure_from_pair(mv, w4, w5).omega;
  };
  m.omega_I = FormField(2, omega, box);

  m.has_omega_J = true;
  m.omega_J = FormField(2, frame_eval(0), box);

  m.has_reference_metric = true;
  m.reference_metric = MetricField(
      [data](const Vec4& p, int ord) {
        return detail::nil3_pull_metric(data, p, ord);
      },
      box, orient);

  m.traits = {"hermitian", "hyperkahler", "kahler_J"};
  m.expected_hol_rank = 1;
  return m;
}

// ---------------------------------------------------------------------------
// Almost-Kahler products on the chart (x, y, t, u): a unit-determinant
// metric block on (x, y) driven by a disk-valued field w, a conformal factor
// on (t, u), and the symplectic forms dx^dy +- lambda^2 dt^du.

struct AkData {
  // Components of the block coefficient entering the metric.  A disk map
  // holomorphic in the surface coordinate enters through its conjugate, so
  // a conforming coefficient satisfies the anti-CR equations; that is what
  // makes the negatively oriented structure integrable.
  ScalarEvaluator w1, w2;
  // 0: anti-CR in t+iu expected; 1: anti-CR in x+iy expected; -1: constant;
  // -2: no claim (skips the construction-time check)
  int sigma_dep = 0;
  bool balanced = false;  // lambda^2 = 1/(1-|w|^2) instead of 1
};

inline Model make_ak4(const AkData& data) {
  Model m;
  m.id = "ak4";
  m.domain = Box{};
  m.coords = {"x", "y", "t", "u"};

  ScalarEvaluator V = [data](const Vec4& p, int ord) {
    Jet a = data.w1(p, ord), b = data.w2(p, ord);
    return 1.0 - a * a - b * b;
  };
  ScalarEvaluator lambda2;
  if (data.balanced) {
    lambda2 = [V](const Vec4& p, int ord) { return jet_recip(V(p, ord)); };
  } else {
    lambda2 = [](const Vec4& p, int ord) { return jet_constant(1.0, p, ord); };
  }

  auto grid = detail::validation_grid(m.domain);
  for (const auto& p : grid) {
    Jet a = data.w1(p, 1), b = data.w2(p, 1);
    double n2 = a.value() * a.value() + b.value() * b.value();
    if (!(n2 < 0.81 + 1e-12)) {
      throw Error(ErrorKind::bad_config, "|w| exceeds 0.9 on the chart", p);
    }
  }
  if (data.sigma_dep >= 0) {
    // Anti-CR equations of the coefficient in its declared pair of
    // variables (the conjugate of a holomorphic disk map).
    int vt = data.sigma_dep == 0 ? 2 : 0;
    int vu = data.sigma_dep == 0 ? 3 : 1;
    for (const auto& p : grid) {
      Jet a = data.w1(p, 1), b = data.w2(p, 1);
      double r1 = partial(a, vt).value() + partial(b, vu).value();
      double r2 = partial(a, vu).value() - partial(b, vt).value();
      if (std::fabs(r1) > 1e-9 || std::fabs(r2) > 1e-9) {
        throw Error(ErrorKind::bad_config,
                    "the block coefficient is not conjugate-holomorphic in "
                    "its declared variables",
                    p);
      }
    }
  }

  auto metric_eval = [data, lambda2](const Vec4& p, int ord) {
    Jet a = data.w1(p, ord), b = data.w2(p, ord);
    Jet vinv = jet_recip(1.0 - a * a - b * b);
    JMat g = jmat_zero(p, ord);
    g[0][0] = ((1.0 - a) * (1.0 - a) + b * b) * vinv;
    g[1][1] = ((1.0 + a) * (1.0 + a) + b * b) * vinv;
    g[0][1] = b * vinv * (-2.0);
    g[1][0] = g[0][1];
    Jet l2 = lambda2(p, ord);
    g[2][2] = l2;
    g[3][3] = l2;
    return g;
  };
  m.metric = MetricField(metric_eval, m.domain, 1.0);

  FormEvaluator omega_i = [lambda2](const Vec4& p, int ord) {
    FormValue r = FormValue::zero(2, p, ord);
    r.c[0] = jet_constant(1.0, p, ord);
    r.c[5] = lambda2(p, ord);
    return r;
  };
  FormEvaluator omega_j = [lambda2](const Vec4& p, int ord) {
    FormValue r = FormValue::zero(2, p, ord);
    r.c[0] = jet_constant(-1.0, p, ord);
    r.c[5] = lambda2(p, ord);
    return r;
  };
  m.omega_I = FormField(2, omega_i, m.domain);
  m.has_omega_J = true;
  m.omega_J = FormField(2, omega_j, m.domain);
  m.named_forms.emplace_back("omega_Sigma",
                             FormField(
                                 2,
                                 [lambda2](const Vec4& p, int ord) {
                                   FormValue r = FormValue::zero(2, p, ord);
                                   r.c[5] = lambda2(p, ord);
                                   return r;
                                 },
                                 m.domain));

  m.traits.insert("almost_kahler");
  m.has_ak_data = true;
  m.ak_w1 = data.w1;
  m.ak_w2 = data.w2;
  m.ak_V = V;
  m.ak_lambda2 = lambda2;
  m.ak_sigma_dep = data.sigma_dep;
  return m;
}

// ---------------------------------------------------------------------------
// Registry.

inline const std::vector<FamilyInfo>& model_families() {
  static const std::vector<FamilyInfo> families = {
      {"flat",
       "Euclidean chart with the fundamental form rotated inside the "
       "selfdual bundle by two angle fields",
       {{"variant", "kahler",
         "kahler: constant angles phi=0.3, psi=0.4; dependent: psi = phi "
         "with phi = 0.4 + 0.25 x0 - 0.15 x1 + 0.1 x2 x3; independent: "
         "phi = x0, psi = x1",
         {"kahler", "dependent", "independent"}}}},
      {"gibbons-hawking",
       "monopole charts (u,x,y,z) with g = U(dx^2+dy^2+dz^2) + "
       "U^{-1}(du+Theta)^2",
       {{"a", "1", "slope of the linear potential U = a*y + b", {}},
        {"b", "0", "offset of the linear potential U = a*y + b", {}},
        {"variant", "linear",
         "linear: U = a*y + b, Theta = (a/2)(z dx - x dz); pointlike: "
         "U = 1/r on a chart avoiding the string, Theta = (z/r)(x dy - y "
         "dx)/(x^2+y^2); nonharmonic: U = 1 + y^2 with Theta = 0 (deliberate "
         "monopole violation)",
         {"linear", "pointlike", "nonharmonic"}},
        {"rot", "none",
         "frame rotation: none; constant: angle 0.7 on the closed triple "
         "and 0.5 on the selfdual pair; xdep: angle u on the selfdual pair "
         "(breaks closedness)",
         {"none", "constant", "xdep"}}}},
      {"nil3",
       "cohomogeneity-one chart (t,x1,x2,x3) with dt^2 + "
       "(3t/2)^{2/3}(dx1^2+dx2^2) + (3t/2)^{-2/3}(dx3 + x1 dx2)^2",
       {}},
      {"ak4",
       "almost-Kahler products on (x,y,t,u): unit-determinant block driven "
       "by a disk-valued field w plus a conformal surface factor",
       {{"w", "holo",
         "zero: w = 0; holo: w = 0.45 + 0.2 zeta + 0.05 zeta^2 with zeta = "
         "t + i u; nonholo: w = 0.3 + 0.25 conj(zeta); planar: w = 0.15 + "
         "0.3 (x + i y); every map enters the block metric through its "
         "conjugate",
         {"zero", "holo", "nonholo", "planar"}},
        {"lambda", "balanced",
         "one: lambda = 1; balanced: lambda^2 = 1/(1-|w|^2) (rejected for "
         "w = planar)",
         {"one", "balanced"}}}},
  };
  return families;
}

inline const FamilyInfo& family_info(const std::string& id) {
  for (const auto& f : model_families()) {
    if (f.id == id) return f;
  }
  throw Error(ErrorKind::bad_config, "unknown model id '" + id + "'");
}

inline std::map<std::string, std::string> resolve_params(
    const FamilyInfo& family,
    const std::map<std::string, std::string>& user) {
  std::map<std::string, std::string> out;
  for (const auto& spec : family.params) out[spec.name] = spec.def;
  for (const auto& [key, value] : user) {
    bool known = false;
    for (const auto& spec : family.params) {
      if (spec.name != key) continue;
      known = true;
      if (!spec.allowed.empty()) {
        bool ok = false;
        for (const auto& a : spec.allowed) ok = ok || a == value;
        if (!ok) {
          throw Error(ErrorKind::bad_config,
                      "parameter " + key + " does not accept '" + value +
                          "'");
        }
      } else {
        detail::parse_real(key, value);
      }
      out[key] = value;
    }
    if (!known) {
      throw Error(ErrorKind::bad_config, "model " + family.id +
                                             " has no parameter '" + key +
                                             "'");
    }
  }
  return out;
}

inline Model make_model(const std::string& id,
                        const std::map<std::string, std::string>& user) {
  const FamilyInfo& family = family_info(id);
  auto params = resolve_params(family, user);

  if (id == "flat") {
    const std::string& variant = params.at("variant");
    ScalarEvaluator phi, psi;
    if (variant == "kahler") {
      phi = [](const Vec4& p, int ord) { return jet_constant(0.3, p, ord); };
      psi = [](const Vec4& p, int ord) { return jet_constant(0.4, p, ord); };
    } else if (variant == "dependent") {
      phi = [](const Vec4& p, int ord) {
        return jet_coordinate(0, p, ord) * 0.25 -
               jet_coordinate(1, p, ord) * 0.15 +
               jet_coordinate(2, p, ord) * jet_coordinate(3, p, ord) * 0.1 +
               0.4;
      };
      psi = phi;
    } else {
      phi = [](const Vec4& p, int ord) { return jet_coordinate(0, p, ord); };
      psi = [](const Vec4& p, int ord) { return jet_coordinate(1, p, ord); };
    }
    Model m = make_flat_family(phi, psi);
    m.params = params;
    if (variant == "kahler") {
      m.traits.insert("hermitian");
      m.traits.insert("almost_kahler");
      m.expected_hol_rank = 0;
      m.has_five_frame = true;
      for (int k = 1; k <= 3; ++k) {
        auto comps = detail::mirror_comps(k);
        m.five_frame[k - 1] = FormField(
            2,
            [comps](const Vec4& p, int ord) {
              return detail::constant_2form(comps, p, ord);
            },
            m.domain);
      }
      m.five_frame[3] = *m.named("omega_I1");
      m.five_frame[4] = *m.named("omega_I2");
    } else if (variant == "dependent") {
      m.expected_hol_rank = 0;
    } else {
      m.expected_hol_rank = 1;
    }
    return m;
  }

  if (id == "gibbons-hawking") {
    double a = detail::parse_real("a", params.at("a"));
    double b = detail::parse_real("b", params.at("b"));
    const std::string& variant = params.at("variant");
    const std::string& rot = params.at("rot");
    int rot_mode = rot == "none" ? 0 : rot == "constant" ? 1 : 2;

    GhData data;
    Box box;
    bool monopole = true;
    if (variant == "linear") {
      data = gh_linear(a, b);
      box = Box{{-1.0, -1.0, 0.5, -1.0}, {1.0, 1.0, 2.0, 1.0}};
    } else if (variant == "pointlike") {
      data = gh_pointlike();
      box = Box{{-1.0, 0.7, 0.7, -0.5}, {1.0, 1.3, 1.3, 0.5}};
    } else {
      data = gh_nonharmonic();
      box = Box{{-1.0, -1.0, 0.5, -1.0}, {1.0, 1.0, 2.0, 1.0}};
      monopole = false;
    }
    Model m = make_gibbons_hawking(data, box, rot_mode, monopole);
    m.params = params;
    if (variant == "linear") {
      m.traits = {"hermitian", "hyperkahler", "kahler_J"};
      m.expected_hol_rank = a == 0.0 ? 0 : 1;
    } else if (variant == "pointlike") {
      m.traits = {"hyperkahler", "kahler_J"};
      m.expected_hol_rank = 1;
    }
    return m;
  }

  if (id == "nil3") {
    Model m = make_nil3(Box{{0.5, -1.0, -1.0, -1.0}, {2.0, 1.0, 1.0, 1.0}});
    m.params = params;
    return m;
  }

  // ak4
  const std::string& wv = params.at("w");
  const std::string& lv = params.at("lambda");
  if (wv == "planar" && lv == "balanced") {
    throw Error(ErrorKind::bad_config,
                "planar w requires lambda=one (the surface factor would "
                "depend on the wrong variables)");
  }
  // The disk maps below are holomorphic in their listed complex variable;
  // each enters the metric through its conjugate (w2 carries a sign flip).
  AkData data;
  data.balanced = lv == "balanced";
  if (wv == "zero") {
    data.sigma_dep = -1;
    data.w1 = [](const Vec4& p, int ord) { return jet_constant(0.0, p, ord); };
    data.w2 = data.w1;
  } else if (wv == "holo") {
    // w = 0.45 + 0.2 zeta + 0.05 zeta^2, zeta = t + i u
    data.sigma_dep = 0;
    data.w1 = [](const Vec4& p, int ord) {
      Jet t = jet_coordinate(2, p, ord), u = jet_coordinate(3, p, ord);
      return t * 0.2 + (t * t - u * u) * 0.05 + 0.45;
    };
    data.w2 = [](const Vec4& p, int ord) {
      Jet t = jet_coordinate(2, p, ord), u = jet_coordinate(3, p, ord);
      return u * (-0.2) + t * u * (-0.1);
    };
  } else if (wv == "nonholo") {
    // w = 0.3 + 0.25 conj(zeta): conjugated it violates the anti-CR
    // equations, so the negatively oriented structure fails to integrate.
    data.sigma_dep = -2;
    data.w1 = [](const Vec4& p, int ord) {
      return jet_coordinate(2, p, ord) * 0.25 + 0.3;
    };
    data.w2 = [](const Vec4& p, int ord) {
      return jet_coordinate(3, p, ord) * 0.25;
    };
  } else {
    // w = 0.15 + 0.3 (x + i y)
    data.sigma_dep = 1;
    data.w1 = [](const Vec4& p, int ord) {
      return jet_coordinate(0, p, ord) * 0.3 + 0.15;
    };
    data.w2 = [](const Vec4& p, int ord) {
      return jet_coordinate(1, p, ord) * (-0.3);
    };
  }
  Model m = make_ak4(data);
  m.params = params;
  if (wv == "zero") {
    m.traits.insert("hermitian");
    m.traits.insert("kahler_J");
    m.expected_hol_rank = 0;
  } else if (wv == "holo") {
    m.traits.insert("kahler_J");
    m.traits.insert("one_dim_hol");
    m.expected_hol_rank = 1;
  } else if (wv == "nonholo") {
    // The positively oriented structure integrates here instead; the
    // negatively oriented one is the deliberate failure.
    m.traits.insert("hermitian");
    m.expected_hol_rank = 4;
  } else if (wv == "planar") {
    m.traits.insert("hermitian");
    m.traits.insert("kahler_J");
    m.traits.insert("one_dim_hol");
    m.expected_hol_rank = 1;
  }
  return m;
}

}  // namespace fourframes
