// Residual checks over sampled chart points.
//
// Every check states an identity of the framework as a residual that must
// stay below a tolerance.  Checks are registered with an applicability
// predicate so a single registry serves all model families; ids are stable
// and consumed by the command line front end and by CI.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fourframes/models.hpp"
#include "fourframes/sampling.hpp"

namespace fourframes {

// ---------------------------------------------------------------------------
// Report types.  Field names of the JSON serialization are fixed; they are
// part of the external contract.

struct CheckRecord {
  std::string id;
  std::string anchor;
  int samples = 0;
  double max_residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> fitted;
};

struct VerificationReport {
  std::string model;
  std::map<std::string, std::string> params;
  std::uint64_t seed = 0;
  int jet_order = kJetOrder;
  std::vector<CheckRecord> checks;

  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// Per-point sample cache.  Geometry, Hermitian data, gauges and the negative
// structure are built lazily and shared between checks; the two gauge slots
// differ only in the order the candidate seeds are tried, so gauge-dependent
// residuals can be evaluated under both and reported as a max.

class VerifyContext {
 public:
  VerifyContext(const Model& m, std::vector<Vec4> pts)
      : model(m), pts_(std::move(pts)), slots_(pts_.size()) {}

  const Model& model;

  int npoints() const { return static_cast<int>(pts_.size()); }
  const Vec4& point(int i) const { return pts_[static_cast<std::size_t>(i)]; }

  const GeometrySample& geo(int i) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    if (!s.geo) s.geo = make_geometry_sample(model.metric, pts_[i]);
    return *s.geo;
  }

  const HermitianSample& herm(int i) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    if (!s.herm) {
      s.herm = make_hermitian_sample(geo(i), model.omega_I.eval(pts_[i]));
    }
    return *s.herm;
  }

  // order 0 tries the two canonical constant seeds in the default order,
  // order 1 swaps them.  Every gauge-dependent check runs under both.
  const GaugeSample& gauge(int i, int order) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    auto& slot = order == 0 ? s.g0 : s.g1;
    if (!slot) {
      const Vec4& p = pts_[i];
      FormValue s2 = detail::constant_2form(detail::sigma_comps(2), p, kJetOrder);
      FormValue s3 = detail::constant_2form(detail::sigma_comps(3), p, kJetOrder);
      std::vector<FormValue> seeds =
          order == 0 ? std::vector<FormValue>{s2, s3}
                     : std::vector<FormValue>{s3, s2};
      slot = make_gauge_sample(herm(i), seeds);
    }
    return *slot;
  }

  // The flat family carries explicit companion forms.  Seeding the gauge
  // with omega_I2 makes the recovered triple match a = -d phi,
  // b = sin(phi) d psi, c = cos(phi) d psi; with omega_I1 the same data
  // comes back rotated by a quarter turn in the gauge circle.
  const GaugeSample& flat_gauge(int i) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    if (!s.fg) {
      const FormField* g2 = model.named("omega_I2");
      if (g2 == nullptr) {
        throw Error(ErrorKind::bad_config,
                    "model has no omega_I2 form to seed the gauge");
      }
      std::vector<FormValue> seeds = {g2->eval(pts_[i])};
      s.fg = make_gauge_sample(herm(i), seeds);
    }
    return *s.fg;
  }

  const FormValue& omega_J_at(int i) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    if (!s.omj) {
      if (!model.has_omega_J) {
        throw Error(ErrorKind::bad_config, "model has no omega_J");
      }
      s.omj = model.omega_J.eval(pts_[i]);
    }
    return *s.omj;
  }

  const JStructure& jstruct(int i) {
    auto& s = slots_[static_cast<std::size_t>(i)];
    if (!s.js) s.js = make_j_structure(geo(i), omega_J_at(i));
    return *s.js;
  }

 private:
  struct Slot {
    std::optional<GeometrySample> geo;
    std::optional<HermitianSample> herm;
    std::optional<GaugeSample> g0, g1, fg;
    std::optional<FormValue> omj;
    std::optional<JStructure> js;
  };
  std::vector<Vec4> pts_;
  std::vector<Slot> slots_;
};

// ---------------------------------------------------------------------------
// Check specification.

struct CheckRun {
  double max_residual = 0.0;
  std::vector<std::pair<std::string, double>> fitted;
};

struct CheckSpec {
  std::string id;
  std::string anchor;
  double tol = 1e-8;
  std::function<bool(const Model&)> applies;
  std::function<CheckRun(VerifyContext&)> run;
};

namespace detail {

inline std::function<CheckRun(VerifyContext&)> pointwise(
    std::function<double(VerifyContext&, int)> f) {
  return [f = std::move(f)](VerifyContext& ctx) {
    CheckRun r;
    for (int i = 0; i < ctx.npoints(); ++i) {
      r.max_residual = std::max(r.max_residual, f(ctx, i));
    }
    return r;
  };
}

inline std::array<FormValue, 6> unit_2forms(const Vec4& p, int ord) {
  std::array<FormValue, 6> out;
  for (int k = 0; k < 6; ++k) {
    std::array<double, 6> c{};
    c[k] = 1.0;
    out[k] = constant_2form(c, p, ord);
  }
  return out;
}

inline FormValue coordinate_1form(int i, const Vec4& p, int ord) {
  FormValue f = FormValue::zero(1, p, ord);
  f.c[i] = jet_constant(1.0, p, ord);
  return f;
}

// Differential of a scalar jet as a 1-form, one order lower.
inline FormValue d_scalar(const Jet& f, const Vec4& base) {
  FormValue r = FormValue::zero(1, base, f.ord > 0 ? f.ord - 1 : 0);
  for (int i = 0; i < 4; ++i) r.c[i] = partial(f, i);
  return r;
}

// e_i lowered by the metric, as a 1-form.
inline FormValue lowered_basis_vector(const MetricValue& mv, int i) {
  FormValue r = FormValue::zero(1, mv.base, mv.g[0][0].ord);
  for (int j = 0; j < 4; ++j) r.c[j] = mv.g[i][j];
  return r;
}

// eta_{e_i} lowered to a 2-form.
inline FormValue eta_2form(const HermitianSample& h, int i) {
  return mat_to_form(bilinear_of_endo(h.geo.mv, h.eta[i]), h.geo.mv.base);
}

// Signed real powers of a nowhere-zero scalar: cbrt keeps the sign,
// the 2/3 power is its square.
inline Jet signed_cbrt_recip(const Jet& x) { return jet_recip(jet_cbrt(x)); }
inline Jet pow23(const Jet& x) {
  Jet c = jet_cbrt(x);
  return c * c;
}

// Least squares fit of a single scalar coefficient from (x, y) rows.
struct ScalarFit {
  double sxx = 0.0, sxy = 0.0;
  void add(double x, double y) {
    sxx += x * x;
    sxy += x * y;
  }
  double value(double fallback) const {
    return sxx > 1e-18 ? sxy / sxx : fallback;
  }
};

// Laplacian of log f in the flat coordinates (c0, c1), from order >= 3 jets.
inline Jet log_laplacian(const Jet& f, int c0, int c1) {
  Jet f0 = partial(f, c0), f1 = partial(f, c1);
  Jet f00 = partial(f0, c0), f11 = partial(f1, c1);
  return (f00 + f11) / f - (f0 * f0 + f1 * f1) / (f * f);
}

inline std::string param_of(const Model& m, const std::string& key) {
  auto it = m.params.find(key);
  return it == m.params.end() ? std::string() : it->second;
}

inline bool gh_linear(const Model& m) {
  return m.id == "gibbons-hawking" && param_of(m, "variant") == "linear";
}

inline bool gh_linear_nonflat(const Model& m) {
  if (!gh_linear(m)) return false;
  return std::fabs(parse_real("a", m.params.at("a"))) > 1e-12;
}

// Models realizing the curvature class with nonzero kappa: the linear
// ansatz away from its flat point and the nilpotent model.
inline bool gh_linear_nonflat_or_nil3(const Model& m) {
  return m.id == "nil3" || gh_linear_nonflat(m);
}

// Models whose frame closes: the flat Kahler point, the linear ansatz
// family and the nilpotent model.
inline bool closed_frame_model(const Model& m) {
  if (m.id == "nil3") return true;
  if (m.id == "flat") return param_of(m, "variant") == "kahler";
  return gh_linear(m);
}

inline bool ak_variant(const Model& m, std::initializer_list<const char*> ws) {
  if (m.id != "ak4") return false;
  std::string w = param_of(m, "w");
  for (const char* c : ws) {
    if (w == c) return true;
  }
  return false;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The registry.

inline const std::vector<CheckSpec>& check_registry() {
  static const std::vector<CheckSpec> registry = [] {
    std::vector<CheckSpec> reg;
    auto add = [&reg](std::string id, std::string anchor, double tol,
                      std::function<bool(const Model&)> applies,
                      std::function<CheckRun(VerifyContext&)> run) {
      reg.push_back(CheckSpec{std::move(id), std::move(anchor), tol,
                              std::move(applies), std::move(run)});
    };
    auto always = [](const Model&) { return true; };
    auto trait = [](const char* t) {
      return [t](const Model& m) { return m.has_trait(t); };
    };
    auto has_frame = [](const Model& m) { return m.has_five_frame; };
    using detail::pointwise;

    // --- frame and pointwise linear algebra -------------------------------

    add("frame_gram",
        "the five frame forms are orthonormal: <f_i, f_j> = delta_ij", 1e-8,
        has_frame, pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          std::array<FormValue, 5> f;
          for (int k = 0; k < 5; ++k) {
            f[k] = ctx.model.five_frame[k].eval(ctx.point(i));
          }
          double r = 0.0;
          for (int a = 0; a < 5; ++a) {
            for (int b = a; b < 5; ++b) {
              double want = a == b ? 1.0 : 0.0;
              r = std::max(r,
                           std::fabs(form_inner(mv, f[a], f[b]).value() - want));
            }
          }
          return r;
        }));

    add("frame_wedge",
        "wedge relations: f_i ^ f_j = 0 for i != j, f_i ^ f_i = s_i 2 vol "
        "with signs (-,-,-,+,+)",
        1e-8, has_frame, pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          double vol = mv.orient * mv.sqrt_det.value();
          static constexpr double sign[5] = {-1, -1, -1, 1, 1};
          std::array<FormValue, 5> f;
          for (int k = 0; k < 5; ++k) {
            f[k] = ctx.model.five_frame[k].eval(ctx.point(i));
          }
          double r = 0.0;
          for (int a = 0; a < 5; ++a) {
            for (int b = a; b < 5; ++b) {
              double q = q_pairing(f[a], f[b]).value();
              double want = a == b ? sign[a] * 2.0 * vol : 0.0;
              r = std::max(r, std::fabs(q - want));
            }
          }
          return r;
        }));

    add("frame_closed", "every frame form is closed: d f_i = 0", 1e-8,
        has_frame, pointwise([](VerifyContext& ctx, int i) {
          double r = 0.0;
          for (int k = 0; k < 5; ++k) {
            FormValue f = ctx.model.five_frame[k].eval(ctx.point(i));
            r = std::max(r, form_max_value(exterior_d(f)));
          }
          return r;
        }));

    add("q_signature",
        "the wedge pairing q(a,b) = a^b / (2 vol) has signature (2,3) with "
        "unit eigenvalues on the frame",
        1e-8, has_frame, pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          double vol = mv.orient * mv.sqrt_det.value();
          std::array<FormValue, 5> f;
          for (int k = 0; k < 5; ++k) {
            f[k] = ctx.model.five_frame[k].eval(ctx.point(i));
          }
          std::array<std::array<double, 6>, 6> q{};
          for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
              q[a][b] = q_pairing(f[a], f[b]).value() / (2.0 * vol);
            }
          }
          EigenSym es = eigen_sym(q, 5);
          static constexpr double want[5] = {-1, -1, -1, 1, 1};
          double r = 0.0;
          for (int k = 0; k < 5; ++k) {
            r = std::max(r, std::fabs(es.values[k] - want[k]));
          }
          return r;
        }));

    add("hodge_involution",
        "the Hodge star squares to +1 on 2-forms and to -1 on 1-forms", 1e-8,
        always, pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            r = std::max(r, form_max_value(hodge(mv, hodge(mv, f)) - f));
          }
          for (int k = 0; k < 4; ++k) {
            FormValue a = detail::coordinate_1form(k, ctx.point(i), kJetOrder);
            r = std::max(r, form_max_value(hodge(mv, hodge(mv, a)) + a));
          }
          return r;
        }));

    add("star_isometry",
        "the Hodge star preserves the inner product on 2-forms", 1e-8, always,
        pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          auto basis = detail::unit_2forms(ctx.point(i), kJetOrder);
          double r = 0.0;
          for (int a = 0; a < 6; ++a) {
            for (int b = a; b < 6; ++b) {
              Jet lhs = form_inner(mv, hodge(mv, basis[a]), hodge(mv, basis[b]));
              Jet rhs = form_inner(mv, basis[a], basis[b]);
              r = std::max(r, std::fabs((lhs - rhs).value()));
            }
          }
          return r;
        }));

    add("sd_asd_orthogonal",
        "P+ and P- are complementary orthogonal projections of the 2-forms",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const MetricValue& mv = ctx.geo(i).mv;
          auto basis = detail::unit_2forms(ctx.point(i), kJetOrder);
          double r = 0.0;
          for (int a = 0; a < 6; ++a) {
            FormValue sp = sd_part(mv, basis[a]);
            FormValue sm = asd_part(mv, basis[a]);
            r = std::max(r, form_max_value(sp + sm - basis[a]));
            r = std::max(r, form_max_value(sd_part(mv, sp) - sp));
            for (int b = 0; b < 6; ++b) {
              r = std::max(r, std::fabs(
                  inner_std2(mv, sp, asd_part(mv, basis[b])).value()));
            }
          }
          return r;
        }));

    add("d_squared", "the exterior differential satisfies d(d a) = 0", 1e-10,
        always, pointwise([](VerifyContext& ctx, int i) {
          const Vec4& p = ctx.point(i);
          FormValue a = FormValue::zero(1, p, kJetOrder);
          a.c[0] = jet_coordinate(1, p) * jet_coordinate(3, p);
          a.c[2] = jet_sin(jet_coordinate(0, p));
          a.c[3] = jet_coordinate(2, p);
          double r = form_max_value(exterior_d(exterior_d(a)));
          FormValue w = ctx.model.omega_I.eval(p);
          return std::max(r, form_max_value(exterior_d(exterior_d(w))));
        }));

    // --- metric and Riemannian curvature -----------------------------------

    add("metricity", "the Levi-Civita connection is metric: nabla g = 0", 1e-9,
        always, pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          const JMat& g = geo.mv.g;
          double r = 0.0;
          for (int k = 0; k < 4; ++k) {
            for (int a = 0; a < 4; ++a) {
              for (int b = 0; b < 4; ++b) {
                Jet t = partial(g[a][b], k);
                for (int c = 0; c < 4; ++c) {
                  t = t - geo.gamma[k][c][a] * g[c][b] -
                      geo.gamma[k][c][b] * g[a][c];
                }
                r = std::max(r, std::fabs(t.value()));
              }
            }
          }
          return r;
        }));

    add("bianchi_symmetry",
        "the Riemann tensor has pair symmetry and satisfies the first "
        "Bianchi identity",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          double r = 0.0;
          for (int k = 0; k < 4; ++k) {
            for (int l = 0; l < 4; ++l) {
              for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                  double pair = (geo.riem_lowered(k, l, a, b) -
                                 geo.riem_lowered(a, b, k, l))
                                    .value();
                  double cyc = (geo.riem_lowered(k, l, a, b) +
                                geo.riem_lowered(k, a, b, l) +
                                geo.riem_lowered(k, b, l, a))
                                   .value();
                  r = std::max(r, std::fabs(pair));
                  r = std::max(r, std::fabs(cyc));
                }
              }
            }
          }
          return r;
        }));

    add("scalar_trace",
        "the scalar curvature is the metric trace of Ricci and Ric0 is "
        "trace-free",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          const MetricValue& mv = geo.mv;
          Jet s = jet_constant(0.0, mv.base, geo.s.ord);
          Jet t0 = s;
          for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
              s = s + mv.ginv[a][b] * geo.ric[a][b];
              t0 = t0 + mv.ginv[a][b] * geo.ric0[a][b];
            }
          }
          return std::max(std::fabs((s - geo.s).value()),
                          std::fabs(t0.value()));
        }));

    add("ricci_flat", "the metric is Ricci-flat: Ric = 0", 1e-8,
        trait("hyperkahler"), pointwise([](VerifyContext& ctx, int i) {
          return jmat_max_value(ctx.geo(i).ric);
        }));

    add("weyl_selfdual", "the negative Weyl half vanishes: W- = 0", 1e-8,
        trait("hyperkahler"), pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            r = std::max(r, form_max_value(geo.wop(asd_part(geo.mv, f))));
          }
          return r;
        }));

    add("weyl_blocks",
        "the Weyl operator preserves the selfdual and anti-selfdual halves",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          const MetricValue& mv = geo.mv;
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            r = std::max(r, form_max_value(
                asd_part(mv, geo.wop(sd_part(mv, f)))));
            r = std::max(r, form_max_value(
                sd_part(mv, geo.wop(asd_part(mv, f)))));
          }
          return r;
        }));

    add("monopole_equation",
        "the ansatz potential solves d Theta = *3 dU on the spatial slice",
        1e-9, [](const Model& m) { return m.has_gh_data; },
        pointwise([](VerifyContext& ctx, int i) {
          const Model& m = ctx.model;
          const Vec4& p = ctx.point(i);
          Jet u = m.gh_U(p, kJetOrder);
          FormValue th = m.gh_Theta(p, kJetOrder);
          FormValue dth = exterior_d(th);
          double r = 0.0;
          r = std::max(r, std::fabs((dth.comp({2, 3}) - partial(u, 1)).value()));
          r = std::max(r, std::fabs((-dth.comp({1, 3}) - partial(u, 2)).value()));
          r = std::max(r, std::fabs((dth.comp({1, 2}) - partial(u, 3)).value()));
          for (int k = 1; k < 4; ++k) {
            r = std::max(r, std::fabs(dth.comp({0, k}).value()));
          }
          return r;
        }));

    add("isometry_nil3_gh",
        "the chart map into the ansatz model pulls the metric back "
        "componentwise",
        1e-9, [](const Model& m) { return m.has_reference_metric; },
        pointwise([](VerifyContext& ctx, int i) {
          const Vec4& p = ctx.point(i);
          MetricValue direct = ctx.model.metric.eval(p);
          MetricValue pulled = ctx.model.reference_metric.eval(p);
          return jmat_max_value(jmat_sub(direct.g, pulled.g));
        }));

    add("hyperkahler_parallel",
        "the anti-selfdual frame triple is parallel for the Levi-Civita "
        "connection",
        1e-8,
        [](const Model& m) {
          return m.has_five_frame && m.has_trait("hyperkahler");
        },
        pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          double r = 0.0;
          for (int k = 0; k < 3; ++k) {
            FormValue f = ctx.model.five_frame[k].eval(ctx.point(i));
            JMat b = form_to_mat(f);
            for (int d = 0; d < 4; ++d) {
              for (int a = 0; a < 4; ++a) {
                for (int c = 0; c < 4; ++c) {
                  Jet t = partial(b[a][c], d);
                  for (int e = 0; e < 4; ++e) {
                    t = t - geo.gamma[d][e][a] * b[e][c] -
                        geo.gamma[d][e][c] * b[a][e];
                  }
                  r = std::max(r, std::fabs(t.value()));
                }
              }
            }
          }
          return r;
        }));

    // --- almost Hermitian structure ----------------------------------------

    add("lee_form_defining", "d omega_I = theta ^ omega_I", 1e-8, always,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          return form_max_value(exterior_d(h.omega) -
                                wedge(h.theta, h.omega));
        }));

    add("nijenhuis", "the structure is integrable: its Nijenhuis tensor "
        "vanishes", 1e-8, trait("hermitian"),
        pointwise([](VerifyContext& ctx, int i) {
          auto n = nijenhuis_tensor(ctx.herm(i).I);
          double r = 0.0;
          for (int p = 0; p < 6; ++p) {
            for (int a = 0; a < 4; ++a) {
              r = std::max(r, std::fabs(n[p][a].value()));
            }
          }
          return r;
        }));

    add("J_kahler",
        "the negatively oriented structure is Kahler: d omega_J = 0 and its "
        "Nijenhuis tensor vanishes",
        1e-8, [](const Model& m) { return m.has_omega_J; },
        pointwise([](VerifyContext& ctx, int i) {
          double r = form_max_value(exterior_d(ctx.omega_J_at(i)));
          auto n = nijenhuis_tensor(ctx.jstruct(i).J);
          for (int p = 0; p < 6; ++p) {
            for (int a = 0; a < 4; ++a) {
              r = std::max(r, std::fabs(n[p][a].value()));
            }
          }
          return r;
        }));

    add("canonical_parallel",
        "the canonical connection is Hermitian: nabla~ g = 0 and "
        "nabla~ I = 0",
        1e-9, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const GeometrySample& geo = h.geo;
          const JMat& g = geo.mv.g;
          double r = 0.0;
          for (int k = 0; k < 4; ++k) {
            JMat di;
            for (int a = 0; a < 4; ++a) {
              for (int b = 0; b < 4; ++b) di[a][b] = partial(h.I[a][b], k);
            }
            JMat nI = jmat_add(di, jmat_commutator(h.gamma_tilde[k], h.I));
            r = std::max(r, jmat_max_value(nI));
            for (int a = 0; a < 4; ++a) {
              for (int b = 0; b < 4; ++b) {
                Jet t = partial(g[a][b], k);
                for (int c = 0; c < 4; ++c) {
                  t = t - h.gamma_tilde[k][c][a] * g[c][b] -
                      h.gamma_tilde[k][c][b] * g[a][c];
                }
                r = std::max(r, std::fabs(t.value()));
              }
            }
          }
          return r;
        }));

    add("torsion_from_eta",
        "the canonical torsion is T_XY = eta_X Y - eta_Y X", 1e-9, always,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int a = 0; a < 4; ++a) {
            for (int x = 0; x < 4; ++x) {
              for (int y = 0; y < 4; ++y) {
                Jet lhs = h.gamma_tilde[x][a][y] - h.gamma_tilde[y][a][x];
                r = std::max(r, std::fabs((lhs - h.torsion(a, x, y)).value()));
              }
            }
          }
          return r;
        }));

    add("dnabla_torsion",
        "on 1-forms the covariant exterior differential is "
        "d~ a = d a - T a",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const Vec4& p = ctx.point(i);
          FormValue a = FormValue::zero(1, p, kJetOrder);
          a.c[0] = jet_coordinate(2, p);
          a.c[3] = jet_coordinate(0, p) * jet_coordinate(1, p);
          a.c[1] = jet_cos(jet_coordinate(3, p));
          double r = 0.0;
          for (int x = 0; x < 4; ++x) {
            for (int y = x + 1; y < 4; ++y) {
              Jet cx = partial(a.c[y], x), cy = partial(a.c[x], y);
              for (int c = 0; c < 4; ++c) {
                cx = cx - h.gamma_tilde[x][c][y] * a.c[c];
                cy = cy - h.gamma_tilde[y][c][x] * a.c[c];
              }
              Jet lhs = cx - cy;
              Jet rhs = partial(a.c[y], x) - partial(a.c[x], y);
              for (int c = 0; c < 4; ++c) {
                rhs = rhs - a.c[c] * h.torsion(c, x, y);
              }
              r = std::max(r, std::fabs((lhs - rhs).value()));
            }
          }
          return r;
        }));

    add("hermitian_eta",
        "eta_U = (1/4)(U-flat ^ theta + (IU)-flat ^ I theta) on an "
        "integrable structure",
        1e-8, trait("hermitian"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          double r = 0.0;
          for (int k = 0; k < 4; ++k) {
            FormValue ef = detail::lowered_basis_vector(mv, k);
            FormValue ief = FormValue::zero(1, mv.base, mv.g[0][0].ord);
            for (int j = 0; j < 4; ++j) {
              Jet t = mv.g[j][0] * h.I[0][k];
              for (int a = 1; a < 4; ++a) t = t + mv.g[j][a] * h.I[a][k];
              ief.c[j] = t;
            }
            FormValue want =
                (wedge(ef, h.theta) + wedge(ief, h.itheta)) * 0.25;
            r = std::max(r, form_max_value(detail::eta_2form(h, k) - want));
          }
          return r;
        }));

    add("ak_eta_symmetry",
        "for an almost Kahler structure eta_{IX} IY = -eta_X Y", 1e-8,
        trait("almost_kahler"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int x = 0; x < 4; ++x) {
            for (int b = 0; b < 4; ++b) {
              for (int y = 0; y < 4; ++y) {
                Jet t = h.eta[x][b][y];
                for (int a = 0; a < 4; ++a) {
                  for (int c = 0; c < 4; ++c) {
                    t = t + h.I[a][x] * h.eta[a][b][c] * h.I[c][y];
                  }
                }
                r = std::max(r, std::fabs(t.value()));
              }
            }
          }
          return r;
        }));

    // --- canonical curvature ------------------------------------------------

    add("rtilde_lambda11",
        "the canonical curvature takes values in the invariant 2-forms",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int p = 0; p < 6; ++p) {
            r = std::max(r, form_max_value(
                proj_anti_invariant(h.rtilde_form[p], h.I)));
          }
          return r;
        }));

    add("comp_curv_crosscheck",
        "curvature from the connection coefficients agrees with "
        "R - d~eta + [eta,eta] - eta_T term by term",
        1e-7, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          auto dec = rtilde_decomposed(h);
          double r = 0.0;
          for (int p = 0; p < 6; ++p) {
            r = std::max(r, jmat_max_value(jmat_sub(h.rtilde[p], dec[p])));
          }
          return r;
        }));

    add("bra_tor",
        "the gauge commutator identity [eta_X, eta_Y] = (1/2) Phi(X,Y) I "
        "with Phi = a ^ c",
        1e-8, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            for (int p = 0; p < 6; ++p) {
              int x = kInc2[p][0], y = kInc2[p][1];
              JMat lhs = jmat_commutator(h.eta[x], h.eta[y]);
              JMat rhs = jmat_scale(h.I, g.curv.c[p] * 0.5);
              r = std::max(r, jmat_max_value(jmat_sub(lhs, rhs)));
            }
          }
          return r;
        }));

    add("eq28",
        "gamma1~ = rho^I + W+ omega_I + Phi - (s/6) omega_I", 1e-7, always,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const GeometrySample& geo = h.geo;
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            FormValue rhs = h.rho_I + geo.wop(h.omega) + g.curv -
                            h.omega * (geo.s * (1.0 / 6.0));
            r = std::max(r, form_max_value(h.gamma1 - rhs));
          }
          return r;
        }));

    add("chern_closed", "the first Chern form is closed: d gamma1~ = 0",
        1e-7, always, pointwise([](VerifyContext& ctx, int i) {
          return form_max_value(exterior_d(ctx.herm(i).gamma1));
        }));

    add("chern_gauge", "in any local gauge gamma1~ = -db", 1e-7, always,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            r = std::max(r,
                         form_max_value(h.gamma1 + exterior_d(g.b)));
          }
          return r;
        }));

    add("lemma_curvC2",
        "R~ = W- + (s/12) Id_{Lambda-} + (1/2) Ric0^- + "
        "(1/2) gamma1~ (x) omega_I, with Ric0^- F = {Ric0, F}^-",
        1e-7, always, pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const GeometrySample& geo = h.geo;
          const MetricValue& mv = geo.mv;
          JMat ric0end = jmat_mul(mv.ginv, geo.ric0);
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            FormValue fm = asd_part(mv, f);
            FormValue anti = form_of_endo(
                mv, jmat_anticommutator(ric0end, endo_of_form(mv, f)));
            FormValue rhs = geo.wop(fm) + fm * (geo.s * (1.0 / 12.0)) +
                            asd_part(mv, anti) * 0.5 +
                            h.omega * (inner_std2(mv, h.gamma1, f) * 0.5);
            r = std::max(r, form_max_value(h.rtilde_op(f) - rhs));
          }
          return r;
        }));

    // --- Hermitian refinements ----------------------------------------------

    add("eq_phi", "Phi = (1/4)(theta ^ I theta + |theta|^2 omega_I)", 1e-8,
        trait("hermitian"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          FormValue want =
              (wedge(h.theta, h.itheta) + h.omega * h.theta_norm2) * 0.25;
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            r = std::max(r,
                         form_max_value(ctx.gauge(i, order).curv - want));
          }
          return r;
        }));

    add("eq_ks", "kappa - s = -3 d*theta - (3/2) |theta|^2", 1e-8,
        trait("hermitian"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          Jet lhs = h.kappa - h.geo.s;
          Jet rhs = h.delta_theta * (-3.0) - h.theta_norm2 * 1.5;
          return std::fabs((lhs - rhs).value());
        }));

    add("eq_wplus",
        "W+ = (kappa/4)((1/2) omega (x) omega - (1/3) Id) - "
        "(1/4) Psi (x) omega - (1/4) omega (x) Psi",
        1e-7, trait("hermitian"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const GeometrySample& geo = h.geo;
          const MetricValue& mv = geo.mv;
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            FormValue fp = sd_part(mv, f);
            Jet omf = inner_std2(mv, h.omega, f);
            Jet psf = inner_std2(mv, h.psi, f);
            FormValue rhs = (h.omega * (omf * 0.5) - fp * (1.0 / 3.0)) *
                                (h.kappa * 0.25) -
                            h.omega * (psf * 0.25) - h.psi * (omf * 0.25);
            r = std::max(r, form_max_value(geo.wop(fp) - rhs));
          }
          return r;
        }));

    add("eq29",
        "gamma1~ = rho^I - (1/2)(d*theta) omega_I + (1/4) theta ^ I theta "
        "- (1/2) Psi",
        1e-7, trait("hermitian"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          FormValue rhs = h.rho_I - h.omega * (h.delta_theta * 0.5) +
                          wedge(h.theta, h.itheta) * 0.25 - h.psi * 0.5;
          return form_max_value(h.gamma1 - rhs);
        }));

    add("dplus_theta_degenerate",
        "on a closed frame the Lee form satisfies d+ theta = 0 (the "
        "positive Weyl half is degenerate)",
        1e-8, detail::closed_frame_model,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          return form_max_value(sd_part(h.geo.mv, exterior_d(h.theta)));
        }));

    // --- closed frame characterization --------------------------------------

    add("prop42",
        "a closed frame exists around each point iff "
        "R~ = -(1/4) d(I theta) (x) omega_I",
        1e-7, detail::closed_frame_model,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          FormValue dit = exterior_d(h.itheta);
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            FormValue rhs = h.omega * (inner_std2(mv, dit, f) * (-0.25));
            r = std::max(r, form_max_value(h.rtilde_op(f) - rhs));
          }
          return r;
        }));

    add("prop_class5_i",
        "omega_I is a Weyl eigenform: W+ omega_I = (kappa/6) omega_I", 1e-8,
        detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          return form_max_value(h.geo.wop(h.omega) -
                                h.omega * (h.kappa * (1.0 / 6.0)));
        }));

    add("prop_class5_ii", "kappa theta + (2/3) d kappa = 0", 1e-8,
        detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          FormValue lhs = h.theta * h.kappa +
                          detail::d_scalar(h.kappa, h.geo.mv.base) *
                              (2.0 / 3.0);
          return form_max_value(lhs);
        }));

    add("prop_class5_iii",
        "X = I grad(kappa^{-1/3}) is Killing: the symmetrized covariant "
        "derivative of X-flat vanishes",
        1e-8, detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const GeometrySample& geo = h.geo;
          FormValue xf = h.itheta * (detail::signed_cbrt_recip(h.kappa) * 0.5);
          double r = 0.0;
          for (int a = 0; a < 4; ++a) {
            for (int b = a; b < 4; ++b) {
              Jet t = partial(xf.c[b], a) + partial(xf.c[a], b);
              for (int c = 0; c < 4; ++c) {
                t = t - geo.gamma[a][c][b] * xf.c[c] -
                    geo.gamma[b][c][a] * xf.c[c];
              }
              r = std::max(r, std::fabs(t.value()));
            }
          }
          return r;
        }));

    add("prop_class5_iv",
        "d+ X-flat = -(1/12) kappa^{2/3} omega_I and d- X-flat = 0", 1e-8,
        detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          FormValue xf = h.itheta * (detail::signed_cbrt_recip(h.kappa) * 0.5);
          FormValue dx = exterior_d(xf);
          double r = form_max_value(
              sd_part(mv, dx) + h.omega * (detail::pow23(h.kappa) *
                                           (1.0 / 12.0)));
          return std::max(r, form_max_value(asd_part(mv, dx)));
        }));

    add("thm1_theta_kappa", "|theta|^2 = -kappa/3", 1e-8,
        detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          return std::fabs(
              (h.theta_norm2 + h.kappa * (1.0 / 3.0)).value());
        }));

    add("thm1_omegaJ_closed",
        "omega_J = omega_I + 2 |theta|^{-2} theta ^ I theta is closed", 1e-7,
        detail::gh_linear_nonflat_or_nil3,
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          FormValue wj = h.omega + wedge(h.theta, h.itheta) *
                                       (jet_recip(h.theta_norm2) * 2.0);
          return form_max_value(exterior_d(wj));
        }));

    // --- small holonomy -------------------------------------------------------

    add("rtilde_flat",
        "the canonical connection of the rotation family is flat exactly "
        "when d psi ^ d phi = 0",
        1e-8, [](const Model& m) { return m.id == "flat"; },
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int p = 0; p < 6; ++p) {
            r = std::max(r, form_max_value(h.rtilde_form[p]));
          }
          return r;
        }));

    add("flat_gen",
        "for R~ = 0 the structure is a rotation of a parallel frame with "
        "a = -d phi, b = sin(phi) d psi, c = cos(phi) d psi; dependent "
        "angles force flatness, independent ones force curvature",
        1e-8, [](const Model& m) { return m.has_flat_angles; },
        pointwise([](VerifyContext& ctx, int i) {
          const Model& m = ctx.model;
          const Vec4& p = ctx.point(i);
          const HermitianSample& h = ctx.herm(i);
          Jet phi = m.flat_phi(p, kJetOrder);
          Jet psi = m.flat_psi(p, kJetOrder);
          FormValue dphi = detail::d_scalar(phi, p);
          FormValue dpsi = detail::d_scalar(psi, p);
          double rt = 0.0;
          for (int q = 0; q < 6; ++q) {
            rt = std::max(rt, form_max_value(h.rtilde_form[q]));
          }
          const GaugeSample& g = ctx.flat_gauge(i);
          if (form_max_value(wedge(dpsi, dphi)) <= 1e-9) {
            double r = rt;
            r = std::max(r, form_max_value(g.a + dphi));
            r = std::max(r, form_max_value(g.b - dpsi * jet_sin(phi)));
            r = std::max(r, form_max_value(g.c - dpsi * jet_cos(phi)));
            return r;
          }
          bool fires = rt > 1e-6 && form_max_value(g.curv) > 1e-3;
          return fires ? 0.0 : 1.0;
        }));

    add("hol_vhk",
        "Ric = 0 and W- = 0 iff the curvature is generated by the "
        "fundamental form: R~ = (1/2) gamma1~ (x) omega_I",
        1e-7, trait("hyperkahler"), pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          double r = 0.0;
          for (const FormValue& f :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            FormValue rhs =
                h.omega * (inner_std2(mv, h.gamma1, f) * 0.5);
            r = std::max(r, form_max_value(h.rtilde_op(f) - rhs));
          }
          return r;
        }));

    add("wminus_spectrum",
        "for a negatively oriented Kahler structure W- has eigenvalues "
        "s/6 on omega_J and -s/12 on its orthogonal complement",
        1e-7, trait("kahler_J"), pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          const MetricValue& mv = geo.mv;
          const FormValue& wj = ctx.omega_J_at(i);
          double r = form_max_value(geo.wop(wj) - wj * (geo.s * (1.0 / 6.0)));
          for (int k = 0; k < 3; ++k) {
            FormValue g = geo.asd_basis[k] -
                          wj * (inner_std2(mv, geo.asd_basis[k], wj) * 0.5);
            r = std::max(r, form_max_value(geo.wop(g) +
                                           g * (geo.s * (1.0 / 12.0))));
          }
          return r;
        }));

    add("curv_ka",
        "W- + (s/12) Id_{Lambda-} + (1/2) Ric0^- = (1/2) rho^J (x) omega_J "
        "on anti-selfdual arguments",
        1e-7, trait("kahler_J"), pointwise([](VerifyContext& ctx, int i) {
          const GeometrySample& geo = ctx.geo(i);
          const MetricValue& mv = geo.mv;
          const JStructure& js = ctx.jstruct(i);
          JMat ric0end = jmat_mul(mv.ginv, geo.ric0);
          double r = 0.0;
          for (const FormValue& f0 :
               detail::unit_2forms(ctx.point(i), kJetOrder)) {
            FormValue f = asd_part(mv, f0);
            FormValue anti = form_of_endo(
                mv, jmat_anticommutator(ric0end, endo_of_form(mv, f)));
            FormValue lhs = geo.wop(f) + f * (geo.s * (1.0 / 12.0)) +
                            anti * 0.5;
            FormValue rhs =
                js.rho_J * (inner_std2(mv, js.omega_J, f) * 0.5);
            r = std::max(r, form_max_value(lhs - rhs));
          }
          return r;
        }));

    add("prop_1dimhol",
        "one-dimensional holonomy with primitive part: gamma1~ = alpha "
        "rho^J and R~ = (rho^J/2) (x) (alpha omega_I + omega_J)",
        1e-7, trait("one_dim_hol"), [](VerifyContext& ctx) {
          detail::ScalarFit fit;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const JStructure& js = ctx.jstruct(i);
            for (int k = 0; k < 6; ++k) {
              fit.add(js.rho_J.c[k].value(), h.gamma1.c[k].value());
            }
          }
          double alpha = fit.value(0.0);
          CheckRun out;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const MetricValue& mv = h.geo.mv;
            const JStructure& js = ctx.jstruct(i);
            double r = form_max_value(h.gamma1 - js.rho_J * alpha);
            FormValue gen = h.omega * alpha + js.omega_J;
            for (const FormValue& f :
                 detail::unit_2forms(ctx.point(i), kJetOrder)) {
              FormValue rhs =
                  gen * (inner_std2(mv, js.rho_J, f) * 0.5);
              r = std::max(r, form_max_value(h.rtilde_op(f) - rhs));
            }
            out.max_residual = std::max(out.max_residual, r);
          }
          out.fitted.emplace_back("alpha", alpha);
          return out;
        });

    add("holonomy_rank_bound",
        "the span of the curvature images R~(F) has the expected rank; with "
        "rank one the generator splits as F = F0 + alpha omega_I",
        1e-7, always, [](VerifyContext& ctx) {
          if (ctx.npoints() * 6 < 40) {
            throw Error(ErrorKind::insufficient_samples,
                        "holonomy rank estimation needs at least 40 rows");
          }
          const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
          GramSVD svd;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const GeometrySample& geo = h.geo;
            const MetricValue& mv = geo.mv;
            for (const FormValue& f :
                 detail::unit_2forms(ctx.point(i), kJetOrder)) {
              FormValue img = h.rtilde_op(f);
              std::array<double, 4> row;
              row[0] = inner_std2(mv, img, h.omega).value() * inv_sqrt2;
              for (int k = 0; k < 3; ++k) {
                row[k + 1] = inner_std2(mv, img, geo.asd_basis[k]).value();
              }
              svd.add_row(row);
            }
          }
          auto res = svd.finish();
          // Relative threshold, with an absolute floor that screens out
          // rounding noise on exactly flat models.
          double cut = std::max(res.sigma[0] * 1e-6, 1e-8);
          int rank = 0;
          for (int k = 0; k < 4; ++k) {
            if (res.sigma[k] > cut) ++rank;
          }
          std::array<double, 4> v{};
          for (int k = 0; k < 4; ++k) v[k] = res.vectors[k][0];
          int lead = 0;
          for (int k = 1; k < 4; ++k) {
            if (std::fabs(v[k]) > std::fabs(v[lead])) lead = k;
          }
          if (v[lead] < 0.0) {
            for (int k = 0; k < 4; ++k) v[k] = -v[k];
          }
          double f0 = std::sqrt(v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
          CheckRun out;
          const Model& m = ctx.model;
          if (m.expected_hol_rank >= 0 && rank != m.expected_hol_rank) {
            out.max_residual = 1.0;
          } else if (rank == 1) {
            if (m.has_trait("one_dim_hol")) {
              // The generator must have a nonzero primitive part.
              if (f0 <= 1e-3) out.max_residual = 1.0;
            } else if (m.expected_hol_rank == 1) {
              // The generator is claimed proportional to omega_I.
              out.max_residual = f0;
            }
          }
          out.fitted.emplace_back("rank", static_cast<double>(rank));
          if (rank == 1) {
            out.fitted.emplace_back("alpha", v[0] * inv_sqrt2);
            out.fitted.emplace_back("f0_norm", f0);
          }
          return out;
        });

    // --- the almost Kahler family ---------------------------------------------

    add("tak_kappa", "kappa = s + 6 |a|^2", 1e-8,
        [](const Model& m) { return m.id == "ak4"; },
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            Jet a2 = inner1(h.geo.mv, g.a, g.a);
            r = std::max(r,
                         std::fabs((h.kappa - h.geo.s - a2 * 6.0).value()));
          }
          return r;
        }));

    add("tak_rho_I",
        "with rho^J = (s/4) omega_J + mu omega_I + phi1 the mirror Ricci "
        "form satisfies rho^I = (s/4) omega_I + mu omega_J",
        1e-8, [](const Model& m) {
          return detail::ak_variant(m, {"zero", "holo", "planar"});
        },
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          const JStructure& js = ctx.jstruct(i);
          Jet mu = inner_std2(mv, js.rho_J, h.omega) * 0.5;
          FormValue rhs = h.omega * (h.geo.s * 0.25) + js.omega_J * mu;
          return form_max_value(h.rho_I - rhs);
        }));

    add("tak_rels",
        "phi2 = alpha phi1 and a ^ Ia = (alpha mu - s/12 - kappa/6) omega_I "
        "+ (alpha s/4 - mu) omega_J, mu from rho^J = (s/4) omega_J + "
        "mu omega_I + phi1",
        1e-7, [](const Model& m) {
          return detail::ak_variant(m, {"zero", "holo", "planar"});
        },
        [](VerifyContext& ctx) {
          detail::ScalarFit fit;
          double mu_sum = 0.0;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const MetricValue& mv = h.geo.mv;
            const GeometrySample& geo = h.geo;
            const JStructure& js = ctx.jstruct(i);
            const GaugeSample& g = ctx.gauge(i, 0);
            Jet mu = inner_std2(mv, js.rho_J, h.omega) * 0.5;
            mu_sum += mu.value();
            FormValue phi1 =
                js.rho_J - js.omega_J * (geo.s * 0.25) - h.omega * mu;
            FormValue phi2 =
                geo.wop(h.omega) - h.omega * (h.kappa * (1.0 / 6.0));
            for (int k = 0; k < 6; ++k) {
              fit.add(phi1.c[k].value(), phi2.c[k].value());
            }
            FormValue x2 = h.omega * mu + js.omega_J * (geo.s * 0.25);
            FormValue y2 = g.curv +
                           h.omega * (geo.s * (1.0 / 12.0) +
                                      h.kappa * (1.0 / 6.0)) +
                           js.omega_J * mu;
            for (int k = 0; k < 6; ++k) {
              fit.add(x2.c[k].value(), y2.c[k].value());
            }
          }
          double alpha = fit.value(0.0);
          CheckRun out;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const MetricValue& mv = h.geo.mv;
            const GeometrySample& geo = h.geo;
            const JStructure& js = ctx.jstruct(i);
            Jet mu = inner_std2(mv, js.rho_J, h.omega) * 0.5;
            FormValue phi1 =
                js.rho_J - js.omega_J * (geo.s * 0.25) - h.omega * mu;
            FormValue phi2 =
                geo.wop(h.omega) - h.omega * (h.kappa * (1.0 / 6.0));
            double r = form_max_value(phi2 - phi1 * alpha);
            for (int order = 0; order < 2; ++order) {
              const GaugeSample& g = ctx.gauge(i, order);
              FormValue rhs =
                  h.omega * (mu * alpha - geo.s * (1.0 / 12.0) -
                             h.kappa * (1.0 / 6.0)) +
                  js.omega_J * (geo.s * (alpha * 0.25) - mu);
              r = std::max(r, form_max_value(g.curv - rhs));
            }
            out.max_residual = std::max(out.max_residual, r);
          }
          out.fitted.emplace_back("alpha", alpha);
          out.fitted.emplace_back("mu_mean",
                                  mu_sum / std::max(1, ctx.npoints()));
          return out;
        });

    add("tak_splus",
        "the leaf curvatures satisfy sigma+ = <gamma1~ - rho^J, omega+> "
        "and sigma- = <gamma1~ + rho^J, omega->",
        1e-7, [](const Model& m) {
          return detail::ak_variant(m, {"zero", "holo", "planar"});
        },
        pointwise([](VerifyContext& ctx, int i) {
          const HermitianSample& h = ctx.herm(i);
          const MetricValue& mv = h.geo.mv;
          const JStructure& js = ctx.jstruct(i);
          FormValue omp = (h.omega - js.omega_J) * 0.5;
          FormValue omm = (h.omega + js.omega_J) * 0.5;
          Jet sp = inner_std2(mv, h.rtilde_op(omp), omp) * 2.0;
          Jet sm = inner_std2(mv, h.rtilde_op(omm), omm) * 2.0;
          Jet rp = inner_std2(mv, h.gamma1 - js.rho_J, omp);
          Jet rm = inner_std2(mv, h.gamma1 + js.rho_J, omm);
          double r = std::fabs((sp - rp).value());
          return std::max(r, std::fabs((sm - rm).value()));
        }));

    add("tak_a_norm",
        "|a|^2 = 4 |d|w||^2_{g_Sigma} / (1 - |w|^2)^2 with the "
        "determinant-normalised fibre block",
        1e-8, [](const Model& m) { return detail::ak_variant(m, {"holo"}); },
        pointwise([](VerifyContext& ctx, int i) {
          const Model& m = ctx.model;
          const Vec4& p = ctx.point(i);
          const HermitianSample& h = ctx.herm(i);
          Jet w1 = m.ak_w1(p, kJetOrder), w2 = m.ak_w2(p, kJetOrder);
          Jet wn = jet_sqrt(w1 * w1 + w2 * w2);
          Jet dt = partial(wn, 2), du = partial(wn, 3);
          Jet lam2 = m.ak_lambda2(p, kJetOrder);
          Jet v = m.ak_V(p, kJetOrder);
          Jet rhs = (dt * dt + du * du) * 4.0 / (lam2 * (v * v));
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            Jet a2 = inner1(h.geo.mv, g.a, g.a);
            r = std::max(r, std::fabs((a2 - rhs).value()));
          }
          return r;
        }));

    add("tak_log_laplacian",
        "(d I_Sigma d) log(1 - |w|^2) = |a|^2 omega_Sigma, read as "
        "-lap log(1-|w|^2) = |a|^2 lambda^2 in flat surface coordinates "
        "(determinant-normalised fibre block)",
        1e-8, [](const Model& m) {
          return m.id == "ak4" && detail::param_of(m, "w") != "nonholo";
        },
        pointwise([](VerifyContext& ctx, int i) {
          const Model& m = ctx.model;
          const Vec4& p = ctx.point(i);
          const HermitianSample& h = ctx.herm(i);
          Jet v = m.ak_V(p, kJetOrder);
          Jet lap = detail::log_laplacian(v, 2, 3);
          Jet lam2 = m.ak_lambda2(p, kJetOrder);
          double r = 0.0;
          for (int order = 0; order < 2; ++order) {
            const GaugeSample& g = ctx.gauge(i, order);
            Jet a2 = inner1(h.geo.mv, g.a, g.a);
            r = std::max(r, std::fabs((lap + a2 * lam2).value()));
          }
          return r;
        }));

    add("tak_sigma_flat",
        "the conformal surface metric (1-|w|^2)^{(alpha+1)/(1-alpha)} "
        "g_Sigma is flat for the fitted alpha",
        1e-8, trait("one_dim_hol"), [](VerifyContext& ctx) {
          detail::ScalarFit fit;
          for (int i = 0; i < ctx.npoints(); ++i) {
            const HermitianSample& h = ctx.herm(i);
            const JStructure& js = ctx.jstruct(i);
            for (int k = 0; k < 6; ++k) {
              fit.add(js.rho_J.c[k].value(), h.gamma1.c[k].value());
            }
          }
          double alpha = fit.value(0.0);
          CheckRun out;
          if (std::fabs(alpha - 1.0) < 1e-6) {
            out.max_residual = 1.0;
            out.fitted.emplace_back("alpha", alpha);
            return out;
          }
          // E follows from s = lap lnV / lambda^2 + 2 K_Sigma,
          // lap lnV = -|a|^2 lambda^2 and (alpha-1) s / 2 = |a|^2; at
          // alpha = -1 it degenerates to flatness of g_Sigma itself.
          double expo = (alpha + 1.0) / (1.0 - alpha);
          for (int i = 0; i < ctx.npoints(); ++i) {
            const Model& m = ctx.model;
            const Vec4& p = ctx.point(i);
            Jet v = m.ak_V(p, kJetOrder);
            Jet lam2 = m.ak_lambda2(p, kJetOrder);
            Jet r = detail::log_laplacian(v, 2, 3) * expo +
                    detail::log_laplacian(lam2, 2, 3);
            out.max_residual =
                std::max(out.max_residual, std::fabs(r.value()));
          }
          out.fitted.emplace_back("alpha", alpha);
          out.fitted.emplace_back("exponent", expo);
          return out;
        });

    return reg;
  }();
  return registry;
}

// ---------------------------------------------------------------------------
// Selection, aliases and the runner.

inline bool glob_match(const std::string& pattern, const std::string& s) {
  const char* p = pattern.c_str();
  const char* t = s.c_str();
  const char* star = nullptr;
  const char* saved = nullptr;
  while (*t) {
    if (*p == '?' || *p == *t) {
      ++p;
      ++t;
    } else if (*p == '*') {
      star = p++;
      saved = t;
    } else if (star) {
      p = star + 1;
      t = ++saved;
    } else {
      return false;
    }
  }
  while (*p == '*') ++p;
  return *p == '\0';
}

inline std::string resolve_check_alias(const std::string& id) {
  static const std::map<std::string, std::string> aliases = {
      {"prop42_curvature_characterization", "prop42"},
  };
  auto it = aliases.find(id);
  return it == aliases.end() ? id : it->second;
}

// Expands "all", glob patterns and exact ids against the registry.  Globs
// silently filter to applicable checks; an exact id must exist and be
// applicable to the model, otherwise the request is rejected before any
// computation happens.
inline std::vector<const CheckSpec*> resolve_checks(
    const Model& m, const std::vector<std::string>& tokens) {
  const auto& reg = check_registry();
  std::vector<char> take(reg.size(), 0);
  for (const std::string& raw : tokens) {
    std::string tok = resolve_check_alias(raw);
    if (tok == "all") {
      for (std::size_t k = 0; k < reg.size(); ++k) {
        if (reg[k].applies(m)) take[k] = 1;
      }
      continue;
    }
    if (tok.find('*') != std::string::npos ||
        tok.find('?') != std::string::npos) {
      for (std::size_t k = 0; k < reg.size(); ++k) {
        if (glob_match(tok, reg[k].id) && reg[k].applies(m)) take[k] = 1;
      }
      continue;
    }
    bool found = false;
    for (std::size_t k = 0; k < reg.size(); ++k) {
      if (reg[k].id != tok) continue;
      found = true;
      if (!reg[k].applies(m)) {
        throw Error(ErrorKind::bad_config,
                    "check '" + tok + "' is not applicable to model '" +
                        m.id + "'");
      }
      take[k] = 1;
      break;
    }
    if (!found) {
      throw Error(ErrorKind::bad_config, "unknown check id '" + raw + "'");
    }
  }
  std::vector<const CheckSpec*> out;
  for (std::size_t k = 0; k < reg.size(); ++k) {
    if (take[k]) out.push_back(&reg[k]);
  }
  if (out.empty()) {
    throw Error(ErrorKind::bad_config, "no applicable checks selected");
  }
  return out;
}

struct RunOptions {
  std::vector<std::string> checks{"all"};
  int samples = 200;
  std::uint64_t seed = 42;
  std::map<std::string, double> tol_overrides;
};

inline VerificationReport run_checks(const Model& m, const RunOptions& opt) {
  if (opt.samples < 1) {
    throw Error(ErrorKind::bad_config, "samples must be at least 1");
  }
  const auto& reg = check_registry();
  for (const auto& [id, tol] : opt.tol_overrides) {
    std::string t = resolve_check_alias(id);
    bool known = false;
    for (const auto& spec : reg) {
      if (spec.id == t) known = true;
    }
    if (!known) {
      throw Error(ErrorKind::bad_config,
                  "tolerance override for unknown check id '" + id + "'");
    }
    if (!(tol > 0.0)) {
      throw Error(ErrorKind::bad_config,
                  "tolerance for '" + id + "' must be positive");
    }
  }
  std::vector<const CheckSpec*> selected = resolve_checks(m, opt.checks);
  VerifyContext ctx(m, sample_points(m.domain, opt.samples, opt.seed));
  VerificationReport report;
  report.model = m.id;
  report.params = m.params;
  report.seed = opt.seed;
  report.jet_order = kJetOrder;
  for (const CheckSpec* spec : selected) {
    CheckRun run = spec->run(ctx);
    CheckRecord rec;
    rec.id = spec->id;
    rec.anchor = spec->anchor;
    rec.samples = opt.samples;
    rec.max_residual = run.max_residual;
    auto it = opt.tol_overrides.find(spec->id);
    if (it == opt.tol_overrides.end()) {
      // An override may be supplied under the alias as well.
      for (const auto& [id, tol] : opt.tol_overrides) {
        if (resolve_check_alias(id) == spec->id) {
          rec.tol = tol;
          break;
        }
      }
      if (rec.tol == 0.0) rec.tol = spec->tol;
    } else {
      rec.tol = it->second;
    }
    rec.pass = rec.max_residual <= rec.tol;
    rec.fitted = run.fitted;
    report.checks.push_back(std::move(rec));
  }
  return report;
}

// Checks a model is expected to fail by construction; used to derive the
// manifest of checks a model must pass.
inline std::set<std::string> known_failures(const Model& m) {
  std::set<std::string> out;
  if (m.id == "flat" && detail::param_of(m, "variant") == "independent") {
    out.insert("rtilde_flat");
  }
  if (m.id == "gibbons-hawking") {
    std::string variant = detail::param_of(m, "variant");
    if (variant == "nonharmonic") {
      out.insert("monopole_equation");
      out.insert("J_kahler");
      out.insert("frame_closed");
    }
    if (variant == "pointlike") out.insert("frame_closed");
    if (detail::param_of(m, "rot") == "xdep") out.insert("frame_closed");
  }
  if (detail::ak_variant(m, {"nonholo"})) out.insert("J_kahler");
  return out;
}

// Every applicable check minus the documented negative controls.
inline std::vector<std::string> expected_check_ids(const Model& m) {
  std::set<std::string> fail = known_failures(m);
  std::vector<std::string> out;
  for (const auto& spec : check_registry()) {
    if (spec.applies(m) && fail.count(spec.id) == 0) out.push_back(spec.id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization.  JSON field names are part of the CI contract; the writer
// emits no timestamps and iterates containers in fixed order, so the same
// inputs always produce the same bytes.

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  j["params"] = params;
  j["seed"] = r.seed;
  j["jet_order"] = r.jet_order;
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  for (const CheckRecord& c : r.checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["anchor"] = c.anchor;
    e["samples"] = c.samples;
    e["max_residual"] = c.max_residual;
    e["tol"] = c.tol;
    e["pass"] = c.pass;
    if (!c.fitted.empty()) {
      nlohmann::ordered_json f = nlohmann::ordered_json::object();
      for (const auto& [k, v] : c.fitted) f[k] = v;
      e["fitted_constants"] = f;
    }
    checks.push_back(std::move(e));
  }
  j["checks"] = checks;
  return j;
}

inline std::string report_to_text(const VerificationReport& r) {
  std::string out;
  out += "model: " + r.model + "\n";
  out += "params:";
  if (r.params.empty()) {
    out += " (none)";
  } else {
    for (const auto& [k, v] : r.params) out += " " + k + "=" + v;
  }
  out += "\n";
  char buf[256];
  std::snprintf(buf, sizeof(buf), "seed: %llu  jet order: %d\n\n",
                static_cast<unsigned long long>(r.seed), r.jet_order);
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-26s %8s %13s %10s  %s\n", "check",
                "samples", "max residual", "tol", "result");
  out += buf;
  int passed = 0;
  for (const CheckRecord& c : r.checks) {
    std::snprintf(buf, sizeof(buf), "%-26s %8d %13.5e %10.1e  %s", c.id.c_str(),
                  c.samples, c.max_residual, c.tol,
                  c.pass ? "pass" : "FAIL");
    out += buf;
    if (!c.fitted.empty()) {
      out += "  [";
      bool first = true;
      for (const auto& [k, v] : c.fitted) {
        if (!first) out += ", ";
        first = false;
        std::snprintf(buf, sizeof(buf), "%s=%.6g", k.c_str(), v);
        out += buf;
      }
      out += "]";
    }
    out += "\n";
    if (c.pass) ++passed;
  }
  std::snprintf(buf, sizeof(buf), "\n%d/%d checks passed\n", passed,
                static_cast<int>(r.checks.size()));
  out += buf;
  return out;
}

}  // namespace fourframes
