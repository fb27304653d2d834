#pragma once

// Almost Hermitian structures and the canonical connection.
//
// Conventions fixed here and relied on everywhere else:
//   - an almost complex structure acts on 1-forms by (I alpha)(X) = alpha(IX);
//   - eta_i = (1/2)(nabla_i I) I and the canonical connection is nabla + eta;
//   - curvature signs follow curvature.hpp, R_ij = -(d_i G_j - d_j G_i + [..]).

#include <array>
#include <vector>

#include "fourframes/curvature.hpp"

namespace fourframes {

// 2-form <-> antisymmetric matrix of lowered components.
inline JMat form_to_mat(const FormValue& f) {
  JMat m = jmat_zero(f.base, f.min_ord());
  for (int p = 0; p < 6; ++p) {
    int i = kInc2[p][0], j = kInc2[p][1];
    m[i][j] = f.c[p];
    m[j][i] = -f.c[p];
  }
  return m;
}

inline FormValue mat_to_form(const JMat& m, const Vec4& base) {
  FormValue f = FormValue::zero(2, base, m[0][0].ord);
  for (int p = 0; p < 6; ++p) f.c[p] = m[kInc2[p][0]][kInc2[p][1]];
  return f;
}

// F(I., I.) as a 2-form; antisymmetry survives the sandwich exactly.
inline FormValue form_sandwich(const FormValue& f, const JMat& i_endo) {
  JMat m = form_to_mat(f);
  JMat s = jmat_mul(jmat_transpose(i_endo), jmat_mul(m, i_endo));
  return mat_to_form(s, f.base);
}

// Invariant part: F |-> (F + F(I., I.)) / 2.
inline FormValue proj_invariant(const FormValue& f, const JMat& i_endo) {
  return (f + form_sandwich(f, i_endo)) * 0.5;
}

// Anti-invariant part: F |-> (F - F(I., I.)) / 2.
inline FormValue proj_anti_invariant(const FormValue& f, const JMat& i_endo) {
  return (f - form_sandwich(f, i_endo)) * 0.5;
}

// 1-form action (I alpha)(X) = alpha(IX), i.e. (I alpha)_b = alpha_a I^a_b.
inline FormValue apply_I_1form(const FormValue& alpha, const JMat& i_endo) {
  FormValue r = FormValue::zero(1, alpha.base, alpha.min_ord());
  for (int b = 0; b < 4; ++b) {
    Jet s = alpha.c[0] * i_endo[0][b];
    for (int a = 1; a < 4; ++a) s = s + alpha.c[a] * i_endo[a][b];
    r.c[b] = s;
  }
  return r;
}

struct AlmostComplex {
  JMat endo;        // I, with I^2 = -Id
  FormValue omega;  // g(I., .)
};

// Build I from its fundamental form; validates I^2 = -Id.
inline AlmostComplex structure_from_form(const MetricValue& mv,
                                         const FormValue& omega) {
  AlmostComplex ac{endo_of_form(mv, omega), omega};
  JMat sq = jmat_add(jmat_mul(ac.endo, ac.endo),
                     jmat_identity(mv.base, kJetOrder));
  if (jmat_max_value(sq) > 1e-6) {
    throw Error(ErrorKind::wrong_orientation,
                "form is not the fundamental form of a compatible structure",
                mv.base);
  }
  return ac;
}

// Complete a pair of orthogonal unit anti-self-dual forms (w4, w5) to the
// remaining structure of the triple: I = -endo(w5) endo(w4).  On the flat
// chart the pair (dx02 + dx31, dx03 + dx12) yields omega = dx01 + dx23.
inline AlmostComplex structure_from_pair(const MetricValue& mv,
                                         const FormValue& w4,
                                         const FormValue& w5) {
  double n4 = form_inner(mv, w4, w4).value();
  double n5 = form_inner(mv, w5, w5).value();
  double cross = form_inner(mv, w4, w5).value();
  if (std::fabs(n4 - 1.0) > 1e-6 || std::fabs(n5 - 1.0) > 1e-6 ||
      std::fabs(cross) > 1e-6) {
    throw Error(ErrorKind::not_orthonormal,
                "structure pair must be unit and orthogonal", mv.base);
  }
  JMat i4 = endo_of_form(mv, w4);
  JMat i5 = endo_of_form(mv, w5);
  JMat i_endo = jmat_scale(jmat_mul(i5, i4), -1.0);
  JMat sq = jmat_add(jmat_mul(i_endo, i_endo),
                     jmat_identity(mv.base, kJetOrder));
  if (jmat_max_value(sq) > 1e-6) {
    throw Error(ErrorKind::wrong_orientation,
                "structure pair does not square to a complex structure",
                mv.base);
  }
  return AlmostComplex{i_endo, form_of_endo(mv, i_endo)};
}

struct HermitianSample {
  GeometrySample geo;
  JMat I;                              // order 3
  FormValue omega;                     // order 3
  std::array<JMat, 4> nabla_I;         // order 2
  std::array<JMat, 4> eta;             // order 2
  std::array<JMat, 4> gamma_tilde;     // order 2
  std::array<JMat, 6> rtilde;          // order 1, increasing-pair index
  std::array<FormValue, 6> rtilde_form;
  FormValue gamma1;                    // -(1/2) tr(Rtilde_ij I), order 1
  FormValue theta;                     // Lee form, order 2
  FormValue itheta;
  Jet delta_theta;                     // order 1
  Jet theta_norm2;                     // order 2
  Jet kappa;                           // 3 <W omega, omega>_std, order 1
  FormValue rho_I;                     // order 1
  FormValue psi;                       // order 1

  JMat rtilde_at(int i, int j) const {
    if (i == j) return jmat_zero(geo.mv.base, rtilde[0][0][0].ord);
    if (i < j) return rtilde[inc2_pos(i, j)];
    return jmat_scale(rtilde[inc2_pos(j, i)], -1.0);
  }

  // Torsion of the canonical connection, T^a_{ij}.
  Jet torsion(int a, int i, int j) const { return eta[i][a][j] - eta[j][a][i]; }

  // Canonical curvature operator: F |-> sum_P F^P form(Rtilde_P).
  FormValue rtilde_op(const FormValue& f) const {
    auto raised = raise2(geo.mv, f);
    FormValue out = rtilde_form[0] * raised[0];
    for (int p = 1; p < 6; ++p) out = out + rtilde_form[p] * raised[p];
    return out;
  }
};

inline HermitianSample make_hermitian_sample(const GeometrySample& geo,
                                             const AlmostComplex& ac) {
  HermitianSample h{geo,
                    ac.endo,
                    ac.omega,
                    {},
                    {},
                    {},
                    {},
                    {},
                    FormValue{},
                    FormValue{},
                    FormValue{},
                    Jet{},
                    Jet{},
                    Jet{},
                    FormValue{},
                    FormValue{}};
  const MetricValue& mv = geo.mv;

  for (int i = 0; i < 4; ++i) {
    JMat di;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) di[a][b] = partial(h.I[a][b], i);
    }
    h.nabla_I[i] = jmat_add(di, jmat_commutator(geo.gamma[i], h.I));
    h.eta[i] = jmat_scale(jmat_mul(h.nabla_I[i], h.I), 0.5);
    h.gamma_tilde[i] = jmat_add(geo.gamma[i], h.eta[i]);
  }

  for (int p = 0; p < 6; ++p) {
    int i = kInc2[p][0], j = kInc2[p][1];
    JMat di;
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        di[a][b] = partial(h.gamma_tilde[j][a][b], i) -
                   partial(h.gamma_tilde[i][a][b], j);
      }
    }
    JMat comm = jmat_commutator(h.gamma_tilde[i], h.gamma_tilde[j]);
    h.rtilde[p] = jmat_scale(jmat_add(di, comm), -1.0);
    h.rtilde_form[p] = form_of_endo(mv, h.rtilde[p]);
  }

  h.gamma1 = FormValue::zero(2, mv.base, h.rtilde[0][0][0].ord);
  for (int p = 0; p < 6; ++p) {
    h.gamma1.c[p] = jmat_trace(jmat_mul(h.rtilde[p], h.I)) * (-0.5);
  }

  FormValue domega = exterior_d(h.omega);
  h.theta = lee_form(mv, h.omega, domega);
  h.itheta = apply_I_1form(h.theta, h.I);
  h.delta_theta = codifferential(mv, h.theta).c[0];
  h.theta_norm2 = inner1(mv, h.theta, h.theta);
  h.kappa = inner_std2(mv, geo.wop(h.omega), h.omega) * 3.0;

  // rho^I_{jk} = I^a_j Ric'_{ak} with Ric' the I-invariant part of Ricci.
  JMat it = jmat_transpose(h.I);
  JMat ric_inv =
      jmat_scale(jmat_add(geo.ric, jmat_mul(it, jmat_mul(geo.ric, h.I))), 0.5);
  h.rho_I = mat_to_form(jmat_mul(it, ric_inv), mv.base);

  // psi: antisymmetric part of I^T (d+ theta).
  FormValue dpt = sd_part(mv, exterior_d(h.theta));
  JMat bp = jmat_mul(it, form_to_mat(dpt));
  JMat bpa = jmat_scale(jmat_sub(bp, jmat_transpose(bp)), 0.5);
  h.psi = mat_to_form(bpa, mv.base);
  return h;
}

inline HermitianSample make_hermitian_sample(const GeometrySample& geo,
                                             const FormValue& omega) {
  return make_hermitian_sample(geo, structure_from_form(geo.mv, omega));
}

// Nijenhuis tensor N^a_{ij} (coordinate formula, no connection needed).
inline std::array<std::array<Jet, 4>, 6> nijenhuis_tensor(const JMat& i_endo) {
  std::array<std::array<std::array<Jet, 4>, 4>, 4> d;  // d[k][a][b] = d_k I^a_b
  for (int k = 0; k < 4; ++k) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) d[k][a][b] = partial(i_endo[a][b], k);
    }
  }
  std::array<std::array<Jet, 4>, 6> n;
  for (int p = 0; p < 6; ++p) {
    int i = kInc2[p][0], j = kInc2[p][1];
    for (int a = 0; a < 4; ++a) {
      Jet s = jet_constant(0.0, i_endo[0][0].base, d[0][0][0].ord);
      for (int m = 0; m < 4; ++m) {
        s = s + i_endo[m][i] * (d[m][a][j] - d[j][a][m]) -
            i_endo[m][j] * (d[m][a][i] - d[i][a][m]);
      }
      n[p][a] = s;
    }
  }
  return n;
}

struct GaugeSample {
  int seed_index = 0;   // which candidate seed survived projection
  FormValue phi;        // unit anti-invariant form, |phi|_std = sqrt(2)
  JMat I1;              // endo(phi)
  JMat I2;              // I1 I
  FormValue a, b, c;    // connection 1-forms, order 2
  FormValue curv;       // a wedge c, gauge invariant
};

// Build a local gauge from the first seed whose anti-invariant projection
// has norm at least seed_floor.
inline GaugeSample make_gauge_sample(const HermitianSample& h,
                                     const std::vector<FormValue>& seeds,
                                     double seed_floor = 1e-3) {
  const MetricValue& mv = h.geo.mv;
  int chosen = -1;
  FormValue phi;
  for (int k = 0; k < static_cast<int>(seeds.size()); ++k) {
    FormValue cand = proj_anti_invariant(seeds[k], h.I);
    Jet n2 = form_inner(mv, cand, cand);
    if (n2.value() > seed_floor * seed_floor) {
      phi = cand * jet_recip(jet_sqrt(n2));
      chosen = k;
      break;
    }
  }
  if (chosen < 0) {
    throw Error(ErrorKind::gauge_degenerate,
                "every gauge seed projects to nearly zero", mv.base);
  }

  GaugeSample gs;
  gs.seed_index = chosen;
  gs.phi = phi;
  gs.I1 = endo_of_form(mv, phi);
  JMat sq =
      jmat_add(jmat_mul(gs.I1, gs.I1), jmat_identity(mv.base, phi.min_ord()));
  if (jmat_max_value(sq) > 1e-6) {
    throw Error(ErrorKind::gauge_degenerate,
                "gauge seed does not define a complex structure", mv.base);
  }
  gs.I2 = jmat_mul(gs.I1, h.I);

  gs.a = FormValue::zero(1, mv.base, h.nabla_I[0][0][0].ord);
  gs.b = FormValue::zero(1, mv.base, h.nabla_I[0][0][0].ord);
  gs.c = FormValue::zero(1, mv.base, h.nabla_I[0][0][0].ord);
  for (int k = 0; k < 4; ++k) {
    gs.a.c[k] = jmat_trace(jmat_mul(h.nabla_I[k], gs.I2)) * (-0.25);
    gs.c.c[k] = jmat_trace(jmat_mul(h.nabla_I[k], gs.I1)) * (-0.25);
    JMat di1;
    for (int x = 0; x < 4; ++x) {
      for (int y = 0; y < 4; ++y) di1[x][y] = partial(gs.I1[x][y], k);
    }
    JMat nt_i1 = jmat_add(di1, jmat_commutator(h.gamma_tilde[k], gs.I1));
    gs.b.c[k] = jmat_trace(jmat_mul(nt_i1, gs.I2)) * 0.25;
  }
  gs.curv = wedge(gs.a, gs.c);
  return gs;
}

// Canonical curvature by the decomposition route: starting from the metric
// curvature, add the exterior covariant derivative of eta, the eta
// commutator, and the torsion correction.  Used as a cross-check on the
// direct computation in make_hermitian_sample.
inline std::array<JMat, 6> rtilde_decomposed(const HermitianSample& h) {
  const GeometrySample& geo = h.geo;
  std::array<std::array<JMat, 4>, 4> nt_eta;  // (nabla~_i eta)_j
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      JMat di;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) di[a][b] = partial(h.eta[j][a][b], i);
      }
      JMat m = jmat_add(di, jmat_commutator(h.gamma_tilde[i], h.eta[j]));
      for (int k = 0; k < 4; ++k) {
        m = jmat_sub(m, jmat_scale(h.eta[k], h.gamma_tilde[i][k][j]));
      }
      nt_eta[i][j] = m;
    }
  }
  std::array<JMat, 6> out;
  for (int p = 0; p < 6; ++p) {
    int i = kInc2[p][0], j = kInc2[p][1];
    JMat m = jmat_sub(geo.riem[p], jmat_sub(nt_eta[i][j], nt_eta[j][i]));
    m = jmat_add(m, jmat_commutator(h.eta[i], h.eta[j]));
    for (int k = 0; k < 4; ++k) {
      m = jmat_sub(m, jmat_scale(h.eta[k], h.torsion(k, i, j)));
    }
    out[p] = m;
  }
  return out;
}

struct JStructure {
  JMat J;
  FormValue omega_J;
  FormValue rho_J;  // J^a_j Ric'_{ak}, order 1
};

inline JStructure make_j_structure(const GeometrySample& geo,
                                   const FormValue& omega_J) {
  AlmostComplex ac = structure_from_form(geo.mv, omega_J);
  JMat jt = jmat_transpose(ac.endo);
  JMat ric_inv = jmat_scale(
      jmat_add(geo.ric, jmat_mul(jt, jmat_mul(geo.ric, ac.endo))), 0.5);
  return JStructure{ac.endo, ac.omega,
                    mat_to_form(jmat_mul(jt, ric_inv), geo.mv.base)};
}

}  // namespace fourframes
