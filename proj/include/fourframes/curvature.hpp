#pragma once

// Curvature data of a metric at a point.
//
// Sign convention: R(X, Y) = -[nabla_X, nabla_Y] + nabla_[X,Y], so on the
// round sphere the Ricci form is positive.  With metric jets of order 3 the
// Christoffel symbols hold order 2 and every curvature quantity order 1.

#include <array>

#include "fourframes/forms.hpp"

namespace fourframes {

struct GeometrySample {
  MetricValue mv;
  // (gamma[i])^a_b = Gamma^a_{i b}; symmetric in (i, b).
  std::array<JMat, 4> gamma;
  // riem[P] = R(d_i, d_j) as an endomorphism, P the increasing pair (i, j).
  std::array<JMat, 6> riem;
  std::array<FormValue, 6> riem_form;  // riem[P] lowered to a 2-form
  JMat ric;                            // Ricci, bilinear components
  Jet s;                               // scalar curvature
  JMat ric0;                           // trace-free Ricci, bilinear
  JMat hmat;                           // (Ric0 + (s/12) g) / 2, bilinear
  JMat hend;                           // endomorphism of hmat
  std::array<FormValue, 3> sd_basis;   // |.|_std = 1, from 01+23, 02+31, 03+12
  std::array<FormValue, 3> asd_basis;  // from 01-23, 02-31, 03-12

  const JMat& gamma_at(int i) const { return gamma[i]; }

  // R(d_i, d_j) with sign for any index order.
  JMat riem_at(int i, int j) const {
    if (i == j) return jmat_zero(mv.base, riem[0][0][0].ord);
    if (i < j) return riem[inc2_pos(i, j)];
    return jmat_scale(riem[inc2_pos(j, i)], -1.0);
  }

  // Fully lowered curvature g_{ka} (R_{ij})^a_l.
  Jet riem_lowered(int k, int l, int i, int j) const {
    JMat r = riem_at(i, j);
    Jet s0 = mv.g[k][0] * r[0][l];
    for (int a = 1; a < 4; ++a) s0 = s0 + mv.g[k][a] * r[a][l];
    return s0;
  }

  // Curvature operator on 2-forms: F |-> sum_P F^P riem_form[P].
  FormValue rop(const FormValue& f) const {
    auto raised = raise2(mv, f);
    FormValue out = riem_form[0] * raised[0];
    for (int p = 1; p < 6; ++p) out = out + riem_form[p] * raised[p];
    return out;
  }

  // Kulkarni-Nomizu action of h: F |-> form({g^{-1} h, endo(F)}).
  FormValue h_wedge_g_op(const FormValue& f) const {
    JMat ef = endo_of_form(mv, f);
    return form_of_endo(mv, jmat_anticommutator(hend, ef));
  }

  // Weyl operator.
  FormValue wop(const FormValue& f) const {
    return rop(f) - h_wedge_g_op(f);
  }
};

namespace detail {

inline FormValue constant_2form(const std::array<double, 6>& comps,
                                const Vec4& base, int ord) {
  FormValue f = FormValue::zero(2, base, ord);
  for (int p = 0; p < 6; ++p) f.c[p] = jet_constant(comps[p], base, ord);
  return f;
}

// Gram-Schmidt inside one duality eigenspace; output is orthonormal for the
// tensor pairing (|.|_std = 1).
inline std::array<FormValue, 3> duality_basis(const MetricValue& mv,
                                              double side) {
  const std::array<std::array<double, 6>, 3> seeds = {{
      {1, 0, 0, 0, 0, side},        // 01 + side 23
      {0, 1, 0, 0, -side, 0},       // 02 + side 31
      {0, 0, 1, side, 0, 0},        // 03 + side 12
  }};
  std::array<FormValue, 3> basis;
  int filled = 0;
  for (const auto& seed : seeds) {
    FormValue f = constant_2form(seed, mv.base, kJetOrder);
    FormValue proj = side > 0 ? sd_part(mv, f) : asd_part(mv, f);
    for (int k = 0; k < filled; ++k) {
      proj = proj - basis[k] * inner_std2(mv, proj, basis[k]);
    }
    Jet n2 = inner_std2(mv, proj, proj);
    if (!(n2.value() > 1e-16)) {
      throw Error(ErrorKind::singular_system,
                  "degenerate duality seed during basis construction",
                  mv.base);
    }
    basis[filled] = proj * jet_recip(jet_sqrt(n2));
    ++filled;
  }
  return basis;
}

}  // namespace detail

inline GeometrySample make_geometry_sample(const MetricValue& mv) {
  GeometrySample out{mv, {}, {}, {}, {}, Jet{}, {}, {}, {}, {}, {}};
  const Vec4& p = mv.base;

  // dg[i] = partial_i g.
  std::array<JMat, 4> dg;
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) dg[i][a][b] = partial(mv.g[a][b], i);
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        Jet s0 = (dg[i][0][b] + dg[b][0][i] - dg[0][i][b]) * mv.ginv[a][0];
        for (int l = 1; l < 4; ++l) {
          s0 = s0 + (dg[i][l][b] + dg[b][l][i] - dg[l][i][b]) * mv.ginv[a][l];
        }
        out.gamma[i][a][b] = s0 * 0.5;
      }
    }
  }

  for (int pidx = 0; pidx < 6; ++pidx) {
    int i = kInc2[pidx][0], j = kInc2[pidx][1];
    JMat di;  // partial_i gamma_j - partial_j gamma_i
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        di[a][b] = partial(out.gamma[j][a][b], i) -
                   partial(out.gamma[i][a][b], j);
      }
    }
    JMat comm = jmat_commutator(out.gamma[i], out.gamma[j]);
    out.riem[pidx] = jmat_scale(jmat_add(di, comm), -1.0);
    out.riem_form[pidx] = form_of_endo(mv, out.riem[pidx]);
  }

  // Ric_{jk} = sum_a (R_{ja})^a_k.
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      Jet s0 = jet_constant(0.0, p, out.riem[0][0][0].ord);
      for (int a = 0; a < 4; ++a) {
        if (a == j) continue;
        JMat r = out.riem_at(j, a);
        s0 = s0 + r[a][k];
      }
      out.ric[j][k] = s0;
    }
  }

  Jet s0 = jet_constant(0.0, p, out.ric[0][0].ord);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) s0 = s0 + mv.ginv[j][k] * out.ric[j][k];
  }
  out.s = s0;

  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      out.ric0[j][k] = out.ric[j][k] - mv.g[j][k] * (out.s * 0.25);
      out.hmat[j][k] =
          (out.ric0[j][k] + mv.g[j][k] * (out.s / 12.0)) * 0.5;
    }
  }
  out.hend = jmat_mul(mv.ginv, out.hmat);

  out.sd_basis = detail::duality_basis(mv, +1.0);
  out.asd_basis = detail::duality_basis(mv, -1.0);
  return out;
}

inline GeometrySample make_geometry_sample(const MetricField& gf,
                                           const Vec4& p) {
  return make_geometry_sample(gf.eval(p));
}

// Value-level matrix of an operator on 2-forms in the six-dimensional
// orthonormal basis (sd_basis, asd_basis).
template <class Op>
std::array<std::array<double, 6>, 6> operator_matrix6(
    const GeometrySample& geo, Op&& op) {
  std::array<FormValue, 6> basis;
  for (int k = 0; k < 3; ++k) {
    basis[k] = geo.sd_basis[k];
    basis[3 + k] = geo.asd_basis[k];
  }
  std::array<std::array<double, 6>, 6> m{};
  for (int a = 0; a < 6; ++a) {
    FormValue im = op(basis[a]);
    for (int b = 0; b < 6; ++b) {
      m[a][b] = inner_std2(geo.mv, im, basis[b]).value();
    }
  }
  return m;
}

}  // namespace fourframes
