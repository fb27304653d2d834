#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fourframes/hermitian.hpp"

using namespace fourframes;

namespace {

Box unit_box() { return Box{{-1.0, -1.0, -1.0, -1.0}, {1.0, 1.0, 1.0, 1.0}}; }

FormValue const2(const std::array<double, 6>& comps, const Vec4& base) {
  FormValue f = FormValue::zero(2, base, kJetOrder);
  for (int p = 0; p < 6; ++p) f.c[p] = jet_constant(comps[p], base, kJetOrder);
  return f;
}

// The three standard self-dual forms on the flat chart.
FormValue sigma1(const Vec4& b) { return const2({1, 0, 0, 0, 0, 1}, b); }
FormValue sigma2(const Vec4& b) { return const2({0, 1, 0, 0, -1, 0}, b); }
FormValue sigma3(const Vec4& b) { return const2({0, 0, 1, 1, 0, 0}, b); }

MetricField flat_metric() {
  auto ev = [](const Vec4& p, int ord) {
    JMat g = jmat_zero(p, ord);
    for (int i = 0; i < 4; ++i) g[i][i] = jet_constant(1.0, p, ord);
    return g;
  };
  return MetricField{ev, unit_box(), +1.0};
}

Jet conf_exponent(const Vec4& p, int ord) {
  return jet_coordinate(0, p, ord) * 0.1 +
         jet_coordinate(1, p, ord) * jet_coordinate(2, p, ord) * 0.2 -
         jet_coordinate(3, p, ord) * 0.15;
}

MetricField conformal_metric() {
  auto ev = [](const Vec4& p, int ord) {
    Jet f = jet_exp(conf_exponent(p, ord) * 2.0);
    JMat g = jmat_zero(p, ord);
    for (int i = 0; i < 4; ++i) g[i][i] = f;
    return g;
  };
  return MetricField{ev, unit_box(), +1.0};
}

MetricField sphere_metric() {
  auto ev = [](const Vec4& p, int ord) {
    Jet r2 = jet_constant(1.0, p, ord);
    for (int i = 0; i < 4; ++i) {
      Jet x = jet_coordinate(i, p, ord);
      r2 = r2 + x * x;
    }
    Jet f = jet_recip(r2 * r2) * 4.0;
    JMat g = jmat_zero(p, ord);
    for (int i = 0; i < 4; ++i) g[i][i] = f;
    return g;
  };
  return MetricField{ev, unit_box(), +1.0};
}

// Rotation family on the flat chart: omega turns inside the self-dual
// 3-space with angles phi(x), psi(x).
struct RotationAngles {
  Jet phi, psi;
};

FormValue rotated_omega(const RotationAngles& an, const Vec4& p) {
  Jet c1 = jet_cos(an.phi) * jet_cos(an.psi);
  Jet c2 = jet_cos(an.phi) * jet_sin(an.psi);
  Jet c3 = jet_sin(an.phi);
  return sigma1(p) * c1 + sigma2(p) * c2 + sigma3(p) * c3;
}

FormValue rotated_seed(const RotationAngles& an, const Vec4& p) {
  return sigma1(p) * (-jet_sin(an.psi)) + sigma2(p) * jet_cos(an.psi);
}

RotationAngles independent_angles(const Vec4& p, int ord = kJetOrder) {
  Jet phi = jet_constant(0.3, p, ord) + jet_coordinate(0, p, ord) * 0.4;
  Jet psi = jet_constant(0.2, p, ord) + jet_coordinate(1, p, ord) * 0.5;
  return {phi, psi};
}

// Fundamental form of the constant standard structure under e^{2u} delta.
FormValue conformal_omega(const Vec4& p) {
  return sigma1(p) * jet_exp(conf_exponent(p, kJetOrder) * 2.0);
}

FormValue one_form(const std::array<Jet, 4>& comps, const Vec4& base) {
  FormValue f = FormValue::zero(1, base, comps[0].ord);
  for (int i = 0; i < 4; ++i) f.c[i] = comps[i];
  return f;
}

double form_diff(const FormValue& x, const FormValue& y) {
  return form_max_value(x - y);
}

}  // namespace

TEST_CASE("structure completion from an orthogonal pair") {
  MetricField gf = flat_metric();
  Vec4 p{0.1, -0.2, 0.3, 0.05};
  MetricValue mv = gf.eval(p);

  AlmostComplex ac = structure_from_pair(mv, sigma2(p), sigma3(p));
  CHECK(form_diff(ac.omega, sigma1(p)) < 1e-12);

  // Quaternion relations of the three associated endomorphisms.
  JMat s1 = endo_of_form(mv, sigma1(p));
  JMat s2 = endo_of_form(mv, sigma2(p));
  JMat s3 = endo_of_form(mv, sigma3(p));
  JMat id = jmat_identity(p, kJetOrder);
  CHECK(jmat_max_value(jmat_add(jmat_mul(s1, s1), id)) < 1e-12);
  CHECK(jmat_max_value(jmat_sub(jmat_mul(s1, s2), s3)) < 1e-12);
  CHECK(jmat_max_value(jmat_sub(jmat_mul(s2, s3), s1)) < 1e-12);
  CHECK(jmat_max_value(jmat_sub(jmat_mul(s3, s1), s2)) < 1e-12);

  // Cyclic behaviour: any adjacent pair of the triple reproduces the third.
  AlmostComplex c2 = structure_from_pair(mv, sigma3(p), sigma1(p));
  CHECK(form_diff(c2.omega, sigma2(p)) < 1e-12);
  AlmostComplex c3 = structure_from_pair(mv, sigma1(p), sigma2(p));
  CHECK(form_diff(c3.omega, sigma3(p)) < 1e-12);

  // Validation: scaling breaks unit norm, sigma2 twice breaks orthogonality,
  // and a mixed-duality pair fails the squaring test.
  CHECK_THROWS_MATCHES(
      structure_from_pair(mv, sigma2(p) * 2.0, sigma3(p)), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::not_orthonormal;
      }));
  CHECK_THROWS_MATCHES(
      structure_from_pair(mv, sigma2(p), sigma2(p)), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::not_orthonormal;
      }));
  FormValue mirror2 = const2({0, 1, 0, 0, 1, 0}, p);  // anti-self-dual
  CHECK_THROWS_MATCHES(
      structure_from_pair(mv, sigma2(p), mirror2), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::wrong_orientation;
      }));
}

TEST_CASE("canonical connection is metric and parallelizes the structure") {
  MetricField conf = conformal_metric();
  MetricField flat = flat_metric();
  const Vec4 pts[] = {{0.2, -0.3, 0.1, 0.4}, {-0.35, 0.15, 0.25, -0.2}};
  for (const Vec4& p : pts) {
    // Conformal metric with the constant standard structure, and the flat
    // metric with a rotating structure: both must satisfy the identities.
    for (int which = 0; which < 2; ++which) {
      const MetricField& gf = which == 0 ? conf : flat;
      GeometrySample geo = make_geometry_sample(gf, p);
      FormValue om = which == 0 ? conformal_omega(p)
                                : rotated_omega(independent_angles(p), p);
      HermitianSample h = make_hermitian_sample(geo, om);

      // nabla~ I = 0 and nabla~ g = 0 define the canonical connection.
      for (int k = 0; k < 4; ++k) {
        JMat di;
        for (int x = 0; x < 4; ++x) {
          for (int y = 0; y < 4; ++y) di[x][y] = partial(h.I[x][y], k);
        }
        JMat nt = jmat_add(di, jmat_commutator(h.gamma_tilde[k], h.I));
        CHECK(jmat_max_value(nt) < 1e-10);
      }
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          for (int k = 0; k < 4; ++k) {
            Jet lc = partial(geo.mv.g[j][k], i);
            Jet can = lc;
            for (int m = 0; m < 4; ++m) {
              lc = lc - geo.gamma[i][m][j] * geo.mv.g[m][k] -
                   geo.gamma[i][m][k] * geo.mv.g[j][m];
              can = can - h.gamma_tilde[i][m][j] * geo.mv.g[m][k] -
                    h.gamma_tilde[i][m][k] * geo.mv.g[j][m];
            }
            CHECK(std::fabs(lc.value()) < 1e-10);
            CHECK(std::fabs(can.value()) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("canonical curvature routes agree and commute with the structure") {
  MetricField conf = conformal_metric();
  MetricField flat = flat_metric();
  const Vec4 pts[] = {{0.15, 0.3, -0.2, 0.1}};
  for (const Vec4& p : pts) {
    for (int which = 0; which < 2; ++which) {
      const MetricField& gf = which == 0 ? conf : flat;
      GeometrySample geo = make_geometry_sample(gf, p);
      FormValue om = which == 0 ? conformal_omega(p)
                                : rotated_omega(independent_angles(p), p);
      HermitianSample h = make_hermitian_sample(geo, om);
      auto decomposed = rtilde_decomposed(h);
      for (int q = 0; q < 6; ++q) {
        CHECK(jmat_max_value(jmat_sub(h.rtilde[q], decomposed[q])) < 1e-10);
        CHECK(jmat_max_value(jmat_commutator(h.rtilde[q], h.I)) < 1e-9);
      }
    }
  }
}

TEST_CASE("rotation family gauge forms match the hand computation") {
  MetricField flat = flat_metric();
  Vec4 p{0.25, -0.15, 0.3, -0.4};
  GeometrySample geo = make_geometry_sample(flat, p);
  RotationAngles an = independent_angles(p);
  HermitianSample h = make_hermitian_sample(geo, rotated_omega(an, p));

  GaugeSample gs = make_gauge_sample(h, {rotated_seed(an, p)});
  CHECK(gs.seed_index == 0);

  // With this seed the connection forms are exactly
  //   a = -d phi, b = sin(phi) d psi, c = cos(phi) d psi.
  Jet z = jet_constant(0.0, p, kJetOrder - 1);
  FormValue want_a =
      one_form({jet_constant(-0.4, p, kJetOrder - 1), z, z, z}, p);
  FormValue want_b = one_form({z, jet_sin(an.phi) * 0.5, z, z}, p);
  FormValue want_c = one_form({z, jet_cos(an.phi) * 0.5, z, z}, p);
  CHECK(form_diff(gs.a, want_a) < 1e-9);
  CHECK(form_diff(gs.b, want_b) < 1e-9);
  CHECK(form_diff(gs.c, want_c) < 1e-9);

  // Structural identities of the gauge decomposition.
  for (int k = 0; k < 4; ++k) {
    JMat want_nabla = jmat_add(jmat_scale(gs.I2, gs.a.c[k]),
                               jmat_scale(gs.I1, gs.c.c[k]));
    CHECK(jmat_max_value(jmat_sub(h.nabla_I[k], want_nabla)) < 1e-9);
    JMat want_eta = jmat_scale(
        jmat_sub(jmat_scale(gs.I2, gs.c.c[k]), jmat_scale(gs.I1, gs.a.c[k])),
        0.5);
    CHECK(jmat_max_value(jmat_sub(h.eta[k], want_eta)) < 1e-9);
  }

  // gamma1 = -db, and on a flat background gamma1 also equals a wedge c.
  CHECK(form_diff(h.gamma1, -exterior_d(gs.b)) < 1e-9);
  CHECK(form_diff(h.gamma1, gs.curv) < 1e-9);

  // Seed fallback: an invariant seed projects to zero and is skipped.
  GaugeSample fb = make_gauge_sample(h, {rotated_omega(an, p), rotated_seed(an, p)});
  CHECK(fb.seed_index == 1);
  CHECK_THROWS_MATCHES(
      make_gauge_sample(h, {rotated_omega(an, p)}), Error,
      Catch::Matchers::Predicate<Error>([](const Error& e) {
        return e.kind() == ErrorKind::gauge_degenerate;
      }));
}

TEST_CASE("integrable structures satisfy the Lee form gauge relations") {
  MetricField conf = conformal_metric();
  const Vec4 pts[] = {{0.2, -0.3, 0.1, 0.4}, {-0.25, 0.05, 0.35, -0.15}};
  for (const Vec4& p : pts) {
    GeometrySample geo = make_geometry_sample(conf, p);
    HermitianSample h = make_hermitian_sample(geo, conformal_omega(p));

    // theta = 2 du for the conformal factor e^{2u}.
    FormValue du = exterior_d(
        FormValue{0, p, {conf_exponent(p, kJetOrder)}});
    CHECK(form_diff(h.theta, du * 2.0) < 1e-10);

    GaugeSample gs = make_gauge_sample(h, {sigma3(p)});
    CHECK(form_diff(gs.a, apply_I_1form(h.theta, gs.I1) * (-0.5)) < 1e-9);
    CHECK(form_diff(gs.c, apply_I_1form(h.theta, gs.I2) * 0.5) < 1e-9);
    CHECK(form_diff(gs.c, -apply_I_1form(gs.a, h.I)) < 1e-9);
    CHECK(form_diff(h.theta, apply_I_1form(gs.a, gs.I1) * 2.0) < 1e-9);
  }

  // Ricci form anchor: the round sphere is Einstein with Ric = 3g, so
  // rho^I = 3 omega for any compatible constant structure.
  MetricField sph = sphere_metric();
  Vec4 q{0.3, -0.2, 0.1, 0.4};
  GeometrySample geo = make_geometry_sample(sph, q);
  Jet r2 = jet_constant(1.0, q, kJetOrder);
  for (int i = 0; i < 4; ++i) {
    Jet x = jet_coordinate(i, q, kJetOrder);
    r2 = r2 + x * x;
  }
  FormValue om = sigma1(q) * (jet_recip(r2 * r2) * 4.0);
  HermitianSample h = make_hermitian_sample(geo, om);
  CHECK(form_diff(h.rho_I, h.omega * 3.0) < 1e-9);

  JStructure js = make_j_structure(geo, om);
  CHECK(form_diff(js.rho_J, h.rho_I) < 1e-12);
}

TEST_CASE("nijenhuis tensor separates integrable from generic structures") {
  MetricField conf = conformal_metric();
  MetricField flat = flat_metric();
  Vec4 p{0.2, 0.25, -0.3, 0.15};

  GeometrySample geo_c = make_geometry_sample(conf, p);
  HermitianSample hc = make_hermitian_sample(geo_c, conformal_omega(p));
  auto n0 = nijenhuis_tensor(hc.I);
  for (int q = 0; q < 6; ++q) {
    for (int a = 0; a < 4; ++a) CHECK(std::fabs(n0[q][a].value()) < 1e-12);
  }

  GeometrySample geo_f = make_geometry_sample(flat, p);
  HermitianSample hf =
      make_hermitian_sample(geo_f, rotated_omega(independent_angles(p), p));
  auto n1 = nijenhuis_tensor(hf.I);
  double mag = 0.0;
  for (int q = 0; q < 6; ++q) {
    for (int a = 0; a < 4; ++a) mag = std::max(mag, std::fabs(n1[q][a].value()));
  }
  CHECK(mag > 1e-3);
}
