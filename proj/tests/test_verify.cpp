#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fourframes/verify.hpp"

using namespace fourframes;

namespace {

using ParamMap = std::map<std::string, std::string>;

// Every shipped model instance, in the order used throughout the suite.
const std::vector<std::pair<std::string, ParamMap>>& instances() {
  static const std::vector<std::pair<std::string, ParamMap>> v = {
      {"flat", {{"variant", "kahler"}}},
      {"flat", {{"variant", "dependent"}}},
      {"flat", {{"variant", "independent"}}},
      {"gibbons-hawking", {{"variant", "linear"}, {"a", "1"}, {"b", "0"}}},
      {"gibbons-hawking", {{"variant", "linear"}, {"a", "0"}, {"b", "1"}}},
      {"gibbons-hawking",
       {{"variant", "linear"}, {"a", "1"}, {"b", "0"}, {"rot", "constant"}}},
      {"gibbons-hawking",
       {{"variant", "linear"}, {"a", "1"}, {"b", "0"}, {"rot", "xdep"}}},
      {"gibbons-hawking", {{"variant", "pointlike"}}},
      {"gibbons-hawking", {{"variant", "nonharmonic"}}},
      {"nil3", {}},
      {"ak4", {{"w", "zero"}, {"lambda", "one"}}},
      {"ak4", {{"w", "holo"}, {"lambda", "one"}}},
      {"ak4", {{"w", "holo"}, {"lambda", "balanced"}}},
      {"ak4", {{"w", "nonholo"}, {"lambda", "one"}}},
      {"ak4", {{"w", "planar"}, {"lambda", "one"}}},
  };
  return v;
}

const CheckRecord* find_check(const VerificationReport& r,
                              const std::string& id) {
  for (const CheckRecord& c : r.checks) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

double fitted_value(const CheckRecord& rec, const std::string& key) {
  for (const auto& [k, v] : rec.fitted) {
    if (k == key) return v;
  }
  FAIL("missing fitted constant '" << key << "' on check " << rec.id);
  return 0.0;
}

VerificationReport run(const Model& m, std::vector<std::string> checks,
                       int samples, std::uint64_t seed = 42) {
  RunOptions opt;
  opt.checks = std::move(checks);
  opt.samples = samples;
  opt.seed = seed;
  return run_checks(m, opt);
}

}  // namespace

TEST_CASE("check registry covers the mandated identifiers") {
  const auto& reg = check_registry();
  REQUIRE(reg.size() >= 28);

  std::set<std::string> ids;
  for (const auto& spec : reg) {
    CAPTURE(spec.id);
    REQUIRE_FALSE(spec.id.empty());
    REQUIRE_FALSE(spec.anchor.empty());
    REQUIRE(spec.tol > 0.0);
    REQUIRE(ids.insert(spec.id).second);  // no duplicate ids
  }

  const std::vector<std::string> mandated = {
      "frame_gram",        "frame_wedge",
      "frame_closed",      "q_signature",
      "hodge_involution",  "lee_form_defining",
      "eq28",              "eq29",
      "eq_ks",             "eq_phi",
      "eq_wplus",          "lemma_curvC2",
      "comp_curv_crosscheck", "chern_closed",
      "chern_gauge",       "prop42",
      "prop_class5_i",     "prop_class5_ii",
      "prop_class5_iii",   "prop_class5_iv",
      "thm1_theta_kappa",  "thm1_omegaJ_closed",
      "flat_gen",          "hol_vhk",
      "prop_1dimhol",      "tak_rels",
      "tak_splus",         "tak_kappa",
      "tak_a_norm",        "tak_log_laplacian",
      "holonomy_rank_bound"};
  for (const std::string& id : mandated) {
    CAPTURE(id);
    REQUIRE(ids.count(id) == 1);
  }
}

TEST_CASE("long alias resolves to the registered check") {
  REQUIRE(resolve_check_alias("prop42_curvature_characterization") ==
          "prop42");
  REQUIRE(resolve_check_alias("prop42") == "prop42");
  REQUIRE(resolve_check_alias("eq28") == "eq28");

  Model m = make_model("nil3", {});
  auto sel = resolve_checks(m, {"prop42_curvature_characterization"});
  REQUIRE(sel.size() == 1);
  REQUIRE(sel[0]->id == "prop42");
}

TEST_CASE("glob selection filters to applicable checks") {
  Model ak = make_model("ak4", {{"w", "holo"}, {"lambda", "one"}});
  auto sel = resolve_checks(ak, {"tak_*"});
  REQUIRE(sel.size() >= 6);
  std::set<std::string> got;
  for (auto* s : sel) {
    REQUIRE(s->id.rfind("tak_", 0) == 0);
    got.insert(s->id);
  }
  REQUIRE(got.count("tak_kappa") == 1);
  REQUIRE(got.count("tak_sigma_flat") == 1);

  Model fl = make_model("flat", {{"variant", "kahler"}});
  auto frames = resolve_checks(fl, {"frame_*"});
  REQUIRE(frames.size() == 3);

  // A glob that matches nothing applicable leaves the selection empty.
  Model n3 = make_model("nil3", {});
  REQUIRE_THROWS_AS(resolve_checks(n3, {"tak_*"}), Error);

  // "all" expands to exactly the applicable subset.
  auto all = resolve_checks(ak, {"all"});
  std::size_t applicable = 0;
  for (const auto& spec : check_registry()) {
    if (spec.applies(ak)) ++applicable;
  }
  REQUIRE(all.size() == applicable);
}

TEST_CASE("exact check requests are validated up front") {
  Model n3 = make_model("nil3", {});

  try {
    resolve_checks(n3, {"frame_gramm"});
    FAIL("unknown id accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::bad_config);
  }

  // Known id, but not applicable to this model.
  try {
    resolve_checks(n3, {"monopole_equation"});
    FAIL("inapplicable id accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::bad_config);
  }

  try {
    resolve_checks(n3, {});
    FAIL("empty selection accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::bad_config);
  }
}

TEST_CASE("run options are validated before computation") {
  Model m = make_model("flat", {{"variant", "kahler"}});

  RunOptions bad_samples;
  bad_samples.samples = 0;
  REQUIRE_THROWS_AS(run_checks(m, bad_samples), Error);

  RunOptions bad_tol;
  bad_tol.samples = 5;
  bad_tol.tol_overrides["frame_gram"] = -1.0;
  REQUIRE_THROWS_AS(run_checks(m, bad_tol), Error);

  RunOptions unknown_tol;
  unknown_tol.samples = 5;
  unknown_tol.tol_overrides["no_such_check"] = 1e-6;
  REQUIRE_THROWS_AS(run_checks(m, unknown_tol), Error);

  // Overrides may be spelled through the alias and land on the real id.
  RunOptions aliased;
  aliased.samples = 5;
  aliased.checks = {"prop42"};
  aliased.tol_overrides["prop42_curvature_characterization"] = 1e-3;
  VerificationReport r = run_checks(m, aliased);
  const CheckRecord* rec = find_check(r, "prop42");
  REQUIRE(rec != nullptr);
  REQUIRE(rec->tol == 1e-3);
}

TEST_CASE("holonomy estimation rejects undersized samples") {
  Model m = make_model("flat", {{"variant", "kahler"}});
  RunOptions opt;
  opt.checks = {"holonomy_rank_bound"};
  opt.samples = 2;
  try {
    run_checks(m, opt);
    FAIL("undersized run accepted");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::insufficient_samples);
  }
}

TEST_CASE("expected-pass manifests partition the applicable checks") {
  for (const auto& [id, params] : instances()) {
    Model m = make_model(id, params);
    CAPTURE(id, m.params);
    std::set<std::string> fails = known_failures(m);
    std::vector<std::string> expected = expected_check_ids(m);
    std::set<std::string> expected_set(expected.begin(), expected.end());

    // Disjoint, and together they cover exactly the applicable set.
    for (const std::string& f : fails) {
      REQUIRE(expected_set.count(f) == 0);
    }
    std::size_t applicable = 0;
    for (const auto& spec : check_registry()) {
      if (!spec.applies(m)) continue;
      ++applicable;
      bool in_expected = expected_set.count(spec.id) == 1;
      bool in_fails = fails.count(spec.id) == 1;
      REQUIRE(in_expected != in_fails);
    }
    REQUIRE(applicable == expected.size() + fails.size());
  }
}

TEST_CASE("every model passes its expected-pass manifest") {
  for (const auto& [id, params] : instances()) {
    Model m = make_model(id, params);
    CAPTURE(id, m.params);
    VerificationReport r = run(m, expected_check_ids(m), 12);
    for (const CheckRecord& c : r.checks) {
      CAPTURE(c.id, c.max_residual, c.tol);
      REQUIRE(c.pass);
    }
  }
}

TEST_CASE("documented negative controls fail loudly") {
  auto expect_failures = [](const Model& m) {
    std::set<std::string> fails = known_failures(m);
    REQUIRE_FALSE(fails.empty());
    VerificationReport r =
        run(m, std::vector<std::string>(fails.begin(), fails.end()), 8);
    REQUIRE(r.checks.size() == fails.size());
    for (const CheckRecord& c : r.checks) {
      CAPTURE(m.id, c.id, c.max_residual);
      REQUIRE_FALSE(c.pass);
      REQUIRE(c.max_residual > 1e-3);
    }
  };

  expect_failures(make_model("flat", {{"variant", "independent"}}));
  expect_failures(make_model(
      "gibbons-hawking",
      {{"variant", "linear"}, {"a", "1"}, {"b", "0"}, {"rot", "xdep"}}));
  expect_failures(make_model("gibbons-hawking", {{"variant", "pointlike"}}));
  expect_failures(make_model("gibbons-hawking", {{"variant", "nonharmonic"}}));
  expect_failures(make_model("ak4", {{"w", "nonholo"}, {"lambda", "one"}}));
}

TEST_CASE("reports serialize deterministically") {
  Model m = make_model("ak4", {{"w", "holo"}, {"lambda", "balanced"}});
  RunOptions opt;
  opt.samples = 10;
  opt.seed = 7;
  std::string first = report_to_json(run_checks(m, opt)).dump(2);
  std::string second = report_to_json(run_checks(m, opt)).dump(2);
  REQUIRE(first == second);

  // A different seed samples different points and produces different bytes.
  opt.seed = 8;
  std::string third = report_to_json(run_checks(m, opt)).dump(2);
  REQUIRE(first != third);
}

TEST_CASE("report fields follow the serialization contract") {
  Model m = make_model("nil3", {});
  RunOptions opt;
  opt.samples = 8;
  opt.seed = 3;
  VerificationReport r = run_checks(m, opt);
  nlohmann::ordered_json j = report_to_json(r);

  REQUIRE(j["model"] == "nil3");
  REQUIRE(j["seed"] == 3);
  REQUIRE(j["jet_order"] == kJetOrder);
  REQUIRE(j["params"].is_object());
  REQUIRE(j["checks"].is_array());
  REQUIRE(j["checks"].size() == r.checks.size());
  for (const auto& e : j["checks"]) {
    REQUIRE(e.contains("id"));
    REQUIRE(e.contains("anchor"));
    REQUIRE(e.contains("samples"));
    REQUIRE(e.contains("max_residual"));
    REQUIRE(e.contains("tol"));
    REQUIRE(e.contains("pass"));
    REQUIRE(e["samples"] == 8);
  }
  // No timestamps or other run-dependent metadata.
  REQUIRE(j.size() == 5);

  std::string text = report_to_text(r);
  REQUIRE(text.find("model: nil3") != std::string::npos);
  char summary[64];
  std::snprintf(summary, sizeof(summary), "%d/%d checks passed",
                static_cast<int>(r.checks.size()),
                static_cast<int>(r.checks.size()));
  REQUIRE(text.find(summary) != std::string::npos);
}

TEST_CASE("fitted constants expose the structure coefficients") {
  const int n = 12;

  // Flat Kahler: zero curvature span.
  {
    Model m = make_model("flat", {{"variant", "kahler"}});
    VerificationReport r = run(m, {"holonomy_rank_bound"}, n);
    REQUIRE(fitted_value(*find_check(r, "holonomy_rank_bound"), "rank") ==
            0.0);
  }

  // Linear Gibbons-Hawking: rank one, generator proportional to omega_I.
  {
    Model m = make_model("gibbons-hawking",
                         {{"variant", "linear"}, {"a", "1"}, {"b", "0"}});
    VerificationReport r = run(m, {"holonomy_rank_bound"}, n);
    const CheckRecord& rec = *find_check(r, "holonomy_rank_bound");
    REQUIRE(fitted_value(rec, "rank") == 1.0);
    REQUIRE(fitted_value(rec, "f0_norm") <= 1e-7);
  }

  // lambda = 1: gamma1~ = -rho^J, generator (omega_J - omega_I)/2.
  {
    Model m = make_model("ak4", {{"w", "holo"}, {"lambda", "one"}});
    VerificationReport r = run(
        m, {"tak_rels", "prop_1dimhol", "tak_sigma_flat", "holonomy_rank_bound"},
        n);
    REQUIRE(fitted_value(*find_check(r, "tak_rels"), "alpha") ==
            Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(fitted_value(*find_check(r, "prop_1dimhol"), "alpha") ==
            Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(fitted_value(*find_check(r, "tak_sigma_flat"), "exponent") ==
            Catch::Approx(0.0).margin(1e-9));
    const CheckRecord& hol = *find_check(r, "holonomy_rank_bound");
    REQUIRE(fitted_value(hol, "rank") == 1.0);
    REQUIRE(fitted_value(hol, "f0_norm") ==
            Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-9));
  }

  // Balanced lambda: gamma1~ = 0 and the generator is pure omega_J.
  {
    Model m = make_model("ak4", {{"w", "holo"}, {"lambda", "balanced"}});
    VerificationReport r =
        run(m, {"tak_rels", "tak_sigma_flat", "holonomy_rank_bound"}, n);
    REQUIRE(fitted_value(*find_check(r, "tak_rels"), "alpha") ==
            Catch::Approx(0.0).margin(1e-9));
    REQUIRE(fitted_value(*find_check(r, "tak_sigma_flat"), "exponent") ==
            Catch::Approx(1.0).margin(1e-9));
    const CheckRecord& hol = *find_check(r, "holonomy_rank_bound");
    REQUIRE(fitted_value(hol, "rank") == 1.0);
    REQUIRE(fitted_value(hol, "alpha") == Catch::Approx(0.0).margin(1e-9));
    REQUIRE(fitted_value(hol, "f0_norm") == Catch::Approx(1.0).margin(1e-9));
  }

  // Planar w: integrable structure with the same alpha = -1 pattern.
  {
    Model m = make_model("ak4", {{"w", "planar"}, {"lambda", "one"}});
    VerificationReport r = run(m, {"tak_rels", "prop_1dimhol"}, n);
    REQUIRE(fitted_value(*find_check(r, "tak_rels"), "alpha") ==
            Catch::Approx(-1.0).margin(1e-9));
    REQUIRE(fitted_value(*find_check(r, "prop_1dimhol"), "alpha") ==
            Catch::Approx(-1.0).margin(1e-9));
  }

  // Generic model: the images fill u(2).
  {
    Model m = make_model("ak4", {{"w", "nonholo"}, {"lambda", "one"}});
    VerificationReport r = run(m, {"holonomy_rank_bound"}, n);
    REQUIRE(fitted_value(*find_check(r, "holonomy_rank_bound"), "rank") ==
            4.0);
  }
}

TEST_CASE("gauge data is independent of the seed order where it must be") {
  for (const auto& [id, params] :
       std::vector<std::pair<std::string, ParamMap>>{
           {"gibbons-hawking", {{"variant", "linear"}, {"a", "1"}, {"b", "0"}}},
           {"nil3", {}},
           {"ak4", {{"w", "holo"}, {"lambda", "one"}}}}) {
    Model m = make_model(id, params);
    CAPTURE(id);
    VerifyContext ctx(m, sample_points(m.domain, 4, 7));
    for (int i = 0; i < ctx.npoints(); ++i) {
      const HermitianSample& h = ctx.herm(i);
      const GaugeSample& g0 = ctx.gauge(i, 0);
      const GaugeSample& g1 = ctx.gauge(i, 1);
      // The curvature 2-form a^c and the total connection norm are gauge
      // invariants; the Lee form relation holds in every gauge.
      REQUIRE(form_max_value(g0.curv - g1.curv) < 1e-9);
      Jet n0 = inner1(h.geo.mv, g0.a, g0.a) + inner1(h.geo.mv, g0.c, g0.c);
      Jet n1 = inner1(h.geo.mv, g1.a, g1.a) + inner1(h.geo.mv, g1.c, g1.c);
      REQUIRE(std::fabs((n0 - n1).value()) < 1e-9);
      for (const GaugeSample* g : {&g0, &g1}) {
        if (m.has_trait("hermitian")) {
          // Integrable case: theta = 2 I1 a in every gauge.
          REQUIRE(form_max_value(h.theta - apply_I_1form(g->a, g->I1) * 2.0) <
                  1e-9);
        } else {
          // Symplectic case: c = +Ia in every gauge.
          REQUIRE(form_max_value(g->c - apply_I_1form(g->a, h.I)) < 1e-9);
        }
      }
    }
  }
}
