#pragma once
// Command line front end: list the model and check registries, run
// verification suites, emit text or JSON reports.
//
// Exit code contract: 0 all selected checks pass, 1 at least one check
// failed, 2 configuration error (bad flags, unknown ids, undersized runs),
// 3 evaluation error (the engine threw while computing; the message carries
// the sample point when one is known).

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fourframes/verify.hpp"

namespace fourframes {

namespace cli_detail {

inline std::pair<std::string, std::string> parse_kv(const std::string& tok,
                                                    const char* what) {
  std::size_t eq = tok.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == tok.size()) {
    throw Error(ErrorKind::bad_config,
                std::string(what) + " entry '" + tok +
                    "' is not of the form key=value");
  }
  return {tok.substr(0, eq), tok.substr(eq + 1)};
}

inline double parse_tol_value(const std::string& key,
                              const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw Error(ErrorKind::bad_config,
                "tolerance for '" + key + "' is not a number: '" + text +
                    "'");
  }
  return v;
}

inline std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string format_tol(double tol) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0e", tol);
  return buf;
}

inline void list_family(std::ostream& os, const FamilyInfo& f) {
  os << "  " << f.id << "\n      " << f.summary << "\n";
  if (f.params.empty()) {
    os << "      (no parameters)\n";
    return;
  }
  for (const auto& p : f.params) {
    os << "      --params " << p.name << "=... (default " << p.def << ")";
    if (!p.allowed.empty()) {
      os << "  choices:";
      for (const auto& a : p.allowed) os << " " << a;
    }
    os << "\n          " << p.desc << "\n";
  }
}

inline int cmd_list(const std::string& only_model) {
  std::ostream& os = std::cout;
  if (!only_model.empty()) {
    list_family(os, family_info(only_model));  // throws on unknown id
    return 0;
  }
  const auto& families = model_families();
  os << "models (" << families.size() << " families):\n";
  for (const auto& f : families) list_family(os, f);
  const auto& reg = check_registry();
  os << "\nchecks (" << reg.size() << "):\n";
  for (const auto& spec : reg) {
    os << "  " << spec.id << "  [tol " << format_tol(spec.tol) << "]\n      "
       << spec.anchor << "\n";
  }
  return 0;
}

struct VerifyConfig {
  std::string model;
  std::map<std::string, std::string> params;
  std::vector<std::string> checks;
  int samples = 200;
  std::uint64_t seed = 42;
  std::map<std::string, double> tols;
  std::string format = "text";
  std::string output;
  bool timestamp = false;
};

// Fills fields the command line did not set from a JSON run config.
// Flag-provided values always win; params and tolerance maps merge by key
// with the flag entry taking precedence.  Returns whether the manifest
// supplied a seed, so the caller can decide if the environment default
// still applies.
inline bool merge_manifest(VerifyConfig& cfg, const std::string& path,
                           bool model_set, bool checks_set, bool samples_set,
                           bool seed_set, bool format_set, bool output_set,
                           bool timestamp_set) {
  bool seed_from_manifest = false;
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::bad_config, "cannot read manifest '" + path + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::bad_config,
                "manifest '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::bad_config,
                "manifest '" + path + "' must hold a JSON object");
  }
  try {
    if (!model_set && j.contains("model")) {
      cfg.model = j.at("model").get<std::string>();
    }
    if (j.contains("params")) {
      for (const auto& [k, v] : j.at("params").items()) {
        if (cfg.params.count(k)) continue;  // flag wins
        cfg.params[k] =
            v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    if (!checks_set && j.contains("checks")) {
      const auto& c = j.at("checks");
      if (c.is_string()) {
        cfg.checks = {c.get<std::string>()};
      } else {
        cfg.checks = c.get<std::vector<std::string>>();
      }
    }
    if (!samples_set && j.contains("samples")) {
      cfg.samples = j.at("samples").get<int>();
    }
    if (!seed_set && j.contains("seed")) {
      cfg.seed = j.at("seed").get<std::uint64_t>();
      seed_from_manifest = true;
    }
    if (j.contains("tol")) {
      for (const auto& [k, v] : j.at("tol").items()) {
        if (cfg.tols.count(k)) continue;  // flag wins
        cfg.tols[k] = v.get<double>();
      }
    }
    if (!format_set && j.contains("format")) {
      cfg.format = j.at("format").get<std::string>();
      if (cfg.format != "json" && cfg.format != "text") {
        throw Error(ErrorKind::bad_config,
                    "manifest format must be 'json' or 'text'");
      }
    }
    if (!output_set && j.contains("output")) {
      cfg.output = j.at("output").get<std::string>();
    }
    if (!timestamp_set && j.contains("timestamp")) {
      cfg.timestamp = j.at("timestamp").get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::bad_config,
                "manifest '" + path + "' has a malformed field: " + e.what());
  }
  return seed_from_manifest;
}

inline int cmd_verify(const VerifyConfig& cfg) {
  Model m = make_model(cfg.model, cfg.params);
  RunOptions opt;
  opt.checks = cfg.checks.empty() ? std::vector<std::string>{"all"}
                                  : cfg.checks;
  opt.samples = cfg.samples;
  opt.seed = cfg.seed;
  opt.tol_overrides = cfg.tols;

  VerificationReport report = run_checks(m, opt);

  std::string payload;
  if (cfg.format == "json") {
    nlohmann::ordered_json j = report_to_json(report);
    if (cfg.timestamp) j["timestamp"] = iso_timestamp();
    payload = j.dump(2) + "\n";
  } else {
    payload = report_to_text(report);
    if (cfg.timestamp) payload += "generated: " + iso_timestamp() + "\n";
  }

  if (cfg.output.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(cfg.output);
    if (!out) {
      throw Error(ErrorKind::bad_config,
                  "cannot write output file '" + cfg.output + "'");
    }
    out << payload;
  }
  return report.all_pass() ? 0 : 1;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "fourframes: sampled verification of frame, curvature and holonomy "
      "identities on four-manifold model geometries"};
  app.require_subcommand(1);

  std::string list_model;
  CLI::App* list_cmd =
      app.add_subcommand("list", "print the model and check registries");
  list_cmd->add_option("--model", list_model,
                       "show a single model family in detail");

  cli_detail::VerifyConfig cfg;
  std::vector<std::string> param_tokens, check_tokens, tol_tokens;
  std::string manifest;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run checks against a model");
  auto* model_opt = verify_cmd->add_option("--model", cfg.model,
                                           "model family id (see 'list')");
  verify_cmd->add_option("--params", param_tokens,
                         "model parameters as key=value, comma separated")
      ->delimiter(',');
  auto* checks_opt =
      verify_cmd
          ->add_option("--checks", check_tokens,
                       "check ids, glob patterns or 'all' (default all)")
          ->delimiter(',');
  auto* samples_opt = verify_cmd->add_option(
      "--samples", cfg.samples, "number of sample points (default 200)");
  auto* seed_opt = verify_cmd->add_option(
      "--seed", cfg.seed,
      "sampling seed (default 42, or FOURFRAMES_SEED if set)");
  verify_cmd
      ->add_option("--tol", tol_tokens,
                   "per-check tolerance overrides as id=value")
      ->delimiter(',');
  auto* format_opt =
      verify_cmd
          ->add_option("--format", cfg.format, "report format (default text)")
          ->check(CLI::IsMember({"json", "text"}));
  auto* output_opt = verify_cmd->add_option(
      "--output", cfg.output, "write the report to a file instead of stdout");
  auto* manifest_opt = verify_cmd->add_option(
      "--manifest", manifest,
      "JSON run configuration; explicit flags win on conflict");
  auto* timestamp_opt = verify_cmd->add_flag(
      "--timestamp", cfg.timestamp,
      "stamp the report with the generation time (off by default so JSON "
      "output is byte-stable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (list_cmd->parsed()) {
      return cli_detail::cmd_list(list_model);
    }

    for (const std::string& tok : param_tokens) {
      auto [k, v] = cli_detail::parse_kv(tok, "--params");
      cfg.params[k] = v;
    }
    for (const std::string& tok : tol_tokens) {
      auto [k, v] = cli_detail::parse_kv(tok, "--tol");
      cfg.tols[k] = cli_detail::parse_tol_value(k, v);
    }
    cfg.checks = check_tokens;

    bool seed_explicit = seed_opt->count() > 0;
    if (!manifest.empty()) {
      seed_explicit =
          cli_detail::merge_manifest(
              cfg, manifest, model_opt->count() > 0, checks_opt->count() > 0,
              samples_opt->count() > 0, seed_explicit,
              format_opt->count() > 0, output_opt->count() > 0,
              timestamp_opt->count() > 0) ||
          seed_explicit;
    }

    // FOURFRAMES_SEED replaces the built-in default; explicit settings win.
    if (!seed_explicit) {
      if (const char* env = std::getenv("FOURFRAMES_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
          throw Error(ErrorKind::bad_config,
                      std::string("FOURFRAMES_SEED is not an integer: '") +
                          env + "'");
        }
        cfg.seed = v;
      }
    }

    if (cfg.model.empty()) {
      throw Error(ErrorKind::bad_config,
                  "verify requires --model (or a manifest naming one)");
    }
    return cli_detail::cmd_verify(cfg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::bad_config ||
        e.kind() == ErrorKind::insufficient_samples) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "evaluation error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace fourframes
