#pragma once

// Subcommand dispatch for the avwc tool. Kept in a header so the CLI can be
// exercised in-process by the test suite; tools/avwc_cli.cpp is a thin main.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avwc/capacity.hpp"
#include "avwc/codesim.hpp"
#include "avwc/error.hpp"
#include "avwc/examples.hpp"
#include "avwc/io.hpp"
#include "avwc/symmetrizability.hpp"
#include "avwc/version.hpp"

namespace avwc {

namespace detail {

inline std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string curve_csv(const std::vector<CurvePoint>& pts) {
  std::string csv = "G,c_key_bits\n";
  for (const auto& p : pts) csv += csv_number(p.g_bits) + "," + csv_number(p.c_key_bits) + "\n";
  return csv;
}

inline std::string sim_csv(const SimReport& rep) {
  std::string csv = "metric,value\n";
  csv += "worst_error," + csv_number(rep.worst_error) + "\n";
  csv += "leakage," + csv_number(rep.leakage) + "\n";
  csv += "leakage_exact," + std::string(rep.leakage_exact ? "1" : "0") + "\n";
  if (rep.events) {
    const EventReport& e = *rep.events;
    const EventStats* stats[] = {&e.e1, &e.e2, &e.e3, &e.e4, &e.e5};
    for (int i = 0; i < 5; ++i)
      csv += "E" + std::to_string(i + 1) + "_pass," + (stats[i]->pass ? "1" : "0") + "\n";
  }
  return csv;
}

inline EmpiricalType balanced_type(const Alphabet& a, std::size_t n) {
  std::vector<std::uint64_t> counts(a.size(), n / a.size());
  std::uint64_t rem = n % a.size();
  for (std::size_t i = 0; i < rem; ++i) counts[i]++;
  return EmpiricalType(a, std::move(counts));
}

} // namespace detail

/// Runs one CLI invocation. Returns the process exit status: 0 on success,
/// 2 on validation errors, 3 on enumeration-guard errors.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"finite-alphabet arbitrarily varying wiretap channel toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // shared state filled by the subcommand callbacks
  std::string file_a, file_b, out_path, link = "legal", mode = "exact", example_name, dir = ".";
  double tol = 1e-9, g_bits = 0.0, g_max = 1.0, eps = 0.1, tau = 0.5, delta = -1.0, p_param = 0.4;
  int r = 1, steps = 11, samples = 100, n_block = 6;
  int k_count = 2, l_count = 1, gamma_count = 1, outputs = 3;
  bool want_events = false;
  OptimizerConfig cfg;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool with_out = true) {
    if (with_out) sub->add_option("--out", out_path, "write the auxiliary output to this path");
    sub->add_option("--grid", cfg.grid, "simplex grid resolution");
    sub->add_option("--starts", cfg.starts, "multistart count");
    sub->add_option("--seed", seed, "random seed");
  };

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a channel file");
  validate->add_option("file", file_a)->required();
  validate->add_option("--out", out_path);

  CLI::App* sym = app.add_subcommand("sym", "decide symmetrizability");
  sym->add_option("file", file_a)->required();
  sym->add_option("--link", link)->check(CLI::IsMember({"legal", "eve"}));
  sym->add_option("--tol", tol);
  sym->add_option("--out", out_path);

  CLI::App* fval = app.add_subcommand("f-value", "distance from symmetrizability");
  fval->add_option("file", file_a)->required();
  fval->add_option("--mode", mode)->check(CLI::IsMember({"exact", "multistart"}));
  fval->add_option("--link", link)->check(CLI::IsMember({"legal", "eve"}));
  add_common(fval);

  CLI::App* capacity = app.add_subcommand("capacity", "capacity bounds");
  capacity->add_option("file", file_a)->required();
  capacity->add_option("--r", r)->check(CLI::Range(1, 2));
  add_common(capacity);

  CLI::App* ckey = app.add_subcommand("ckey", "secret-key assisted capacity");
  ckey->add_option("file", file_a)->required();
  ckey->add_option("--g", g_bits)->required();
  ckey->add_option("--r", r)->check(CLI::Range(1, 2));
  add_common(ckey);

  CLI::App* curve = app.add_subcommand("curve", "c_key as a function of G (CSV)");
  curve->add_option("file", file_a)->required();
  curve->add_option("--g-max", g_max)->required();
  curve->add_option("--steps", steps);
  curve->add_option("--r", r)->check(CLI::Range(1, 2));
  add_common(curve);

  CLI::App* super = app.add_subcommand("super", "classify super-activation of a pair");
  super->add_option("fileA", file_a)->required();
  super->add_option("fileB", file_b)->required();
  super->add_option("--r", r)->check(CLI::Range(1, 2));
  add_common(super);

  CLI::App* probe = app.add_subcommand("probe", "discontinuity probe");
  probe->add_option("file", file_a)->required();
  probe->add_option("--eps", eps)->required();
  probe->add_option("--samples", samples);
  add_common(probe);

  CLI::App* simulate = app.add_subcommand("simulate", "random wiretap code at blocklength n");
  simulate->add_option("file", file_a)->required();
  simulate->add_option("--n", n_block)->required();
  simulate->add_option("--k", k_count);
  simulate->add_option("--l", l_count);
  simulate->add_option("--gamma", gamma_count);
  simulate->add_option("--tau", tau)->required();
  simulate->add_option("--delta", delta);
  simulate->add_flag("--events", want_events);
  add_common(simulate);

  CLI::App* example = app.add_subcommand("example", "write a built-in channel family");
  example->add_option("name", example_name)->required();
  example->add_option("--eps", eps);
  example->add_option("--p", p_param);
  example->add_option("--outputs", outputs);
  example->add_option("--dir", dir);
  example->add_option("--out", out_path);

  std::vector<std::string> argv_like = args;
  std::reverse(argv_like.begin(), argv_like.end());
  try {
    app.parse(argv_like);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  cfg.seed = seed;

  RunResult result;
  result.seed = seed;

  auto finish = [&](const json& report, const std::string& command,
                    const std::string& aux = "") -> int {
    result.command = command;
    result.report = report;
    if (!aux.empty() && !out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) {
        err << "error: cannot write '" << out_path << "'\n";
        return 2;
      }
      f << aux;
      out << result.serialize();
    } else if (aux.empty() && !out_path.empty()) {
      std::ofstream f(out_path);
      if (!f) {
        err << "error: cannot write '" << out_path << "'\n";
        return 2;
      }
      f << result.serialize();
    } else {
      out << result.serialize();
    }
    return 0;
  };

  try {
    if (*validate) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      json rep;
      rep["name"] = f.name;
      rep["inputs"] = f.input_alphabet.size();
      rep["states"] = f.state_alphabet.size();
      rep["outputs_legal"] = f.output_alphabet_legal.size();
      rep["has_eve"] = f.has_eve();
      if (f.has_eve()) rep["outputs_eve"] = f.output_alphabet_eve->size();
      rep["valid"] = true;
      return finish(rep, "validate");
    }
    if (*sym) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      AVC avc = link == "eve" ? f.eve_avc() : f.legal_avc();
      return finish(to_json(is_symmetrizable(avc, tol)), "sym");
    }
    if (*fval) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      AVC avc = link == "eve" ? f.eve_avc() : f.legal_avc();
      FMode m = mode == "exact" ? FMode::Exact : FMode::Multistart;
      return finish(to_json(f_value(avc, m, cfg.starts, cfg.seed)), "f-value");
    }
    if (*capacity) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      json rep;
      rep["avc_capacity"] = to_json(avc_capacity(f.legal_avc(), cfg));
      if (f.has_eve()) rep["secrecy_rate"] = to_json(secrecy_rate_r(f.avwc(), r, cfg));
      return finish(rep, "capacity");
    }
    if (*ckey) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      return finish(to_json(c_key(f.avwc(), g_bits, r, cfg)), "ckey");
    }
    if (*curve) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      auto pts = capacity_curve(f.avwc(), g_max, steps, r, cfg);
      std::string csv = detail::curve_csv(pts);
      json rep;
      rep["points"] = json::array();
      for (const auto& p : pts) rep["points"].push_back({{"G", p.g_bits}, {"c_key", p.c_key_bits}});
      if (out_path.empty()) rep["csv"] = csv;
      return finish(rep, "curve", csv);
    }
    if (*super) {
      result.inputs_digest = content_digest(file_digest(file_a) + file_digest(file_b));
      ChannelFile fa = parse_channel_file(file_a);
      ChannelFile fb = parse_channel_file(file_b);
      return finish(to_json(classify_super_activation(fa.avwc(), fb.avwc(), r, cfg)), "super");
    }
    if (*probe) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      return finish(to_json(discontinuity_probe(f.avwc(), eps, samples, seed, cfg)), "probe");
    }
    if (*simulate) {
      result.inputs_digest = file_digest(file_a);
      ChannelFile f = parse_channel_file(file_a);
      AVWC wv = f.avwc();
      if (delta <= 0.0) delta = tau;
      EmpiricalType p = detail::balanced_type(wv.legal.input, std::size_t(n_block));
      CodeBook cb = build_codebook(std::size_t(n_block), std::size_t(k_count),
                                   std::size_t(l_count), std::size_t(gamma_count), p, seed);
      DecodingSets ds = build_decoding_sets(cb, wv, delta);
      SimReport rep = evaluate_code(cb, ds, wv);
      if (want_events) rep.events = check_events(cb, wv, BoundParameters(tau, delta));
      std::string csv = detail::sim_csv(rep);
      json jrep = to_json(rep);
      if (out_path.empty()) jrep["csv"] = csv;
      return finish(jrep, "simulate", csv);
    }
    if (*example) {
      result.inputs_digest = content_digest(example_name + "/" + std::to_string(eps) + "/" +
                                            std::to_string(p_param) + "/" + std::to_string(outputs));
      double param = example_name == "symmetrizable-family" ? eps : p_param;
      BuiltinExample ex = emit_builtin_example(example_name, param, std::size_t(outputs));
      json rep;
      rep["files"] = json::array();
      for (std::size_t i = 0; i < ex.files.size(); ++i) {
        std::string path = dir + "/" + ex.file_names[i];
        write_channel_file(ex.files[i], path);
        rep["files"].push_back(path);
      }
      if (ex.certificate) {
        json cj;
        cj["u"] = ex.certificate->u.kernel;
        cj["residual"] = ex.certificate->residual;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12f", ex.certificate->u.kernel[0][0]);
        cj["u_s1_x1"] = std::string(buf);
        std::snprintf(buf, sizeof(buf), "%.12f", ex.certificate->u.kernel[1][0]);
        cj["u_s1_x2"] = std::string(buf);
        rep["certificate"] = cj;
      }
      return finish(rep, "example");
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_limit() ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "error: UnknownCommand\n";
  return 2;
}

} // namespace avwc
