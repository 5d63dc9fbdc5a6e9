#pragma once

// Channel-file ingestion and result emission. Channel files are JSON with a
// 3-D kernel array indexed [state][input][output]; kernel entries may be
// numbers or decimal strings (exact decimal text is preserved on parse).

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "avwc/capacity.hpp"
#include "avwc/channel.hpp"
#include "avwc/codesim.hpp"
#include "avwc/error.hpp"
#include "avwc/symmetrizability.hpp"
#include "avwc/version.hpp"

namespace avwc {

using json = nlohmann::json;

struct ChannelFile {
  std::string name;
  Alphabet input_alphabet;
  Alphabet state_alphabet;
  Alphabet output_alphabet_legal;
  std::optional<Alphabet> output_alphabet_eve;
  std::vector<std::vector<std::vector<double>>> w; // [state][input][output]
  std::optional<std::vector<std::vector<std::vector<double>>>> v;

  bool has_eve() const { return v.has_value(); }

  AVC legal_avc() const {
    std::vector<Channel> fam;
    for (const auto& mat : w)
      fam.emplace_back(input_alphabet, output_alphabet_legal, mat, kValidationTol);
    return AVC(input_alphabet, output_alphabet_legal, state_alphabet, std::move(fam));
  }
  AVC eve_avc() const {
    if (!v) throw Error(ErrorKind::MissingEveLink, "file has no eavesdropper link");
    std::vector<Channel> fam;
    for (const auto& mat : *v)
      fam.emplace_back(input_alphabet, *output_alphabet_eve, mat, kValidationTol);
    return AVC(input_alphabet, *output_alphabet_eve, state_alphabet, std::move(fam));
  }
  AVWC avwc() const { return AVWC(legal_avc(), eve_avc()); }
};

namespace detail {

inline double json_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    // decimal strings carry exact rationals such as "0.837837837837"
    try {
      std::size_t pos = 0;
      double v = std::stod(j.get<std::string>(), &pos);
      if (pos != j.get<std::string>().size())
        throw Error(ErrorKind::ParseError, "trailing characters in number at " + where);
      return v;
    } catch (const Error&) {
      throw;
    } catch (...) {
      throw Error(ErrorKind::ParseError, "bad numeric string at " + where);
    }
  }
  throw Error(ErrorKind::ParseError, "expected number at " + where);
}

inline Alphabet json_alphabet(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw Error(ErrorKind::ParseError, field + " must be a non-empty array of labels");
  std::vector<std::string> labels;
  for (const auto& e : j) {
    if (!e.is_string()) throw Error(ErrorKind::ParseError, field + " labels must be strings");
    labels.push_back(e.get<std::string>());
  }
  try {
    return Alphabet(std::move(labels));
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, field + ": " + e.what());
  }
}

inline std::vector<std::vector<std::vector<double>>> json_kernel3(const json& j,
                                                                  const std::string& field,
                                                                  std::size_t ns, std::size_t nx,
                                                                  std::size_t nout) {
  if (!j.is_array() || j.size() != ns)
    throw Error(ErrorKind::ParseError, field + " must have one matrix per state");
  std::vector<std::vector<std::vector<double>>> out(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    if (!j[s].is_array() || j[s].size() != nx)
      throw Error(ErrorKind::ParseError, field + "[" + std::to_string(s) + "] row count mismatch");
    out[s].resize(nx);
    for (std::size_t x = 0; x < nx; ++x) {
      if (!j[s][x].is_array() || j[s][x].size() != nout)
        throw Error(ErrorKind::ParseError,
                    field + "[" + std::to_string(s) + "][" + std::to_string(x) + "] width mismatch");
      out[s][x].resize(nout);
      for (std::size_t y = 0; y < nout; ++y)
        out[s][x][y] = json_number(j[s][x][y], field + "[" + std::to_string(s) + "][" +
                                                   std::to_string(x) + "][" + std::to_string(y) +
                                                   "]");
    }
  }
  return out;
}

} // namespace detail

/// [OP] parse_channel_file.
inline ChannelFile parse_channel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("invalid JSON: ") + e.what());
  }
  ChannelFile f;
  if (!j.contains("name") || !j["name"].is_string())
    throw Error(ErrorKind::ParseError, "missing string field 'name'");
  f.name = j["name"].get<std::string>();
  if (!j.contains("input_alphabet") || !j.contains("state_alphabet") ||
      !j.contains("output_alphabet_legal") || !j.contains("W"))
    throw Error(ErrorKind::ParseError,
                "required fields: input_alphabet, state_alphabet, output_alphabet_legal, W");
  f.input_alphabet = detail::json_alphabet(j["input_alphabet"], "input_alphabet");
  f.state_alphabet = detail::json_alphabet(j["state_alphabet"], "state_alphabet");
  f.output_alphabet_legal = detail::json_alphabet(j["output_alphabet_legal"], "output_alphabet_legal");
  f.w = detail::json_kernel3(j["W"], "W", f.state_alphabet.size(), f.input_alphabet.size(),
                             f.output_alphabet_legal.size());
  if (j.contains("V")) {
    if (!j.contains("output_alphabet_eve"))
      throw Error(ErrorKind::ParseError, "V present but output_alphabet_eve missing");
    f.output_alphabet_eve = detail::json_alphabet(j["output_alphabet_eve"], "output_alphabet_eve");
    f.v = detail::json_kernel3(j["V"], "V", f.state_alphabet.size(), f.input_alphabet.size(),
                               f.output_alphabet_eve->size());
  }
  try {
    f.legal_avc();
    if (f.has_eve()) f.avwc();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ValidationError, e.what());
  }
  return f;
}

inline json channel_file_to_json(const ChannelFile& f) {
  json j;
  j["name"] = f.name;
  j["input_alphabet"] = f.input_alphabet.symbols;
  j["state_alphabet"] = f.state_alphabet.symbols;
  j["output_alphabet_legal"] = f.output_alphabet_legal.symbols;
  j["W"] = f.w;
  if (f.v) {
    j["output_alphabet_eve"] = f.output_alphabet_eve->symbols;
    j["V"] = *f.v;
  }
  return j;
}

inline void write_channel_file(const ChannelFile& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ValidationError, "cannot write '" + path + "'");
  out << channel_file_to_json(f).dump(2) << "\n";
}

/// FNV-1a digest of raw bytes; good enough to fingerprint inputs.
inline std::string content_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream ss;
  ss << in.rdbuf();
  return content_digest(ss.str());
}

// ---- report serializers ----

inline json to_json(const Distribution& p) {
  json j;
  j["alphabet"] = p.alphabet.symbols;
  j["mass"] = p.mass;
  return j;
}

inline json to_json(const Channel& c) {
  json j;
  j["input"] = c.input.symbols;
  j["output"] = c.output.symbols;
  j["kernel"] = c.kernel;
  return j;
}

inline json to_json(const SymVerdict& v) {
  json j;
  j["symmetrizable"] = v.symmetrizable;
  if (v.certificate) {
    j["certificate"] = {{"u", to_json(v.certificate->u).at("kernel")},
                        {"residual", v.certificate->residual}};
  }
  if (v.infeasibility_margin) j["infeasibility_margin"] = *v.infeasibility_margin;
  return j;
}

inline json to_json(const FValueResult& f) {
  json j;
  j["value"] = f.value;
  j["certified_exact"] = f.certified_exact;
  j["u_star"] = f.u_star.kernel;
  return j;
}

inline json to_json(const CapacityReport& r) {
  json j;
  j["value_bits"] = r.value_bits;
  j["kind"] = capacity_kind_name(r.kind);
  j["r"] = r.r;
  j["certified"] = r.certified;
  j["p_star"] = r.p_star.mass;
  if (r.u_star) j["u_star"] = r.u_star->kernel;
  if (r.q_star) j["q_star"] = r.q_star->mass;
  if (r.s_star) j["s_star"] = *r.s_star;
  if (r.u_star_composed_symmetrizable)
    j["u_star_composed_symmetrizable"] = *r.u_star_composed_symmetrizable;
  return j;
}

inline json to_json(const SuperActivationVerdict& v) {
  json j;
  j["class"] = super_activation_class_name(v.cls);
  j["reason"] = v.reason;
  j["legal_a_symmetrizable"] = v.legal_a_symmetrizable;
  j["legal_b_symmetrizable"] = v.legal_b_symmetrizable;
  j["product_symmetrizable"] = v.product_symmetrizable;
  j["secrecy_bound_a"] = v.secrecy_bound_a;
  j["secrecy_bound_b"] = v.secrecy_bound_b;
  j["product_secrecy_bound"] = v.product_secrecy_bound;
  return j;
}

inline json to_json(const DiscontinuityProbeReport& r) {
  json j;
  j["positivity_holds"] = r.positivity_holds;
  j["legal_symmetrizable"] = r.legal_symmetrizable;
  j["witness_found"] = r.witness_found;
  if (r.witness_found) {
    j["witness_distance"] = r.witness_distance;
    j["witness_margin"] = r.witness_margin;
  }
  j["summary"] = r.summary;
  return j;
}

inline json to_json(const EventStats& s) {
  json j;
  j["pass"] = s.pass;
  j["count"] = s.count;
  j["worst_margin"] = s.worst_margin;
  if (!s.witness.empty()) j["witness"] = s.witness;
  return j;
}

inline json to_json(const EventReport& e) {
  json j;
  j["E1"] = to_json(e.e1);
  j["E2"] = to_json(e.e2);
  j["E3"] = to_json(e.e3);
  j["E4"] = to_json(e.e4);
  j["E5"] = to_json(e.e5);
  j["all_pass"] = e.all();
  return j;
}

inline json to_json(const SimReport& r) {
  json j;
  j["worst_error"] = r.worst_error;
  j["worst_error_state"] = r.worst_error_state;
  j["leakage"] = r.leakage;
  j["leakage_state"] = r.leakage_state;
  j["leakage_exact"] = r.leakage_exact;
  if (r.events) j["events"] = to_json(*r.events);
  return j;
}

/// Stable, key-sorted run envelope; identical inputs yield identical bytes.
struct RunResult {
  std::string command;
  std::string inputs_digest;
  json report;
  std::uint64_t seed = 0;

  std::string serialize() const {
    json j;
    j["command"] = command;
    j["inputs_digest"] = inputs_digest;
    j["report"] = report;
    j["seed"] = seed;
    j["toolkit_version"] = kVersion;
    return j.dump(2) + "\n";
  }
};

} // namespace avwc
