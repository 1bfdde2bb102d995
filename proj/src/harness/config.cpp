#include "thermreg/harness/config.hpp"

#include "thermreg/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace thermreg::harness {

using nlohmann::json;

const char* to_string(Command c) {
  switch (c) {
    case Command::verify: return "verify";
    case Command::sweep_scaling: return "sweep-scaling";
    case Command::wigner: return "wigner";
    case Command::mu_solve: return "mu-solve";
    case Command::selftest: return "selftest";
  }
  return "?";
}

SweepConfig default_config(Command c) {
  SweepConfig s;
  switch (c) {
    case Command::verify:
      s.d = {1, 2, 3};
      s.beta = {0.25, 1.0, 4.0, 16.0};
      s.hbar = {0.8, 0.4, 0.1, 0.02};
      s.lambda = {0.1, 1.0, 2.0 * std::numbers::pi};
      s.p = {2.0, 4.0, kInfinity};
      s.weight_n = {0};
      break;
    case Command::sweep_scaling:
      s.d = {1};
      s.beta = {0.5, 1.0, 2.0, 4.0, 8.0};
      s.hbar = {1e-3};
      s.lambda = {1.0};
      s.p = {2.0};
      s.weight_n = {0};
      break;
    case Command::wigner:
      s.d = {1, 2};
      s.beta = {1.0};
      s.hbar = {1.0, 0.5};
      s.lambda = {1.0};
      s.p = {2.0};
      s.weight_n = {0};
      s.moments = {0, 1, 2, 4};
      break;
    case Command::mu_solve:
      s.d = {1};
      s.beta = {1.0};
      s.hbar = {1.0};
      s.lambda = {2.0 * std::numbers::pi};
      s.p = {2.0};
      s.weight_n = {0};
      break;
    case Command::selftest:
      s.d = {1, 2};
      s.beta = {0.5, 2.0};
      s.hbar = {1.0, 0.3};
      s.lambda = {1.0};
      s.p = {1.0, 2.0, 3.0, 4.0, kInfinity};
      s.weight_n = {0, 1, 2};
      break;
  }
  return s;
}

void validate(const SweepConfig& c, Command command) {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw InvalidArgument(std::string("config: ") + what);
  };
  need(!c.d.empty() && !c.beta.empty() && !c.hbar.empty() && !c.lambda.empty(), "every grid must be nonempty");
  if (command != Command::mu_solve) need(!c.p.empty() && !c.weight_n.empty(), "every grid must be nonempty");
  for (int d : c.d) need(d >= 1, "d must be >= 1");
  for (double b : c.beta) need(b > 0.0 && std::isfinite(b), "beta must be positive");
  for (double h : c.hbar) need(h > 0.0 && std::isfinite(h), "hbar must be positive");
  for (double l : c.lambda) need(l > 0.0 && std::isfinite(l), "lambda must be positive");
  for (double p : c.p) need(p >= 1.0, "p must be >= 1");
  for (int n : c.weight_n) need(n >= 0, "weight exponents must be nonnegative");
  if (command == Command::wigner) need(!c.moments.empty(), "every grid must be nonempty");
  for (int n : c.moments) need(n >= 0, "moment orders must be nonnegative");
  need(c.tail_tol > 0.0 && c.mu_tol > 0.0 && c.slack > 0.0, "tolerances must be positive");
  need(c.dense_ceiling > 0, "dense ceiling must be positive");
  need(c.threads >= 1, "threads must be >= 1");
  need(c.constant_scale > 0.0, "constant scale must be positive");
  need(c.classical_filter > 0.0 && c.slope_tolerance > 0.0 && c.moment_tolerance > 0.0,
       "tolerances must be positive");
  need(c.wigner_extent > 0.0 && c.wigner_points >= 3, "wigner grid needs extent > 0 and >= 3 points");
  need(c.state == "maxwell_boltzmann" || c.state == "fermi_dirac" || c.state == "both",
       "state must be maxwell_boltzmann, fermi_dirac or both");
}

namespace {

json p_list(const std::vector<double>& p) {
  json a = json::array();
  for (double v : p) {
    if (std::isinf(v))
      a.push_back("inf");
    else
      a.push_back(v);
  }
  return a;
}

std::vector<double> read_p(const json& a) {
  std::vector<double> out;
  for (const json& v : a) {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s != "inf" && s != "infinity") throw InvalidArgument("config: p entries must be numbers or \"inf\"");
      out.push_back(kInfinity);
    } else {
      out.push_back(v.get<double>());
    }
  }
  return out;
}

}  // namespace

std::string to_json(const SweepConfig& c, bool with_threads) {
  json j;
  j["d"] = c.d;
  j["beta"] = c.beta;
  j["hbar"] = c.hbar;
  j["lambda"] = c.lambda;
  j["p"] = p_list(c.p);
  j["weight_n"] = c.weight_n;
  j["moments"] = c.moments;
  j["bounds"] = c.bounds;
  j["output"] = c.output;
  j["tail_tol"] = c.tail_tol;
  j["mu_tol"] = c.mu_tol;
  j["slack"] = c.slack;
  j["dense_ceiling"] = c.dense_ceiling;
  if (with_threads) j["threads"] = c.threads;
  j["schatten_exponent"] = c.convention.scale == SchattenScale::dimension ? "d" : "3";
  j["zero_weight"] = c.convention.zero_weight_is_identity ? "identity" : "two";
  j["constant_scale"] = c.constant_scale;
  j["timing"] = c.timing;
  j["state"] = c.state;
  j["classical_filter"] = c.classical_filter;
  j["slope_tolerance"] = c.slope_tolerance;
  j["wigner_extent"] = c.wigner_extent;
  j["wigner_points"] = c.wigner_points;
  j["moment_tolerance"] = c.moment_tolerance;
  return j.dump();
}

SweepConfig from_json(const std::string& text, SweepConfig c) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config: top level must be an object");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("d", c.d);
    get("beta", c.beta);
    get("hbar", c.hbar);
    get("lambda", c.lambda);
    if (j.contains("p")) c.p = read_p(j.at("p"));
    get("weight_n", c.weight_n);
    get("moments", c.moments);
    get("bounds", c.bounds);
    get("output", c.output);
    get("tail_tol", c.tail_tol);
    get("mu_tol", c.mu_tol);
    get("slack", c.slack);
    get("dense_ceiling", c.dense_ceiling);
    get("threads", c.threads);
    if (j.contains("schatten_exponent")) {
      const std::string s = j.at("schatten_exponent").get<std::string>();
      if (s != "d" && s != "3") throw InvalidArgument("config: schatten_exponent must be \"d\" or \"3\"");
      c.convention.scale = s == "d" ? SchattenScale::dimension : SchattenScale::three;
    }
    if (j.contains("zero_weight")) {
      const std::string s = j.at("zero_weight").get<std::string>();
      if (s != "identity" && s != "two") throw InvalidArgument("config: zero_weight must be \"identity\" or \"two\"");
      c.convention.zero_weight_is_identity = s == "identity";
    }
    get("constant_scale", c.constant_scale);
    get("timing", c.timing);
    get("state", c.state);
    get("classical_filter", c.classical_filter);
    get("slope_tolerance", c.slope_tolerance);
    get("wigner_extent", c.wigner_extent);
    get("wigner_points", c.wigner_points);
    get("moment_tolerance", c.moment_tolerance);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

SweepConfig load_config(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), std::move(base));
}

}  // namespace thermreg::harness
