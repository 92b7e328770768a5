// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "flatband/error.hpp"

namespace flatband {

int Site::as_integer() const {
  if (!on_integer()) throw InvalidArgument("site " + to_string(*this) + " is not an integer site");
  return half_units / 2;
}

std::string to_string(Site s) {
  if (s.on_integer()) return std::to_string(s.half_units / 2);
  return std::to_string(s.half_units) + "/2";
}

std::vector<Site> Lattice::integer_sites() const {
  std::vector<Site> out;
  for (Site s : sites)
    if (s.on_integer()) out.push_back(s);
  return out;
}

std::vector<Site> Lattice::half_sites() const {
  std::vector<Site> out;
  for (Site s : sites)
    if (!s.on_integer()) out.push_back(s);
  return out;
}

Lattice build_lattice(int L) {
  if (L < 3 || L % 2 == 0) throw InvalidArgument("L must be odd and >= 3, got " + std::to_string(L));
  Lattice lat;
  lat.L = L;
  lat.l = (L - 1) / 2;
  lat.sites.reserve(2 * L + 1);
  for (int y = -L; y <= L; ++y) lat.sites.push_back(Site::half(y));
  return lat;
}

double DerivedConstants::weight(double w) const {
  if (std::isinf(log_zeta) && log_zeta < 0) return 0.0;
  return std::exp(log_weight(w));
}

DerivedConstants derive_constants(const ModelParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(p.t) && p.t > 0)) throw InvalidArgument("t must be positive");
  if (!(finite(p.U) && p.U > 0)) throw InvalidArgument("U must be positive");
  if (!(finite(p.lambda) && p.lambda >= 0)) throw InvalidArgument("lambda must be nonnegative");
  if (!(finite(p.q_abs) && p.q_abs > 0)) throw InvalidArgument("q_abs must be positive");
  if (!(finite(p.zeta_abs) && p.zeta_abs >= 0)) throw InvalidArgument("zeta_abs must be nonnegative");
  if (!finite(p.theta) || !finite(p.zeta_phase)) throw InvalidArgument("angles must be finite");

  DerivedConstants c;
  c.q_abs = p.q_abs;
  c.log_q = std::log(p.q_abs);
  c.epsilon = p.lambda * p.lambda + 2.0 * std::cosh(0.5 * c.log_q);
  if (!(c.epsilon > 2.0 + kEpsilonMargin))
    throw DegenerateParameters("epsilon = " + std::to_string(c.epsilon) + " is not above 2");
  const double disc = std::sqrt((c.epsilon - 2.0) * (c.epsilon + 2.0));
  c.r = 0.5 * (c.epsilon + disc);
  if (c.log_q > 0)
    c.p = std::min(c.r, p.q_abs);
  else if (c.log_q < 0)
    c.p = std::min(c.r, 1.0 / p.q_abs);
  else
    c.p = c.r;
  c.log_zeta = p.zeta_abs > 0 ? std::log(p.zeta_abs) : -std::numeric_limits<double>::infinity();
  if (!c.q_unit()) c.z = -c.log_zeta / c.log_q;
  return c;
}

double f_coeff(double u, const DerivedConstants& c) {
  const double s = c.log_q;
  if (s == 0.0 || std::isinf(u)) return 0.0;
  const double sh = std::sinh(0.5 * s);
  // Split the product so each cosh stays representable as long as possible.
  return (sh / std::cosh(s * (u - 0.5))) * (sh / std::cosh(s * (u + 0.5)));
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) throw InvalidArgument("bad numeric value for " + key + ": '" + v + "'");
  return out;
}

}  // namespace

ParameterRecord parse_parameter_text(const std::string& text, ParameterRecord rec) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "L") {
      const double v = to_double(key, val);
      if (v != std::floor(v)) throw InvalidArgument("L must be an integer");
      rec.L = static_cast<int>(v);
    } else if (key == "t") {
      rec.params.t = to_double(key, val);
    } else if (key == "U") {
      rec.params.U = to_double(key, val);
    } else if (key == "lambda") {
      rec.params.lambda = to_double(key, val);
    } else if (key == "q_abs") {
      rec.params.q_abs = to_double(key, val);
    } else if (key == "theta") {
      rec.params.theta = to_double(key, val);
    } else if (key == "zeta_abs") {
      rec.params.zeta_abs = to_double(key, val);
    } else if (key == "zeta_phase") {
      rec.params.zeta_phase = to_double(key, val);
    } else {
      throw InvalidArgument("unknown parameter key '" + key + "'");
    }
  }
  return rec;
}

ParameterRecord load_parameter_file(const std::string& path, ParameterRecord base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read parameter file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_parameter_text(buf.str(), base);
}

}  // namespace flatband
