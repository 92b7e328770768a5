// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/io.hpp"

#include <cstdio>
#include <ostream>

#include "flatband/error.hpp"

namespace flatband {

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string site_x(Site s) {
  // Exact decimal for x = half_units / 2.
  if (s.on_integer()) return std::to_string(s.half_units / 2);
  const int h = s.half_units;
  return (h < 0 ? "-" : "") + std::to_string(std::abs(h) / 2) + ".5";
}

std::string spin_name(Spin s) { return s == Spin::up ? "up" : "down"; }

}  // namespace

void write_profile_csv(std::ostream& os, const ObservableProfile& p, const ExtraColumns& extra) {
  const bool pairs = !p.entries.empty() && p.entries.front().y.has_value();
  for (const auto& [name, col] : extra)
    if (col.size() != p.entries.size()) throw InvalidArgument("extra column " + name + " has the wrong length");
  os << "site_2x,x";
  if (pairs) os << ",y_2x,y";
  os << ",re,im,source";
  for (const auto& [name, col] : extra) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < p.entries.size(); ++i) {
    const auto& e = p.entries[i];
    os << e.x.half_units << ',' << site_x(e.x);
    if (pairs) os << ',' << e.y->half_units << ',' << site_x(*e.y);
    os << ',' << format_double(e.value.real()) << ',' << format_double(e.value.imag()) << ',' << to_string(p.source);
    for (const auto& [name, col] : extra) os << ',' << format_double(col[i]);
    os << '\n';
  }
}

nlohmann::ordered_json to_json(const ModelParams& p) {
  return {{"t", p.t},           {"U", p.U},         {"lambda", p.lambda},         {"q_abs", p.q_abs},
          {"theta", p.theta}, {"zeta_abs", p.zeta_abs}, {"zeta_phase", p.zeta_phase}};
}

nlohmann::ordered_json to_json(const ObservableProfile& p) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(p.kind);
  if (p.kind == ObservableKind::spin1 || p.kind == ObservableKind::spin2) j["j"] = p.j;
  if (p.kind == ObservableKind::spin2) j["k"] = p.k;
  if (p.kind == ObservableKind::electron2) {
    j["sigma"] = spin_name(p.sigma);
    j["tau"] = spin_name(p.tau);
  }
  j["source"] = to_string(p.source);
  j["params"] = to_json(p.params);
  auto& arr = j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : p.entries) {
    nlohmann::ordered_json row;
    row["site_2x"] = e.x.half_units;
    if (e.y) row["y_2x"] = e.y->half_units;
    row["re"] = e.value.real();
    row["im"] = e.value.imag();
    arr.push_back(std::move(row));
  }
  return j;
}

nlohmann::ordered_json to_json(const DecayFit& f) {
  return {{"rate", f.rate},           {"length", f.length()},     {"intercept", f.intercept},
          {"residual", f.residual}, {"window_lo", f.window_lo}, {"window_hi", f.window_hi},
          {"points", f.points}};
}

nlohmann::ordered_json to_json(const GroundSpaceReport& r) {
  nlohmann::ordered_json j{{"L", r.L}, {"N", r.N}, {"total", r.total}};
  auto& arr = j["sectors"] = nlohmann::ordered_json::array();
  for (const auto& s : r.sectors)
    arr.push_back({{"two_m", s.two_m},
                   {"dim", s.dim},
                   {"kernel_dim", s.kernel_dim},
                   {"lowest", s.lowest},
                   {"first_nonzero", s.first_nonzero},
                   {"norm_estimate", s.norm_estimate},
                   {"method", s.method}});
  return j;
}

nlohmann::ordered_json to_json(const SymmetryReport& r) {
  return {{"site_2x", r.site.half_units},
          {"phi", r.phi},
          {"u", r.u},
          {"s1", r.s1},
          {"s2", r.s2},
          {"s3", r.s3},
          {"s1_rotated", r.s1_rotated},
          {"s3_reflected", r.s3_reflected},
          {"s3_translated", r.s3_translated},
          {"translation_covariance", r.translation_covariance},
          {"all_up_max_transverse", r.all_up_max_transverse},
          {"all_up_max_s3_gap", r.all_up_max_s3_gap}};
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CSV row width does not match the header");
  rows_.push_back(cells);
}

void CsvWriter::write(std::ostream& os) const {
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

}  // namespace flatband
