// Copyright 2026 The flatband Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatband/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "flatband/ed_oracle.hpp"
#include "flatband/error.hpp"
#include "flatband/io.hpp"
#include "flatband/observables.hpp"
#include "flatband/verify.hpp"

namespace flatband {

namespace {

/// Thrown for bad flag combinations discovered after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamFlags {
  std::string config;
  int L = 5;
  double t = 1, U = 1, lambda = 1, q_abs = 1, theta = 0, zeta_abs = 1, zeta_phase = 0;
  std::string mode = "finite";
  double tol = 1e-12;
  std::string out;
  std::string format = "csv";
  std::string window;
  std::string source = "analytic";
  std::vector<std::pair<CLI::Option*, double*>> overrides;
  CLI::Option* L_opt = nullptr;
};

void add_common(CLI::App* app, ParamFlags& f) {
  app->add_option("--config", f.config, "key=value parameter file")->check(CLI::ExistingFile);
  f.L_opt = app->add_option("--L", f.L, "lattice length L = 2l+1 (odd)");
  f.overrides = {
      {app->add_option("--t", f.t, "hopping energy (oracle only)"), &f.t},
      {app->add_option("--U", f.U, "on-site repulsion (oracle only)"), &f.U},
      {app->add_option("--lambda", f.lambda, "lambda"), &f.lambda},
      {app->add_option("--q-abs", f.q_abs, "|q|"), &f.q_abs},
      {app->add_option("--theta", f.theta, "arg q in radians"), &f.theta},
      {app->add_option("--zeta-abs", f.zeta_abs, "|zeta|"), &f.zeta_abs},
      {app->add_option("--zeta-phase", f.zeta_phase, "arg zeta in radians"), &f.zeta_phase},
  };
  app->add_option("--mode", f.mode, "finite lattice or infinite-volume limit")
      ->check(CLI::IsMember({"finite", "limit"}));
  app->add_option("--tol", f.tol, "accuracy target in limit mode")->check(CLI::PositiveNumber);
  app->add_option("--out", f.out, "output path (default stdout)");
  app->add_option("--format", f.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--window", f.window, "site range A:B (half-integers allowed)");
  app->add_option("--source", f.source, "analytic formulas or the exact-diagonalization oracle")
      ->check(CLI::IsMember({"analytic", "oracle"}));
}

/// Defaults, then the config file, then explicit flags.
ParameterRecord resolve(const ParamFlags& f) {
  ParameterRecord rec;
  if (!f.config.empty()) rec = load_parameter_file(f.config, rec);
  if (f.L_opt->count() > 0) rec.L = f.L;
  double* fields[] = {&rec.params.t,     &rec.params.U,        &rec.params.lambda,    &rec.params.q_abs,
                      &rec.params.theta, &rec.params.zeta_abs, &rec.params.zeta_phase};
  for (std::size_t i = 0; i < f.overrides.size(); ++i)
    if (f.overrides[i].first->count() > 0) *fields[i] = *f.overrides[i].second;
  derive_constants(rec.params);  // validates
  build_lattice(rec.L);
  return rec;
}

Site parse_site(const std::string& s) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw UsageError("not a site coordinate: '" + s + "'");
  const double h = 2.0 * v;
  if (h != std::round(h)) throw UsageError("site " + s + " is not an integer or half-odd integer");
  return Site::half(static_cast<int>(h));
}

std::pair<Site, Site> parse_window(const std::string& w) {
  const auto colon = w.find(':');
  if (colon == std::string::npos) throw UsageError("window must look like A:B");
  const Site a = parse_site(w.substr(0, colon)), b = parse_site(w.substr(colon + 1));
  if (b < a) throw UsageError("window end precedes its start");
  return {a, b};
}

double finite_or_zero(const std::optional<double>& z) { return z && std::isfinite(*z) ? *z : 0.0; }

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual bool contains(Site x) const = 0;
  virtual double density(Site x) const = 0;
  virtual double spin(Site x, int j) const = 0;
  virtual cplx electron(Site x, Spin s, Site y, Spin t) const = 0;
  virtual double density_pair(Site x, Site y) const = 0;
  virtual double spin_pair(Site x, Site y, int j, int k) const = 0;
  virtual double truncated_density(Site x, Site y) const { return density_pair(x, y) - density(x) * density(y); }
  virtual double truncated_spin(Site x, Site y, int j, int k) const {
    return spin_pair(x, y, j, k) - spin(x, j) * spin(y, k);
  }
  virtual Source source() const = 0;
};

class AnalyticEvaluator final : public Evaluator {
 public:
  explicit AnalyticEvaluator(GroundState g) : g_(std::move(g)) {}
  bool contains(Site x) const override { return g_.contains(x); }
  double density(Site x) const override { return g_.density(x); }
  double spin(Site x, int j) const override { return g_.spin(x, j); }
  cplx electron(Site x, Spin s, Site y, Spin t) const override { return g_.electron(x, s, y, t); }
  double density_pair(Site x, Site y) const override { return g_.density_pair(x, y); }
  double spin_pair(Site x, Site y, int j, int k) const override { return g_.spin_pair(x, y, j, k); }
  double truncated_density(Site x, Site y) const override { return g_.truncated_density(x, y); }
  double truncated_spin(Site x, Site y, int j, int k) const override {
    if (j == 3 && k == 3) return g_.truncated_spin33(x, y);
    return Evaluator::truncated_spin(x, y, j, k);
  }
  Source source() const override { return Source::analytic; }

 private:
  GroundState g_;
};

class OracleEvaluator final : public Evaluator {
 public:
  OracleEvaluator(const ModelParams& p, int L) : lat_(build_lattice(L)), psi_(construct_psi(p, lat_)) {}
  bool contains(Site x) const override { return lat_.contains(x); }
  double density(Site x) const override { return ev(op::number(x, lat_.L)).real(); }
  double spin(Site x, int j) const override { return ev(op::spin(x, j, lat_.L)).real(); }
  cplx electron(Site x, Spin s, Site y, Spin t) const override { return ev(op::hop(x, s, y, t, lat_.L)); }
  double density_pair(Site x, Site y) const override {
    return ev(op::number(x, lat_.L) * op::number(y, lat_.L)).real();
  }
  double spin_pair(Site x, Site y, int j, int k) const override {
    return ev(op::spin(x, j, lat_.L) * op::spin(y, k, lat_.L)).real();
  }
  Source source() const override { return Source::oracle; }

 private:
  Lattice lat_;
  FockVector psi_;
  cplx ev(const OperatorSum& o) const { return expectation(o, psi_); }
};

constexpr int kOracleMaxL = 5;

struct Setup {
  ParameterRecord rec;
  std::unique_ptr<Evaluator> eval;
  Site lo, hi;  // evaluation window
  double z = 0;
};

/// Evaluator for the requested mode and window; `extra` is one more site the
/// evaluator must cover (the reference point of a correlation).
Setup make_setup(const ParamFlags& f, std::optional<Site> extra = std::nullopt) {
  Setup s;
  s.rec = resolve(f);
  const Model m(s.rec.params);
  s.z = finite_or_zero(m.derived.z);
  const int l = (s.rec.L - 1) / 2;
  if (f.mode == "finite") {
    if (f.window.empty()) {
      s.lo = Site::half(-s.rec.L);
      s.hi = Site::half(s.rec.L);
    } else {
      std::tie(s.lo, s.hi) = parse_window(f.window);
    }
    if (std::abs(s.lo.half_units) > s.rec.L || std::abs(s.hi.half_units) > s.rec.L)
      throw UsageError("window leaves the lattice of length L=" + std::to_string(s.rec.L));
    if (extra && std::abs(extra->half_units) > s.rec.L) throw UsageError("site " + to_string(*extra) + " is off the lattice");
    if (f.source == "oracle") {
      if (s.rec.L > kOracleMaxL)
        throw UsageError("the exact-diagonalization oracle is limited to L <= " + std::to_string(kOracleMaxL));
      s.eval = std::make_unique<OracleEvaluator>(s.rec.params, s.rec.L);
    } else {
      s.eval = std::make_unique<AnalyticEvaluator>(GroundState(s.rec.params, l));
    }
    return s;
  }
  if (f.source == "oracle") throw UsageError("the oracle needs a finite lattice (--mode finite)");
  if (f.window.empty()) {
    const int zc = static_cast<int>(std::lround(s.z));
    s.lo = Site::integer(zc - 25);
    s.hi = Site::integer(zc + 25);
  } else {
    std::tie(s.lo, s.hi) = parse_window(f.window);
  }
  int lo = static_cast<int>(std::floor(s.lo.coordinate())), hi = static_cast<int>(std::ceil(s.hi.coordinate()));
  if (extra) {
    lo = std::min(lo, static_cast<int>(std::floor(extra->coordinate())));
    hi = std::max(hi, static_cast<int>(std::ceil(extra->coordinate())));
  }
  s.eval = std::make_unique<AnalyticEvaluator>(GroundState::limit(s.rec.params, lo, hi, f.tol));
  return s;
}

std::vector<Site> sites_between(Site lo, Site hi, bool integer_only) {
  std::vector<Site> out;
  for (int h = lo.half_units; h <= hi.half_units; ++h)
    if (!integer_only || h % 2 == 0) out.push_back(Site::half(h));
  return out;
}

/// Writes to --out when given, otherwise to the data stream.
void emit(const ParamFlags& f, std::ostream& out, const std::string& text) {
  if (f.out.empty()) {
    out << text;
    return;
  }
  std::ofstream os(f.out, std::ios::binary);
  if (!os) throw UsageError("cannot write " + f.out);
  os << text;
}

nlohmann::ordered_json constants_json(const DerivedConstants& c) {
  nlohmann::ordered_json j{{"epsilon", c.epsilon}, {"r", c.r}, {"p", c.p}};
  if (c.z && std::isfinite(*c.z))
    j["z"] = *c.z;
  else
    j["z"] = nullptr;
  return j;
}

std::string x_text(Site s) {
  std::ostringstream os;
  os << s.coordinate();
  return os.str();
}

// ---------------------------------------------------------------- profile

int cmd_profile(const ParamFlags& f, std::ostream& out) {
  const Setup s = make_setup(f);
  const auto& p = s.rec.params;
  const DerivedConstants c = derive_constants(p);
  const double plateau = p.lambda * p.lambda / std::sqrt(c.epsilon * c.epsilon - 4.0);
  const auto sites = sites_between(s.lo, s.hi, false);

  CsvWriter csv({"site_2x", "x", "density", "s1", "s2", "s3", "pitch", "density_ref", "s3_ref", "source"});
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Site x : sites) {
    const double n = s.eval->density(x);
    const double s1 = s.eval->spin(x, 1), s2 = s.eval->spin(x, 2), s3 = s.eval->spin(x, 3);
    const double pitch = (s1 == 0.0 && s2 == 0.0) ? 0.0 : std::atan2(s2, s1);
    const double n_ref = x.on_integer() ? plateau : 1.0 - plateau;
    const double s3_ref =
        p.zeta_abs == 0.0 ? 0.5 * n_ref : -0.5 * n_ref * std::tanh(0.5 * c.log_weight(x.coordinate()));
    const std::string src = to_string(s.eval->source());
    csv.row({std::to_string(x.half_units), x_text(x), format_double(n), format_double(s1), format_double(s2),
             format_double(s3), format_double(pitch), format_double(n_ref), format_double(s3_ref), src});
    rows.push_back({{"site_2x", x.half_units},
                    {"density", n},
                    {"s1", s1},
                    {"s2", s2},
                    {"s3", s3},
                    {"pitch", pitch},
                    {"density_ref", n_ref},
                    {"s3_ref", s3_ref}});
  }
  std::ostringstream os;
  if (f.format == "json") {
    nlohmann::ordered_json j{{"command", "profile"},
                             {"mode", f.mode},
                             {"L", s.rec.L},
                             {"source", to_string(s.eval->source())},
                             {"params", to_json(p)},
                             {"constants", constants_json(c)},
                             {"rows", rows}};
    os << j.dump(2) << '\n';
  } else {
    csv.write(os);
  }
  emit(f, out, os.str());
  return kExitOk;
}

// ------------------------------------------------------------ correlation

struct CorrelationFlags {
  std::string kind = "density";
  std::string x;
  std::string sigma = "up", tau = "up";
  int j = 3, k = 3;
  std::string fit_out;
};

Spin parse_spin(const std::string& s) { return s == "down" ? Spin::down : Spin::up; }

int cmd_correlation(const ParamFlags& f, const CorrelationFlags& cf, std::ostream& out, std::ostream& err) {
  const Site x = parse_site(cf.x);
  const bool analytic = f.source == "analytic";
  if (analytic && !x.on_integer())
    throw UnsupportedAnalyticForm("site " + to_string(x) +
                                  " is half-odd: two-point functions there have no closed form; rerun with "
                                  "--source oracle on a lattice with L <= 5");
  Setup s = make_setup(f, x);
  const auto& p = s.rec.params;
  const DerivedConstants c = derive_constants(p);
  std::vector<Site> ys = sites_between(s.lo, s.hi, analytic);
  const bool pair_kind = cf.kind != "electron";
  if (pair_kind) {
    if (ys.size() == 1 && ys.front() == x)
      throw UsageError("coincident points x = y: <n_x n_x> is a one-point quantity; use `flatband profile`");
    ys.erase(std::remove(ys.begin(), ys.end(), x), ys.end());
  }
  if (ys.empty()) throw UsageError("window contains no usable sites");

  ObservableProfile prof;
  prof.params = p;
  prof.source = s.eval->source();
  std::vector<double> extra;
  std::string extra_name;
  const Spin sig = parse_spin(cf.sigma), tau = parse_spin(cf.tau);
  if (cf.kind == "electron") {
    prof.kind = ObservableKind::electron2;
    prof.sigma = sig;
    prof.tau = tau;
    extra_name = "modulus";
  } else if (cf.kind == "density") {
    prof.kind = ObservableKind::density2;
    extra_name = "truncated";
  } else {
    prof.kind = ObservableKind::spin2;
    prof.j = cf.j;
    prof.k = cf.k;
    extra_name = "truncated";
  }
  std::vector<std::pair<double, double>> fit_points;
  for (Site y : ys) {
    cplx v;
    double e;
    if (cf.kind == "electron") {
      v = s.eval->electron(x, sig, y, tau);
      e = std::abs(v);
    } else if (cf.kind == "density") {
      v = s.eval->density_pair(x, y);
      e = s.eval->truncated_density(x, y);
    } else {
      v = s.eval->spin_pair(x, y, cf.j, cf.k);
      e = s.eval->truncated_spin(x, y, cf.j, cf.k);
    }
    prof.entries.push_back({x, y, v});
    extra.push_back(e);
    const bool near_wall = !c.q_unit() && (std::abs(x.coordinate() - s.z) < 2.5 || std::abs(y.coordinate() - s.z) < 2.5);
    if (!near_wall && y != x) fit_points.emplace_back(std::abs(y.coordinate() - x.coordinate()), e);
  }

  nlohmann::ordered_json fit_json{{"kind", cf.kind}};
  try {
    fit_json["fit"] = to_json(fit_decay(fit_points));
  } catch (const InvalidArgument& e) {
    fit_json["fit"] = nullptr;
    err << "note: no decay fit (" << e.what() << ")\n";
  }
  const double ref_rate = cf.kind == "electron" ? std::log(c.r) : 2.0 * std::log(c.p);
  fit_json["reference_rate"] = ref_rate;
  fit_json["reference_length"] = 1.0 / ref_rate;

  std::ostringstream os;
  if (f.format == "json") {
    nlohmann::ordered_json j{{"command", "correlation"}, {"mode", f.mode}, {"L", s.rec.L}};
    j["constants"] = constants_json(c);
    j["table"] = to_json(prof);
    j[extra_name] = extra;
    j["decay"] = fit_json;
    os << j.dump(2) << '\n';
  } else {
    write_profile_csv(os, prof, {{extra_name, extra}});
  }
  emit(f, out, os.str());
  if (!cf.fit_out.empty()) {
    std::ofstream fo(cf.fit_out, std::ios::binary);
    if (!fo) throw UsageError("cannot write " + cf.fit_out);
    fo << fit_json.dump(2) << '\n';
  }
  return kExitOk;
}

// ----------------------------------------------------------------- verify

struct VerifyFlags {
  std::string suites = "all";
  bool inject_fault = false;
};

std::vector<int> parse_suites(const std::string& s) {
  if (s == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (s == "none") return {};
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    int id = 0;
    try {
      id = std::stoi(item);
    } catch (const std::exception&) {
      throw UsageError("bad suite id '" + item + "'");
    }
    if (id < 1 || id > 10) throw UsageError("suite ids run from 1 to 10");
    out.push_back(id);
  }
  return out;
}

int cmd_verify(const ParamFlags& f, const VerifyFlags& vf, std::ostream& out, std::ostream& err) {
  const ParameterRecord rec = resolve(f);
  if (rec.L > 7) throw UsageError("verify runs exact diagonalization; L must be <= 7");
  VerifyOptions opts;
  if (vf.inject_fault) opts.fault = Perturbation{0, 1e-6};
  std::vector<SuiteResult> results;
  results.push_back(point_suite(rec.params, rec.L, opts));
  for (int id : parse_suites(vf.suites)) results.push_back(run_criterion(id, opts));
  bool all = true;
  nlohmann::ordered_json j{{"command", "verify"}, {"L", rec.L}, {"params", to_json(rec.params)}};
  j["fault_injected"] = vf.inject_fault;
  auto& arr = j["suites"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.pass();
    arr.push_back(to_json(r));
    err << (r.pass() ? "PASS " : "FAIL ") << (r.id ? "criterion " + std::to_string(r.id) + ": " : "point: ") << r.title
        << '\n';
    for (const auto& chk : r.checks)
      if (!chk.pass) err << "  violated: " << chk.invariant << " (worst " << chk.worst << ", " << chk.detail << ")\n";
  }
  j["pass"] = all;
  emit(f, out, j.dump(2) + "\n");
  return all ? kExitOk : kExitViolation;
}

// ------------------------------------------------------------------ sweep

struct SweepRow {
  ModelParams p;
  double z = 0;
  DerivedConstants c;
  double plateau_integer = 0, plateau_half = 0, plateau_ref = 0;
  double electron_rate = 0, truncated_rate = 0, wall_width = 0;
};

double fit_or_nan(const std::vector<std::pair<double, double>>& pts) {
  try {
    return fit_decay(pts).rate;
  } catch (const InvalidArgument&) {
    return std::nan("");
  }
}

SweepRow sweep_point(const ModelParams& p, double tol) {
  SweepRow row;
  row.p = p;
  row.c = derive_constants(p);
  const bool wall = !row.c.q_unit() && p.zeta_abs > 0;
  row.z = wall ? *row.c.z : 0.0;
  const int zc = static_cast<int>(std::lround(row.z));
  const GroundState g = GroundState::limit(p, zc - 45, zc + 45, tol);
  row.plateau_ref = p.lambda * p.lambda / std::sqrt(row.c.epsilon * row.c.epsilon - 4.0);
  row.plateau_integer = g.density(Site::integer(zc - 30));
  row.plateau_half = g.density(Site::half(2 * (zc - 30) + 1));

  const int xe = static_cast<int>(std::ceil(row.z)) + 5;
  std::vector<std::pair<double, double>> ept;
  for (int d = 5; d <= 25; ++d) {
    const Site a = Site::integer(xe), b = Site::integer(xe + d);
    ept.emplace_back(d, std::abs(g.electron(a, Spin::up, b, Spin::up) + g.electron(a, Spin::down, b, Spin::down)));
  }
  row.electron_rate = fit_or_nan(ept);

  std::vector<Site> ys;
  const int x0 = zc - 15;
  for (int y = x0 + 1; y <= x0 + 40; ++y) ys.push_back(Site::integer(y));
  try {
    row.truncated_rate = truncated_density_scan(g, Site::integer(x0), ys).fit.rate;
  } catch (const InvalidArgument&) {
    row.truncated_rate = std::nan("");
  }

  row.wall_width = std::numeric_limits<double>::infinity();
  if (wall) {
    try {
      row.wall_width = fit_domain_wall(g).width();
    } catch (const InvalidArgument&) {
      row.wall_width = std::nan("");
    }
  }
  return row;
}

int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("FLATBAND_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

int cmd_sweep(const ParamFlags& f, const std::vector<std::string>& grids, std::ostream& out) {
  const ParameterRecord rec = resolve(f);
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  for (const auto& g : grids) {
    const auto eq = g.find('=');
    if (eq == std::string::npos) throw UsageError("grid must look like KEY=a,b,c");
    const std::string key = g.substr(0, eq);
    static const std::vector<std::string> keys{"lambda", "q_abs", "theta", "z", "zeta_abs", "zeta_phase"};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw UsageError("unknown grid key '" + key + "'");
    std::vector<double> vals;
    std::stringstream ss(g.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        vals.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("bad grid value '" + item + "'");
      }
    }
    if (vals.empty()) throw UsageError("grid " + key + " is empty");
    axes.emplace_back(key, vals);
  }
  // Cartesian product, first axis outermost; z is applied last so it sees the final |q|.
  std::vector<std::pair<ModelParams, std::optional<double>>> points{{rec.params, std::nullopt}};
  for (const auto& [key, vals] : axes) {
    std::vector<std::pair<ModelParams, std::optional<double>>> next;
    for (const auto& [pt, z] : points)
      for (double v : vals) {
        ModelParams q = pt;
        std::optional<double> zz = z;
        if (key == "lambda") q.lambda = v;
        if (key == "q_abs") q.q_abs = v;
        if (key == "theta") q.theta = v;
        if (key == "zeta_abs") q.zeta_abs = v;
        if (key == "zeta_phase") q.zeta_phase = v;
        if (key == "z") zz = v;
        next.emplace_back(q, zz);
      }
    points = std::move(next);
  }
  std::vector<ModelParams> params;
  for (auto [pt, z] : points) {
    if (z) {
      if (pt.q_abs == 1.0) throw UsageError("z is undefined when |q| = 1");
      pt.zeta_abs = std::pow(pt.q_abs, -*z);
    }
    derive_constants(pt);
    params.push_back(pt);
  }

  std::vector<SweepRow> rows(params.size());
  std::vector<std::string> failures(params.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < params.size(); i = next++) {
      try {
        rows[i] = sweep_point(params[i], f.tol);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(thread_count(), static_cast<int>(params.size()));
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < failures.size(); ++i)
    if (!failures[i].empty()) throw NumericalFailure("sweep point " + std::to_string(i) + ": " + failures[i]);

  CsvWriter csv({"lambda", "q_abs", "theta", "zeta_abs", "zeta_phase", "z", "epsilon", "r", "p", "plateau_integer",
                 "plateau_half", "plateau_ref", "electron_rate", "log_r", "truncated_density_rate", "two_log_p",
                 "wall_width", "wall_width_ref"});
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    const double width_ref = r.c.q_unit() ? std::numeric_limits<double>::infinity() : 1.0 / std::abs(r.c.log_q);
    const std::vector<double> v{r.p.lambda,        r.p.q_abs,        r.p.theta,
                                r.p.zeta_abs,      r.p.zeta_phase,   r.z,
                                r.c.epsilon,       r.c.r,            r.c.p,
                                r.plateau_integer, r.plateau_half,   r.plateau_ref,
                                r.electron_rate,   std::log(r.c.r),  r.truncated_rate,
                                2 * std::log(r.c.p), r.wall_width,   width_ref};
    std::vector<std::string> cells;
    for (double d : v) cells.push_back(format_double(d));
    csv.row(cells);
    nlohmann::ordered_json o;
    const char* names[] = {"lambda", "q_abs", "theta", "zeta_abs", "zeta_phase", "z", "epsilon", "r", "p",
                           "plateau_integer", "plateau_half", "plateau_ref", "electron_rate", "log_r",
                           "truncated_density_rate", "two_log_p", "wall_width", "wall_width_ref"};
    for (std::size_t i = 0; i < v.size(); ++i)
      o[names[i]] = std::isfinite(v[i]) ? nlohmann::ordered_json(v[i]) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(o));
  }
  std::ostringstream os;
  if (f.format == "json")
    os << nlohmann::ordered_json{{"command", "sweep"}, {"points", arr}}.dump(2) << '\n';
  else
    csv.write(os);
  emit(f, out, os.str());
  return kExitOk;
}

// ----------------------------------------------------------------- limits

struct LimitsFlags {
  int x = 0;
  int table = 0;
};

int cmd_limits(const ParamFlags& f, const LimitsFlags& lf, std::ostream& out) {
  const ParameterRecord rec = resolve(f);
  const DerivedConstants c = derive_constants(rec.params);
  std::ostringstream os;
  if (lf.table > 0) {
    if (c.q_unit()) {
      os << "y,B,log_prefactor\n";
      for (int y = lf.x - 2; y <= lf.x + lf.table - 1; ++y) {
        const auto v = a_closed_qunit(lf.x, y, c);
        os << y << ',' << format_double(v.b_value) << ',' << format_double(v.log_prefactor) << '\n';
      }
    } else {
      write_table_csv(os, b_forward<double>(lf.x, lf.x + lf.table - 1, *c.z, c));
    }
    emit(f, out, os.str());
    return kExitOk;
  }
  nlohmann::ordered_json j{{"command", "limits"}, {"x", lf.x}, {"tol", f.tol}};
  j["params"] = to_json(rec.params);
  j["constants"] = constants_json(c);
  auto lim_json = [](double v, double e, int steps) {
    return nlohmann::ordered_json{{"value", v}, {"error_bound", e}, {"steps", steps}};
  };
  if (c.q_unit()) {
    const double r2 = c.r * c.r;
    const double v = r2 / (r2 - 1.0);
    j["method"] = "closed-form";
    j["right"] = lim_json(v, 0.0, 0);
    j["left"] = lim_json(v, 0.0, 0);
    j["both"] = lim_json(v, 0.0, 0);
  } else {
    const double z = *c.z;
    const auto env = convergence_envelope(lf.x, z, c);
    j["method"] = "recursion";
    j["envelope"] = {{"beta", env.beta}, {"K1", env.K1}, {"K2", env.K2}, {"K3", env.K3}, {"g", env.g}};
    for (auto [name, dir] : {std::pair{"right", LimitDirection::right}, std::pair{"left", LimitDirection::left},
                             std::pair{"both", LimitDirection::both}}) {
      const auto r = b_limit<double>(lf.x, z, dir, f.tol, c);
      j[name] = lim_json(r.value, r.error_bound, r.steps);
    }
  }
  j["half_length"] = limit_half_length(rec.params, lf.x, lf.x, f.tol);
  os << j.dump(2) << '\n';
  emit(f, out, os.str());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Domain-wall ground states of the deformed flat-band Hubbard chain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flatband 1.0.0");

  // One set per subcommand: each keeps its own Option handles for the precedence check.
  ParamFlags pf_profile, pf_corr, pf_verify, pf_sweep, pf_limits;
  CorrelationFlags cf;
  VerifyFlags vf;
  LimitsFlags lf;
  std::vector<std::string> grids;

  auto* profile = app.add_subcommand("profile", "density and spin one-point profiles");
  add_common(profile, pf_profile);
  auto* corr = app.add_subcommand("correlation", "two-point and truncated correlations with a decay fit");
  add_common(corr, pf_corr);
  corr->add_option("--kind", cf.kind, "observable pair")->check(CLI::IsMember({"electron", "density", "spin"}));
  corr->add_option("--x", cf.x, "reference site")->required();
  corr->add_option("--sigma", cf.sigma, "spin of c^dag_x")->check(CLI::IsMember({"up", "down"}));
  corr->add_option("--tau", cf.tau, "spin of c_y")->check(CLI::IsMember({"up", "down"}));
  corr->add_option("--j", cf.j, "spin component at x")->check(CLI::Range(1, 3));
  corr->add_option("--k", cf.k, "spin component at y")->check(CLI::Range(1, 3));
  corr->add_option("--fit-out", cf.fit_out, "write the decay fit JSON here");
  auto* verify = app.add_subcommand("verify", "oracle, bound and convergence suites");
  add_common(verify, pf_verify);
  verify->add_option("--suites", vf.suites, "all, none, or a comma list of criterion ids 1-10");
  verify->add_flag("--inject-fault", vf.inject_fault, "perturb one recursion coefficient by 1e-6");
  auto* sweep = app.add_subcommand("sweep", "per-point summaries over a parameter grid (limit mode)");
  add_common(sweep, pf_sweep);
  sweep->add_option("--grid", grids, "KEY=a,b,c with KEY in lambda, q_abs, theta, z, zeta_abs, zeta_phase");
  auto* limits = app.add_subcommand("limits", "infinite-window limits of B and the convergence envelope");
  add_common(limits, pf_limits);
  limits->add_option("--x", lf.x, "left end of the window");
  limits->add_option("--table", lf.table, "dump B(x, y) for this many y values as CSV instead")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*profile) return cmd_profile(pf_profile, out);
    if (*corr) return cmd_correlation(pf_corr, cf, out, err);
    if (*verify) return cmd_verify(pf_verify, vf, out, err);
    if (*sweep) return cmd_sweep(pf_sweep, grids, out);
    if (*limits) return cmd_limits(pf_limits, lf, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedAnalyticForm& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DegenerateParameters& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitUsage;
}

}  // namespace flatband
