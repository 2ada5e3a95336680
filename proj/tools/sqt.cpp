// Command-line front end: one subcommand per pipeline stage.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqt/ammonia.hpp"
#include "sqt/closed_forms.hpp"
#include "sqt/config.hpp"
#include "sqt/dynamics.hpp"
#include "sqt/eigensolver.hpp"
#include "sqt/error.hpp"
#include "sqt/first_passage.hpp"
#include "sqt/io.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace sqt;

namespace {

constexpr const char* kArtifactVersion = SQT_VERSION;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::size_t> grid_points;
  std::optional<std::string> isa;
};

// Shared state of one invocation.
class Run {
 public:
  Run(std::string name, Config cfg, fs::path out) : name_(std::move(name)), cfg_(std::move(cfg)), out_(std::move(out)) {}

  const std::string& name() const { return name_; }
  Config& cfg() { return cfg_; }
  void add_digest_input(const std::string& s) { extra_ += s; }
  // Execution-only keys leave results unchanged, so they stay out of the digest.
  std::string digest() const {
    std::istringstream in(cfg_.canonical());
    std::string text, line;
    while (std::getline(in, line)) {
      const auto key = line.substr(0, line.find('='));
      if (key.ends_with(".workers") || key.ends_with(".isa")) continue;
      text += line + "\n";
    }
    return hex64(fnv1a64(name_ + "\n" + text + extra_));
  }
  void set_seed(std::uint64_t s) { seed_ = s; }

  void write(const std::string& file, const std::string& role, const std::string& content) {
    write_atomic(out_ / file, content);
    outputs_.push_back({{"path", file}, {"role", role}});
  }
  void write_json(const std::string& file, const std::string& role, json body) {
    json doc;
    doc["schema"] = "sqt." + role + "/1";
    doc["config_digest"] = digest();
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(file, role, doc.dump(2) + "\n");
  }
  void finish() {
    json m;
    m["schema"] = "sqt.manifest/1";
    m["subcommand"] = name_;
    m["config_digest"] = digest();
    m["seed"] = seed_;
    m["artifact_version"] = kArtifactVersion;
    m["outputs"] = outputs_;
    write_atomic(out_ / (name_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string name_;
  Config cfg_;
  fs::path out_;
  std::string extra_;
  std::uint64_t seed_ = 0;
  json outputs_ = json::array();
};

std::string csv_header(const std::string& schema, const std::string& digest, const std::string& columns) {
  return "# schema: sqt." + schema + "/1\n# config_digest: " + digest + "\n" + columns + "\n";
}

std::string row(std::initializer_list<double> v) {
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ',';
    s += fmt17(x);
  }
  return s + "\n";
}

// ----------------------------------------------------------------- potentials

struct Loaded {
  PotentialSpec spec;
  std::size_t grid_points = 8001;
};

Loaded load(Config& c) {
  Loaded l;
  l.spec = load_potential(c);
  l.grid_points = c.get_u64("grid.points", 8001);
  if (l.grid_points < 101) throw ConfigError("grid.points must be at least 101");
  return l;
}

BoundState ground_state(const Loaded& l) {
  if (const auto* w = std::get_if<SquareDoubleWell>(&l.spec.potential))
    return square_bound_state(*w, l.spec.units, solve_square_levels(*w, l.spec.units).k_even, Parity::Even,
                              l.grid_points);
  return numerov_bound_state(std::get<RosenMorseDouble>(l.spec.potential), l.spec.units, RmLevel::Ground,
                             l.grid_points);
}

OsmoticField field_for(const Loaded& l, const BoundState& s) {
  if (const auto* w = std::get_if<SquareDoubleWell>(&l.spec.potential))
    return OsmoticField::square_well(*w, l.spec.units, solve_square_levels(*w, l.spec.units).k_even);
  return OsmoticField::from_state(s, l.spec.units);
}

// Default window: the barrier edges for the square well, the inner turning points otherwise.
double default_window(const Loaded& l, const BoundState& s) {
  if (const auto* w = std::get_if<SquareDoubleWell>(&l.spec.potential)) return 0.5 * w->d;
  return turning_points(std::get<RosenMorseDouble>(l.spec.potential), s.energy).b_inner;
}

std::string family(const Loaded& l) {
  return std::holds_alternative<SquareDoubleWell>(l.spec.potential) ? "square" : "rosen_morse";
}

// ------------------------------------------------------------------ solve

void cmd_solve(Run& r) {
  auto& c = r.cfg();
  const Loaded l = load(c);
  const bool write_states = c.get_bool("solve.write_states", true);
  c.reject_unused();
  const auto& u = l.spec.units;
  const auto V = as_function(l.spec.potential);
  std::vector<BoundState> states;
  if (const auto* w = std::get_if<SquareDoubleWell>(&l.spec.potential)) {
    const auto lv = solve_square_levels(*w, u);
    states.push_back(square_bound_state(*w, u, lv.k_even, Parity::Even, l.grid_points));
    states.push_back(square_bound_state(*w, u, lv.k_odd, Parity::Odd, l.grid_points));
  } else {
    const auto& p = std::get<RosenMorseDouble>(l.spec.potential);
    for (int i = 0; i < 4; ++i) states.push_back(numerov_bound_state(p, u, static_cast<RmLevel>(i), l.grid_points));
  }
  std::string csv = csv_header("levels", r.digest(), "index,parity,energy,wavenumber,norm_check,expectation_energy");
  json levels = json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    const double eh = expectation_energy(s, V, u);
    csv += std::to_string(i) + "," + (s.parity == Parity::Even ? "even" : "odd") + "," + fmt17(s.energy) + "," +
           fmt17(s.wavenumber) + "," + fmt17(s.norm_check) + "," + fmt17(eh) + "\n";
    levels.push_back(s.energy);
    if (write_states) {
      std::ostringstream os;
      write_bound_state_csv(os, s, V);
      r.write("solve_state" + std::to_string(i) + ".csv", "bound_state", os.str());
    }
  }
  r.write("solve_levels.csv", "levels", csv);
  json body;
  body["family"] = family(l);
  body["levels"] = levels;
  const auto ground = spectrum_pair(states[0].energy, states[1].energy, u);
  body["ground_doublet"] = {{"delta_e", ground.delta_e}, {"period", ground.period}};
  if (states.size() == 4) {
    const auto ex = spectrum_pair(states[2].energy, states[3].energy, u);
    body["excited_doublet"] = {{"delta_e", ex.delta_e}, {"period", ex.period}};
  }
  r.write_json("solve.json", "solve", body);
  std::printf("solve: E0=%s E1=%s delta_e=%s\n", fmt17(states[0].energy).c_str(), fmt17(states[1].energy).c_str(),
              fmt17(ground.delta_e).c_str());
}

// ------------------------------------------------------------------- mfpt

void cmd_mfpt(Run& r) {
  auto& c = r.cfg();
  const Loaded l = load(c);
  const BoundState s = ground_state(l);
  const double w = default_window(l, s);
  const double a = c.get_double("mfpt.reflect_at", s.grid.lo);
  const double xs = c.get_double("mfpt.x_start", -w);
  const double xe = c.get_double("mfpt.x_end", w);
  const bool decay = c.get_bool("mfpt.decay_rate", true);
  c.reject_unused();
  const auto& u = l.spec.units;
  json body;
  body["family"] = family(l);
  body["energy"] = s.energy;
  body["reflect_at"] = a;
  body["x_start"] = xs;
  body["x_end"] = xe;
  const double tau = mfpt_quadrature(s, u, a, xs, xe);
  body["tau_bar"] = tau;
  body["exterior_mass"] = exterior_mass(s, a);
  if (decay) {
    const double lam = survival_decay_rate(s, u, a, xe);
    body["decay_rate"] = lam;
    body["decay_time"] = 1.0 / lam;
  }
  TurningPoints tp;
  if (const auto* sw = std::get_if<SquareDoubleWell>(&l.spec.potential))
    tp = turning_points(*sw, s.energy);
  else
    tp = turning_points(std::get<RosenMorseDouble>(l.spec.potential), s.energy);
  const auto hb = mfpt_high_barrier_quadrature(s, u, tp);
  body["high_barrier"] = {{"tau", hb.tau},
                          {"occupancy", hb.occupancy},
                          {"barrier_ratio", hb.barrier_ratio},
                          {"factorization_invalid", hb.factorization_invalid}};
  if (const auto* sw = std::get_if<SquareDoubleWell>(&l.spec.potential)) {
    const auto cf = SquareWellClosedForm::make(*sw, u, solve_square_levels(*sw, u).k_even);
    body["closed_form_barrier_window"] = dsw_mean_tau(cf);
  }
  r.write_json("mfpt.json", "mfpt", body);
  std::printf("mfpt: tau_bar=%s\n", fmt17(tau).c_str());
}

// --------------------------------------------------------------- simulate

void cmd_simulate(Run& r) {
  auto& c = r.cfg();
  const Loaded l = load(c);
  TrajectoryConfig t;
  t.dt = c.get_double("simulate.dt");
  t.seed = c.get_u64("simulate.seed", 0);
  t.trajectory_id = c.get_u64("simulate.trajectory_id", 0);
  t.x_init = c.get_double("simulate.x_init");
  t.stop.absorb_at = c.get_double("simulate.absorb_at", INFINITY);
  t.stop.reflect_lo = c.get_double("simulate.reflect_lo", -INFINITY);
  t.stop.reflect_hi = c.get_double("simulate.reflect_hi", INFINITY);
  t.max_steps = c.get_u64("simulate.max_steps", 0);
  t.record_stride = c.get_u64("simulate.record_stride", 100);
  c.reject_unused();
  r.set_seed(t.seed);
  const BoundState s = ground_state(l);
  const OsmoticField f = field_for(l, s);
  if (std::isfinite(t.stop.absorb_at)) {
    const StopRule sr = resolve_stop_rule(t.stop, f);
    t.expected_mfpt = mfpt_quadrature(s, l.spec.units, sr.reflect_lo, t.x_init, t.stop.absorb_at);
    if (t.max_steps == 0) t.max_steps = default_max_steps(t.expected_mfpt, t.dt);
  } else {
    if (t.max_steps == 0) throw ConfigError("simulate.max_steps is required without an absorbing boundary");
    t.horizon_override = true;
  }
  const auto fp = simulate_first_passage(t, f, as_function(l.spec.potential));
  if (t.record_stride > 0) {
    std::string csv = csv_header("path", r.digest(), "step,t,x,u,energy");
    for (const auto& p : fp.path)
      csv += std::to_string(p.step) + "," + fmt17(p.t) + "," + fmt17(p.x) + "," + fmt17(p.u) + "," +
             fmt17(p.energy) + "\n";
    r.write("simulate_path.csv", "path", csv);
  }
  json body;
  body["tau"] = fp.tau;
  body["steps"] = fp.steps;
  body["clamped"] = fp.clamped;
  body["timed_out"] = fp.timed_out;
  body["energy_mean"] = fp.energy ? json(fp.energy->mean) : json(nullptr);
  body["ground_energy"] = s.energy;
  r.write_json("simulate.json", "simulate", body);
  std::printf("simulate: steps=%llu tau=%s timed_out=%d energy_mean=%s\n", static_cast<unsigned long long>(fp.steps),
              fmt17(fp.tau).c_str(), fp.timed_out ? 1 : 0, fp.energy ? fmt17(fp.energy->mean).c_str() : "n/a");
}

// --------------------------------------------------------------- ensemble

std::string histogram_csv(const std::string& digest, const std::vector<HistogramBin>& h) {
  std::string csv = csv_header("histogram", digest, "left,right,count,density");
  for (const auto& b : h)
    csv += fmt17(b.left) + "," + fmt17(b.right) + "," + std::to_string(b.count) + "," + fmt17(b.density) + "\n";
  return csv;
}

json tail_json(const TailFit& t) {
  return {{"rate", t.rate},           {"rate_stderr", t.rate_stderr}, {"tau_l", 1.0 / t.rate},
          {"amplitude", t.amplitude}, {"threshold", t.threshold},     {"goodness", t.goodness},
          {"exceedances", t.exceedances}};
}

void cmd_ensemble(Run& r) {
  auto& c = r.cfg();
  const Loaded l = load(c);
  EnsembleConfig ec;
  ec.n = c.get_u64("ensemble.n", 0);
  ec.base.dt = c.get_double("ensemble.dt");
  ec.base.seed = c.get_u64("ensemble.seed", 0);
  ec.base.trajectory_id = c.get_u64("ensemble.first_id", 0);
  ec.base.x_init = c.get_double("ensemble.x_init");
  ec.base.stop.absorb_at = c.get_double("ensemble.absorb_at");
  ec.base.stop.reflect_lo = c.get_double("ensemble.reflect_lo", -INFINITY);
  ec.base.max_steps = c.get_u64("ensemble.max_steps", 0);
  ec.workers = static_cast<unsigned>(c.get_u64("ensemble.workers", 0));
  const std::string isa = c.get_string("ensemble.isa", "auto");
  const std::uint64_t bins = c.get_u64("ensemble.histogram_bins", 60);
  const double hist_max = c.get_double("ensemble.histogram_max", 0.0);
  const bool fit_tail = c.get_bool("ensemble.tail_fit", true);
  c.reject_unused();
  r.set_seed(ec.base.seed);
  if (isa != "auto") ec.isa = simd::parse_isa(isa.c_str());
  const BoundState s = ground_state(l);
  const OsmoticField f = field_for(l, s);
  const StopRule sr = resolve_stop_rule(ec.base.stop, f);
  ec.base.expected_mfpt = mfpt_quadrature(s, l.spec.units, sr.reflect_lo, ec.base.x_init, ec.base.stop.absorb_at);
  if (ec.base.max_steps == 0) ec.base.max_steps = default_max_steps(ec.base.expected_mfpt, ec.base.dt);
  validate(ec.base, f);
  if (ec.n == 0) {
    std::printf("ensemble: dry run, configuration valid (quadrature tau_bar=%s)\n",
                fmt17(ec.base.expected_mfpt).c_str());
    return;
  }
  const auto run = run_ensemble(ec, f);
  const auto e = make_ensemble(run.records, r.digest());
  std::string csv = csv_header("taus", r.digest(), "trajectory_id,seed,tau,steps,clamped,timed_out");
  for (const auto& rec : run.records)
    csv += std::to_string(rec.trajectory_id) + "," + std::to_string(rec.seed) + "," + fmt17(rec.tau) + "," +
           std::to_string(rec.steps) + "," + std::to_string(rec.clamped) + "," + (rec.timed_out ? "1" : "0") + "\n";
  r.write("ensemble_taus.csv", "taus", csv);
  json body;
  body["n"] = e.n;
  body["timed_out"] = e.timed_out;
  body["timeout_warning"] = e.timeout_warning;
  body["mean"] = e.mean;
  body["stderr"] = e.stderr_;
  body["quadrature_tau_bar"] = ec.base.expected_mfpt;
  body["clamped_total"] = run.clamped_total;
  body["isa"] = simd::isa_name(run.isa);
  if (fit_tail && e.n > 0) {
    const auto t = fit_exponential_tail(e);
    body["tail"] = tail_json(t);
  }
  if (e.n > 0) {
    const double hi = hist_max > 0.0 ? hist_max : e.taus.back();
    r.write("ensemble_histogram.csv", "histogram", histogram_csv(r.digest(), histogram(e, bins, 0.0, hi)));
  }
  r.write_json("ensemble.json", "ensemble", body);
  std::printf("ensemble: n=%llu mean=%s stderr=%s timed_out=%llu\n", static_cast<unsigned long long>(e.n),
              fmt17(e.mean).c_str(), fmt17(e.stderr_).c_str(), static_cast<unsigned long long>(e.timed_out));
}

// --------------------------------------------------------------- tail-fit

FptEnsemble read_taus(const fs::path& p, std::string& raw) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read tail_fit.input " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  raw = ss.str();
  std::istringstream lines(raw);
  std::string line;
  std::vector<double> taus;
  std::uint64_t timed_out = 0;
  bool header = false;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("trajectory_id,", 0) != 0) throw ConfigError("tail_fit.input is not an ensemble taus file");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw ConfigError("malformed row in tail_fit.input: " + line);
    if (f[5] == "1")
      ++timed_out;
    else
      taus.push_back(std::stod(f[2]));
  }
  return make_ensemble(std::move(taus), timed_out, "");
}

void cmd_tail_fit(Run& r) {
  auto& c = r.cfg();
  const fs::path input = c.get_string("tail_fit.input");
  const bool has_threshold = c.has("tail_fit.threshold");
  const double threshold = c.get_double("tail_fit.threshold", 0.0);
  const std::uint64_t bins = c.get_u64("tail_fit.histogram_bins", 60);
  const double hist_max = c.get_double("tail_fit.histogram_max", 0.0);
  c.reject_unused();
  std::string raw;
  const auto e = read_taus(input, raw);
  r.add_digest_input(raw);
  const auto t = has_threshold ? fit_exponential_tail(e, threshold) : fit_exponential_tail(e);
  const double hi = hist_max > 0.0 ? hist_max : e.taus.back();
  r.write("tail_fit_histogram.csv", "histogram", histogram_csv(r.digest(), histogram(e, bins, 0.0, hi)));
  json body;
  body["n"] = e.n;
  body["mean"] = e.mean;
  body["tail"] = tail_json(t);
  r.write_json("tail_fit.json", "tail_fit", body);
  std::printf("tail-fit: tau_l=%s rate=%s +- %s\n", fmt17(1.0 / t.rate).c_str(), fmt17(t.rate).c_str(),
              fmt17(t.rate_stderr).c_str());
}

// --------------------------------------------------------------- dsw-scan

void cmd_dsw_scan(Run& r) {
  auto& c = r.cfg();
  const double b = c.get_double("dsw_scan.b");
  const auto ds = c.get_doubles("dsw_scan.d");
  std::vector<double> v0s;
  if (c.has("dsw_scan.V0") == c.has("dsw_scan.k0")) throw ConfigError("set exactly one of dsw_scan.V0 or dsw_scan.k0");
  if (c.has("dsw_scan.V0")) {
    v0s = c.get_doubles("dsw_scan.V0");
  } else {
    for (double k0 : c.get_doubles("dsw_scan.k0")) v0s.push_back(0.5 * k0 * k0);
  }
  c.reject_unused();
  const UnitSystem u = UnitSystem::dimensionless();
  std::string csv = csv_header("dsw_scan", r.digest(),
                               "d,V0,k0,k,kappa,tau_bar,tau_bar_high_barrier,delta_e_asymptotic,period_asymptotic,"
                               "delta_e_exact,ratio_exact");
  std::size_t rows = 0;
  for (double d : ds)
    for (double v0 : v0s) {
      const auto w = SquareDoubleWell::make(b, d, v0);
      const auto cf = SquareWellClosedForm::make(w, u, solve_square_even(w, u));
      const double tau = dsw_mean_tau(cf);
      const auto sp = dsw_splitting_and_period(cf);
      double de = NAN, ratio = NAN;
      try {
        const auto lv = solve_square_levels(w, u);
        const auto pair = spectrum_pair(0.5 * lv.k_even * lv.k_even, 0.5 * lv.k_odd * lv.k_odd, u);
        de = pair.delta_e;
        ratio = qm_sq_ratio(0.5 * pair.period, tau);
      } catch (const NumericalError&) {
        // Splitting below double resolution: leave the exact columns empty.
      }
      csv += row({d, v0, cf.k0, cf.k, cf.kappa, tau, dsw_mean_tau_high_barrier(cf), sp.delta_e, sp.period, de, ratio});
      ++rows;
    }
  r.write("dsw_scan.csv", "dsw_scan", csv);
  std::printf("dsw-scan: %zu rows\n", rows);
}

// -------------------------------------------------------------------- wkb

void cmd_wkb(Run& r) {
  auto& c = r.cfg();
  const Loaded l = load(c);
  c.reject_unused();
  const auto* p = std::get_if<RosenMorseDouble>(&l.spec.potential);
  if (!p) throw ConfigError("wkb needs potential.family = rosen_morse");
  const auto& u = l.spec.units;
  const auto lv = rm_levels(*p, u, 2, l.grid_points);
  const auto tp = turning_points(*p, lv[0]);
  const auto w = wkb_quantities(*p, u, lv[0], tp);
  const auto exact = spectrum_pair(lv[0], lv[1], u);
  json body;
  body["energy"] = lv[0];
  body["b_inner"] = tp.b_inner;
  body["c_outer"] = tp.c_outer;
  body["phi"] = w.phi;
  body["t_cl"] = w.t_cl;
  body["tau_wkb"] = w.tau_wkb;
  body["t_big_wkb"] = w.t_big_wkb;
  body["delta_e_wkb"] = w.delta_e_wkb;
  body["validity"] = w.validity;
  body["delta_e_exact"] = exact.delta_e;
  body["period_exact"] = exact.period;
  r.write_json("wkb.json", "wkb", body);
  std::printf("wkb: phi=%s tau_wkb=%s delta_e_wkb=%s\n", fmt17(w.phi).c_str(), fmt17(w.tau_wkb).c_str(),
              fmt17(w.delta_e_wkb).c_str());
}

// ------------------------------------------------------------- ratio-scan

void cmd_ratio_scan(Run& r) {
  auto& c = r.cfg();
  const double A = c.get_double("ratio_scan.A", 398.0);
  const double d = c.get_double("ratio_scan.d_angstrom", 0.17);
  const double k = c.get_double("ratio_scan.k", 2.22);
  const double b_min = c.get_double("ratio_scan.B_min", 680.0);
  const double b_max = c.get_double("ratio_scan.B_max", 2810.0);
  const std::uint64_t count = c.get_u64("ratio_scan.count", 20);
  const std::vector<double> points =
      c.has("ratio_scan.points_mev") ? c.get_doubles("ratio_scan.points_mev") : std::vector<double>{39.5, 98.0, 286.5};
  const std::uint64_t stops = c.get_u64("ratio_scan.stopping_points", 41);
  const double m_h = c.get_double("ratio_scan.m_h", constants::mass_hydrogen_u);
  const double m_n = c.get_double("ratio_scan.m_n", constants::mass_nitrogen_u);
  const std::size_t grid = c.get_u64("grid.points", 8001);
  c.reject_unused();
  if (count < 2) throw ConfigError("ratio_scan.count must be at least 2");
  const UnitSystem u = UnitSystem::spectroscopic(reduced_mass(m_h, m_n));
  std::string csv =
      csv_header("ratio_scan", r.digest(), "B,V0,V0_mev,fraction,delta_e0,tau_qm,tau_bar,ratio");
  auto add = [&](const RatioPoint& p) {
    csv += row({p.B, p.V0, p.V0_mev, p.fraction, p.delta_e0, p.tau_qm, p.tau_bar, p.ratio});
  };
  for (std::uint64_t i = 0; i < count; ++i) {
    const double B = b_min + (b_max - b_min) * static_cast<double>(i) / static_cast<double>(count - 1);
    add(ratio_point(RosenMorseDouble::make(A, B, d, k), u, grid));
  }
  r.write("ratio_scan.csv", "ratio_scan", csv);
  std::string stop_csv = csv_header("stopping_rule", r.digest(), "V0_mev,B,x_f,tau_bar,ratio");
  json pts = json::array();
  for (double mev : points) {
    const double B = b_for_barrier(A, d, k, mev / u.energy_to_mev(1.0));
    const auto p = RosenMorseDouble::make(A, B, d, k);
    const auto rp = ratio_point(p, u, grid);
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : stopping_rule_scan(p, u, stops, grid)) {
      stop_csv += row({mev, B, s.x_f, s.tau_bar, s.ratio});
      lo = std::min(lo, s.ratio);
      hi = std::max(hi, s.ratio);
    }
    pts.push_back({{"V0_mev", mev},
                   {"B", B},
                   {"fraction", rp.fraction},
                   {"ratio", rp.ratio},
                   {"stopping_variation", (hi - lo) / lo}});
  }
  r.write("ratio_scan_stopping.csv", "stopping_rule", stop_csv);
  r.write_json("ratio_scan.json", "ratio_scan_points", json{{"points", pts}});
  std::printf("ratio-scan: %llu sweep points, %zu named points\n", static_cast<unsigned long long>(count),
              points.size());
}

// ---------------------------------------------------------------- ammonia

void cmd_ammonia(Run& r) {
  auto& c = r.cfg();
  AmmoniaConfig a;
  a.targets.delta_e0 = c.get_double("targets.delta_e0", a.targets.delta_e0);
  a.targets.delta_e1 = c.get_double("targets.delta_e1", a.targets.delta_e1);
  a.targets.pair_gap = c.get_double("targets.pair_gap", a.targets.pair_gap);
  a.d = c.get_double("ammonia.d_angstrom", a.d);
  a.k = c.get_double("ammonia.k", a.k);
  a.m_h = c.get_double("ammonia.m_h", a.m_h);
  a.m_n = c.get_double("ammonia.m_n", a.m_n);
  a.fit = c.get_bool("ammonia.fit", false);
  a.A = c.get_double("ammonia.A", a.A);
  a.B = c.get_double("ammonia.B", a.B);
  auto& fo = a.fit_options;
  fo.w0 = c.get_double("fit.w0", fo.w0);
  fo.w1 = c.get_double("fit.w1", fo.w1);
  fo.w2 = c.get_double("fit.w2", fo.w2);
  fo.a_min = c.get_double("fit.A_min", fo.a_min);
  fo.a_max = c.get_double("fit.A_max", fo.a_max);
  fo.b_min = c.get_double("fit.B_min", fo.b_min);
  fo.b_max = c.get_double("fit.B_max", fo.b_max);
  fo.max_iterations = static_cast<int>(c.get_u64("fit.max_iterations", static_cast<std::uint64_t>(fo.max_iterations)));
  a.grid_points = c.get_u64("grid.points", a.grid_points);
  a.ensemble.n = c.get_u64("ensemble.n", 0);
  a.ensemble.dt_ps = c.get_double("ensemble.dt_ps", a.ensemble.dt_ps);
  a.ensemble.seed = c.get_u64("ensemble.seed", a.ensemble.seed);
  a.ensemble.workers = static_cast<unsigned>(c.get_u64("ensemble.workers", 0));
  const std::string isa = c.get_string("ensemble.isa", "auto");
  if (c.has("ensemble.tail_threshold")) a.ensemble.tail_threshold = c.get_double("ensemble.tail_threshold");
  const std::uint64_t bins = c.get_u64("ensemble.histogram_bins", 60);
  c.reject_unused();
  if (isa != "auto") a.ensemble.isa = simd::parse_isa(isa.c_str());
  r.set_seed(a.ensemble.seed);

  const auto rep = run_ammonia_pipeline(a);
  const UnitSystem u = UnitSystem::spectroscopic(rep.mass_u);
  json body;
  body["mass_u"] = rep.mass_u;
  body["potential"] = {{"A", rep.potential.A}, {"B", rep.potential.B}, {"d", rep.potential.d}, {"k", rep.potential.k}};
  if (rep.fit)
    body["fit"] = {{"objective", rep.fit->objective},
                   {"evaluations", rep.fit->evaluations},
                   {"delta_e0", rep.fit->splittings.delta_e0},
                   {"delta_e1", rep.fit->splittings.delta_e1},
                   {"pair_gap", rep.fit->splittings.pair_gap}};
  body["geometry"] = {{"x0", rep.geometry.x0}, {"V0", rep.geometry.V0}, {"VD", rep.geometry.VD},
                      {"V0_mev", u.energy_to_mev(rep.geometry.V0)}};
  body["levels"] = {rep.ground.e0, rep.ground.e1, rep.excited.e0, rep.excited.e1};
  body["delta_e0"] = rep.ground.delta_e;
  body["delta_e1"] = rep.excited.delta_e;
  body["pair_gap"] = rep.pair_gap;
  body["turning_points"] = {{"b_inner", rep.turning.b_inner}, {"c_outer", rep.turning.c_outer}};
  body["tau_bar"] = rep.tau_bar;
  body["tau_qm"] = rep.tau_qm;
  body["tau_high_barrier"] = rep.tau_high_barrier;
  body["occupancy"] = rep.occupancy;
  body["exterior_mass"] = rep.exterior_mass;
  body["nu_sq"] = rep.nu_sq;
  body["nu_qm"] = rep.nu_qm;
  body["nu_exp"] = rep.nu_exp;
  body["nu_exp_reference"] = "NH3 inversion line, 23.79 GHz";
  body["wkb"] = {{"phi", rep.wkb.phi},         {"t_cl", rep.wkb.t_cl},
                 {"tau_wkb", rep.wkb.tau_wkb}, {"t_big_wkb", rep.wkb.t_big_wkb},
                 {"delta_e_wkb", rep.wkb.delta_e_wkb}, {"validity", rep.wkb.validity}};
  body["units"] = {{"energy", "cm^-1"}, {"length", "angstrom"}, {"time", "ps"}, {"frequency", "GHz"}};

  std::string lv = csv_header("levels", r.digest(), "index,energy");
  for (int i = 0; i < 4; ++i) lv += std::to_string(i) + "," + fmt17(body["levels"][i].get<double>()) + "\n";
  r.write("ammonia_levels.csv", "levels", lv);
  std::ostringstream os;
  write_bound_state_csv(os, rep.ground_state, as_function(rep.potential));
  r.write("ammonia_ground_state.csv", "bound_state", os.str());

  if (rep.ensemble) {
    const auto& e = *rep.ensemble;
    body["ensemble"] = {{"n", e.stats.n},         {"timed_out", e.stats.timed_out}, {"mean", e.stats.mean},
                        {"stderr", e.stats.stderr_}, {"clamped_total", e.clamped_total},
                        {"isa", simd::isa_name(e.isa)}, {"dt_ps", a.ensemble.dt_ps}};
    if (e.tail) body["ensemble"]["tail"] = tail_json(*e.tail);
    r.write("ammonia_histogram.csv", "histogram",
            histogram_csv(r.digest(), histogram(e.stats, bins, 0.0, e.stats.taus.back())));
  }
  r.write_json("ammonia.json", "ammonia", body);
  std::printf("ammonia: tau_bar=%s ps nu_sq=%s GHz nu_qm=%s GHz delta_e0=%s cm^-1\n", fmt17(rep.tau_bar).c_str(),
              fmt17(rep.nu_sq).c_str(), fmt17(rep.nu_qm).c_str(), fmt17(rep.ground.delta_e).c_str());
}

// ------------------------------------------------------------------- main

struct Command {
  const char* name;
  const char* help;
  void (*fn)(Run&);
  const char* seed_key;
  const char* workers_key;
  const char* isa_key;
  bool grid;
};

const Command kCommands[] = {
    {"solve", "bound states and doublet splittings", cmd_solve, nullptr, nullptr, nullptr, true},
    {"mfpt", "mean first-passage time by quadrature", cmd_mfpt, nullptr, nullptr, nullptr, true},
    {"simulate", "one trajectory with path and energy record", cmd_simulate, "simulate.seed", nullptr, nullptr, true},
    {"ensemble", "first-passage ensemble with histogram and tail fit", cmd_ensemble, "ensemble.seed",
     "ensemble.workers", "ensemble.isa", true},
    {"tail-fit", "exponential tail fit of a saved ensemble", cmd_tail_fit, nullptr, nullptr, nullptr, false},
    {"dsw-scan", "closed-form square-well scan", cmd_dsw_scan, nullptr, nullptr, nullptr, false},
    {"wkb", "WKB quantities for a Rosen-Morse potential", cmd_wkb, nullptr, nullptr, nullptr, true},
    {"ratio-scan", "quantum to stochastic time ratio sweep", cmd_ratio_scan, nullptr, nullptr, nullptr, true},
    {"ammonia", "end-to-end ammonia pipeline", cmd_ammonia, "ensemble.seed", "ensemble.workers", "ensemble.isa", true},
};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  return "runtime_error";
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DomainError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

int fail(const std::string& sub, const char* kind, const std::string& msg, int code) {
  json err{{"schema", "sqt.error/1"}, {"subcommand", sub}, {"kind", kind}, {"message", msg}};
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic tunneling-time toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);
  std::string config_path;
  Overrides ov;
  std::string selected;
  for (const auto& cmd : kCommands) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("config", config_path, "configuration file")->required();
    sub->add_option("--seed", ov.seed, "override the run seed");
    sub->add_option("--workers", ov.workers, "override the worker count (0 = all cores)");
    sub->add_option("--grid-points", ov.grid_points, "override grid.points");
    sub->add_option("--isa", ov.isa, "kernel ISA: auto, scalar or avx2");
    sub->callback([&selected, name = cmd.name] { selected = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("", "usage_error", e.what(), 64);
  }

  const Command* cmd = nullptr;
  for (const auto& c : kCommands)
    if (selected == c.name) cmd = &c;
  try {
    Config cfg = Config::load(config_path);
    auto apply = [&](const char* key, const char* flag, const std::string& value) {
      if (!key) throw ConfigError(std::string(flag) + " does not apply to " + cmd->name);
      cfg.set(key, value);
    };
    if (ov.seed) apply(cmd->seed_key, "--seed", std::to_string(*ov.seed));
    if (ov.workers) apply(cmd->workers_key, "--workers", std::to_string(*ov.workers));
    if (ov.isa) apply(cmd->isa_key, "--isa", *ov.isa);
    if (ov.grid_points) apply(cmd->grid ? "grid.points" : nullptr, "--grid-points", std::to_string(*ov.grid_points));
    const char* env = std::getenv("SQT_OUTPUT_DIR");
    const fs::path out = env && *env ? fs::path(env) : fs::path("sqt_out");
    Run run(cmd->name, std::move(cfg), out);
    cmd->fn(run);
    run.finish();
  } catch (const std::exception& e) {
    return fail(cmd->name, error_kind(e), e.what(), exit_code(e));
  }
  return 0;
}
