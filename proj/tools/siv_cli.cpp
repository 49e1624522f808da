// Command-line front end: gauge tables and checks, background expansion
// histories, two-body orbit integration with invariant summaries, and
// secular-rate tables.  Data goes to stdout (or --output), diagnostics and
// verification summaries to stderr.  Identical invocations produce
// byte-identical output.
//
// Exit codes: 0 ok, 2 domain error, 3 tolerance failure, 4 collision
// (command-line parse errors use CLI11's own nonzero codes).

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "presets.hpp"
#include "siv/cosmology.hpp"
#include "siv/csv.hpp"
#include "siv/dynamics.hpp"
#include "siv/gauge.hpp"

namespace {

using siv::csv::g17;

constexpr int exit_ok = 0;
constexpr int exit_domain = 2;
constexpr int exit_tolerance = 3;
constexpr int exit_collision = 4;

struct CommonOpts {
  std::string format = "table";  // table | csv
  std::string output;            // empty: stdout
};

void add_common(CLI::App* cmd, CommonOpts& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"table", "csv"}))
      ->capture_default_str();
  cmd->add_option("--output", c.output, "Write data to this file instead of stdout");
}

// Row-oriented writer that renders either CSV or an aligned table.
class Emitter {
 public:
  Emitter(const CommonOpts& opts) : csv_(opts.format == "csv") {
    if (!opts.output.empty()) {
      file_.open(opts.output);
      if (!file_) throw siv::domain_error("cannot open output file " + opts.output);
    }
  }

  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }

  void header(const std::vector<std::string>& names) {
    if (csv_) {
      siv::csv::write_row(out(), names);
    } else {
      std::string line;
      for (const auto& n : names) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%14s", n.c_str());
        line += buf;
      }
      out() << line << '\n';
    }
  }

  void row(const std::vector<double>& values) {
    if (csv_) {
      siv::csv::write_row(out(), values);
    } else {
      std::string line;
      for (double v : values) line += siv::csv::cell(v);
      out() << line << '\n';
    }
  }

 private:
  bool csv_;
  std::ofstream file_;
};

// ---------------------------------------------------------------------------
// gauge

struct GaugeOpts {
  CommonOpts common;
  double omega_m = 0.3;
  double tau0 = siv::default_tau0;
  double lambda_E = 3.0;
  std::string table;  // tin | psi0
  bool check = false;
  double t_min = 0.0;  // 0: just above t_in
  double t_max = 1.0;
  int samples = 5;
};

int run_gauge(const GaugeOpts& o) {
  Emitter em(o.common);

  if (o.table == "tin") {
    em.header({"omega_m", "t_in"});
    for (const double om : {0.0, 0.01, 0.1, 0.3, 0.5}) em.row({om, std::cbrt(om)});
    return exit_ok;
  }
  if (o.table == "psi0") {
    em.header({"omega_m", "psi0"});
    for (const double om : {0.0, 0.05, 0.10, 0.20, 0.30, 1.0})
      em.row({om, 1.0 - std::cbrt(om)});
    return exit_ok;
  }

  if (o.check) {
    double worst1 = 0.0, worst2 = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double t = 0.1 + 9.9 * i / 1000.0;
      const Eigen::Vector2d r = siv::gauge_residuals(t, o.lambda_E);
      worst1 = std::max(worst1, std::abs(r[0]));
      worst2 = std::max(worst2, std::abs(r[1]));
    }
    em.out() << "max_abs_r1," << g17(worst1) << "\n";
    em.out() << "max_abs_r2," << g17(worst2) << "\n";
    return exit_ok;
  }

  const siv::CosmologyParams p(o.omega_m, 0, 0.0, o.tau0, o.lambda_E);
  if (p.nearly_degenerate())
    std::cerr << "siv: warning: omega_m >= 0.999, gauge effects are numerically negligible\n";
  const double t_lo = (o.t_min > 0.0) ? o.t_min : p.t_in() + 1e-3 * (1.0 - p.t_in());
  if (!(o.t_max > t_lo)) throw siv::domain_error("gauge: t-max must exceed t-min");
  if (o.samples < 2) throw siv::domain_error("gauge: samples must be >= 2");

  em.header({"t", "lambda", "kappa", "tau", "psi"});
  for (int i = 0; i < o.samples; ++i) {
    const double t = t_lo + (o.t_max - t_lo) * i / (o.samples - 1);
    const double tau = siv::tau_of_t(t, p);
    em.row({t, siv::lambda_t(t), siv::kappa_t(t), tau, siv::psi_tau(tau, p)});
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// cosmo

struct CosmoOpts {
  CommonOpts common;
  double omega_m = 0.3;
  double tau0 = siv::default_tau0;
  int k = 0;
  double cs2 = 0.0;
  int samples = 100;
  double t_max = 1.0;
  double start_offset = -1.0;
  std::string spacing = "linear-t";
  double tol = 1e-10;
  bool verify = false;
  // explicit initial data, required for curved or radiative models
  double a0 = 0.0;
  double adot0 = 0.0;
  double t_start = 0.0;
};

int run_cosmo(const CosmoOpts& o) {
  namespace cosmo = siv::cosmology;
  const siv::CosmologyParams p(o.omega_m, o.k, o.cs2, o.tau0);
  if (p.nearly_degenerate())
    std::cerr << "siv: warning: omega_m >= 0.999, gauge effects are numerically negligible\n";
  Emitter em(o.common);

  const bool flat_dust = (o.k == 0 && o.cs2 == 0.0);

  if (flat_dust) {
    const auto spacing =
        o.spacing == "linear-tau" ? cosmo::Spacing::linear_tau : cosmo::Spacing::linear_t;
    const auto rows = cosmo::expansion_table(p, o.samples, spacing, o.t_max, o.start_offset);
    if (o.common.format == "csv") {
      cosmo::write_expansion_csv(em.out(), rows);
    } else {
      em.header({"t", "tau", "a", "a_dot_over_a", "lambda", "rho"});
      for (const auto& r : rows) em.row({r.t, r.tau, r.a, r.a_dot_over_a, r.lambda, r.rho});
    }

    if (o.verify) {
      cosmo::IntegrationOptions iopt;
      iopt.rtol = o.tol;
      iopt.n_samples = std::max(o.samples, 50);
      const double t_lo = std::max(rows.front().t, p.t_in() + 1e-3 * (1.0 - p.t_in()));
      const auto hist = cosmo::integrate_background(p, t_lo, o.t_max, iopt);
      double worst_a = 0.0;
      for (const auto& s : hist.samples())
        worst_a = std::max(worst_a, std::abs(s.a - cosmo::scale_factor_analytic(s.t, p)));
      // residuals of the analytic solution, sampled away from the a -> 0
      // boundary where the individual terms blow up
      double worst_res = 0.0;
      const double t_res = std::max(t_lo, p.t_in() + 0.05 * (1.0 - p.t_in()));
      for (int i = 0; i <= 200; ++i) {
        const double t = t_res + (o.t_max - t_res) * i / 200.0;
        const double a = cosmo::scale_factor_analytic(t, p);
        const Eigen::Vector3d r = cosmo::friedmann_residuals(
            {t, a, a * cosmo::hubble_analytic(t, p), cosmo::density_from_friedmann(t, p)},
            a * cosmo::accel_ratio_analytic(t, p), p);
        worst_res = std::max({worst_res, std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
      }
      std::cerr << "verify: max |a_numeric - a_analytic| = " << g17(worst_a) << "\n";
      std::cerr << "verify: max analytic E1-E3 residual = " << g17(worst_res) << "\n";
      std::cerr << "verify: conservation drift = " << g17(hist.conservation_drift()) << "\n";
    }
    return exit_ok;
  }

  // curved / radiative: explicit initial data
  if (!(o.a0 > 0.0) || o.t_start <= 0.0)
    throw siv::domain_error(
        "cosmo: curved or radiative models need --a0, --adot0 and --t-start");
  cosmo::IntegrationOptions iopt;
  iopt.rtol = o.tol;
  iopt.n_samples = o.samples;
  const auto hist =
      cosmo::integrate_background(p, o.t_start, o.t_max, Eigen::Vector2d{o.a0, o.adot0}, iopt);
  if (o.common.format == "csv") em.out() << "t,tau,a,a_dot_over_a,lambda,rho\n";
  else em.header({"t", "tau", "a", "a_dot_over_a", "lambda", "rho"});
  for (const auto& s : hist.samples()) {
    const std::vector<double> vals = {s.t,     siv::tau_of_t(s.t, p), s.a, s.a_dot / s.a,
                                      siv::lambda_t(s.t), s.rho};
    if (o.common.format == "csv") siv::csv::write_row(em.out(), vals);
    else em.row(vals);
  }
  if (o.verify)
    std::cerr << "verify: conservation drift = " << g17(hist.conservation_drift()) << "\n";
  return exit_ok;
}

// ---------------------------------------------------------------------------
// orbit

struct OrbitOpts {
  CommonOpts common;
  std::string preset = "circular-unit";
  std::string preset_file;
  bool newton = false;
  bool rates = false;
  double tol = 1e-12;
  int samples = 1000;
  double revolutions = 3.0;
  double tau_end = 0.0;  // 0: use revolutions
  std::optional<double> tau_start;
  std::optional<double> circular_r;
  std::optional<double> rc;
  double ecc = 0.0;
  double phi0 = 0.0;
  std::vector<double> state;  // x y vx vy
  std::optional<double> omega_m;
  std::optional<double> tau0;
  std::optional<double> G;
  std::optional<double> M0;
  std::optional<double> r_min;
};

siv::dynamics::GravitySystem system_from(const OrbitOpts& o, const sivcli::Preset& preset) {
  siv::dynamics::GravitySystem sys;
  sys.G = o.G.value_or(preset.G);
  sys.M0 = o.M0.value_or(preset.M0);
  sys.params = siv::CosmologyParams(o.omega_m.value_or(preset.omega_m), 0, 0.0,
                                    o.tau0.value_or(preset.tau0));
  sys.siv_enabled = !o.newton;
  if (o.r_min) sys.r_min = *o.r_min;
  if (preset.speed_of_light > 0.0) sys.speed_of_light = preset.speed_of_light;
  return sys;
}

int run_orbit(const OrbitOpts& o) {
  namespace dyn = siv::dynamics;
  const auto presets = sivcli::load_presets(o.preset_file);
  const auto it = presets.find(o.preset);
  if (it == presets.end()) throw siv::domain_error("orbit: unknown preset " + o.preset);
  const sivcli::Preset& preset = it->second;
  const dyn::GravitySystem sys = system_from(o, preset);

  const double tau_start = o.tau_start.value_or(sys.siv_enabled ? sys.params.tau0() : 0.0);

  if (o.rates) {
    Emitter em(o.common);
    const dyn::SecularRates r = dyn::secular_rates(tau_start, sys);
    auto unit = "per_" + preset.time_unit;
    em.out() << "quantity,value_" << unit << "\n";
    em.out() << "a_dot_over_a," << g17(r.a_dot_over_a) << "\n";
    em.out() << "M_dot_over_M," << g17(r.M_dot_over_M) << "\n";
    em.out() << "T_dot_over_T," << g17(r.T_dot_over_T) << "\n";
    em.out() << "psi_dot_over_psi," << g17(r.psi_dot_over_psi) << "\n";
    if (preset.cm_per_length_unit > 0.0) {
      const double rec = preset.r0 * r.a_dot_over_a * preset.cm_per_length_unit;
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.4f", rec);
      em.out() << "r0_recession_cm_" << unit << "," << buf << "\n";
    }
    return exit_ok;
  }

  // initial state
  dyn::OrbitState s0;
  if (!o.state.empty()) {
    if (o.state.size() != 4) throw siv::domain_error("orbit: --state needs x y vx vy");
    s0 = {tau_start, {o.state[0], o.state[1]}, {o.state[2], o.state[3]}};
  } else if (o.rc) {
    const double pt = sys.siv_enabled
                          ? siv::psi_tau(tau_start, sys.params) / sys.params.tau0()
                          : 1.0;
    const double L = pt * std::sqrt(sys.G * dyn::mass_at(tau_start, sys) * (*o.rc));
    const dyn::ConicOrbit conic = dyn::make_conic(L, o.ecc, o.phi0, tau_start, sys);
    s0 = dyn::conic_state(conic, o.phi0, sys);
  } else {
    s0 = dyn::circular_track_state(o.circular_r.value_or(preset.r0), tau_start, sys);
  }

  const double r0 = s0.r.norm();
  const double T_est =
      2.0 * M_PI * std::sqrt(r0 * r0 * r0 / (sys.G * dyn::mass_at(tau_start, sys)));
  const double tau_end = (o.tau_end > tau_start) ? o.tau_end : tau_start + o.revolutions * T_est;

  const auto traj = dyn::integrate_orbit(s0, sys, tau_end, o.tol);
  const auto samples = traj.sample(o.samples);

  Emitter em(o.common);
  if (o.common.format == "csv") em.out() << "tau,x,y,vx,vy,r,phi,L,energy\n";
  else em.header({"tau", "x", "y", "vx", "vy", "r", "phi", "L", "energy"});
  for (const auto& s : samples) {
    const std::vector<double> vals = {s.tau,
                                      s.r.x(),
                                      s.r.y(),
                                      s.v.x(),
                                      s.v.y(),
                                      s.r.norm(),
                                      std::atan2(s.r.y(), s.r.x()),
                                      dyn::angular_momentum(s, sys),
                                      dyn::orbital_energy(s, sys)};
    if (o.common.format == "csv") siv::csv::write_row(em.out(), vals);
    else em.row(vals);
  }

  // invariant summary
  const double L0 = dyn::angular_momentum(samples.front(), sys);
  const double v0 = samples.front().v.norm();
  const double t_ref = sys.siv_enabled ? siv::t_of_tau(tau_start, sys.params) : 1.0;
  double L_drift = 0.0, v_drift = 0.0, r_drift = 0.0;
  for (const auto& s : samples) {
    L_drift = std::max(L_drift, std::abs(dyn::angular_momentum(s, sys) / L0 - 1.0));
    v_drift = std::max(v_drift, std::abs(s.v.norm() / v0 - 1.0));
    const double track =
        sys.siv_enabled ? r0 * siv::t_of_tau(s.tau, sys.params) / t_ref : r0;
    r_drift = std::max(r_drift, std::abs(s.r.norm() / track - 1.0));
  }
  std::cerr << "summary: L drift = " << g17(L_drift) << "\n";
  std::cerr << "summary: speed drift = " << g17(v_drift) << "\n";
  std::cerr << "summary: radius drift vs secular track = " << g17(r_drift) << "\n";

  if (o.revolutions >= 2.0 || o.tau_end > 0.0) {
    try {
      const auto fits = dyn::fit_per_revolution(traj, std::max(o.samples, 2000));
      if (fits.size() >= 2) {
        double e_drift = 0.0;
        for (const auto& f : fits)
          e_drift = std::max(e_drift, std::abs(f.conic.e - fits.front().conic.e));
        std::cerr << "summary: fitted e = " << g17(fits.front().conic.e)
                  << ", drift = " << g17(e_drift) << "\n";
      }
    } catch (const siv::fit_error&) {
      std::cerr << "summary: fitted e = n/a (arc too short)\n";
    }
    const auto crossings = dyn::ray_crossings(traj, 0.0);
    if (crossings.size() >= 2) {
      double worst = 0.0;
      for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        const double T = crossings[k + 1] - crossings[k];
        double r_c, M;
        if (sys.siv_enabled) {
          const double beta = siv::dt_dtau(sys.params);
          const double t1 = siv::t_of_tau(crossings[k], sys.params);
          const double t2 = siv::t_of_tau(crossings[k + 1], sys.params);
          const double tau_gm = (std::sqrt(t1 * t2) - sys.params.t_in()) / beta;
          r_c = traj.at(tau_gm).r.norm();
          M = dyn::mass_at(tau_gm, sys);
        } else {
          r_c = traj.at(0.5 * (crossings[k] + crossings[k + 1])).r.norm();
          M = sys.M0;
        }
        worst = std::max(worst, std::abs(dyn::kepler_ratio(r_c, M, T, sys.G) - 1.0));
      }
      std::cerr << "summary: max |kepler ratio - 1| = " << g17(worst) << "\n";
    }
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------
// secular

struct SecularOpts {
  CommonOpts common;
  double omega_m = 0.3;
  double tau0 = siv::default_tau0;       // Gyr
  std::vector<double> epochs;            // Gyr; default: tau0
};

int run_secular(const SecularOpts& o) {
  const siv::CosmologyParams p(o.omega_m, 0, 0.0, o.tau0);
  Emitter em(o.common);
  std::vector<double> epochs = o.epochs;
  if (epochs.empty()) epochs.push_back(o.tau0);

  em.header({"tau_gyr", "psi", "adot_over_a_per_gyr", "mdot_over_m_per_gyr",
             "tdot_over_t_per_gyr", "psidot_over_psi_per_gyr", "adot_over_a_per_yr"});
  for (const double tau : epochs) {
    const double psi = siv::psi_tau(tau, p);
    const double rate = psi / p.tau0();
    em.row({tau, psi, rate, rate, rate, -rate, rate * 1e-9});
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"siv: scale-invariant vacuum cosmology and two-body dynamics toolkit"};
  app.require_subcommand(1);

  GaugeOpts go;
  CLI::App* gauge = app.add_subcommand("gauge", "Gauge factor, connection and psi tables");
  gauge->add_option("--omega-m", go.omega_m, "Matter density parameter")->capture_default_str();
  gauge->add_option("--tau0", go.tau0, "Present age in user time units")->capture_default_str();
  gauge->add_option("--lambda-e", go.lambda_E, "Einstein-frame cosmological constant")
      ->capture_default_str();
  gauge->add_option("--table", go.table, "Print a reference table")
      ->check(CLI::IsMember({"tin", "psi0"}));
  gauge->add_flag("--check", go.check, "Print max gauge ODE residuals over t in (0.1, 10]");
  gauge->add_option("--t-min", go.t_min, "Grid start (default: just above t_in)");
  gauge->add_option("--t-max", go.t_max, "Grid end")->capture_default_str();
  gauge->add_option("--samples", go.samples, "Grid points")->capture_default_str();
  add_common(gauge, go.common, "table");

  CosmoOpts co;
  CLI::App* cosmo = app.add_subcommand("cosmo", "Background expansion history");
  cosmo->add_option("--omega-m", co.omega_m, "Matter density parameter")->capture_default_str();
  cosmo->add_option("--tau0", co.tau0, "Present age in user time units")->capture_default_str();
  cosmo->add_option("--k", co.k, "Curvature (-1, 0, +1)")->capture_default_str();
  cosmo->add_option("--cs2", co.cs2, "Sound speed squared (0 dust, 1/3 radiation)")
      ->capture_default_str();
  cosmo->add_option("--samples", co.samples, "Number of rows")->capture_default_str();
  cosmo->add_option("--t-max", co.t_max, "Final dimensionless time")->capture_default_str();
  cosmo->add_option("--start-offset", co.start_offset,
                    "First row at t_in + offset (default 1e-6 (1 - t_in))");
  cosmo->add_option("--spacing", co.spacing, "Row spacing")
      ->check(CLI::IsMember({"linear-t", "linear-tau"}))
      ->capture_default_str();
  cosmo->add_option("--tol", co.tol, "Integration tolerance")->capture_default_str();
  cosmo->add_flag("--verify", co.verify,
                  "Report oracle agreement, residuals and conservation drift on stderr");
  cosmo->add_option("--a0", co.a0, "Initial scale factor (curved/radiative models)");
  cosmo->add_option("--adot0", co.adot0, "Initial da/dt (curved/radiative models)");
  cosmo->add_option("--t-start", co.t_start, "Initial time (curved/radiative models)");
  add_common(cosmo, co.common, "csv");

  OrbitOpts oo;
  CLI::App* orbit = app.add_subcommand("orbit", "Two-body trajectory and invariant summary");
  orbit->add_option("--preset", oo.preset, "Named parameter preset")->capture_default_str();
  orbit->add_option("--preset-file", oo.preset_file, "Preset file path");
  orbit->add_flag("--newton", oo.newton, "Disable the gauge terms (Newtonian reference)");
  orbit->add_flag("--rates", oo.rates, "Print secular rates instead of integrating");
  orbit->add_option("--tol", oo.tol, "Integration tolerance")->capture_default_str();
  orbit->add_option("--samples", oo.samples, "CSV sample count")->capture_default_str();
  orbit->add_option("--revolutions", oo.revolutions, "Integration span in estimated periods")
      ->capture_default_str();
  orbit->add_option("--tau-end", oo.tau_end, "Explicit end time (overrides --revolutions)");
  orbit->add_option("--tau-start", [&oo](const std::vector<std::string>& v) {
    oo.tau_start = std::stod(v[0]);
    return true;
  }, "Start epoch (default: tau0)");
  orbit->add_option("--circular", [&oo](const std::vector<std::string>& v) {
    oo.circular_r = std::stod(v[0]);
    return true;
  }, "Circular secular-track start at this radius");
  orbit->add_option("--rc", [&oo](const std::vector<std::string>& v) {
    oo.rc = std::stod(v[0]);
    return true;
  }, "Conic start: circular radius of the conic");
  orbit->add_option("--e", oo.ecc, "Conic start: eccentricity")->capture_default_str();
  orbit->add_option("--phi0", oo.phi0, "Conic start: pericenter angle")->capture_default_str();
  orbit->add_option("--state", oo.state, "Raw initial state: x y vx vy")->expected(4);
  orbit->add_option("--omega-m", [&oo](const std::vector<std::string>& v) {
    oo.omega_m = std::stod(v[0]);
    return true;
  }, "Override preset omega_m");
  orbit->add_option("--tau0", [&oo](const std::vector<std::string>& v) {
    oo.tau0 = std::stod(v[0]);
    return true;
  }, "Override preset tau0");
  orbit->add_option("--G", [&oo](const std::vector<std::string>& v) {
    oo.G = std::stod(v[0]);
    return true;
  }, "Override preset G");
  orbit->add_option("--M0", [&oo](const std::vector<std::string>& v) {
    oo.M0 = std::stod(v[0]);
    return true;
  }, "Override preset central mass");
  orbit->add_option("--r-min", [&oo](const std::vector<std::string>& v) {
    oo.r_min = std::stod(v[0]);
    return true;
  }, "Collision threshold");
  add_common(orbit, oo.common, "csv");

  SecularOpts so;
  CLI::App* secular = app.add_subcommand("secular", "Secular variation rates");
  secular->add_option("--omega-m", so.omega_m, "Matter density parameter")->capture_default_str();
  secular->add_option("--tau0", so.tau0, "Present age in Gyr")->capture_default_str();
  secular->add_option("--epochs", so.epochs, "Epochs in Gyr (default: tau0)");
  add_common(secular, so.common, "table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gauge) return run_gauge(go);
    if (*cosmo) return run_cosmo(co);
    if (*orbit) return run_orbit(oo);
    if (*secular) return run_secular(so);
  } catch (const siv::collision_error& e) {
    std::cerr << "siv: " << e.what() << "\n";
    return exit_collision;
  } catch (const siv::tolerance_error& e) {
    std::cerr << "siv: " << e.what() << "\n";
    return exit_tolerance;
  } catch (const siv::domain_error& e) {
    std::cerr << "siv: " << e.what() << "\n";
    return exit_domain;
  } catch (const std::exception& e) {
    std::cerr << "siv: " << e.what() << "\n";
    return 1;
  }
  return exit_ok;
}
