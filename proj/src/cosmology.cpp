#include "siv/cosmology.hpp"

#include <algorithm>
#include <cmath>

#include "siv/csv.hpp"

namespace siv::cosmology {

namespace {

void require_flat_dust(const CosmologyParams& p, const char* who) {
  if (p.curvature() != 0)
    throw unsupported_model_error(std::string(who) + ": closed form exists only for k = 0");
  if (p.cs2() != 0.0)
    throw unsupported_model_error(std::string(who) + ": closed form exists only for cs2 = 0 (dust)");
}

void check_rtol(double rtol, const char* who) {
  if (!(rtol >= 1e-14 && rtol <= 1e-3))
    throw domain_error(std::string(who) + ": rtol must lie in [1e-14, 1e-3]");
}

}  // namespace

double scale_factor_analytic(double t, const CosmologyParams& p) {
  require_flat_dust(p, "scale_factor_analytic");
  if (!(t >= p.t_in()))
    throw domain_error("scale_factor_analytic: t must be >= t_in");
  if (t <= p.t_in()) return 0.0;  // Big-Bang anchor; t^3 - omega_m is rounding noise here
  const double x = std::max((t * t * t - p.omega_m()) / (1.0 - p.omega_m()), 0.0);
  return std::pow(x, 2.0 / 3.0);
}

double hubble_analytic(double t, const CosmologyParams& p) {
  require_flat_dust(p, "hubble_analytic");
  if (!(t > p.t_in()))
    throw domain_error("hubble_analytic: t must be > t_in (rate diverges at a = 0)");
  return 2.0 * t * t / (t * t * t - p.omega_m());
}

double accel_ratio_analytic(double t, const CosmologyParams& p) {
  require_flat_dust(p, "accel_ratio_analytic");
  if (!(t > p.t_in()))
    throw domain_error("accel_ratio_analytic: t must be > t_in");
  const double x = t * t * t - p.omega_m();
  return -2.0 * t * t * t * t / (x * x) + 4.0 * t / x;
}

double density_from_friedmann(double t, const CosmologyParams& p) {
  require_flat_dust(p, "density_from_friedmann");
  if (!(t > p.t_in()))
    throw domain_error("density_from_friedmann: t must be > t_in");
  const double H = hubble_analytic(t, p);
  return 3.0 * (H * H - (2.0 / t) * H);
}

double density_from_state(double t, double a, double a_dot, const CosmologyParams& p,
                          bool siv_terms) {
  if (!(t > 0.0)) throw domain_error("density_from_state: t must be > 0");
  if (!(a > 0.0)) throw domain_error("density_from_state: a must be > 0");
  const double H = a_dot / a;
  const double curv = static_cast<double>(p.curvature()) / (a * a);
  const double gauge = siv_terms ? (2.0 / t) * H : 0.0;
  return 3.0 * (curv + H * H - gauge);
}

Eigen::Vector3d friedmann_residuals(const BackgroundState& s, double a_ddot,
                                    const CosmologyParams& p, bool siv_terms) {
  if (!(s.t > 0.0)) throw domain_error("friedmann_residuals: t must be > 0");
  if (!(s.a > 0.0)) throw domain_error("friedmann_residuals: a must be > 0");
  const double H = s.a_dot / s.a;
  const double A = a_ddot / s.a;
  const double curv = static_cast<double>(p.curvature()) / (s.a * s.a);
  const double ll = siv_terms ? -1.0 / s.t : 0.0;  // lambda_dot / lambda
  const double pr = p.cs2() * s.rho;
  const double r1 = curv + H * H + 2.0 * H * ll - s.rho / 3.0;
  const double r2 = curv + 2.0 * A + H * H + 4.0 * H * ll + pr;
  const double r3 = A + H * ll + (3.0 * pr + s.rho) / 6.0;
  return {r1, r2, r3};
}

namespace {

// Right-hand side of the background system y = (a, a_dot) at time t,
// with rho eliminated through the conservation law.
struct BackgroundRhs {
  double K;            // conservation constant
  double exp_a;        // 3 (1 + cs2)
  double exp_lam;      // 1 + 3 cs2
  double press_factor; // (1 + 3 cs2) / 6
  bool siv_terms;

  Eigen::Vector2d operator()(double t, const Eigen::Vector2d& y) const {
    const double a = y[0];
    const double a_dot = y[1];
    double rho = K * std::pow(a, -exp_a);
    if (siv_terms) rho *= std::pow(t, exp_lam);  // lambda^-(1+3cs2) = t^(1+3cs2)
    double acc = -press_factor * rho * a;
    if (siv_terms) acc += a_dot / t;
    return {a_dot, acc};
  }
};

}  // namespace

BackgroundHistory::BackgroundHistory(CosmologyParams params,
                                     ode::DenseSolution<Eigen::Vector2d> dense,
                                     double conservation_constant, bool siv_terms, int n_samples)
    : params_(std::move(params)),
      dense_(std::move(dense)),
      conservation_constant_(conservation_constant),
      siv_terms_(siv_terms) {
  const double t0 = dense_.t_front();
  const double t1 = dense_.t_back();
  samples_.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    const double t = (n_samples == 1) ? t1 : t0 + (t1 - t0) * i / (n_samples - 1);
    samples_.push_back(at(t));
  }
}

BackgroundState BackgroundHistory::at(double t) const {
  const Eigen::Vector2d y = dense_(t);
  return {t, y[0], y[1], density_from_state(t, y[0], y[1], params_, siv_terms_)};
}

double BackgroundHistory::conservation_drift() const {
  const double exp_a = 3.0 * (1.0 + params_.cs2());
  const double exp_lam = 1.0 + 3.0 * params_.cs2();
  double worst = 0.0;
  for (const BackgroundState& s : samples_) {
    double c = s.rho * std::pow(s.a, exp_a);
    if (siv_terms_) c *= std::pow(lambda_t(s.t), exp_lam);
    worst = std::max(worst, std::abs(c / conservation_constant_ - 1.0));
  }
  return worst;
}

namespace {

BackgroundHistory integrate_impl(const CosmologyParams& p, double t_start, double t_end,
                                 const Eigen::Vector2d& y0, const IntegrationOptions& opt) {
  check_rtol(opt.rtol, "integrate_background");
  if (!(t_start > p.t_in()))
    throw domain_error("integrate_background: t_start must be > t_in");
  if (!(t_end > t_start))
    throw domain_error("integrate_background: t_end must be > t_start");
  if (opt.n_samples < 2)
    throw domain_error("integrate_background: n_samples must be >= 2");
  if (!(y0[0] > 0.0))
    throw domain_error("integrate_background: initial a must be > 0");

  const double rho0 = density_from_state(t_start, y0[0], y0[1], p, opt.siv_terms);
  const double exp_a = 3.0 * (1.0 + p.cs2());
  const double exp_lam = 1.0 + 3.0 * p.cs2();
  double K = rho0 * std::pow(y0[0], exp_a);
  if (opt.siv_terms) K *= std::pow(lambda_t(t_start), exp_lam);

  BackgroundRhs rhs{K, exp_a, exp_lam, (1.0 + 3.0 * p.cs2()) / 6.0, opt.siv_terms};
  ode::Options oopt;
  // Internal safety factor so the accumulated error stays within a small
  // multiple of the requested tolerance; the scale factor sweeps orders of
  // magnitude near t_in, so the control is kept essentially relative.
  oopt.rtol = std::max(0.25 * opt.rtol, 2e-15);
  oopt.atol = 0.01 * oopt.rtol;
  auto dense = ode::integrate(rhs, t_start, y0, t_end, oopt);
  return BackgroundHistory(p, std::move(dense), K, opt.siv_terms, opt.n_samples);
}

}  // namespace

BackgroundHistory integrate_background(const CosmologyParams& p, double t_start, double t_end,
                                       const IntegrationOptions& opt) {
  require_flat_dust(p, "integrate_background");
  const Eigen::Vector2d y0{scale_factor_analytic(t_start, p),
                           scale_factor_analytic(t_start, p) * hubble_analytic(t_start, p)};
  return integrate_impl(p, t_start, t_end, y0, opt);
}

BackgroundHistory integrate_background(const CosmologyParams& p, double t_start, double t_end,
                                       const Eigen::Vector2d& initial_a_adot,
                                       const IntegrationOptions& opt) {
  return integrate_impl(p, t_start, t_end, initial_a_adot, opt);
}

double default_start_offset(const CosmologyParams& p) { return 1e-6 * (1.0 - p.t_in()); }

std::vector<ExpansionRow> expansion_table(const CosmologyParams& p, int n_samples,
                                          Spacing spacing, double t_max, double start_offset) {
  require_flat_dust(p, "expansion_table");
  if (n_samples < 2) throw domain_error("expansion_table: n_samples must be >= 2");
  if (start_offset < 0.0) start_offset = default_start_offset(p);
  const double t_lo = p.t_in() + start_offset;
  if (!(t_max > t_lo)) throw domain_error("expansion_table: t_max must exceed t_in + offset");

  std::vector<ExpansionRow> rows;
  rows.reserve(static_cast<std::size_t>(n_samples));
  const double tau_lo = tau_of_t(t_lo, p);
  const double tau_hi = tau_of_t(t_max, p);
  for (int i = 0; i < n_samples; ++i) {
    const double f = static_cast<double>(i) / (n_samples - 1);
    const double t = (spacing == Spacing::linear_t)
                         ? t_lo + (t_max - t_lo) * f
                         : t_of_tau(tau_lo + (tau_hi - tau_lo) * f, p);
    ExpansionRow row;
    row.t = t;
    row.tau = tau_of_t(t, p);
    row.a = scale_factor_analytic(t, p);
    row.a_dot_over_a = hubble_analytic(t, p);
    row.lambda = lambda_t(t);
    row.rho = density_from_friedmann(t, p);
    rows.push_back(row);
  }
  return rows;
}

void write_expansion_csv(std::ostream& os, const std::vector<ExpansionRow>& rows) {
  os << "t,tau,a,a_dot_over_a,lambda,rho\n";
  for (const ExpansionRow& r : rows) {
    const double vals[] = {r.t, r.tau, r.a, r.a_dot_over_a, r.lambda, r.rho};
    csv::write_row(os, vals);
  }
}

}  // namespace siv::cosmology
