#include "siv/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace siv::dynamics {

namespace {

double psi_over_tau0(double tau, const GravitySystem& sys) {
  return psi_tau(tau, sys.params) / sys.params.tau0();
}

void check_rtol(double rtol, const char* who) {
  if (!(rtol >= 1e-14 && rtol <= 1e-3))
    throw domain_error(std::string(who) + ": rtol must lie in [1e-14, 1e-3]");
}

}  // namespace

ConicOrbit make_conic(double L, double e, double phi0, double tau_ref, const GravitySystem& sys) {
  if (!(L > 0.0)) throw domain_error("make_conic: L must be > 0");
  if (!(e >= 0.0)) throw domain_error("make_conic: e must be >= 0");
  ConicOrbit c;
  c.L = L;
  c.e = e;
  c.phi0 = phi0;
  c.tau_ref = tau_ref;
  if (sys.siv_enabled) {
    const double pt = psi_over_tau0(tau_ref, sys);
    c.r_c = L * L / (sys.G * mass_at(tau_ref, sys) * pt * pt);
  } else {
    c.r_c = L * L / (sys.G * sys.M0);
  }
  return c;
}

double mass_at(double tau, const GravitySystem& sys) {
  if (!sys.siv_enabled) return sys.M0;
  if (!(tau >= 0.0)) throw domain_error("mass_at: tau must be >= 0");
  return sys.M0 * t_of_tau(tau, sys.params);
}

Vec2 acceleration(const OrbitState& s, const GravitySystem& sys) {
  const double r = s.r.norm();
  if (r < sys.r_min)
    throw collision_error("acceleration: |r| fell below the collision threshold r_min");
  const double r3 = r * r * r;
  Vec2 a = (-sys.G * mass_at(s.tau, sys) / r3) * s.r;
  if (sys.siv_enabled) a += psi_over_tau0(s.tau, sys) * s.v;
  return a;
}

double angular_momentum(const OrbitState& s, const GravitySystem& sys) {
  const double h = s.r.x() * s.v.y() - s.r.y() * s.v.x();
  return sys.siv_enabled ? psi_over_tau0(s.tau, sys) * h : h;
}

double orbital_energy(const OrbitState& s, const GravitySystem& sys) {
  const double r = s.r.norm();
  if (!(r > 0.0)) throw domain_error("orbital_energy: |r| must be > 0");
  return 0.5 * s.v.squaredNorm() - sys.G * mass_at(s.tau, sys) / r;
}

double binet_radius(double phi, const ConicOrbit& conic) {
  if (!(conic.r_c > 0.0)) throw domain_error("binet_radius: r_c must be > 0");
  const double denom = 1.0 + conic.e * std::cos(phi - conic.phi0);
  if (!(denom > 0.0))
    throw domain_error("binet_radius: angle lies at or beyond the conic asymptote");
  return conic.r_c / denom;
}

double circular_speed(double r_c, double tau, const GravitySystem& sys) {
  if (!(r_c > 0.0)) throw domain_error("circular_speed: r_c must be > 0");
  return std::sqrt(sys.G * mass_at(tau, sys) / r_c);
}

SecularRates secular_rates(double tau, const GravitySystem& sys) {
  if (!sys.siv_enabled) return {0.0, 0.0, 0.0, 0.0};
  const double rate = psi_over_tau0(tau, sys);
  return {rate, rate, rate, -rate};
}

double kepler_ratio(double r_c, double M_total, double T, double G) {
  if (!(r_c > 0.0 && M_total > 0.0 && T > 0.0 && G > 0.0))
    throw domain_error("kepler_ratio: all arguments must be > 0");
  return 4.0 * M_PI * M_PI * r_c * r_c * r_c / (G * M_total * T * T);
}

double weak_field_residual(const OrbitState& s, const GravitySystem& sys,
                           std::optional<double> kappa_override) {
  const double speed = s.v.norm();
  if (!(speed / sys.speed_of_light < 0.01))
    throw domain_error("weak_field_residual: |v|/c must be < 0.01 (slow-motion limit)");
  const double r = s.r.norm();
  if (!(r > 0.0)) throw domain_error("weak_field_residual: |r| must be > 0");

  // Weak-field geodesic form: dv/dtau = -grad(Phi) + kappa v, Phi = -G M / r.
  const double kappa = kappa_override ? *kappa_override
                                      : (sys.siv_enabled ? psi_over_tau0(s.tau, sys) : 0.0);
  const Vec2 rhat = s.r / r;
  const Vec2 geodesic = (-sys.G * mass_at(s.tau, sys) / (r * r)) * rhat + kappa * s.v;
  return (geodesic - acceleration(s, sys)).norm();
}

namespace {

struct OrbitRhs {
  double GM0;       // G * M0
  double t_in;      // 0 in Newtonian mode
  double beta;      // dt/dtau, 0 in Newtonian mode
  double inv_tau0;  // 0 in Newtonian mode

  Eigen::Vector4d operator()(double tau, const Eigen::Vector4d& y) const {
    const double x = y[0], yy = y[1], vx = y[2], vy = y[3];
    const double r2 = x * x + yy * yy;
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    const double t = t_in + beta * tau;                       // t(tau); 1 in Newtonian mode
    const double gm = GM0 * t;                                // G M(tau)
    const double drag = (beta > 0.0) ? (1.0 - t_in) * inv_tau0 / t : 0.0;  // psi/tau0
    return {vx, vy, -gm * x / r3 + drag * vx, -gm * yy / r3 + drag * vy};
  }
};

OrbitRhs make_rhs(const GravitySystem& sys) {
  if (sys.siv_enabled) {
    return {sys.G * sys.M0, sys.params.t_in(), dt_dtau(sys.params), 1.0 / sys.params.tau0()};
  }
  return {sys.G * sys.M0, 1.0, 0.0, 0.0};  // t frozen at 1: M = M0, no drag
}

}  // namespace

Trajectory::Trajectory(GravitySystem sys, ode::DenseSolution<Vec4> dense)
    : system_(std::move(sys)), dense_(std::move(dense)) {
  steps_.reserve(dense_.segments().size() + 1);
  for (const auto& seg : dense_.segments())
    steps_.push_back({seg.t0, seg.c[0].head<2>(), seg.c[0].tail<2>()});
  steps_.push_back({dense_.t_back(), dense_.y_back().head<2>(), dense_.y_back().tail<2>()});
}

OrbitState Trajectory::at(double tau) const {
  const Vec4 y = dense_(tau);
  return {tau, y.head<2>(), y.tail<2>()};
}

std::vector<OrbitState> Trajectory::sample(int n) const {
  if (n < 2) throw domain_error("Trajectory::sample: n must be >= 2");
  std::vector<OrbitState> out;
  out.reserve(static_cast<std::size_t>(n));
  const double a = tau_begin(), b = tau_end();
  for (int i = 0; i < n; ++i) out.push_back(at(a + (b - a) * i / (n - 1)));
  return out;
}

Trajectory integrate_orbit(const OrbitState& initial, const GravitySystem& sys, double tau_end,
                           double rtol) {
  check_rtol(rtol, "integrate_orbit");
  if (sys.siv_enabled && !(initial.tau >= 0.0))
    throw domain_error("integrate_orbit: initial tau must be >= 0");
  if (!(tau_end > initial.tau))
    throw domain_error("integrate_orbit: tau_end must exceed the initial tau");
  if (initial.r.norm() < sys.r_min)
    throw collision_error("integrate_orbit: initial state is inside the collision threshold");

  const OrbitRhs rhs = make_rhs(sys);
  ode::Options opt;
  opt.rtol = rtol;
  opt.atol = rtol;
  const Vec4 y0{initial.r.x(), initial.r.y(), initial.v.x(), initial.v.y()};
  const double r_min = sys.r_min;
  const std::function<bool(double, const Vec4&)> hit = [r_min](double, const Vec4& y) {
    return std::hypot(y[0], y[1]) < r_min;
  };
  auto dense = ode::integrate(rhs, initial.tau, y0, tau_end, opt, hit);
  if (dense.stopped_early())
    throw collision_error("integrate_orbit: |r| fell below the collision threshold r_min");
  return Trajectory(sys, std::move(dense));
}

OrbitState circular_track_state(double r_ref, double tau_ref, const GravitySystem& sys) {
  if (!(r_ref > 0.0)) throw domain_error("circular_track_state: r_ref must be > 0");
  if (!sys.siv_enabled)
    return {tau_ref, {r_ref, 0.0}, {0.0, std::sqrt(sys.G * sys.M0 / r_ref)}};

  const double t_ref = t_of_tau(tau_ref, sys.params);
  if (!(t_ref > 0.0))
    throw domain_error("circular_track_state: tau_ref coincides with the Big Bang");
  const double c = r_ref / t_ref;  // r(tau) = c t(tau) along the track
  const double beta = dt_dtau(sys.params);
  const double vr = beta * c;
  const double vphi2 = sys.G * sys.M0 / c - vr * vr;
  if (!(vphi2 > 0.0))
    throw domain_error("circular_track_state: secular drift exceeds the orbital speed");
  return {tau_ref, {r_ref, 0.0}, {vr, std::sqrt(vphi2)}};
}

OrbitState conic_state(const ConicOrbit& conic, double phi, const GravitySystem& sys) {
  const double r = binet_radius(phi, conic);
  const double cph = std::cos(phi), sph = std::sin(phi);

  double h;        // r^2 phi_dot at this epoch, L * tau0 / psi = L * t / beta
  double vr_sec;   // secular part of the radial velocity
  if (sys.siv_enabled) {
    const double t_ref = t_of_tau(conic.tau_ref, sys.params);
    h = conic.L * t_ref / dt_dtau(sys.params);
    vr_sec = r * dt_dtau(sys.params) / t_ref;
  } else {
    h = conic.L;
    vr_sec = 0.0;
  }
  const double vr = vr_sec + conic.e * std::sin(phi - conic.phi0) * h / conic.r_c;
  const double vphi = h / r;

  const Vec2 rhat{cph, sph};
  const Vec2 phat{-sph, cph};
  return {conic.tau_ref, r * rhat, vr * rhat + vphi * phat};
}

std::vector<double> ray_crossings(const Trajectory& traj, double phi_ref) {
  const double cph = std::cos(phi_ref), sph = std::sin(phi_ref);
  const auto& dense = traj.dense();

  // Signed cross-track coordinate of the ray; upward zero crossings with the
  // along-track coordinate positive are full revolutions past phi_ref.
  auto cross = [&](double tau) {
    const Vec4 y = dense(tau);
    return -sph * y[0] + cph * y[1];
  };
  auto along = [&](double tau) {
    const Vec4 y = dense(tau);
    return cph * y[0] + sph * y[1];
  };

  std::vector<double> times;
  const auto& steps = traj.steps();
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    const double ta = steps[i].tau, tb = steps[i + 1].tau;
    const double ga = cross(ta), gb = cross(tb);
    if (ga < 0.0 && gb >= 0.0) {
      const double tau_hit = (gb == 0.0) ? tb : ode::find_root(cross, ta, tb);
      if (along(tau_hit) > 0.0) times.push_back(tau_hit);
    }
  }
  return times;
}

Eigen::Vector2d polar_residuals(const OrbitState& s, const GravitySystem& sys) {
  const double r = s.r.norm();
  if (!(r > 0.0)) throw domain_error("polar_residuals: |r| must be > 0");
  const Vec2 a = acceleration(s, sys);
  const double rdot = s.r.dot(s.v) / r;
  const double rddot = s.r.dot(a) / r + (s.v.squaredNorm() - rdot * rdot) / r;
  const double h = s.r.x() * s.v.y() - s.r.y() * s.v.x();
  const double hdot = s.r.x() * a.y() - s.r.y() * a.x();
  const double phidot = h / (r * r);
  const double pt = sys.siv_enabled ? psi_over_tau0(s.tau, sys) : 0.0;

  const double radial = rddot - r * phidot * phidot + sys.G * mass_at(s.tau, sys) / (r * r) -
                        pt * rdot;
  const double angular = hdot - pt * h;
  return {radial, angular};
}

ConicFit fit_conic(std::span<const OrbitState> states, const GravitySystem& sys) {
  if (states.size() < 8)
    throw fit_error("fit_conic: need at least 8 samples");

  const auto n = static_cast<Eigen::Index>(states.size());

  // Unwrapped polar angle; consecutive samples must be closer than half a turn.
  std::vector<double> phi(states.size());
  phi[0] = std::atan2(states[0].r.y(), states[0].r.x());
  for (std::size_t i = 1; i < states.size(); ++i) {
    const double raw = std::atan2(states[i].r.y(), states[i].r.x());
    double d = raw - std::fmod(phi[i - 1], 2.0 * M_PI);
    d = std::remainder(d, 2.0 * M_PI);
    phi[i] = phi[i - 1] + d;
  }
  if (std::abs(phi.back() - phi.front()) < M_PI * (1.0 - 1e-9))
    throw fit_error("fit_conic: arc spans less than half a radial period");

  // In SIV mode u * t(tau) is the conic with fixed coefficients; in Newtonian
  // mode u itself is.  Linear least squares in (A, B, C):
  //   u * scale = A + B cos(phi) + C sin(phi)
  Eigen::MatrixXd M(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = states[static_cast<std::size_t>(i)];
    const double r = s.r.norm();
    if (!(r > 0.0)) throw fit_error("fit_conic: sample at the origin");
    const double scale = sys.siv_enabled ? t_of_tau(s.tau, sys.params) : 1.0;
    M(i, 0) = 1.0;
    M(i, 1) = std::cos(phi[static_cast<std::size_t>(i)]);
    M(i, 2) = std::sin(phi[static_cast<std::size_t>(i)]);
    rhs(i) = scale / r;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < 3) throw fit_error("fit_conic: degenerate arc, fit is rank deficient");
  const Eigen::Vector3d coef = qr.solve(rhs);
  const double A = coef[0], B = coef[1], C = coef[2];
  if (!(A > 0.0)) throw fit_error("fit_conic: fitted conic has non-positive mean curvature");

  const double e = std::sqrt(B * B + C * C) / A;
  const double phi0 = std::atan2(C, B);

  // Residual in u, reported as an RMS over the fitted arc.
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = states[static_cast<std::size_t>(i)];
    const double scale = sys.siv_enabled ? t_of_tau(s.tau, sys.params) : 1.0;
    const double u_model = (A + B * M(i, 1) + C * M(i, 2)) / scale;
    const double u = 1.0 / s.r.norm();
    ss += (u - u_model) * (u - u_model);
  }
  const double rms = std::sqrt(ss / static_cast<double>(n));

  // L from the trajectory itself (a conserved quantity); r_c then follows
  // from the conic relation at the reference epoch.
  double L_mean = 0.0;
  for (const auto& s : states) L_mean += angular_momentum(s, sys);
  L_mean /= static_cast<double>(states.size());

  ConicFit fit;
  fit.conic = make_conic(L_mean, e, phi0, states[0].tau, sys);
  fit.rms_residual = rms;
  return fit;
}

std::vector<ConicFit> fit_per_revolution(const Trajectory& traj, int n_samples) {
  const auto samples = traj.sample(n_samples);
  std::vector<ConicFit> fits;
  std::vector<OrbitState> rev;
  double phi_prev = std::atan2(samples[0].r.y(), samples[0].r.x());
  double phi_acc = 0.0;
  for (const auto& s : samples) {
    const double raw = std::atan2(s.r.y(), s.r.x());
    phi_acc += std::remainder(raw - phi_prev, 2.0 * M_PI);
    phi_prev = raw;
    rev.push_back(s);
    if (phi_acc >= 2.0 * M_PI) {
      if (rev.size() >= 8) fits.push_back(fit_conic(rev, traj.system()));
      rev.clear();
      phi_acc = 0.0;
    }
  }
  return fits;
}

}  // namespace siv::dynamics
