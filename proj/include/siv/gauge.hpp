#pragma once

/// Scale-invariant vacuum (SIV) gauge.
///
/// The gauge fixes the conformal scale factor to lambda(t) = t0/t on the
/// dimensionless time axis with t0 = 1 at the present epoch.  Everything in
/// this header is a pure function of its value arguments: the gauge factor,
/// the metrical connection kappa = -lambda_dot/lambda = 1/t, the conversion
/// between dimensionless time t and physical time tau, the numerical factor
/// psi(tau) entering the equations of motion in current time units, and the
/// residuals of the two vacuum gauge ODEs.

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "siv/errors.hpp"

namespace siv {

/// Present age of the universe in Gyr, used as the default tau0.
inline constexpr double default_tau0 = 13.8;

/// Background model parameters.
///
/// All invariants are enforced at construction: omega_m must lie in [0, 1)
/// (there are no scale-invariant expanding solutions for omega_m >= 1),
/// curvature is -1, 0 or +1, cs2 in [0, 1], tau0 > 0.
class CosmologyParams {
 public:
  explicit CosmologyParams(double omega_m = 0.3, int curvature = 0, double cs2 = 0.0,
                           double tau0 = default_tau0, double lambda_E = 3.0)
      : omega_m_(omega_m), cs2_(cs2), tau0_(tau0), lambda_E_(lambda_E), curvature_(curvature) {
    if (!(omega_m >= 0.0))
      throw domain_error("CosmologyParams: omega_m must be >= 0");
    if (!(omega_m < 1.0))
      throw domain_error("CosmologyParams: no scale-invariant expanding solution for omega_m >= 1");
    if (curvature != -1 && curvature != 0 && curvature != 1)
      throw domain_error("CosmologyParams: curvature k must be -1, 0 or +1");
    if (!(cs2 >= 0.0 && cs2 <= 1.0))
      throw domain_error("CosmologyParams: cs2 must lie in [0, 1]");
    if (!(tau0 > 0.0))
      throw domain_error("CosmologyParams: tau0 must be > 0");
    if (!(lambda_E > 0.0))
      throw domain_error("CosmologyParams: lambda_E must be > 0");
    t_in_ = std::cbrt(omega_m);
  }

  double omega_m() const { return omega_m_; }
  int curvature() const { return curvature_; }
  double cs2() const { return cs2_; }
  double tau0() const { return tau0_; }
  double lambda_E() const { return lambda_E_; }

  /// Dimensionless Big-Bang epoch t_in = omega_m^(1/3), where a(t_in) = 0.
  double t_in() const { return t_in_; }

  /// Present-epoch value of the numerical factor, psi0 = 1 - t_in.
  double psi0() const { return 1.0 - t_in_; }

  /// True when omega_m is so close to 1 that psi0 ~ 0 and all gauge effects
  /// are numerically negligible.  Accepted, but worth a warning upstream.
  bool nearly_degenerate() const { return omega_m_ >= 0.999; }

 private:
  double omega_m_;
  double cs2_;
  double tau0_;
  double lambda_E_;
  double t_in_;
  int curvature_;
};

/// Gauge factor lambda(t) = t0/t.  lambda(t0) = 1 and lambda*t is constant.
inline double lambda_t(double t, double t0 = 1.0) {
  if (!(t > 0.0)) throw domain_error("lambda_t: t must be > 0");
  return t0 / t;
}

/// Metrical connection kappa(t) = -lambda_dot/lambda = 1/t.
inline double kappa_t(double t) {
  if (!(t > 0.0)) throw domain_error("kappa_t: t must be > 0");
  return 1.0 / t;
}

/// Rate of the vacuum scalar whose gradient carries the vacuum energy;
/// numerically equal to kappa(t).  Distinct concept from psi_tau below,
/// which is the numerical factor of the equations of motion in tau-units.
inline double vacuum_field_rate(double t) { return kappa_t(t); }

/// Vacuum energy density 0.5 * C * (lambda_dot/lambda)^2 with C = 3/(4 pi G),
/// i.e. 3 / (8 pi G t^2).
inline double vacuum_density(double t, double G) {
  if (!(t > 0.0)) throw domain_error("vacuum_density: t must be > 0");
  if (!(G > 0.0)) throw domain_error("vacuum_density: G must be > 0");
  const double rate = vacuum_field_rate(t);
  const double C = 3.0 / (4.0 * M_PI * G);
  return 0.5 * C * rate * rate;
}

/// d tau / d t: both time scales are linearly related, so this is constant.
inline double dtau_dt(const CosmologyParams& p) { return p.tau0() / (1.0 - p.t_in()); }

/// d t / d tau, the inverse constant rate.
inline double dt_dtau(const CosmologyParams& p) { return (1.0 - p.t_in()) / p.tau0(); }

/// Physical time tau of the dimensionless epoch t; age fractions agree,
/// tau = tau0 * (t - t_in) / (1 - t_in).
inline double tau_of_t(double t, const CosmologyParams& p) {
  if (!(t >= p.t_in())) throw domain_error("tau_of_t: t must be >= t_in");
  return p.tau0() * ((t - p.t_in()) / (1.0 - p.t_in()));
}

/// Dimensionless epoch t of the physical time tau >= 0; values beyond tau0
/// describe future epochs.
inline double t_of_tau(double tau, const CosmologyParams& p) {
  if (!(tau >= 0.0)) throw domain_error("t_of_tau: tau must be >= 0");
  return p.t_in() + (tau / p.tau0()) * (1.0 - p.t_in());
}

/// Paired (t, tau) representation of one epoch.
struct TimeScales {
  double t;
  double tau;
};

inline TimeScales timescales_from_t(double t, const CosmologyParams& p) {
  return {t, tau_of_t(t, p)};
}

inline TimeScales timescales_from_tau(double tau, const CosmologyParams& p) {
  return {t_of_tau(tau, p), tau};
}

/// Numerical factor psi(tau) = (1 - t_in) / t(tau); psi(tau0) = 1 - t_in.
inline double psi_tau(double tau, const CosmologyParams& p) {
  if (!(tau >= 0.0)) throw domain_error("psi_tau: tau must be >= 0");
  const double t = t_of_tau(tau, p);
  if (!(t > 0.0)) throw domain_error("psi_tau: epoch coincides with the Big Bang (t = 0)");
  return p.psi0() / t;
}

/// d psi / d tau = -psi^2 / tau0.
inline double psi_rate(double psi, double tau0) {
  if (!(psi >= 0.0)) throw domain_error("psi_rate: psi must be >= 0");
  if (!(tau0 > 0.0)) throw domain_error("psi_rate: tau0 must be > 0");
  return -(psi * psi) / tau0;
}

/// Relative rate psi_dot / psi = -psi / tau0.
inline double psi_relative_rate(double psi, double tau0) {
  if (!(psi >= 0.0)) throw domain_error("psi_relative_rate: psi must be >= 0");
  if (!(tau0 > 0.0)) throw domain_error("psi_relative_rate: tau0 must be > 0");
  return -psi / tau0;
}

/// Residuals of the two vacuum gauge conditions for lambda = t0/t with its
/// analytic derivatives lambda_dot = -t0/t^2 and lambda_ddot = 2 t0/t^3:
///
///   r1 = 3 (lambda_dot/lambda)^2 - lambda^2 lambda_E
///   r2 = 6 lambda_ddot           - 4 lambda^3 lambda_E
///
/// Both vanish identically when lambda_E = 3/t0^2.
inline Eigen::Vector2d gauge_residuals(double t, double lambda_E = 3.0, double t0 = 1.0) {
  if (!(t > 0.0)) throw domain_error("gauge_residuals: t must be > 0");
  const double lam = lambda_t(t, t0);
  const double kap = kappa_t(t);
  const double lam2 = lam * lam;
  const double kap2 = kap * kap;
  const double r1_lhs = 3.0 * kap2;
  const double r1_rhs = lam2 * lambda_E;
  const double lam_ddot = 2.0 * (lam * kap2);
  const double r2_lhs = 6.0 * lam_ddot;
  const double r2_rhs = 4.0 * (lam2 * lam) * lambda_E;
  return {r1_lhs - r1_rhs, r2_lhs - r2_rhs};
}

}  // namespace siv
