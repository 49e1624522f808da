#pragma once

/// Modified Newtonian two-body dynamics in physical time units.
///
/// The equation of motion carries two departures from Kepler: the central
/// mass grows linearly with the dimensionless epoch, M(tau) = M0 * t(tau),
/// and a velocity-proportional acceleration (psi(tau)/tau0) * v acts along
/// the motion.  The conserved angular momentum is L = (psi/tau0) r^2 phi_dot;
/// the orbit equation has conic solutions whose circular radius drifts
/// secularly like t(tau) at constant eccentricity and constant orbital speed.
/// Integration is Cartesian; the plane-polar forms serve as residual checks.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "siv/errors.hpp"
#include "siv/gauge.hpp"
#include "siv/ode.hpp"

namespace siv::dynamics {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

/// Central field description plus the cosmological background it sits in.
/// With siv_enabled = false the mass is frozen at M0 and the dynamical
/// gravity term vanishes: plain Newtonian reference mode.
struct GravitySystem {
  double G = 1.0;
  double M0 = 1.0;  // total two-body mass at the present epoch tau0
  CosmologyParams params{0.3};
  bool siv_enabled = true;
  double r_min = 1e-12;  // collision threshold
  double speed_of_light = std::numeric_limits<double>::infinity();
};

struct OrbitState {
  double tau = 0.0;
  Vec2 r{1.0, 0.0};
  Vec2 v{0.0, 0.0};
};

/// Conic description of the orbit equation's solution at a reference epoch.
/// r_c is tied to L by r_c = L^2 tau0^2 / (G M(tau_ref) psi(tau_ref)^2); use
/// make_conic to construct a consistent instance.
struct ConicOrbit {
  double L = 0.0;
  double r_c = 1.0;
  double e = 0.0;
  double phi0 = 0.0;
  double tau_ref = 0.0;
};

ConicOrbit make_conic(double L, double e, double phi0, double tau_ref, const GravitySystem& sys);

/// M(tau) = M0 * t(tau); returns M0 in Newtonian mode.
double mass_at(double tau, const GravitySystem& sys);

/// Acceleration -G M(tau) r / |r|^3 + (psi(tau)/tau0) v.
Vec2 acceleration(const OrbitState& s, const GravitySystem& sys);

/// Conserved angular momentum: (psi/tau0) r^2 phi_dot in SIV mode, plain
/// r^2 phi_dot in Newtonian mode.
double angular_momentum(const OrbitState& s, const GravitySystem& sys);

/// Specific orbital energy 0.5 |v|^2 - G M(tau)/|r| (conserved only in
/// Newtonian mode).
double orbital_energy(const OrbitState& s, const GravitySystem& sys);

/// r(phi) = r_c / (1 + e cos(phi - phi0)).
double binet_radius(double phi, const ConicOrbit& conic);

/// Circular orbital speed sqrt(G M(tau) / r_c); constant along the secular
/// track since M and r_c both scale with t(tau).
double circular_speed(double r_c, double tau, const GravitySystem& sys);

struct SecularRates {
  double a_dot_over_a;
  double M_dot_over_M;
  double T_dot_over_T;
  double psi_dot_over_psi;
};

/// All linear-in-t orbital quantities share the relative rate psi(tau)/tau0.
SecularRates secular_rates(double tau, const GravitySystem& sys);

/// Kepler's third-law ratio 4 pi^2 r_c^3 / (G M T^2); equals 1 for
/// consistent circular orbits at every epoch.
double kepler_ratio(double r_c, double M_total, double T, double G);

/// Norm of the difference between the weak-field geodesic form of the
/// acceleration and acceleration(); zero up to rounding unless a kappa
/// override deliberately mismatches the connection.
double weak_field_residual(const OrbitState& s, const GravitySystem& sys,
                           std::optional<double> kappa_override = {});

/// Integrated trajectory with dense output.
class Trajectory {
 public:
  Trajectory(GravitySystem sys, ode::DenseSolution<Vec4> dense);

  const GravitySystem& system() const { return system_; }
  double tau_begin() const { return dense_.t_front(); }
  double tau_end() const { return dense_.t_back(); }

  /// States at the integrator's accepted steps.
  const std::vector<OrbitState>& steps() const { return steps_; }

  /// Dense-output state at any tau inside the span.
  OrbitState at(double tau) const;

  /// n states uniform in tau across the span (dense output, n >= 2).
  std::vector<OrbitState> sample(int n) const;

  const ode::DenseSolution<Vec4>& dense() const { return dense_; }

 private:
  GravitySystem system_;
  ode::DenseSolution<Vec4> dense_;
  std::vector<OrbitState> steps_;
};

/// Integrates the equation of motion from `initial` to tau_end.  Throws
/// collision_error if |r| falls below sys.r_min, tolerance_error if the
/// controller fails, domain_error on bad spans or tolerances.
Trajectory integrate_orbit(const OrbitState& initial, const GravitySystem& sys, double tau_end,
                           double rtol = 1e-12);

/// Initial state of the zero-eccentricity secular track through radius
/// r_ref at epoch tau_ref: the exact solution with r(tau) = c t(tau),
/// radial drift c dt/dtau and constant speed sqrt(G M0 / c).
OrbitState circular_track_state(double r_ref, double tau_ref, const GravitySystem& sys);

/// State on the conic `conic` at angle phi, including the secular radial
/// drift of the adiabatic solution.
OrbitState conic_state(const ConicOrbit& conic, double phi, const GravitySystem& sys);

/// Times of upward crossings of the ray at angle phi_ref (crossings with
/// positive angular rate on the phi_ref side of the origin), found by root
/// refinement on the dense interpolant.
std::vector<double> ray_crossings(const Trajectory& traj, double phi_ref);

/// Polar-form residuals of the equations of motion at a state, given the
/// Cartesian acceleration: (radial equation, angular-momentum-law) pair.
Eigen::Vector2d polar_residuals(const OrbitState& s, const GravitySystem& sys);

struct ConicFit {
  ConicOrbit conic;
  double rms_residual;  // RMS of u - u_model over the fitted samples
};

/// Least-squares conic fit of a trajectory arc (>= 8 samples spanning at
/// least half a radial period).  In SIV mode the circular radius keeps its
/// known t(tau) scaling: the fit is linear in u * t(tau).
ConicFit fit_conic(std::span<const OrbitState> states, const GravitySystem& sys);

/// Samples the trajectory uniformly (n_samples points), slices it into full
/// revolutions of the polar angle and fits each one.
std::vector<ConicFit> fit_per_revolution(const Trajectory& traj, int n_samples);

}  // namespace siv::dynamics
