#pragma once

/// SIV background cosmology.
///
/// Works in units with 8 pi G = 1; the matter density rho carries those
/// units.  The flat dust model has the closed form
/// a(t) = [(t^3 - omega_m)/(1 - omega_m)]^(2/3); every other model is
/// integrated numerically from the acceleration equation with the density
/// eliminated through the conservation law
/// rho * a^(3(1+cs2)) * lambda^(1+3cs2) = const.

#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "siv/errors.hpp"
#include "siv/gauge.hpp"
#include "siv/ode.hpp"

namespace siv::cosmology {

/// One sample (t, a, a_dot, rho) of an expansion history.
struct BackgroundState {
  double t = 0.0;
  double a = 0.0;
  double a_dot = 0.0;
  double rho = 0.0;
};

struct IntegrationOptions {
  double rtol = 1e-10;   // relative tolerance, must lie in [1e-14, 1e-3]
  int n_samples = 200;   // samples stored on the history, uniform in t
  bool siv_terms = true; // false freezes lambda = 1 (classical Friedmann limit)
};

/// Closed-form scale factor of the flat (k = 0) dust model, a(t_in) = 0,
/// a(1) = 1.  Throws unsupported_model_error for curved or radiative models.
double scale_factor_analytic(double t, const CosmologyParams& p);

/// Expansion rate a_dot/a = 2 t^2 / (t^3 - omega_m) of the flat dust model.
double hubble_analytic(double t, const CosmologyParams& p);

/// Closed-form a_ddot/a of the flat dust model (second derivative of the
/// analytic scale factor; cross-checked against finite differences in the
/// test suite before use in residual checks).
double accel_ratio_analytic(double t, const CosmologyParams& p);

/// Density from the Friedmann-like constraint applied to the analytic flat
/// dust background.
double density_from_friedmann(double t, const CosmologyParams& p);

/// Density from the constraint for an arbitrary state (t, a, a_dot):
/// rho = 3 [k/a^2 + (a_dot/a)^2 - (2/t)(a_dot/a)], with the gauge term
/// dropped when siv_terms is false.
double density_from_state(double t, double a, double a_dot, const CosmologyParams& p,
                          bool siv_terms = true);

/// Residuals of the three background equations at a state with the given
/// a_ddot; all three vanish on exact solutions.
Eigen::Vector3d friedmann_residuals(const BackgroundState& s, double a_ddot,
                                    const CosmologyParams& p, bool siv_terms = true);

/// Sampled expansion history plus the dense interpolant it came from.
class BackgroundHistory {
 public:
  BackgroundHistory(CosmologyParams params, ode::DenseSolution<Eigen::Vector2d> dense,
                    double conservation_constant, bool siv_terms, int n_samples);

  const CosmologyParams& params() const { return params_; }
  const std::vector<BackgroundState>& samples() const { return samples_; }
  double conservation_constant() const { return conservation_constant_; }
  bool siv_terms() const { return siv_terms_; }
  double t_begin() const { return dense_.t_front(); }
  double t_end() const { return dense_.t_back(); }

  /// State at any t inside the integrated span; rho is recomputed from the
  /// constraint equation, which the integration itself never uses.
  BackgroundState at(double t) const;

  /// Largest relative deviation of rho * a^(3(1+cs2)) * lambda^(1+3cs2)
  /// from the conservation constant across the stored samples.
  double conservation_drift() const;

 private:
  CosmologyParams params_;
  ode::DenseSolution<Eigen::Vector2d> dense_;
  std::vector<BackgroundState> samples_;
  double conservation_constant_;
  bool siv_terms_;
};

/// Integrates the flat dust background over [t_start, t_end] starting from
/// the analytic initial condition.
BackgroundHistory integrate_background(const CosmologyParams& p, double t_start, double t_end,
                                       const IntegrationOptions& opt = {});

/// General form for curved or radiative models: initial (a, a_dot) supplied
/// by the caller; the conservation constant is fixed from the constraint
/// equation at t_start.
BackgroundHistory integrate_background(const CosmologyParams& p, double t_start, double t_end,
                                       const Eigen::Vector2d& initial_a_adot,
                                       const IntegrationOptions& opt = {});

enum class Spacing { linear_t, linear_tau };

struct ExpansionRow {
  double t, tau, a, a_dot_over_a, lambda, rho;
};

/// Deterministic table of the flat dust background spanning
/// [t_in + start_offset, t_max].  start_offset < 0 selects the default
/// 1e-6 * (1 - t_in).
std::vector<ExpansionRow> expansion_table(const CosmologyParams& p, int n_samples,
                                          Spacing spacing = Spacing::linear_t, double t_max = 1.0,
                                          double start_offset = -1.0);

/// Default offset of the first table row above t_in.
double default_start_offset(const CosmologyParams& p);

/// CSV emission, header `t,tau,a,a_dot_over_a,lambda,rho`, LF line endings,
/// 17-significant-digit round-trip floats.
void write_expansion_csv(std::ostream& os, const std::vector<ExpansionRow>& rows);

}  // namespace siv::cosmology
