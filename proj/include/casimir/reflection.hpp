#pragma once

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/kinematics.hpp"

namespace casimir {

namespace profiling {
// one increment per make_coefficients call; the TM integrand touches ~20
// coefficient values per point, so this counts coefficient-set evaluations
inline std::atomic<unsigned long long> coefficient_evals{0};
}  // namespace profiling

inline void require_finite_pair(const kinematics& k, layer j) {
  if (!std::isfinite(qT_of(k, j)))
    throw std::domain_error("reflection: coefficients need finite wavenumbers; "
                            "limit-marker layers use the closed-form limit formulas");
}

/// TE single-interface ratio between layer j and the background.
inline double delta_I(const kinematics& k, layer j) {
  require_finite_pair(k, j);
  const double qj = qT_of(k, j), mj = mu_of(k, j);
  const double num = qj * k.mu_b - k.qT_b * mj;
  const double den = qj * k.mu_b + k.qT_b * mj;
  if (den == 0.0) throw std::domain_error("delta_I: degenerate input");
  return num / den;
}

/// TM transverse ratio between layer j and the background.
inline double delta_II(const kinematics& k, layer j) {
  require_finite_pair(k, j);
  const double tb = k.mu_b * k.qT_b * qT2mk_of(k, j);
  const double tj = mu_of(k, j) * qT_of(k, j) * k.qT2mk_b;
  if (tb + tj == 0.0) throw std::domain_error("delta_II: degenerate input");
  return (tb - tj) / (tb + tj);
}

/// Longitudinal ratio between layer j and the background.
inline double delta_III(const kinematics& k, layer j) {
  const double tb = qL_of(k, j) * k.qL2mk_b;
  const double tj = k.qL_b * qL2mk_of(k, j);
  if (tb + tj == 0.0) throw std::domain_error("delta_III: degenerate input");
  return (tb - tj) / (tb + tj);
}

inline double alpha(const kinematics& k, layer j1, layer j2) {
  const double den = qL2mk_of(k, j2);
  if (den == 0.0)
    throw std::domain_error("alpha: singular point qL^2 = k_perp^2 (u = 0 massless edge)");
  // qL_{j1}^2 - qL_{j2}^2 == mbar^2 (1/em_{j1} - 1/em_{j2})
  return (minv_of(k, j1) - minv_of(k, j2)) / den;
}

inline double beta(const kinematics& k, layer j1, layer j2) {
  const double k2 = k.v * k.v;
  return -k2 / (qT_of(k, j1) * qL_of(k, j2)) *
         (1.0 - (mu_of(k, j2) / mu_of(k, j1)) * qT2mk_of(k, j1) / qT2mk_of(k, j2));
}

inline double r_plus(const kinematics& k, layer j1, layer j2) {
  return 1.0 + (qT_of(k, j2) * mu_of(k, j2)) / (qT_of(k, j1) * mu_of(k, j1)) *
                   qT2mk_of(k, j1) / qT2mk_of(k, j2);
}

inline double kappa_plus(const kinematics& k, layer j1, layer j2) {
  const double den = qL2mk_of(k, j2);
  if (den == 0.0)
    throw std::domain_error("kappa_plus: singular point qL^2 = k_perp^2");
  return qL2mk_of(k, j1) / den + qL_of(k, j1) / qL_of(k, j2);
}

/// Longitudinal ratio of the ideal-plate limits (both conductor and permeable
/// plates drive qL_plate -> q0, so only background kinematics enter).
inline double delta_limit(const kinematics& k) {
  const double u2 = k.u * k.u;  // q0^2 - k_perp^2
  const double num = k.q0 * k.qL2mk_b - k.qL_b * u2;
  const double den = k.q0 * k.qL2mk_b + k.qL_b * u2;
  if (den == 0.0) throw std::domain_error("delta_limit: degenerate point");
  return num / den;
}

/// Mixing coefficient of the perfect-conductor limit.
inline double lambda_limit(const kinematics& k) {
  const double k2 = k.v * k.v;
  const double u2 = k.u * k.u;
  const double den = k.qL_b * u2 + k.q0 * k.qL2mk_b;
  if (den == 0.0) throw std::domain_error("lambda_limit: degenerate point");
  return (k2 / k.qT_b) * (-k.minv_b) / den;  // q0^2 - qL_b^2 == -mbar^2/em_b
}

/// Continuum-polarization reflection amplitude at a perfect conductor; needs
/// a unit-index background so that qT_b = qL_b = qm.
inline double d_coefficient(const kinematics& k) {
  // (qm - q0)/(qm + q0) without the small-mass cancellation
  const double s = k.qm + k.q0;
  return k.mbar * k.mbar / (s * s);
}

/// Permittivity a massless field would need to reproduce the continuum-mode
/// dispersion; on the imaginary axis 1 + (m c^2 / hbar)^2 / (eps_b mu_b xi^2).
inline double effective_permittivity(double xi, double mass, double eps_b, double mu_b) {
  if (!(xi > 0.0)) throw std::domain_error("effective_permittivity: xi must be > 0");
  const double omega_m = mass * c_light * c_light / hbar;
  return 1.0 + omega_m * omega_m / (eps_b * mu_b * xi * xi);
}

/// Every layer-pair coefficient entering the TE and TM formulas at one
/// quadrature point, computed in one pass. Pair fields are left as NaN when a
/// plate is a limit marker (the limit fields lambda/delta/d remain valid).
struct coefficient_set {
  double delta_I_l, delta_I_r;
  double delta_II_l, delta_II_r;
  double delta_III_l, delta_III_r;
  double alpha_bl, alpha_lb, alpha_br, alpha_rb;
  double beta_bl, beta_lb, beta_br, beta_rb;
  double r_plus_bl, r_plus_lb, r_plus_br, r_plus_rb;
  double kappa_plus_bl, kappa_plus_lb, kappa_plus_br, kappa_plus_rb;
  double lambda;   // conductor-limit mixing coefficient
  double delta;    // shared longitudinal limit ratio
  double d;        // (qm - q0)/(qm + q0)
  double eps_hat;  // effective permittivity at this point's xi (by mbar)
};

inline coefficient_set make_coefficients(const kinematics& k) {
  profiling::coefficient_evals.fetch_add(1, std::memory_order_relaxed);
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  coefficient_set c{};
  c.lambda = lambda_limit(k);
  c.delta = delta_limit(k);
  c.d = d_coefficient(k);
  const double em_b = k.eps_b * k.mu_b;
  c.eps_hat = k.u > 0.0 ? 1.0 + k.mbar * k.mbar / (em_b * k.u * k.u) : nan;

  auto fill_side = [&](layer j, double& dI, double& dII, double& dIII, double& a_bj, double& a_jb,
                       double& b_bj, double& b_jb, double& r_bj, double& r_jb, double& kp_bj,
                       double& kp_jb) {
    if (!std::isfinite(qT_of(k, j))) {
      dI = dII = dIII = a_bj = a_jb = b_bj = b_jb = r_bj = r_jb = kp_bj = kp_jb = nan;
      return;
    }
    dI = delta_I(k, j);
    dII = delta_II(k, j);
    dIII = delta_III(k, j);
    a_bj = alpha(k, layer::background, j);
    a_jb = alpha(k, j, layer::background);
    b_bj = beta(k, layer::background, j);
    b_jb = beta(k, j, layer::background);
    r_bj = r_plus(k, layer::background, j);
    r_jb = r_plus(k, j, layer::background);
    kp_bj = kappa_plus(k, layer::background, j);
    kp_jb = kappa_plus(k, j, layer::background);
  };
  fill_side(layer::left, c.delta_I_l, c.delta_II_l, c.delta_III_l, c.alpha_bl, c.alpha_lb,
            c.beta_bl, c.beta_lb, c.r_plus_bl, c.r_plus_lb, c.kappa_plus_bl, c.kappa_plus_lb);
  fill_side(layer::right, c.delta_I_r, c.delta_II_r, c.delta_III_r, c.alpha_br, c.alpha_rb,
            c.beta_br, c.beta_rb, c.r_plus_br, c.r_plus_rb, c.kappa_plus_br, c.kappa_plus_rb);
  return c;
}

}  // namespace casimir
