#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "casimir/stack.hpp"

namespace casimir {

enum class layer { background, left, right };

/// All imaginary-axis wavenumbers at one dimensionless quadrature point
/// (u = xi a / c, v = k_perp a), in units of 1/a. Limit-marker plates carry
/// qT = +infinity as a sentinel and qL = q0; channels must branch to the
/// closed-form limit formulas before doing arithmetic with them.
struct kinematics {
  double u, v, mbar;
  double eps_b, mu_b;
  double eps_l, mu_l;
  double eps_r, mu_r;
  double qT_b, qT_l, qT_r;
  double qL_b, qL_l, qL_r;
  double q0;  // sqrt(u^2 + v^2)
  double qm;  // sqrt(u^2 + v^2 + mbar^2)
  // differences qT^2 - k_perp^2 and qL^2 - k_perp^2 from their defining sums
  // (eps mu u^2 + mbar^2 and u^2 + mbar^2/(eps mu)); subtracting the computed
  // squares instead would cancel catastrophically near the massless limit
  double qT2mk_b, qT2mk_l, qT2mk_r;
  double qL2mk_b, qL2mk_l, qL2mk_r;
  double minv_b, minv_l, minv_r;  // mbar^2 / (eps mu)
};

inline kinematics make_kinematics(const stack_config& s, double u, double v) {
  if (u < 0.0 || v < 0.0) throw std::domain_error("kinematics: u and v must be >= 0");

  const double xi = u * c_light / s.separation();
  const double mbar = s.mbar();
  constexpr double inf = std::numeric_limits<double>::infinity();

  kinematics k{};
  k.u = u;
  k.v = v;
  k.mbar = mbar;
  // same expression shape as the q's below, so the massless and identical-
  // media degeneracies hold bitwise, not just to rounding
  k.q0 = std::sqrt(u * u + v * v);
  k.qm = std::sqrt(u * u + v * v + mbar * mbar);

  k.eps_b = s.background().eps(xi);
  k.mu_b = s.background().mu(xi);
  const double em_b = k.eps_b * k.mu_b;
  k.minv_b = mbar * mbar / em_b;
  k.qT2mk_b = em_b * u * u + mbar * mbar;
  k.qL2mk_b = u * u + k.minv_b;
  k.qT_b = std::sqrt(k.qT2mk_b + v * v);
  k.qL_b = std::sqrt(k.qL2mk_b + v * v);

  auto fill_plate = [&](const material_model& m, double& eps, double& mu, double& qT, double& qL,
                        double& qT2mk, double& qL2mk, double& minv) {
    if (m.is_limit_marker()) {
      eps = inf;
      mu = m.kind() == material_kind::infinitely_permeable ? inf : 1.0;
      qT = inf;
      qL = k.q0;
      qT2mk = inf;
      qL2mk = u * u;
      minv = 0.0;
      return;
    }
    eps = m.eps(xi);
    mu = m.mu(xi);
    const double em = eps * mu;
    minv = mbar * mbar / em;
    qT2mk = em * u * u + mbar * mbar;
    qL2mk = u * u + minv;
    qT = std::sqrt(qT2mk + v * v);
    qL = std::sqrt(qL2mk + v * v);
  };
  fill_plate(s.left().material, k.eps_l, k.mu_l, k.qT_l, k.qL_l, k.qT2mk_l, k.qL2mk_l, k.minv_l);
  fill_plate(s.right().material, k.eps_r, k.mu_r, k.qT_r, k.qL_r, k.qT2mk_r, k.qL2mk_r, k.minv_r);
  return k;
}

inline double qT_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.qT_b;
    case layer::left: return k.qT_l;
    default: return k.qT_r;
  }
}
inline double qL_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.qL_b;
    case layer::left: return k.qL_l;
    default: return k.qL_r;
  }
}
inline double eps_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.eps_b;
    case layer::left: return k.eps_l;
    default: return k.eps_r;
  }
}
inline double mu_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.mu_b;
    case layer::left: return k.mu_l;
    default: return k.mu_r;
  }
}
inline double qT2mk_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.qT2mk_b;
    case layer::left: return k.qT2mk_l;
    default: return k.qT2mk_r;
  }
}
inline double qL2mk_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.qL2mk_b;
    case layer::left: return k.qL2mk_l;
    default: return k.qL2mk_r;
  }
}
inline double minv_of(const kinematics& k, layer j) {
  switch (j) {
    case layer::background: return k.minv_b;
    case layer::left: return k.minv_l;
    default: return k.minv_r;
  }
}

}  // namespace casimir
