#pragma once

#include <cmath>
#include <stdexcept>

#include "casimir/quadrature.hpp"
#include "casimir/reflection.hpp"
#include "casimir/stack.hpp"

namespace casimir {

enum class channel_id { te, tm, tm_i, tm_ii, total };

inline const char* channel_name(channel_id c) {
  switch (c) {
    case channel_id::te: return "TE";
    case channel_id::tm: return "TM";
    case channel_id::tm_i: return "TM_I";
    case channel_id::tm_ii: return "TM_II";
    default: return "total";
  }
}

/// Channel energy (J/m^2) or force (Pa) per unit plate area.
struct energy_result {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
  channel_id channel = channel_id::total;
};

namespace detail {

// exponents beyond this are below double range; the integrand is exactly 0 there
inline constexpr double exp_cutoff = 700.0;

inline double log_one_minus(double x) {
  // x < 0.5 is the exponentially-small tail where ln(1-x) ~ -x needs log1p
  return std::abs(x) < 0.5 ? std::log1p(-x) : std::log(1.0 - x);
}

// A - B e^{-x} for x >= 0 without the cancellation at A ~ B e^{-x}; the
// ideal-plate reflection brackets all hit that corner at grazing incidence
inline double a_minus_b_exp(double A, double B, double x) {
  auto ez = [](double t) { return t > exp_cutoff ? 0.0 : std::exp(-t); };
  if (A == 0.0 || B == 0.0 || std::signbit(A) != std::signbit(B)) return A - B * ez(x);
  const double g = std::log(B / A) - x;
  if (g > exp_cutoff) return -B * ez(x);
  return -A * std::expm1(g);
}

// Reflection factor of one finite-thickness slab in the background,
// delta (1 - e^{-2 qT t}) / (1 - delta^2 e^{-2 qT t}); +-1 for limit markers.
inline double te_slab_factor(const kinematics& k, const material_model& m, layer j, double tau) {
  if (m.kind() == material_kind::perfect_conductor) return 1.0;
  if (m.kind() == material_kind::infinitely_permeable) return -1.0;
  const double d = delta_I(k, j);
  const double x = 2.0 * qT_of(k, j) * tau;
  return d * a_minus_b_exp(1.0, 1.0, x) / a_minus_b_exp(1.0, d * d, x);
}

// D^TE: product of the two slab factors (computed per plate so that swapping
// the plates permutes commutative operands only)
inline double te_reflection_product(const stack_config& s, const kinematics& k) {
  const double rl = te_slab_factor(k, s.left().material, layer::left, s.tau_l());
  const double rr = te_slab_factor(k, s.right().material, layer::right, s.tau_r());
  return rl * rr;
}

// integrate and apply the unit scale; convergence failures carry the scaled
// partial value so callers see physical units throughout
template <class F>
integral_result integrate_scaled(F&& f, const quadrature_spec& quad, double scale,
                                 const char* who) {
  try {
    auto r = integrate2d(std::forward<F>(f), quad);
    r.value *= scale;
    r.error_estimate *= std::abs(scale);
    return r;
  } catch (const convergence_error& e) {
    throw convergence_error(std::string(who) + ": " + e.what(), e.partial_value() * scale,
                            e.error_estimate() * std::abs(scale), e.evaluations());
  }
}

}  // namespace detail

/// ln{1 - D^TE e^{-2 qT,b a}} at one dimensionless point; <= 0 whenever
/// D^TE in [0, 1].
inline double te_integrand(const stack_config& s, double u, double v) {
  const kinematics k = make_kinematics(s, u, v);
  if (2.0 * k.qT_b > detail::exp_cutoff) return 0.0;
  const double refl = detail::te_reflection_product(s, k);
  if (refl > 1.0)
    throw std::domain_error("te_integrand: reflection product exceeds 1 (non-passive material input)");
  const double x = refl * std::exp(-2.0 * k.qT_b);
  return detail::log_one_minus(x);
}

inline energy_result te_energy(const stack_config& s, const quadrature_spec& quad = {}) {
  const auto r = detail::integrate_scaled([&](double u, double v) { return te_integrand(s, u, v); },
                                          quad, s.energy_unit() / (4.0 * pi * pi), "te_energy");
  return {r.value, r.error_estimate, r.evaluations, channel_id::te};
}

/// Force per unit area, -hbar c/(2 pi^2 a^4) * int qT,b D e^{-2qT,b} / (1 - D e^{-2qT,b}).
/// The sign falls out of D^TE: attractive (<= 0) for conductor/conductor and
/// permeable/permeable, repulsive (>= 0) for the mixed Boyer pair.
inline energy_result te_force(const stack_config& s, const quadrature_spec& quad = {}) {
  auto integrand = [&](double u, double v) {
    const kinematics k = make_kinematics(s, u, v);
    if (2.0 * k.qT_b > detail::exp_cutoff) return 0.0;
    const double refl = detail::te_reflection_product(s, k);
    if (refl > 1.0)
      throw std::domain_error("te_force: reflection product exceeds 1 (non-passive material input)");
    const double x = refl * std::exp(-2.0 * k.qT_b);
    return k.qT_b * x / (1.0 - x);
  };
  const auto r =
      detail::integrate_scaled(integrand, quad, -s.force_unit() / (2.0 * pi * pi), "te_force");
  return {r.value, r.error_estimate, r.evaluations, channel_id::te};
}

}  // namespace casimir
