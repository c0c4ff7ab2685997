#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "casimir/tm_channel.hpp"

namespace casimir {
namespace oracle {

// The functions here are deliberate re-typings of the channel formulas kept
// free of the main evaluation path (no kinematics/coefficient_set reuse), so
// a transcription slip in either route shows up as a mismatch.

/// Straight re-transcription of the type-I reflection integrand.
inline double te_integrand_reference(const stack_config& s, double u, double v) {
  const double xi = u * c_light / s.separation();
  const double mbar = s.mbar();
  const double m2 = mbar * mbar;

  const double eb = s.background().eps(xi), mb = s.background().mu(xi);
  const double qTb = std::sqrt(eb * mb * u * u + v * v + m2);
  if (2.0 * qTb > 700.0) return 0.0;

  auto slab = [&](const material_model& mat, double t) {
    if (mat.kind() == material_kind::perfect_conductor) return 1.0;
    if (mat.kind() == material_kind::infinitely_permeable) return -1.0;
    const double ej = mat.eps(xi), mj = mat.mu(xi);
    const double qTj = std::sqrt(ej * mj * u * u + v * v + m2);
    const double delta = (qTj * mb - qTb * mj) / (qTj * mb + qTb * mj);
    const double tau = t / s.separation();
    const double e = 2.0 * qTj * tau > 700.0 ? 0.0 : std::exp(-2.0 * qTj * tau);
    return delta * (1.0 - e) / (1.0 - delta * delta * e);
  };
  const double refl = slab(s.left().material, s.left().thickness) *
                      slab(s.right().material, s.right().thickness);
  const double x = refl * std::exp(-2.0 * qTb);
  return std::abs(x) < 0.5 ? std::log1p(-x) : std::log(1.0 - x);
}

namespace detail {
inline void require_massless(const stack_config& s, const char* who) {
  if (s.mass() != 0.0)
    throw std::logic_error(std::string(who) + ": reference formula is for mass = 0 only");
}
}  // namespace detail

/// Massless TE reference energy from the re-transcribed integrand.
inline energy_result massless_lifshitz_te(const stack_config& s, const quadrature_spec& quad = {}) {
  detail::require_massless(s, "massless_lifshitz_te");
  const auto r = integrate2d([&](double u, double v) { return te_integrand_reference(s, u, v); }, quad);
  const double scale = s.energy_unit() / (4.0 * pi * pi);
  return {r.value * scale, r.error_estimate * scale, r.evaluations, channel_id::te};
}

/// Massless TM reference: the scalar reflection-product formula the 4x4
/// determinant collapses to at zero mass, typed independently of it.
inline energy_result massless_lifshitz_tm(const stack_config& s, const quadrature_spec& quad = {}) {
  detail::require_massless(s, "massless_lifshitz_tm");
  auto integrand = [&](double u, double v) {
    const double xi = u * c_light / s.separation();
    const double eb = s.background().eps(xi), mb = s.background().mu(xi);
    const double qTb = std::sqrt(eb * mb * u * u + v * v);
    if (2.0 * qTb > 700.0) return 0.0;
    auto slab = [&](const material_model& mat, double t) {
      if (mat.kind() == material_kind::perfect_conductor) return 1.0;
      if (mat.kind() == material_kind::infinitely_permeable) return -1.0;
      const double ej = mat.eps(xi), mj = mat.mu(xi);
      const double qTj = std::sqrt(ej * mj * u * u + v * v);
      const double delta = (qTb * ej - qTj * eb) / (qTb * ej + qTj * eb);
      const double tau = t / s.separation();
      const double e = 2.0 * qTj * tau > 700.0 ? 0.0 : std::exp(-2.0 * qTj * tau);
      return delta * (1.0 - e) / (1.0 - delta * delta * e);
    };
    const double refl = slab(s.left().material, s.left().thickness) *
                        slab(s.right().material, s.right().thickness);
    const double x = refl * std::exp(-2.0 * qTb);
    return std::abs(x) < 0.5 ? std::log1p(-x) : std::log(1.0 - x);
  };
  const auto r = integrate2d(integrand, quad);
  const double scale = s.energy_unit() / (4.0 * pi * pi);
  return {r.value * scale, r.error_estimate * scale, r.evaluations, channel_id::tm};
}

/// Massless perfect-mirror constants: one polarization's energy, both
/// polarizations' energy, and the total force, at separation a.
struct ideal_constants_t {
  double energy_half;   // J/m^2
  double energy_total;  // J/m^2
  double force_total;   // Pa
};

inline ideal_constants_t ideal_constants(double a) {
  if (!(a > 0.0)) throw std::domain_error("ideal_constants: separation must be > 0");
  const double a3 = a * a * a;
  return {-pi * pi * hbar_c / (1440.0 * a3), -pi * pi * hbar_c / (720.0 * a3),
          -pi * pi * hbar_c / (240.0 * a3 * a)};
}

enum class ladder_kind { conductor, permeable, boyer };

struct ladder_probe {
  double u, v;
};

struct ladder_row {
  double contrast;
  std::vector<double> general;    // general-material integrand per probe
  std::vector<double> deviation;  // |general - limit target| per probe
};

struct ladder_table {
  ladder_kind kind;
  std::vector<ladder_probe> probes;
  std::vector<double> limit_value;  // closed-form integrand per probe
  std::vector<ladder_row> rows;
  bool monotone = true;  // deviations non-increasing down each probe column
};

/// Evaluates the general-material integrand against the ideal-plate closed
/// form along a contrast ladder. A contrast of exactly 1 is the identical-
/// media sanity row, whose target is zero. An optional entry perturbation
/// routes the general side through the directly transcribed matrices, which
/// is the hook the mutation tests use.
inline ladder_table ladder_report(const stack_config& templ, std::span<const double> contrasts,
                                  std::span<const ladder_probe> probes, ladder_kind kind,
                                  const q_perturbation* perturb = nullptr) {
  auto contrast_stack = [&](double c) {
    auto plate_mat = [&](bool conductor_side) {
      return conductor_side ? material_model::constant_eps_mu(c, 1.0)
                            : material_model::constant_eps_mu(1.0, c);
    };
    const bool lc = kind != ladder_kind::permeable;        // left conducting except permeable kind
    const bool rc = kind == ladder_kind::conductor;        // right conducting only for conductor kind
    return stack_config(templ.background(), {plate_mat(lc), templ.left().thickness},
                        {plate_mat(rc), templ.right().thickness}, templ.separation(), templ.mass());
  };
  auto marker_stack = [&] {
    auto mk = [&](bool conductor_side) {
      return conductor_side ? material_model::perfect_conductor()
                            : material_model::infinitely_permeable();
    };
    const bool lc = kind != ladder_kind::permeable;
    const bool rc = kind == ladder_kind::conductor;
    return stack_config(templ.background(), {mk(lc), templ.left().thickness},
                        {mk(rc), templ.right().thickness}, templ.separation(), templ.mass());
  }();

  ladder_table table;
  table.kind = kind;
  table.probes.assign(probes.begin(), probes.end());
  for (const auto& p : probes) table.limit_value.push_back(tm_integrand(marker_stack, p.u, p.v));

  for (const double c : contrasts) {
    ladder_row row;
    row.contrast = c;
    const stack_config sc = contrast_stack(c);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      const double g = perturb == nullptr
                           ? tm_integrand(sc, probes[i].u, probes[i].v)
                           : tm_integrand_perturbed(sc, probes[i].u, probes[i].v, *perturb);
      const double target = c == 1.0 ? 0.0 : table.limit_value[i];
      row.general.push_back(g);
      row.deviation.push_back(std::abs(g - target));
    }
    table.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t r = 1; r < table.rows.size(); ++r)
      if (table.rows[r].deviation[i] > table.rows[r - 1].deviation[i]) table.monotone = false;
  return table;
}

}  // namespace oracle
}  // namespace casimir
