#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "casimir/constants.hpp"
#include "casimir/material.hpp"

namespace casimir {

/// Which closed-form limit a plate pair belongs to. general means both plates
/// are real materials and the full reflection machinery applies.
enum class limit_kind { general, conductor_conductor, permeable_permeable, conductor_permeable };

struct plate_config {
  material_model material;
  double thickness;  // m
};

/// Five-layer geometry: background | left plate | gap | right plate | background.
class stack_config {
 public:
  stack_config(material_model background, plate_config left, plate_config right,
               double separation, double mass)
      : background_(std::move(background)),
        left_(std::move(left)),
        right_(std::move(right)),
        separation_(separation),
        mass_(mass) {
    if (background_.is_limit_marker())
      throw std::invalid_argument("stack: background must not be a limit marker");
    if (!(separation_ > 0.0) || !std::isfinite(separation_))
      throw std::invalid_argument("stack: separation must be finite and > 0");
    if (!(left_.thickness > 0.0) || !(right_.thickness > 0.0))
      throw std::invalid_argument("stack: plate thicknesses must be > 0");
    if (!(mass_ >= 0.0) || !std::isfinite(mass_))
      throw std::invalid_argument("stack: mass must be finite and >= 0");
    const bool lm = left_.material.is_limit_marker();
    const bool rm = right_.material.is_limit_marker();
    if (lm != rm)
      throw std::invalid_argument(
          "stack: mixing a limit-marker plate with a real-material plate is unsupported");
  }

  const material_model& background() const { return background_; }
  const plate_config& left() const { return left_; }
  const plate_config& right() const { return right_; }
  double separation() const { return separation_; }
  double mass() const { return mass_; }

  // dimensionless internal scales (hbar = c = 1, lengths in units of a)
  double mbar() const { return mass_ * c_light * separation_ / hbar; }
  double tau_l() const { return left_.thickness / separation_; }
  double tau_r() const { return right_.thickness / separation_; }
  double energy_unit() const { return hbar_c / (separation_ * separation_ * separation_); }
  double force_unit() const { return energy_unit() / separation_; }

  stack_config with_separation(double a) const {
    return stack_config(background_, left_, right_, a, mass_);
  }
  stack_config with_mass(double m) const {
    return stack_config(background_, left_, right_, separation_, m);
  }
  stack_config swapped() const {
    return stack_config(background_, right_, left_, separation_, mass_);
  }

  bool unit_index_background() const {
    switch (background_.kind()) {
      case material_kind::vacuum: return true;
      case material_kind::constant_index: return background_.eps(0.0) == 1.0;
      case material_kind::constant_eps_mu: return background_.eps(0.0) * background_.mu(0.0) == 1.0;
      default: return false;  // dispersive backgrounds never have n_b == 1 for all xi
    }
  }

 private:
  material_model background_;
  plate_config left_, right_;
  double separation_;
  double mass_;
};

/// Scale bundle shared by the channels; all integrals are evaluated with
/// hbar = c = 1 and lengths in units of the separation, then multiplied by
/// energy_unit (hbar c / a^3) or force_unit (hbar c / a^4).
struct scales {
  double separation;
  double mbar;
  double tau_l, tau_r;
  double energy_unit;
  double force_unit;
};

inline scales make_scales(const stack_config& s) {
  return {s.separation(), s.mbar(), s.tau_l(), s.tau_r(), s.energy_unit(), s.force_unit()};
}

inline limit_kind classify(const stack_config& s) {
  const material_kind l = s.left().material.kind();
  const material_kind r = s.right().material.kind();
  const bool lc = l == material_kind::perfect_conductor;
  const bool lp = l == material_kind::infinitely_permeable;
  const bool rc = r == material_kind::perfect_conductor;
  const bool rp = r == material_kind::infinitely_permeable;
  if (lc && rc) return limit_kind::conductor_conductor;
  if (lp && rp) return limit_kind::permeable_permeable;
  if ((lc && rp) || (lp && rc)) return limit_kind::conductor_permeable;
  return limit_kind::general;
}

/// Boyer orientation; only meaningful for conductor_permeable stacks.
inline bool conductor_on_left(const stack_config& s) {
  return s.left().material.kind() == material_kind::perfect_conductor;
}

}  // namespace casimir
