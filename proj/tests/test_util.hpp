#pragma once

#include <cmath>
#include <functional>

#include "casimir/stack.hpp"

namespace test_util {

// 1-D adaptive Simpson on [a, b]; independent oracle for the radial
// reductions int f(q) q^2 dq of rotation-symmetric integrands
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate_1d(const std::function<double(double)>& f, double a, double b,
                           double tol = 1e-13) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// int_0^inf f(q) q^2 dq with an exponential tail cut; fixed segmentation keeps
// the adaptive rule from declaring victory on a zero-looking first sample
inline double radial_integral(const std::function<double(double)>& f, double qmax = 60.0,
                              double tol = 1e-14) {
  const double edges[] = {1e-9, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0};
  auto g = [&](double q) { return f(q) * q * q; };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < std::size(edges); ++i)
    total += integrate_1d(g, edges[i], edges[i + 1], tol);
  if (qmax > edges[std::size(edges) - 1])
    total += integrate_1d(g, edges[std::size(edges) - 1], qmax, tol);
  return total;
}

inline casimir::stack_config conductor_stack(double a = 1e-6, double t = 1e-6, double mass = 0.0) {
  using casimir::material_model;
  return casimir::stack_config(material_model::vacuum(),
                               {material_model::perfect_conductor(), t},
                               {material_model::perfect_conductor(), t}, a, mass);
}

inline casimir::stack_config permeable_stack(double a = 1e-6, double t = 1e-6, double mass = 0.0) {
  using casimir::material_model;
  return casimir::stack_config(material_model::vacuum(),
                               {material_model::infinitely_permeable(), t},
                               {material_model::infinitely_permeable(), t}, a, mass);
}

inline casimir::stack_config boyer_stack(double a = 1e-6, double t = 1e-6, double mass = 0.0,
                                         casimir::material_model bg = casimir::material_model::vacuum()) {
  using casimir::material_model;
  return casimir::stack_config(bg, {material_model::perfect_conductor(), t},
                               {material_model::infinitely_permeable(), t}, a, mass);
}

// mass whose dimensionless mbar equals the given value at separation a
inline double mass_for_mbar(double mbar, double a) {
  return mbar * casimir::hbar / (casimir::c_light * a);
}

}  // namespace test_util
