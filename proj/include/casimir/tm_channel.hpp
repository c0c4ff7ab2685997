#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "casimir/te_channel.hpp"

namespace casimir {

/// Multiplies one matrix entry by `factor` before the a -> infinity sparsification;
/// verification hook used to prove the limit ladders catch transcription typos.
struct q_perturbation {
  int row = 0;
  int col = 0;
  double factor = 1.0;
};

using mat4 = std::array<std::array<double, 4>, 4>;

/// The TM boundary-matching matrix and its plate-separation -> infinity limit,
/// with the per-column exponential growth factors divided out.
struct q_matrices {
  mat4 q{};
  mat4 q_inf{};
  std::array<double, 4> column_scale{};  // log factors removed from both matrices
};

namespace detail {

struct side_coeffs {
  // scalar building blocks of one plate's two columns
  double d2, d3;        // transverse/longitudinal interface ratios
  double h, c, g, j, kk;  // beta_jb/r_jb, (a_bj/k_bj)(r_jb/k_jb), (a_jb/r_jb)(b_bj/r_bj),
                          // (b_bj/r_bj)(k_jb/r_jb), a_jb/k_jb
  double xT, xL;        // e^{-2 qT t}, e^{-2 qL t}
  double sT, sL;        // qT t, qL t
};

inline side_coeffs make_side(const kinematics& k, const coefficient_set& c, layer j, double tau) {
  side_coeffs s{};
  const bool left = j == layer::left;
  s.d2 = left ? c.delta_II_l : c.delta_II_r;
  s.d3 = left ? c.delta_III_l : c.delta_III_r;
  const double a_bj = left ? c.alpha_bl : c.alpha_br;
  const double a_jb = left ? c.alpha_lb : c.alpha_rb;
  const double b_bj = left ? c.beta_bl : c.beta_br;
  const double b_jb = left ? c.beta_lb : c.beta_rb;
  const double r_bj = left ? c.r_plus_bl : c.r_plus_br;
  const double r_jb = left ? c.r_plus_lb : c.r_plus_rb;
  const double k_bj = left ? c.kappa_plus_bl : c.kappa_plus_br;
  const double k_jb = left ? c.kappa_plus_lb : c.kappa_plus_rb;
  s.h = b_jb / r_jb;
  s.c = (a_bj / k_bj) * (r_jb / k_jb);
  s.g = (a_jb / r_jb) * (b_bj / r_bj);
  s.j = (b_bj / r_bj) * (k_jb / r_jb);
  s.kk = a_jb / k_jb;
  const double qT = qT_of(k, j), qL = qL_of(k, j);
  s.sT = qT * tau;
  s.sL = qL * tau;
  s.xT = 2.0 * s.sT > exp_cutoff ? 0.0 : std::exp(-2.0 * s.sT);
  s.xL = 2.0 * s.sL > exp_cutoff ? 0.0 : std::exp(-2.0 * s.sL);
  return s;
}

// One plate pair's column vectors, split into transverse (A) and longitudinal
// (B) exponential parts: column_first = A e^{sT} + B e^{sL},
// column_second = Ap e^{sT} + Bp e^{sL}. At xT = 0 the transverse parts become
// parallel (Ap = c A) and likewise Bp at xL = 0 (B = j Bp); At and Bt are the
// exact remainders, Ap = c A + xT At and B = j Bp + xL Bt, which is what keeps
// the pair minors evaluable at large contrast.
struct pair_vectors {
  std::array<double, 4> A, Ap, At, B, Bp, Bt;
  double sT, sL;
};

inline pair_vectors left_pair(const side_coeffs& s, double ETb, double ELb) {
  pair_vectors p{};
  p.sT = s.sT;
  p.sL = s.sL;
  const double d2 = s.d2, d3 = s.d3, x = s.xT, xL = s.xL;
  p.A = {-d2 * (1.0 - x) * ETb, 1.0 - d2 * d2 * x, -s.h * (1.0 - d2 * x) * ELb, s.h * (1.0 - d2 * x)};
  p.Ap = {-s.c * (d2 - x) * ETb, s.c * (1.0 - d2 * x), -s.c * s.h * (1.0 - x) * ELb,
          s.c * s.h * (1.0 - x)};
  const double ta = s.c * (1.0 - d2);
  p.At = {ta * ETb, -ta * d2, ta * s.h * ELb, -ta * s.h};
  p.B = {s.g * (1.0 - xL) * ETb, s.g * (1.0 - xL), -s.j * (d3 + xL) * ELb, s.j * (1.0 + d3 * xL)};
  p.Bp = {s.kk * (1.0 + d3 * xL) * ETb, s.kk * (1.0 + d3 * xL), -d3 * (1.0 - xL) * ELb,
          1.0 - d3 * d3 * xL};
  const double tb = -(1.0 + d3);
  p.Bt = {tb * s.g * ETb, tb * s.g, tb * s.j * ELb, -tb * s.j * d3};
  return p;
}

inline pair_vectors right_pair(const side_coeffs& s, double ETb, double ELb) {
  pair_vectors p{};
  p.sT = s.sT;
  p.sL = s.sL;
  const double d2 = s.d2, d3 = s.d3, x = s.xT, xL = s.xL;
  p.A = {1.0 - d2 * d2 * x, -d2 * (1.0 - x) * ETb, s.h * (1.0 - d2 * x), -s.h * (1.0 - d2 * x) * ELb};
  p.Ap = {s.c * (1.0 - d2 * x), -s.c * (d2 - x) * ETb, s.c * s.h * (1.0 - x),
          -s.c * s.h * (1.0 - x) * ELb};
  const double ta = s.c * (1.0 - d2);
  p.At = {-ta * d2, ta * ETb, -ta * s.h, ta * s.h * ELb};
  p.B = {s.g * (1.0 - xL), s.g * (1.0 - xL) * ETb, s.j * (1.0 + d3 * xL), -s.j * (d3 + xL) * ELb};
  p.Bp = {s.kk * (1.0 + d3 * xL), s.kk * (1.0 + d3 * xL) * ETb, 1.0 - d3 * d3 * xL,
          -d3 * (1.0 - xL) * ELb};
  const double tb = -(1.0 + d3);
  p.Bt = {tb * s.g, tb * s.g * ETb, -tb * s.j * d3, tb * s.j * ELb};
  return p;
}

inline constexpr int pair_rows[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
inline constexpr int pair_comp[6] = {5, 4, 3, 2, 1, 0};
inline constexpr double pair_sign[6] = {+1.0, -1.0, +1.0, +1.0, -1.0, +1.0};

// The six 2x2 minors of one column pair, divided by the common factor
// e^{sT + sL}. The e^{2 sT} and e^{2 sL} choice terms carry exactly cancelling
// x factors, so they enter as O(1) remainders damped by e^{-(sT+sL)}.
inline std::array<double, 6> hat_minors(const pair_vectors& p) {
  std::array<double, 6> out{};
  const double damp = (p.sT + p.sL) > exp_cutoff ? 0.0 : std::exp(-(p.sT + p.sL));
  for (int n = 0; n < 6; ++n) {
    const int i = pair_rows[n][0], j = pair_rows[n][1];
    const double mix = p.A[i] * p.Bp[j] - p.A[j] * p.Bp[i] + p.B[i] * p.Ap[j] - p.B[j] * p.Ap[i];
    const double tt = p.A[i] * p.At[j] - p.A[j] * p.At[i];
    const double ll = p.Bt[i] * p.Bp[j] - p.Bt[j] * p.Bp[i];
    out[n] = mix + (tt + ll) * damp;
  }
  return out;
}

}  // namespace detail

/// Laplace expansion of det Q by complementary column-pair minors, with the
/// left/right plates' exponential growth factored out (it cancels in the
/// det Q / det Q_inf ratio). Stays accurate at plate contrasts where the
/// column-scaled cofactor expansion cancels catastrophically.
struct pair_system {
  std::array<double, 6> lhat{}, rhat{};          // pair minors / e^{sT+sL}
  std::array<double, 6> lhat_inf{}, rhat_inf{};  // same with the a-dependent entries zeroed
  std::array<double, 6> gl{}, gr{};              // separation-exponent rate of each minor
};

inline pair_system build_pair_system(const stack_config& s, const kinematics& k,
                                     const coefficient_set& c) {
  const double ETb = 2.0 * k.qT_b > detail::exp_cutoff ? 0.0 : std::exp(-k.qT_b);
  const double ELb = 2.0 * k.qL_b > detail::exp_cutoff ? 0.0 : std::exp(-k.qL_b);
  const auto sl = detail::make_side(k, c, layer::left, s.tau_l());
  const auto sr = detail::make_side(k, c, layer::right, s.tau_r());

  pair_system ps;
  ps.lhat = detail::hat_minors(detail::left_pair(sl, ETb, ELb));
  ps.rhat = detail::hat_minors(detail::right_pair(sr, ETb, ELb));
  ps.lhat_inf = detail::hat_minors(detail::left_pair(sl, 0.0, 0.0));
  ps.rhat_inf = detail::hat_minors(detail::right_pair(sr, 0.0, 0.0));
  for (int n = 0; n < 6; ++n) {
    const int i = detail::pair_rows[n][0], j = detail::pair_rows[n][1];
    // left columns: row 0 entries carry e^{-qT,b a}, row 2 carry e^{-qL,b a};
    // right columns: rows 1 and 3
    ps.gl[n] = (i == 0 || j == 0 ? k.qT_b : 0.0) + (i == 2 || j == 2 ? k.qL_b : 0.0);
    ps.gr[n] = (i == 1 || j == 1 ? k.qT_b : 0.0) + (i == 3 || j == 3 ? k.qL_b : 0.0);
  }
  return ps;
}

inline double det_ratio(const pair_system& ps) {
  double num = 0.0, den = 0.0;
  for (int n = 0; n < 6; ++n) {
    num += detail::pair_sign[n] * ps.lhat[n] * ps.rhat[detail::pair_comp[n]];
    den += detail::pair_sign[n] * ps.lhat_inf[n] * ps.rhat_inf[detail::pair_comp[n]];
  }
  if (den == 0.0) throw std::domain_error("tm: det Q_inf vanished (degenerate configuration)");
  return num / den;
}

/// det Q / det Q_inf - 1 without forming the near-unit ratio: the single
/// separation-independent pairing is bitwise common to both determinants, so
/// only the separation-coupled pairings enter the numerator.
inline double det_ratio_minus_one(const pair_system& ps) {
  double num = 0.0, den = 0.0;
  for (int n = 0; n < 6; ++n) {
    const int m = detail::pair_comp[n];
    if (ps.gl[n] + ps.gr[m] > 0.0) num += detail::pair_sign[n] * ps.lhat[n] * ps.rhat[m];
    den += detail::pair_sign[n] * ps.lhat_inf[n] * ps.rhat_inf[m];
  }
  if (den == 0.0) throw std::domain_error("tm: det Q_inf vanished (degenerate configuration)");
  return num / den;
}

/// -d/da ln det Q at fixed dimensionless geometry (det Q_inf is a-independent).
inline double force_kernel(const pair_system& ps) {
  double num = 0.0, den = 0.0;
  for (int n = 0; n < 6; ++n) {
    const double term = detail::pair_sign[n] * ps.lhat[n] * ps.rhat[detail::pair_comp[n]];
    num += (ps.gl[n] + ps.gr[detail::pair_comp[n]]) * term;
    den += term;
  }
  if (den == 0.0) throw std::domain_error("tm force: det Q vanished (degenerate configuration)");
  return num / den;
}

/// Direct transcription of the sixteen matrix entries with per-column scaling;
/// the second, independent route to det Q / det Q_inf (valid at moderate
/// contrast) and the shape the perturbation hook operates on.
inline q_matrices build_q(const stack_config& s, const kinematics& k, const coefficient_set& c,
                          bool scaled = true, const q_perturbation* perturb = nullptr) {
  if (classify(s) != limit_kind::general)
    throw std::logic_error("build_q: limit-marker stacks use the closed-form limit integrands");

  const double ETb = 2.0 * k.qT_b > detail::exp_cutoff ? 0.0 : std::exp(-k.qT_b);
  const double ELb = 2.0 * k.qL_b > detail::exp_cutoff ? 0.0 : std::exp(-k.qL_b);

  q_matrices m;
  const double sL_col = scaled ? std::max(k.qT_l, k.qL_l) * s.tau_l() : 0.0;
  const double sR_col = scaled ? std::max(k.qT_r, k.qL_r) * s.tau_r() : 0.0;
  m.column_scale = {sL_col, sL_col, sR_col, sR_col};

  auto exp_or_zero = [](double x) { return x < -detail::exp_cutoff ? 0.0 : std::exp(x); };

  // left-plate exponentials (columns 1,2), right-plate (columns 3,4)
  const double eTl = exp_or_zero(k.qT_l * s.tau_l() - sL_col);
  const double eLl = exp_or_zero(k.qL_l * s.tau_l() - sL_col);
  const double eTr = exp_or_zero(k.qT_r * s.tau_r() - sR_col);
  const double eLr = exp_or_zero(k.qL_r * s.tau_r() - sR_col);
  const double xTl = exp_or_zero(-2.0 * k.qT_l * s.tau_l());
  const double xLl = exp_or_zero(-2.0 * k.qL_l * s.tau_l());
  const double xTr = exp_or_zero(-2.0 * k.qT_r * s.tau_r());
  const double xLr = exp_or_zero(-2.0 * k.qL_r * s.tau_r());

  const double d2l = c.delta_II_l, d3l = c.delta_III_l;
  const double d2r = c.delta_II_r, d3r = c.delta_III_r;

  mat4& q = m.q;
  q[0][0] = (-d2l * (1.0 - xTl) * eTl +
             (c.alpha_lb / c.r_plus_lb) * (c.beta_bl / c.r_plus_bl) * (1.0 - xLl) * eLl) * ETb;
  q[0][1] = (-(c.alpha_bl / c.kappa_plus_bl) * (c.r_plus_lb / c.kappa_plus_lb) * (d2l - xTl) * eTl +
             (c.alpha_lb / c.kappa_plus_lb) * (1.0 + d3l * xLl) * eLl) * ETb;
  q[0][2] = (1.0 - d2r * d2r * xTr) * eTr +
            (c.alpha_rb * c.beta_br / (c.r_plus_rb * c.r_plus_br)) * (1.0 - xLr) * eLr;
  q[0][3] = (c.alpha_br / c.kappa_plus_br) * (c.r_plus_rb / c.kappa_plus_rb) * (1.0 - d2r * xTr) * eTr +
            (c.alpha_rb / c.kappa_plus_rb) * (1.0 + d3r * xLr) * eLr;
  q[1][0] = (1.0 - d2l * d2l * xTl) * eTl +
            (c.alpha_lb / c.r_plus_lb) * (c.beta_bl / c.r_plus_bl) * (1.0 - xLl) * eLl;
  q[1][1] = (c.alpha_bl / c.kappa_plus_bl) * (c.r_plus_lb / c.kappa_plus_lb) * (1.0 - d2l * xTl) * eTl +
            (c.alpha_lb / c.kappa_plus_lb) * (1.0 + d3l * xLl) * eLl;
  q[1][2] = (-d2r * (1.0 - xTr) * eTr +
             (c.alpha_rb * c.beta_br / (c.r_plus_rb * c.r_plus_br)) * (1.0 - xLr) * eLr) * ETb;
  q[1][3] = (-(c.alpha_br / c.kappa_plus_br) * (c.r_plus_rb / c.kappa_plus_rb) * (d2r - xTr) * eTr +
             (c.alpha_rb / c.kappa_plus_rb) * (1.0 + d3r * xLr) * eLr) * ETb;
  q[2][0] = (-(c.beta_lb / c.r_plus_lb) * (1.0 - d2l * xTl) * eTl -
             (c.beta_bl / c.r_plus_bl) * (c.kappa_plus_lb / c.r_plus_lb) * (d3l + xLl) * eLl) * ELb;
  q[2][1] = (-(c.alpha_bl * c.beta_lb / (c.kappa_plus_bl * c.kappa_plus_lb)) * (1.0 - xTl) * eTl -
             d3l * (1.0 - xLl) * eLl) * ELb;
  q[2][2] = (c.beta_rb / c.r_plus_rb) * (1.0 - d2r * xTr) * eTr +
            (c.beta_br / c.r_plus_br) * (c.kappa_plus_rb / c.r_plus_rb) * (1.0 + d3r * xLr) * eLr;
  q[2][3] = (c.beta_rb * c.alpha_br / (c.kappa_plus_rb * c.kappa_plus_br)) * (1.0 - xTr) * eTr +
            (1.0 - d3r * d3r * xLr) * eLr;
  q[3][0] = (c.beta_lb / c.r_plus_lb) * (1.0 - d2l * xTl) * eTl +
            (c.beta_bl / c.r_plus_bl) * (c.kappa_plus_lb / c.r_plus_lb) * (1.0 + d3l * xLl) * eLl;
  q[3][1] = (c.alpha_bl * c.beta_lb / (c.kappa_plus_bl * c.kappa_plus_lb)) * (1.0 - xTl) * eTl +
            (1.0 - d3l * d3l * xLl) * eLl;
  q[3][2] = (-(c.beta_rb / c.r_plus_rb) * (1.0 - d2r * xTr) * eTr -
             (c.beta_br / c.r_plus_br) * (c.kappa_plus_rb / c.r_plus_rb) * (d3r + xLr) * eLr) * ELb;
  q[3][3] = (-(c.beta_rb * c.alpha_br / (c.kappa_plus_rb * c.kappa_plus_br)) * (1.0 - xTr) * eTr -
             d3r * (1.0 - xLr) * eLr) * ELb;

  for (auto& row : q)
    for (double e : row)
      if (!std::isfinite(e))
        throw std::domain_error("build_q: entry overflowed despite column scaling");

  if (perturb != nullptr) q[perturb->row][perturb->col] *= perturb->factor;

  m.q_inf = q;
  for (auto [i, j] : {std::pair{0, 0}, {0, 1}, {1, 2}, {1, 3}, {2, 0}, {2, 1}, {3, 2}, {3, 3}})
    m.q_inf[i][j] = 0.0;
  return m;
}

inline double minor3(const mat4& m, int row, int col) {
  double sub[3][3];
  for (int i = 0, si = 0; i < 4; ++i) {
    if (i == row) continue;
    for (int j = 0, sj = 0; j < 4; ++j) {
      if (j == col) continue;
      sub[si][sj++] = m[i][j];
    }
    ++si;
  }
  return sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
         sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
         sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
}

inline double det4(const mat4& m) {
  double d = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double cof = (j % 2 == 0 ? 1.0 : -1.0) * minor3(m, 0, j);
    d += m[0][j] * cof;
  }
  return d;
}

inline double det_ratio(const q_matrices& m) {
  const double den = det4(m.q_inf);
  if (den == 0.0) throw std::domain_error("tm: det Q_inf vanished (degenerate configuration)");
  return det4(m.q) / den;
}

namespace detail {

// massless TM reduction: a single scalar reflection product, no 4x4 system
inline double tm_massless_integrand(const stack_config& s, const kinematics& k) {
  auto slab = [&](layer j, double tau) {
    const double d = (k.qT_b * eps_of(k, j) - qT_of(k, j) * k.eps_b) /
                     (k.qT_b * eps_of(k, j) + qT_of(k, j) * k.eps_b);
    const double x = 2.0 * qT_of(k, j) * tau;
    return d * a_minus_b_exp(1.0, 1.0, x) / a_minus_b_exp(1.0, d * d, x);
  };
  const double refl = slab(layer::left, s.tau_l()) * slab(layer::right, s.tau_r());
  return log_one_minus(refl * std::exp(-2.0 * k.qT_b));
}

}  // namespace detail

/// Perfect-conductor limit of the TM determinant ratio: the five-term W and
/// its separation -> infinity factorization, for any background index.
struct w_pair {
  double w;
  double w_inf;
};

namespace detail {

// W = w_inf + delta with delta kept separate; forming W and subtracting
// w_inf back would lose delta to rounding wherever it is exponentially small
struct limit_terms {
  double w_inf;
  double delta;
};

inline limit_terms conductor_terms(const stack_config& s, const kinematics& k,
                                   const coefficient_set& c) {
  const double L = c.lambda, D = c.delta;
  auto ez = [](double x) { return x > exp_cutoff ? 0.0 : std::exp(-x); };
  const double xl = 2.0 * k.q0 * s.tau_l();
  const double xr = 2.0 * k.q0 * s.tau_r();
  const double eT = ez(2.0 * k.qT_b);
  const double eL = ez(2.0 * k.qL_b);
  const double eTL = ez(k.qT_b + k.qL_b);
  const double om = 1.0 - L, dp = D + L;
  const double w_inf = a_minus_b_exp(om * om, dp * dp, xl) * a_minus_b_exp(om * om, dp * dp, xr);
  if (w_inf == 0.0) throw std::domain_error("conductor_w: W_inf vanished (degenerate configuration)");
  const double t2 = -a_minus_b_exp(1.0 - L * L, D * D - L * L, xl) *
                    a_minus_b_exp(1.0 - L * L, D * D - L * L, xr) * eT;
  const double t3 = -a_minus_b_exp(om * (D - L), (1.0 + L) * dp, xl) *
                    a_minus_b_exp(om * (D - L), (1.0 + L) * dp, xr) * eL;
  const double t4 = 4.0 * L * (1.0 - D) * a_minus_b_exp(om, -dp, xl) * a_minus_b_exp(om, -dp, xr) * eTL;
  const double t5 = om * om * dp * dp * a_minus_b_exp(1.0, 1.0, xl) * a_minus_b_exp(1.0, 1.0, xr) *
                    eT * eL;
  return {w_inf, t2 + t3 + t4 + t5};
}

}  // namespace detail

inline w_pair conductor_w(const stack_config& s, const kinematics& k, const coefficient_set& c) {
  const auto t = detail::conductor_terms(s, k, c);
  return {t.w_inf + t.delta, t.w_inf};
}

/// Infinitely-permeable limit: script-W is already normalized to 1 at large
/// separation; returns its two factors' logs summed.
inline double permeable_ln_w(const stack_config& s, const kinematics& k, const coefficient_set& c) {
  const double D = c.delta;
  auto ez = [](double x) { return x > detail::exp_cutoff ? 0.0 : std::exp(-x); };
  const double xl = 2.0 * k.q0 * s.tau_l();
  const double xr = 2.0 * k.q0 * s.tau_r();
  const double first = detail::log_one_minus(ez(2.0 * k.qT_b));
  const double frac = D * D * detail::a_minus_b_exp(1.0, 1.0, xl) * detail::a_minus_b_exp(1.0, 1.0, xr) /
                      (detail::a_minus_b_exp(1.0, D * D, xl) * detail::a_minus_b_exp(1.0, D * D, xr));
  const double second = detail::log_one_minus(frac * ez(2.0 * k.qL_b));
  return first + second;
}

namespace detail {

// Mixed pair (one conducting, one permeable plate). The thickness paired with
// the Delta^2 interface factor is the permeable plate's; the one inside the
// Lambda-structure factor is the conductor's.
inline limit_terms boyer_terms(const stack_config& s, const kinematics& k,
                               const coefficient_set& c) {
  const double L = c.lambda, D = c.delta;
  const double tau_cond = conductor_on_left(s) ? s.tau_l() : s.tau_r();
  const double tau_perm = conductor_on_left(s) ? s.tau_r() : s.tau_l();
  auto ez = [](double x) { return x > exp_cutoff ? 0.0 : std::exp(-x); };
  const double xp = 2.0 * k.q0 * tau_perm;
  const double xc = 2.0 * k.q0 * tau_cond;
  const double eT = ez(2.0 * k.qT_b);
  const double eL = ez(2.0 * k.qL_b);
  const double om = 1.0 - L, dp = D + L;
  const double perm_f = a_minus_b_exp(1.0, D * D, xp);
  const double w_inf = perm_f * a_minus_b_exp(om * om, dp * dp, xc);
  if (w_inf == 0.0) throw std::domain_error("boyer_w: W_inf vanished (degenerate configuration)");
  const double t2 = perm_f * a_minus_b_exp(1.0 - L * L, D * D - L * L, xc) * eT;
  const double t3 = -D * a_minus_b_exp(1.0, 1.0, xp) * a_minus_b_exp(om * (D - L), (1.0 + L) * dp, xc) * eL;
  const double t4 = -D * om * dp * a_minus_b_exp(1.0, 1.0, xp) * a_minus_b_exp(1.0, 1.0, xc) * eT * eL;
  return {w_inf, t2 + t3 + t4};
}

}  // namespace detail

inline w_pair boyer_w(const stack_config& s, const kinematics& k, const coefficient_set& c) {
  const auto t = detail::boyer_terms(s, k, c);
  return {t.w_inf + t.delta, t.w_inf};
}

/// ln det(Q/Q_inf) at one dimensionless point, with the ideal-plate limits
/// dispatched to their closed forms.
inline double tm_integrand(const stack_config& s, double u, double v) {
  const kinematics k = make_kinematics(s, u, v);
  if (2.0 * std::min(k.qT_b, k.qL_b) > detail::exp_cutoff) return 0.0;
  switch (classify(s)) {
    case limit_kind::conductor_conductor: {
      const auto t = detail::conductor_terms(s, k, make_coefficients(k));
      return std::log1p(t.delta / t.w_inf);
    }
    case limit_kind::permeable_permeable: {
      const auto c = make_coefficients(k);
      return permeable_ln_w(s, k, c);
    }
    case limit_kind::conductor_permeable: {
      const auto t = detail::boyer_terms(s, k, make_coefficients(k));
      return std::log1p(t.delta / t.w_inf);
    }
    default: {
      if (s.mass() == 0.0) return detail::tm_massless_integrand(s, k);
      const auto c = make_coefficients(k);
      return std::log1p(det_ratio_minus_one(build_pair_system(s, k, c)));
    }
  }
}

/// General-path integrand through the naively scaled matrices; verification
/// hook (moderate contrast only, where that route is well conditioned).
inline double tm_integrand_perturbed(const stack_config& s, double u, double v,
                                     const q_perturbation& p) {
  const kinematics k = make_kinematics(s, u, v);
  if (2.0 * std::min(k.qT_b, k.qL_b) > detail::exp_cutoff) return 0.0;
  const auto c = make_coefficients(k);
  return std::log(det_ratio(build_q(s, k, c, true, &p)));
}

inline energy_result tm_energy(const stack_config& s, const quadrature_spec& quad = {}) {
  const auto r = detail::integrate_scaled([&](double u, double v) { return tm_integrand(s, u, v); },
                                          quad, s.energy_unit() / (4.0 * pi * pi), "tm_energy");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm};
}

/// TM force for real-material plates from the determinant's matrix-element
/// derivatives (the minors combination), sharing the pair-minor evaluation
/// with the energy path.
inline energy_result tm_force_minors(const stack_config& s, const quadrature_spec& quad = {}) {
  if (classify(s) != limit_kind::general)
    throw std::logic_error("tm_force_minors: only defined for real-material plates");
  auto integrand = [&](double u, double v) {
    const kinematics k = make_kinematics(s, u, v);
    if (2.0 * std::min(k.qT_b, k.qL_b) > detail::exp_cutoff) return 0.0;
    const auto c = make_coefficients(k);
    return force_kernel(build_pair_system(s, k, c));
  };
  const auto r = detail::integrate_scaled(integrand, quad, s.force_unit() / (4.0 * pi * pi),
                                          "tm_force_minors");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm};
}

inline bool tm_split_available(const stack_config& s) {
  const limit_kind kind = classify(s);
  if (kind == limit_kind::permeable_permeable) return true;
  return kind == limit_kind::conductor_conductor && s.unit_index_background();
}

namespace detail {

inline void require_split(const stack_config& s, const char* who) {
  if (!tm_split_available(s))
    throw std::logic_error(std::string(who) +
                           ": split unavailable (needs conductor plates in a unit-index background "
                           "or infinitely permeable plates)");
}

}  // namespace detail

/// First TM polarization of the split limits; identical to the TE closed form.
inline energy_result tm_first_polarization_energy(const stack_config& s,
                                                  const quadrature_spec& quad = {}) {
  detail::require_split(s, "tm_first_polarization_energy");
  const auto r = detail::integrate_scaled(
      [&](double u, double v) {
        const kinematics k = make_kinematics(s, u, v);
        if (2.0 * k.qT_b > detail::exp_cutoff) return 0.0;
        return detail::log_one_minus(std::exp(-2.0 * k.qT_b));
      },
      quad, s.energy_unit() / (4.0 * pi * pi), "tm_first_polarization_energy");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm_i};
}

inline energy_result tm_first_polarization_force(const stack_config& s,
                                                 const quadrature_spec& quad = {}) {
  detail::require_split(s, "tm_first_polarization_force");
  const auto r = detail::integrate_scaled(
      [&](double u, double v) {
        const kinematics k = make_kinematics(s, u, v);
        if (2.0 * k.qT_b > detail::exp_cutoff) return 0.0;
        const double x = std::exp(-2.0 * k.qT_b);
        return k.qT_b * x / (1.0 - x);
      },
      quad, -s.force_unit() / (2.0 * pi * pi), "tm_first_polarization_force");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm_i};
}

namespace detail {

// shared structure of the second-polarization integrands: reflection
// amplitude rho, in-plate decay q_plate (= q0), gap decay q_gap
struct second_pol_point {
  double rho2_frac;  // rho^2 (1-e_l)(1-e_r) / ((1-rho^2 e_l)(1-rho^2 e_r))
  double q_gap;
};

inline second_pol_point second_pol(const stack_config& s, const kinematics& k,
                                   const coefficient_set& c) {
  const bool conductor = classify(s) == limit_kind::conductor_conductor;
  const double rho = conductor ? c.d : c.delta;
  const double q_gap = conductor ? k.qm : k.qL_b;
  const double xl = 2.0 * k.q0 * s.tau_l();
  const double xr = 2.0 * k.q0 * s.tau_r();
  const double frac = rho * rho * a_minus_b_exp(1.0, 1.0, xl) * a_minus_b_exp(1.0, 1.0, xr) /
                      (a_minus_b_exp(1.0, rho * rho, xl) * a_minus_b_exp(1.0, rho * rho, xr));
  return {frac, q_gap};
}

}  // namespace detail

/// Second TM polarization (the continuum modes): conductor plates need a
/// unit-index background; permeable plates work for any background.
inline energy_result tm_second_polarization_energy(const stack_config& s,
                                                   const quadrature_spec& quad = {}) {
  detail::require_split(s, "tm_second_polarization_energy");
  const auto r = detail::integrate_scaled(
      [&](double u, double v) {
        const kinematics k = make_kinematics(s, u, v);
        const auto c = make_coefficients(k);
        const auto pt = detail::second_pol(s, k, c);
        if (2.0 * pt.q_gap > detail::exp_cutoff) return 0.0;
        return detail::log_one_minus(pt.rho2_frac * std::exp(-2.0 * pt.q_gap));
      },
      quad, s.energy_unit() / (4.0 * pi * pi), "tm_second_polarization_energy");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm_ii};
}

inline energy_result tm_second_polarization_force(const stack_config& s,
                                                  const quadrature_spec& quad = {}) {
  detail::require_split(s, "tm_second_polarization_force");
  const auto r = detail::integrate_scaled(
      [&](double u, double v) {
        const kinematics k = make_kinematics(s, u, v);
        const auto c = make_coefficients(k);
        const auto pt = detail::second_pol(s, k, c);
        if (2.0 * pt.q_gap > detail::exp_cutoff) return 0.0;
        const double x = pt.rho2_frac * std::exp(-2.0 * pt.q_gap);
        return pt.q_gap * x / (1.0 - x);
      },
      quad, -s.force_unit() / (2.0 * pi * pi), "tm_second_polarization_force");
  return {r.value, r.error_estimate, r.evaluations, channel_id::tm_ii};
}

namespace detail {

// central difference with one Richardson step, h = a * 1e-3
template <class EnergyFn>
energy_result fd_force(const stack_config& s, const quadrature_spec& quad, EnergyFn&& energy,
                       channel_id chan) {
  const double a = s.separation();
  const double h = 1e-3 * a;
  auto E = [&](double sep) { return energy(s.with_separation(sep), quad); };
  const auto ep1 = E(a + h), em1 = E(a - h);
  const auto ep2 = E(a + 0.5 * h), em2 = E(a - 0.5 * h);
  const double f_h = (em1.value - ep1.value) / (2.0 * h);
  const double f_h2 = (em2.value - ep2.value) / h;
  const double value = (4.0 * f_h2 - f_h) / 3.0;
  const double quad_err = std::sqrt(ep1.error_estimate * ep1.error_estimate +
                                    em1.error_estimate * em1.error_estimate +
                                    ep2.error_estimate * ep2.error_estimate +
                                    em2.error_estimate * em2.error_estimate) /
                          (2.0 * h);
  const double trunc_err = std::abs(value - f_h2) / 3.0;
  return {value, quad_err + trunc_err,
          ep1.evaluations + em1.evaluations + ep2.evaluations + em2.evaluations, chan};
}

}  // namespace detail

inline energy_result tm_force(const stack_config& s, const quadrature_spec& quad = {}) {
  switch (classify(s)) {
    case limit_kind::general: {
      auto r = tm_force_minors(s, quad);
      r.channel = channel_id::tm;
      return r;
    }
    case limit_kind::conductor_conductor:
      if (!s.unit_index_background()) break;  // no split; fall through to finite differences
      [[fallthrough]];
    case limit_kind::permeable_permeable: {
      const auto f1 = tm_first_polarization_force(s, quad);
      const auto f2 = tm_second_polarization_force(s, quad);
      return {f1.value + f2.value,
              std::sqrt(f1.error_estimate * f1.error_estimate +
                        f2.error_estimate * f2.error_estimate),
              f1.evaluations + f2.evaluations, channel_id::tm};
    }
    case limit_kind::conductor_permeable:
      break;
  }
  auto r = detail::fd_force(
      s, quad, [](const stack_config& cfg, const quadrature_spec& q) { return tm_energy(cfg, q); },
      channel_id::tm);
  return r;
}

inline energy_result total_energy(const stack_config& s, const quadrature_spec& quad = {}) {
  const auto te = te_energy(s, quad);
  const auto tm = tm_energy(s, quad);
  return {te.value + tm.value,
          std::sqrt(te.error_estimate * te.error_estimate + tm.error_estimate * tm.error_estimate),
          te.evaluations + tm.evaluations, channel_id::total};
}

inline energy_result total_force(const stack_config& s, const quadrature_spec& quad = {}) {
  const auto te = te_force(s, quad);
  const auto tm = tm_force(s, quad);
  return {te.value + tm.value,
          std::sqrt(te.error_estimate * te.error_estimate + tm.error_estimate * tm.error_estimate),
          te.evaluations + tm.evaluations, channel_id::total};
}

}  // namespace casimir
