#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casimir/constants.hpp"

namespace casimir {

enum class transform_kind { exp_map, rational_map };
enum class base_rule_kind { gauss_legendre, tanh_sinh };

struct quadrature_spec {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  long max_evals = 2'000'000;
  transform_kind transform = transform_kind::exp_map;
  base_rule_kind base_rule = base_rule_kind::gauss_legendre;
  int order = 15;  // gauss_legendre nodes per axis; the error reference uses order/2
  int level = 7;   // tanh_sinh depth
};

struct integral_result {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

/// Raised when the evaluation budget is exhausted; carries the partial result.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, double partial, double err, long evals)
      : std::runtime_error(msg), partial_value_(partial), error_estimate_(err), evaluations_(evals) {}
  double partial_value() const { return partial_value_; }
  double error_estimate() const { return error_estimate_; }
  long evaluations() const { return evaluations_; }

 private:
  double partial_value_;
  double error_estimate_;
  long evaluations_;
};

namespace detail {

struct rule1d {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;
};

// Gauss-Legendre by Newton iteration on the Legendre recurrence.
inline rule1d make_gauss_legendre(int n) {
  rule1d r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

inline const rule1d& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, rule1d> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

// Truncated tanh-sinh nodes at spacing h = 2^-level; nodes of level-1 are the
// even-index subset, which provides the nested error reference.
inline rule1d make_tanh_sinh(int level) {
  rule1d r;
  const double h = std::ldexp(1.0, -level);
  const double half_pi = 0.5 * pi;
  for (int k = 0;; ++k) {
    const double t = k * h;
    const double s = half_pi * std::sinh(t);
    const double x = std::tanh(s);
    const double w = h * half_pi * std::cosh(t) / (std::cosh(s) * std::cosh(s));
    if (w < 1e-17 || 1.0 - std::abs(x) < 1e-15) break;
    if (k == 0) {
      r.x.push_back(0.0);
      r.w.push_back(w);
    } else {
      r.x.push_back(x);
      r.w.push_back(w);
      r.x.push_back(-x);
      r.w.push_back(w);
    }
  }
  return r;
}

inline const rule1d& tanh_sinh(int level) {
  static std::mutex mtx;
  static std::map<int, rule1d> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, make_tanh_sinh(level)).first;
  return it->second;
}

inline double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

struct mapped_point {
  double coord;     // u or v
  double jacobian;  // du/ds or dv/dt
};

inline mapped_point apply_transform(transform_kind t, double s) {
  // maps s in (0,1) to (0, inf); s and 1-s stay strictly interior because all
  // base-rule nodes are interior. The factor 2 in the log map keeps the
  // Jacobian growth strictly below the slowest admissible integrand decay
  // (rate 1), so the transformed integrand stays bounded at the far corner.
  if (t == transform_kind::exp_map) return {-2.0 * std::log(s), 2.0 / s};
  const double om = 1.0 - s;
  return {s / om, 1.0 / (om * om)};
}

struct panel {
  double x0, x1, y0, y1;
  double value = 0.0;
  double err = 0.0;
  std::uint64_t id = 0;
  int gen = 0;
  bool splittable = true;
};

struct panel_order {
  bool operator()(const panel& a, const panel& b) const {
    if (a.err != b.err) return a.err < b.err;  // max-heap on err
    return a.id > b.id;                        // deterministic tie-break
  }
};

}  // namespace detail

/// Deterministic adaptive quadrature of  I = int_0^inf int_0^inf f(u,v) v dv du.
/// The v-weight is applied here; f is the bare integrand. Nodes are strictly
/// interior, so f is never sampled at u = 0 or v = 0.
template <class F>
integral_result integrate2d(F&& f, const quadrature_spec& spec = {}) {
  if (!(spec.rel_tol > 0.0)) throw std::invalid_argument("quadrature: rel_tol must be > 0");
  if (!(spec.abs_tol >= 0.0)) throw std::invalid_argument("quadrature: abs_tol must be >= 0");
  if (spec.max_evals < 100) throw std::invalid_argument("quadrature: max_evals must be >= 100");

  long evals = 0;

  auto g = [&](double s, double t) {
    const auto mu_ = detail::apply_transform(spec.transform, s);
    const auto mv_ = detail::apply_transform(spec.transform, t);
    ++evals;
    return f(mu_.coord, mv_.coord) * mv_.coord * mu_.jacobian * mv_.jacobian;
  };

  // tensor evaluation of one rectangle with a nested lower-order reference
  const bool use_gl = spec.base_rule == base_rule_kind::gauss_legendre;
  const detail::rule1d& hi =
      use_gl ? detail::gauss_legendre(std::max(4, spec.order)) : detail::tanh_sinh(std::max(2, spec.level));
  const detail::rule1d& lo = use_gl ? detail::gauss_legendre(std::max(2, std::max(4, spec.order) / 2))
                                    : detail::tanh_sinh(std::max(1, std::max(2, spec.level) - 1));

  auto evaluate = [&](detail::panel& p) {
    const double cx = 0.5 * (p.x0 + p.x1), hx = 0.5 * (p.x1 - p.x0);
    const double cy = 0.5 * (p.y0 + p.y1), hy = 0.5 * (p.y1 - p.y0);
    auto tensor = [&](const detail::rule1d& r) {
      std::vector<double> row(r.x.size());
      std::vector<double> col(r.x.size());
      for (std::size_t i = 0; i < r.x.size(); ++i) {
        const double s = cx + hx * r.x[i];
        for (std::size_t j = 0; j < r.x.size(); ++j)
          col[j] = r.w[j] * g(s, cy + hy * r.x[j]);
        row[i] = r.w[i] * detail::pairwise_sum(col);
      }
      return detail::pairwise_sum(row) * hx * hy;
    };
    const double vhi = tensor(hi);
    const double vlo = tensor(lo);
    p.value = vhi;
    p.err = std::abs(vhi - vlo);
  };

  std::priority_queue<detail::panel, std::vector<detail::panel>, detail::panel_order> heap;
  std::uint64_t next_id = 0;

  detail::panel root{0.0, 1.0, 0.0, 1.0};
  root.id = next_id++;
  evaluate(root);
  double total_value = root.value;
  double total_err = root.err;
  heap.push(root);
  std::vector<detail::panel> done;

  constexpr double min_width = 0x1p-26;
  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total_value)); };

  while (total_err > tolerance()) {
    // worst panel that can still be refined; converged or minimum-size panels
    // are retired as they surface
    detail::panel worst;
    bool found = false;
    while (!heap.empty()) {
      worst = heap.top();
      heap.pop();
      if (worst.splittable && worst.err > 0.0) {
        found = true;
        break;
      }
      done.push_back(worst);
    }
    if (!found) break;
    if (evals >= spec.max_evals) {
      done.push_back(worst);
      throw convergence_error("quadrature: evaluation budget exhausted before reaching tolerance",
                              total_value, total_err, evals);
    }

    const double wx = worst.x1 - worst.x0, wy = worst.y1 - worst.y0;
    const bool split_x = wx > wy || (wx == wy && worst.gen % 2 == 0);
    detail::panel a = worst, b = worst;
    a.gen = b.gen = worst.gen + 1;
    if (split_x) {
      const double mid = 0.5 * (worst.x0 + worst.x1);
      a.x1 = mid;
      b.x0 = mid;
    } else {
      const double mid = 0.5 * (worst.y0 + worst.y1);
      a.y1 = mid;
      b.y0 = mid;
    }
    a.id = next_id++;
    b.id = next_id++;
    if (a.x1 - a.x0 < min_width && a.y1 - a.y0 < min_width) a.splittable = b.splittable = false;
    evaluate(a);
    evaluate(b);
    total_value += a.value + b.value - worst.value;
    total_err += a.err + b.err - worst.err;
    heap.push(a);
    heap.push(b);
  }

  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  // canonical order, then pairwise reduction: the result is independent of the
  // refinement bookkeeping order above
  std::sort(done.begin(), done.end(), [](const detail::panel& a, const detail::panel& b) {
    if (a.x0 != b.x0) return a.x0 < b.x0;
    if (a.y0 != b.y0) return a.y0 < b.y0;
    if (a.x1 != b.x1) return a.x1 < b.x1;
    return a.y1 < b.y1;
  });
  std::vector<double> values(done.size()), errs(done.size());
  for (std::size_t i = 0; i < done.size(); ++i) {
    values[i] = done[i].value;
    errs[i] = done[i].err;
  }
  integral_result out;
  out.value = detail::pairwise_sum(values);
  out.error_estimate = detail::pairwise_sum(errs);
  out.evaluations = evals;
  return out;
}

}  // namespace casimir
