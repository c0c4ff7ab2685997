#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace casimir {

enum class material_kind {
  vacuum,
  constant_index,
  constant_eps_mu,
  plasma,
  tabulated,
  perfect_conductor,
  infinitely_permeable,
};

/// Material response evaluated on the imaginary frequency axis, where it is
/// real and >= 1 for causal passive media. perfect_conductor and
/// infinitely_permeable are limit markers: they have no pointwise response
/// and the energy channels dispatch to closed-form limit formulas instead.
class material_model {
 public:
  static material_model vacuum() { return material_model(material_kind::vacuum); }

  static material_model constant_index(double n_b) {
    if (!(n_b >= 1.0)) throw std::invalid_argument("constant_index: refractive index must be >= 1");
    material_model m(material_kind::constant_index);
    m.eps_ = n_b * n_b;  // realized as eps = n_b^2, mu = 1
    return m;
  }

  static material_model constant_eps_mu(double eps_r, double mu_r) {
    if (!(eps_r >= 1.0) || !(mu_r >= 1.0))
      throw std::invalid_argument("constant_eps_mu: relative eps and mu must be >= 1");
    material_model m(material_kind::constant_eps_mu);
    m.eps_ = eps_r;
    m.mu_ = mu_r;
    return m;
  }

  static material_model plasma(double omega_p) {
    if (!(omega_p > 0.0)) throw std::invalid_argument("plasma: omega_p must be > 0");
    material_model m(material_kind::plasma);
    m.omega_p_ = omega_p;
    return m;
  }

  /// samples: (xi [rad/s], eps_rel), strictly increasing in xi, eps_rel >= 1
  /// and non-increasing, at least two samples.
  static material_model tabulated(std::vector<std::pair<double, double>> samples) {
    validate_samples(samples, nullptr, nullptr);
    material_model m(material_kind::tabulated);
    m.log_xi_.reserve(samples.size());
    m.eps_samples_.reserve(samples.size());
    for (const auto& [xi, eps] : samples) {
      m.log_xi_.push_back(std::log(xi));
      m.eps_samples_.push_back(eps);
    }
    m.xi_last_ = samples.back().first;
    return m;
  }

  static material_model perfect_conductor() { return material_model(material_kind::perfect_conductor); }
  static material_model infinitely_permeable() { return material_model(material_kind::infinitely_permeable); }

  material_kind kind() const { return kind_; }

  bool is_limit_marker() const {
    return kind_ == material_kind::perfect_conductor || kind_ == material_kind::infinitely_permeable;
  }

  /// Relative permittivity at imaginary frequency i*xi.
  double eps(double xi) const {
    check_pointwise(xi);
    switch (kind_) {
      case material_kind::vacuum: return 1.0;
      case material_kind::constant_index:
      case material_kind::constant_eps_mu: return eps_;
      case material_kind::plasma: return 1.0 + omega_p_ * omega_p_ / (xi * xi);
      case material_kind::tabulated: return eps_tabulated(xi);
      default: return 1.0;  // unreachable
    }
  }

  /// Relative permeability at imaginary frequency i*xi. Only constant_eps_mu
  /// can be magnetic; tabulated data is non-magnetic by design.
  double mu(double xi) const {
    check_pointwise(xi);
    return kind_ == material_kind::constant_eps_mu ? mu_ : 1.0;
  }

  double omega_p() const { return omega_p_; }

  bool operator==(const material_model&) const = default;

 private:
  explicit material_model(material_kind k) : kind_(k) {}

  void check_pointwise(double xi) const {
    if (is_limit_marker()) throw std::logic_error("limit model has no pointwise response");
    if (xi < 0.0) throw std::domain_error("material response requires xi >= 0");
    if (kind_ == material_kind::plasma && xi == 0.0)
      throw std::domain_error("plasma response diverges at xi = 0");
  }

  double eps_tabulated(double xi) const {
    if (xi > xi_last_) {
      // tail behaves like a plasma: eps -> 1 + (eps_last - 1) (xi_last / xi)^2
      const double r = xi_last_ / xi;
      return 1.0 + (eps_samples_.back() - 1.0) * r * r;
    }
    const double lx = std::log(xi);
    if (lx <= log_xi_.front()) return eps_samples_.front();
    const auto it = std::upper_bound(log_xi_.begin(), log_xi_.end(), lx);
    const std::size_t hi = static_cast<std::size_t>(it - log_xi_.begin());
    const std::size_t lo = hi - 1;
    if (hi == log_xi_.size()) return eps_samples_.back();
    const double w = (lx - log_xi_[lo]) / (log_xi_[hi] - log_xi_[lo]);
    return eps_samples_[lo] + w * (eps_samples_[hi] - eps_samples_[lo]);
  }

  // line/path are used for parse diagnostics; null for programmatic input
  friend material_model load_tabulated(const std::filesystem::path&);
  static void validate_samples(const std::vector<std::pair<double, double>>& samples,
                               const std::string* path, const std::vector<std::size_t>* lines) {
    auto fail = [&](std::size_t i, const std::string& what) {
      std::string where = path != nullptr && lines != nullptr && i < lines->size()
                              ? *path + ":" + std::to_string((*lines)[i]) + ": "
                              : "tabulated sample " + std::to_string(i) + ": ";
      throw std::invalid_argument(where + what);
    };
    if (samples.size() < 2) {
      std::string where = path != nullptr ? *path + ": " : "tabulated: ";
      throw std::invalid_argument(where + "need at least 2 samples");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& [xi, eps] = samples[i];
      if (!(xi > 0.0) || !std::isfinite(xi)) fail(i, "xi must be finite and > 0");
      if (!(eps >= 1.0) || !std::isfinite(eps)) fail(i, "eps_rel must be finite and >= 1");
      if (i > 0 && !(xi > samples[i - 1].first)) fail(i, "xi samples must be strictly increasing");
      if (i > 0 && eps > samples[i - 1].second)
        fail(i, "eps_rel must be non-increasing in xi (response on the imaginary axis is monotone)");
    }
  }

  material_kind kind_;
  double eps_ = 1.0;
  double mu_ = 1.0;
  double omega_p_ = 0.0;
  std::vector<double> log_xi_;
  std::vector<double> eps_samples_;
  double xi_last_ = 0.0;
};

inline double eps_imag(const material_model& m, double xi) { return m.eps(xi); }
inline double mu_imag(const material_model& m, double xi) { return m.mu(xi); }

/// Reads a permittivity table from CSV with header "xi_rad_per_s,eps_rel".
/// Accepts LF or CRLF endings; parse errors carry the offending line number.
inline material_model load_tabulated(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw std::invalid_argument(name + ": cannot open file");

  auto strip_cr = [](std::string& s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
  };

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw std::invalid_argument(name + ": empty file");
  ++lineno;
  strip_cr(line);
  if (line != "xi_rad_per_s,eps_rel")
    throw std::invalid_argument(name + ":1: expected header \"xi_rad_per_s,eps_rel\", got \"" + line + "\"");

  std::vector<std::pair<double, double>> samples;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": expected \"xi,eps\" row");
    std::size_t used = 0;
    double xi = 0.0, eps = 0.0;
    try {
      xi = std::stod(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing junk");
      std::string rest = line.substr(comma + 1);
      eps = std::stod(rest, &used);
      if (used != rest.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": malformed row \"" + line + "\"");
    }
    samples.emplace_back(xi, eps);
    lines.push_back(lineno);
  }
  material_model::validate_samples(samples, &name, &lines);
  return material_model::tabulated(std::move(samples));
}

}  // namespace casimir
