#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>

#include "casimir/material.hpp"

using namespace casimir;
using Catch::Approx;

TEST_CASE("vacuum and constant responses") {
  CHECK(eps_imag(material_model::vacuum(), 1e15) == 1.0);
  CHECK(mu_imag(material_model::vacuum(), 1e15) == 1.0);

  // n_b = 2 realizes eps = 4, mu = 1
  const auto idx = material_model::constant_index(2.0);
  CHECK(eps_imag(idx, 3.7e14) == Approx(4.0));
  CHECK(mu_imag(idx, 3.7e14) == 1.0);

  const auto em = material_model::constant_eps_mu(1.0, 3.0);
  CHECK(mu_imag(em, 1e12) == Approx(3.0));
  CHECK(eps_imag(em, 1e12) == Approx(1.0));
}

TEST_CASE("plasma response") {
  const double wp = 1.3e16;
  const auto m = material_model::plasma(wp);
  CHECK(eps_imag(m, wp) == Approx(2.0));
  CHECK(mu_imag(m, wp) == 1.0);

  SECTION("monotone non-increasing in xi") {
    double prev = eps_imag(m, 1e12);
    for (double xi = 1e13; xi < 1e19; xi *= 3.7) {
      const double cur = eps_imag(m, xi);
      CHECK(cur <= prev);
      CHECK(cur >= 1.0);
      prev = cur;
    }
  }
  SECTION("xi = 0 is out of domain") {
    CHECK_THROWS_AS(eps_imag(m, 0.0), std::domain_error);
  }
}

TEST_CASE("limit markers have no pointwise response") {
  for (auto m : {material_model::perfect_conductor(), material_model::infinitely_permeable()}) {
    CHECK(m.is_limit_marker());
    CHECK_THROWS_WITH(eps_imag(m, 1e15), Catch::Matchers::ContainsSubstring("no pointwise response"));
    CHECK_THROWS_AS(mu_imag(m, 1e15), std::logic_error);
  }
}

TEST_CASE("negative xi rejected") {
  CHECK_THROWS_AS(eps_imag(material_model::vacuum(), -1.0), std::domain_error);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(material_model::constant_index(0.5), std::invalid_argument);
  CHECK_THROWS_AS(material_model::constant_eps_mu(0.9, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(material_model::constant_eps_mu(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(material_model::plasma(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(material_model::tabulated({{1e14, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(material_model::tabulated({{1e14, 2.0}, {1e13, 1.5}}), std::invalid_argument);
  CHECK_THROWS_AS(material_model::tabulated({{1e14, 0.5}, {1e15, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(material_model::tabulated({{1e14, 1.5}, {1e15, 2.0}}), std::invalid_argument);
}

namespace {

std::filesystem::path write_temp_csv(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("tabulated file ingestion") {
  const auto path = write_temp_csv("mat_ok.csv", "xi_rad_per_s,eps_rel\n1e14,10\n1e16,1.5\n");
  const auto m = load_tabulated(path);

  SECTION("sample abscissae reproduce sample values exactly") {
    CHECK(eps_imag(m, 1e14) == 10.0);
    CHECK(eps_imag(m, 1e16) == 1.5);
  }
  SECTION("interpolation stays inside the sample range") {
    const double mid = eps_imag(m, 1e15);
    CHECK(mid > 1.5);
    CHECK(mid < 10.0);
    // linear in log xi: midpoint of the log interval
    CHECK(mid == Approx(0.5 * (10.0 + 1.5)));
  }
  SECTION("beyond the last sample decays like a plasma tail") {
    CHECK(eps_imag(m, 2e16) == Approx(1.0 + 0.5 * 0.25));
  }
  SECTION("below the first sample clamps") {
    CHECK(eps_imag(m, 1e12) == 10.0);
  }
  SECTION("non-magnetic by design") {
    CHECK(mu_imag(m, 1e15) == 1.0);
  }
  SECTION("monotone non-increasing across the whole domain") {
    double prev = eps_imag(m, 1e10);
    for (double xi = 1e11; xi < 1e19; xi *= 2.1) {
      const double cur = eps_imag(m, xi);
      CHECK(cur <= prev + 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("tabulated file ingestion accepts CRLF") {
  const auto path = write_temp_csv("mat_crlf.csv", "xi_rad_per_s,eps_rel\r\n1e14,10\r\n1e16,1.5\r\n");
  const auto m = load_tabulated(path);
  CHECK(eps_imag(m, 1e14) == 10.0);
}

TEST_CASE("tabulated file parse errors carry line numbers") {
  using Catch::Matchers::ContainsSubstring;
  const auto bad_header = write_temp_csv("mat_h.csv", "xi,eps\n1e14,10\n");
  CHECK_THROWS_WITH(load_tabulated(bad_header), ContainsSubstring(":1:"));

  const auto bad_row = write_temp_csv("mat_r.csv", "xi_rad_per_s,eps_rel\n1e14,10\nnot-a-number,2\n");
  CHECK_THROWS_WITH(load_tabulated(bad_row), ContainsSubstring(":3:"));

  const auto bad_order = write_temp_csv("mat_o.csv", "xi_rad_per_s,eps_rel\n1e16,10\n1e14,12\n");
  CHECK_THROWS_WITH(load_tabulated(bad_order), ContainsSubstring("strictly increasing"));

  const auto bad_eps = write_temp_csv("mat_e.csv", "xi_rad_per_s,eps_rel\n1e14,10\n1e16,0.5\n");
  CHECK_THROWS_WITH(load_tabulated(bad_eps), ContainsSubstring(">= 1"));

  CHECK_THROWS_WITH(load_tabulated("/nonexistent/file.csv"), ContainsSubstring("cannot open"));
}
