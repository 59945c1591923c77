#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qlev/scaling.hpp"

using namespace qlev::scaling;

TEST_CASE("Q matches its closed form and is minimized at gamma = 2") {
  CHECK(Q_of_gamma(2.0) == doctest::Approx(2.0));
  CHECK(Q_of_gamma(std::sqrt(8.0 / 3.0)) ==
        doctest::Approx(2.0 / std::sqrt(8.0 / 3.0) + std::sqrt(8.0 / 3.0) / 2.0));
  for (double g : {0.3, 0.7, 1.1, 1.9, 2.5})
    CHECK(Q_of_gamma(g) >= 2.0);
  CHECK_THROWS_AS(Q_of_gamma(0.0), std::invalid_argument);
}

TEST_CASE("linear relation solves for each unknown consistently") {
  double gamma = 1.3, alpha = -0.7, beta = 0.49;
  double eta = relation_solve(gamma, alpha, beta, std::nullopt);
  CHECK(relation_solve(gamma, alpha, std::nullopt, eta) == doctest::Approx(beta));
  CHECK(relation_solve(gamma, std::nullopt, beta, eta) == doctest::Approx(alpha));
  // alpha*Q = beta - eta - 1 holds
  CHECK(alpha * Q_of_gamma(gamma) == doctest::Approx(beta - eta - 1.0));
  CHECK_THROWS_AS(relation_solve(gamma, alpha, beta, eta), std::invalid_argument);
  CHECK_THROWS_AS(relation_solve(gamma, std::nullopt, std::nullopt, eta),
                  std::invalid_argument);
  CHECK_THROWS_AS(relation_solve(gamma, 0.0, std::nullopt, 0.5), std::invalid_argument);
}

TEST_CASE("eta curves at pinned points") {
  auto c2 = eta_curves(2.0);
  CHECK(c2.upper == doctest::Approx(1.0));
  CHECK(c2.middle == doctest::Approx(-0.125));
  auto c4 = eta_curves(4.0);
  CHECK(c4.upper == doctest::Approx(c4.middle));  // the curves meet at gamma^2 = 4
  auto c83 = eta_curves(8.0 / 3.0);
  CHECK(c83.upper == doctest::Approx(9.0 / 8.0 - 0.5));
  CHECK(c83.middle == doctest::Approx(0.5 - 0.5));
  CHECK_THROWS_AS(eta_curves(0.0), std::invalid_argument);
  CHECK_THROWS_AS(eta_curves(4.5), std::invalid_argument);
}

TEST_CASE("dimension formula at special kappa") {
  CHECK(watabiki_d(0.0) == doctest::Approx(2.0));
  // kappa = 8/3: 1 + 2/3 + sqrt((20/3)^2 + 128/3)/4 = 1 + 2/3 + 7/3 = 4
  CHECK(watabiki_d(8.0 / 3.0) == doctest::Approx(4.0));
  for (double k : {0.5, 2.0, 6.0, 8.0})
    CHECK(watabiki_d(k + 0.1) > watabiki_d(k));  // increasing in kappa
}

TEST_CASE("records satisfy the relation on both curves") {
  for (double gsq : {0.5, 1.0, 2.0, 8.0 / 3.0, 3.0, 4.0}) {
    for (const char* curve : {"upper", "middle"}) {
      auto r = make_record(gsq, curve);
      CHECK(r.alpha * r.Q == doctest::Approx(r.beta - r.eta - 1.0));
      auto c = eta_curves(gsq);
      double expect = (std::string(curve) == "upper") ? c.upper : c.middle;
      CHECK(r.eta == doctest::Approx(expect));
      CHECK(r.beta == doctest::Approx(r.alpha * r.alpha));
      CHECK(r.d == doctest::Approx(watabiki_d(r.kappa)));
      if (gsq < 4.0) {
        CHECK(r.delta_bar == doctest::Approx(holder_exponent(r.gamma, {}, {})));
        CHECK(r.delta_bar > 0.0);
        CHECK(r.delta_bar < 1.0);
      } else {
        CHECK(r.delta_bar == 0.0);  // Q = 2 boundary case
      }
    }
  }
  auto t = make_record(1.0, "trivial");
  CHECK(t.eta == doctest::Approx(-1.0));
  CHECK(t.alpha == 0.0);
  CHECK(t.d == doctest::Approx(2.0));
  CHECK_THROWS_AS(make_record(1.0, "nonsense"), std::invalid_argument);
}

TEST_CASE("Holder exponent bound") {
  double gamma = 1.0;
  double Q = Q_of_gamma(gamma);
  double base = holder_exponent(gamma, {}, {});
  CHECK(base == doctest::Approx((Q - 2.0) / (Q + 2.0 * std::sqrt(2.0))));
  CHECK(holder_exponent(std::sqrt(2.0), {}, {}) == doctest::Approx(0.024513).epsilon(1e-4));
  // strong interior singularity only lowers the bound via beta_lower
  double withint = holder_exponent(gamma, {}, {3.5});
  CHECK(withint == doctest::Approx((Q - 2.0) / (Q + 3.5)));
  CHECK(withint < base);
  // negative boundary strength raises beta_upper
  double withneg = holder_exponent(gamma, {-2.2}, {});
  CHECK(withneg == doctest::Approx((Q - 2.2) / (Q + 2.0 * std::sqrt(2.0))));
  CHECK_THROWS_AS(holder_exponent(gamma, {-Q - 0.1}, {}), std::domain_error);
}
