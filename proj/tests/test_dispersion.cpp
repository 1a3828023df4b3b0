#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "relwave/dispersion.hpp"

using namespace relwave;

TEST_CASE("branch frequencies") {
  const auto p = natural_units();
  CHECK(omega_branch(0.0, Branch::plus, p) == 0.0);
  CHECK(omega_branch(0.0, Branch::minus, p) == 2.0);
  CHECK(omega_branch(1.0, Branch::plus, p) == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-15));
  CHECK(omega_branch(-1.0, Branch::plus, p) == omega_branch(1.0, Branch::plus, p));
  CHECK(omega_branch(-3.0, Branch::minus, p) == omega_branch(3.0, Branch::minus, p));

  const auto q = make_params(2.0, 3.0, 0.5);
  const double k = 1.7;
  CHECK(omega_branch(k, Branch::plus, q) ==
        doctest::Approx(q.c() * (std::sqrt(q.mu() * q.mu() + k * k) - q.mu())).epsilon(1e-14));
}

TEST_CASE("small-k plus branch keeps full relative precision") {
  const auto p = natural_units();
  const double k = 1e-9;
  CHECK(omega_branch(k, Branch::plus, p) == doctest::Approx(k * k / 2).epsilon(1e-15));
}

TEST_CASE("branch identities over random wavenumbers") {
  const auto p = make_params(1.3, 0.8, 1.1);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 40);
  for (int i = 0; i < 200; ++i) {
    const double k = u(gen);
    const double wp = omega_branch(k, Branch::plus, p);
    const double wm = omega_branch(k, Branch::minus, p);
    CHECK(wp >= 0);
    CHECK(wm >= 2 * p.mu() * p.c());
    CHECK(std::abs(wp * wm - p.c() * p.c() * k * k) <= 1e-13 * p.c() * p.c() * k * k);
    CHECK(std::abs(group_velocity(k, p)) < p.c());
  }
}

TEST_CASE("group velocity") {
  const auto p = natural_units();
  CHECK(group_velocity(0.0, p) == 0.0);
  CHECK(group_velocity(1.0, p) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
  const double h = 1e-5;
  const double fd = (omega_branch(1 + h, Branch::plus, p) - omega_branch(1 - h, Branch::plus, p)) / (2 * h);
  CHECK(std::abs(fd - group_velocity(1.0, p)) < 1e-8);
  const double fdm = (omega_branch(1 + h, Branch::minus, p) - omega_branch(1 - h, Branch::minus, p)) / (2 * h);
  CHECK(std::abs(fdm - group_velocity(1.0, p)) < 1e-8);
  CHECK(group_velocity(100.0, p) == doctest::Approx(0.99995).epsilon(1e-5));
  CHECK(group_velocity(100.0, p) < 1.0);
}

TEST_CASE("series coefficients are exact") {
  CHECK(series_coeff(1) == DyadicRational{1, 1});
  CHECK(series_coeff(2) == DyadicRational{1, 3});
  CHECK(series_coeff(3) == DyadicRational{1, 4});
  CHECK(series_coeff(4) == DyadicRational{5, 7});
  CHECK(series_coeff(5) == DyadicRational{7, 8});
  CHECK(series_coeff_value<double>(4) == 0.0390625);
  CHECK_THROWS_AS(series_coeff(0), DomainError);
  CHECK_THROWS_AS(series_coeff(-2), DomainError);
  CHECK_THROWS_AS(series_coeff(65), DomainError);

  // Against the long-division oracle: a_n = -(-1)^n s_n.
  const auto s = oracle::sqrt_series(40);
  for (int n = 1; n <= 40; ++n) {
    const double expected = (n % 2 == 0 ? 1.0 : -1.0) * -s[static_cast<std::size_t>(n)];
    CHECK(series_coeff_value<double>(n) == doctest::Approx(expected).epsilon(1e-14));
  }

  // Every numerator is odd (fully reduced) and the double-factorial form holds.
  for (int n = 2; n <= SeriesCoefficients::kMaxOrder; ++n) {
    const auto a = series_coeff(n);
    CHECK((a.numerator & 1U) == 1U);
    const long double ratio = series_coeff_value<long double>(n) / series_coeff_value<long double>(n - 1);
    const long double expected = n == 2 ? 0.25L : static_cast<long double>(2 * n - 3) / (2 * n);
    CHECK(static_cast<double>(ratio) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-15));
  }
}

TEST_CASE("series partial sums") {
  CHECK(series_partial_sum(0.25, 30) == doctest::Approx(1 - std::sqrt(1.25)).epsilon(1e-13));
  CHECK(std::abs(series_partial_sum(0.25, 30) - (1 - std::sqrt(1.25))) < 1e-13);
  CHECK_THROWS_AS(series_partial_sum(0.1, 0), DomainError);
}

TEST_CASE("truncated symbol") {
  const auto p = natural_units();
  CHECK(truncated_symbol(0.0, 5, p) == 0.0);
  CHECK(truncated_symbol(0.25, 1, p) == doctest::Approx(0.125));
  CHECK(std::abs(truncated_symbol(0.25, 12, p) - (std::sqrt(1.25) - 1)) < 1e-9);

  const auto q = make_params(2.0, 3.0, 0.5);
  CHECK(truncated_symbol(0.49, 1, q) == doctest::Approx(q.c() * 0.49 / (2 * q.mu())).epsilon(1e-15));
}

TEST_CASE("dispersion table") {
  const auto rows = dispersion_table(3.0, 7, natural_units());
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].k == 0.0);
  CHECK(rows[0].omega_plus == 0.0);
  CHECK(rows[0].omega_minus == 2.0);
  CHECK(rows[6].k == 3.0);
  for (const auto& r : rows) {
    CHECK(r.v_group < 1.0);
    CHECK(r.omega_plus * r.omega_minus == doctest::Approx(r.k * r.k).epsilon(1e-12));
  }
  CHECK(dispersion_table(3.0, 1, natural_units()).size() == 1);
  CHECK_THROWS_AS(dispersion_table(3.0, 0, natural_units()), DomainError);
  CHECK_THROWS_AS(dispersion_table(-1.0, 3, natural_units()), DomainError);
}
