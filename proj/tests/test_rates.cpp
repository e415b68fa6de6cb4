#include <doctest.h>

#include <cmath>
#include <vector>

#include "npiv/datagen.hpp"
#include "npiv/errors.hpp"
#include "npiv/rates.hpp"

using namespace npiv;

namespace {

std::vector<double> powers(double e, int J) {
  std::vector<double> v(J);
  for (int j = 1; j <= J; ++j) v[j - 1] = std::pow(double(j), e);
  return v;
}

// Brute-force minimizer of max(q, 1/x) / min(q, 1/x), scanning m ascending
// and keeping the first strict improvement.
std::pair<int, double> brute_m_star(const std::vector<double>& beta, const std::vector<double>& ups, double x) {
  int best = 1;
  long double best_v = INFINITY;
  for (std::size_t m = 1; m <= beta.size(); ++m) {
    const long double q = (long double)ups[m - 1] / beta[m - 1];
    const long double lo = std::min(q, 1.0L / x), hi = std::max(q, 1.0L / x);
    const long double v = lo > 0 ? hi / lo : INFINITY;
    if (v < best_v) {
      best_v = v;
      best = int(m);
    }
  }
  return {best, std::max(ups[best - 1] / beta[best - 1], 1.0 / x)};
}

}  // namespace

TEST_CASE("m_star examples") {
  const std::vector<double> one(100, 1.0);
  for (double x : {1.0, 7.0, 1e6}) {
    const auto r = m_star(one, one, x, 100);
    CHECK(r.m_star == 1);
    CHECK(r.a_star == 1.0);
  }
  const auto b = powers(4, 100), u = powers(-2, 100);
  const auto r = m_star(b, u, 1e4, 100);
  CHECK(r.m_star == 5);
  CHECK(r.a_star == doctest::Approx(1e-4));
  CHECK(m_star(b, u, 1.0, 100).m_star == 1);
}

TEST_CASE("m_star matches brute force and is monotone in x") {
  const auto b = powers(4, 512), u = powers(-2, 512);
  int prev = 1;
  for (double x = 1.0; x < 1e8; x *= 1.7) {
    const auto r = m_star(b, u, x, 512);
    const auto [bm, ba] = brute_m_star(b, u, x);
    CHECK(r.m_star == bm);
    CHECK(r.a_star == doctest::Approx(ba).epsilon(1e-14));
    CHECK(r.m_star >= prev);
    CHECK(x * r.a_star >= 1.0 - 1e-12);
    const double q = u[r.m_star - 1] / b[r.m_star - 1];
    if (q <= 1.0 / x) CHECK(x * r.a_star == doctest::Approx(1.0));
    prev = r.m_star;
  }
}

TEST_CASE("m_star validates weights") {
  auto b = powers(4, 10), u = powers(-2, 10);
  CHECK_THROWS_AS(m_star(b, u, 0.5, 10), ConfigError);
  CHECK_THROWS_AS(m_star(b, u, 10.0, 11), ConfigError);
  auto bad = b;
  bad[3] = 1.0;
  CHECK_THROWS_AS(m_star(bad, u, 10.0, 10), ConfigError);
  auto badu = u;
  badu[4] = 2.0;
  CHECK_THROWS_AS(m_star(b, badu, 10.0, 10), ConfigError);
  badu = u;
  badu[0] = 0.5;
  CHECK_THROWS_AS(m_star(b, badu, 10.0, 10), ConfigError);
}

TEST_CASE("rate_fixed examples") {
  const std::vector<double> one(50, 1.0);
  auto e1 = representer_coeffs(Custom{{1.0}, std::nullopt}, 50);
  // Identity weights: m* = 1 and a* = max(1, 1/x) = 1.
  CHECK(rate_fixed(e1, one, one, 100.0, 50) == 1.0);
  // With upsilon_1/beta_1 = 1 pinned, a* = 1/x needs a decaying ratio past m = 1.
  std::vector<double> u2(50, 0.01);
  u2[0] = 1.0;
  CHECK(rate_fixed(e1, one, u2, 100.0, 50) == doctest::Approx(0.01));

  const auto b = powers(4, 100), u = powers(-2, 100);
  // Coefficients vanish beyond m* = 5, so the tail term is zero.
  auto h = representer_coeffs(Custom{{1.0, -1.0, 0.5, 2.0, 1.0}, std::nullopt}, 100);
  double head = 0.0;
  for (int j = 1; j <= 5; ++j) head += h.coeffs[j - 1] * h.coeffs[j - 1] * j * j;
  CHECK(rate_fixed(h, b, u, 1e4, 100) == doctest::Approx(1e-4 * head));
}

TEST_CASE("rate_fixed for point evaluation against long summation") {
  const int J = 4096;
  const auto h = representer_coeffs(PointEval{0.3}, J);
  const auto b = powers(4, J), u = powers(-2, J);
  const auto [ms, as] = brute_m_star(b, u, 1e4);
  long double head = 0, tail = 0;
  for (int j = 1; j <= J; ++j) {
    const long double h2 = (long double)h.coeffs[j - 1] * h.coeffs[j - 1];
    if (j <= ms) head += h2 * j * j;
    else tail += h2 / std::pow((long double)j, 4.0L);
  }
  const double ref = double(std::max(as * head, tail));
  const auto h512 = representer_coeffs(PointEval{0.3}, 512);
  const double at512 = rate_fixed(h512, powers(4, 512), powers(-2, 512), 1e4, 512);
  CHECK(at512 == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("rate_class examples") {
  const std::vector<double> one(50, 1.0);
  CHECK(rate_class(one, one, one, 100.0) == 1.0);
  const auto b = powers(4, 100), u = powers(-2, 100);
  CHECK(rate_class(powers(2, 100), b, u, 1e4) == doctest::Approx(1e-4));
  // omega_j = 1/j gives 1/(omega upsilon) = j^3, maximal at m* = 5.
  CHECK(rate_class(powers(-1, 100), b, u, 1e4) == doctest::Approx(1e-4 * 125.0));
}

TEST_CASE("kappa by direct evaluation") {
  const std::vector<double> one(20, 1.0);
  const double grid[] = {10.0, 100.0, 1000.0};
  // a* = 1 and min(1, 1/n) = 1/n, so the infimum sits at the largest n.
  CHECK(kappa_check(one, one, grid).kappa == doctest::Approx(1e-3));

  const auto b = powers(4, 512), u = powers(-2, 512);
  const double g2[] = {1e2, 1e3, 1e4, 1e5, 1e6};
  double ref = 1.0;
  for (double n : g2) {
    const auto [ms, as] = brute_m_star(b, u, n);
    ref = std::min(ref, std::min(u[ms - 1] / b[ms - 1], 1.0 / n) / as);
  }
  const auto k = kappa_check(b, u, g2);
  CHECK(k.kappa == doctest::Approx(ref));
  CHECK(k.kappa > 0.0);
  CHECK(k.kappa <= 1.0);

  const double single[] = {1e4};
  const auto [ms, as] = brute_m_star(b, u, 1e4);
  const double q = u[ms - 1] / b[ms - 1];
  CHECK(kappa_check(b, u, single).kappa == doctest::Approx(std::min(q, 1e-4) / std::max(q, 1e-4)));
}

TEST_CASE("regime exponents") {
  auto r = regime_exponent(Regime::PP, 2, 1, 0, false);
  CHECK(r.poly_exponent == doctest::Approx(-0.5));
  CHECK(r.log_exponent == 0.0);
  CHECK(r.branch == RateBranch::Polynomial);

  r = regime_exponent(Regime::PP, 2, 1, 1, false);
  CHECK(r.poly_exponent == doctest::Approx(-5.0 / 6.0));

  r = regime_exponent(Regime::PP, 2, 0.3, 1, false);
  CHECK(r.poly_exponent == -1.0);
  CHECK(r.branch == RateBranch::Parametric);

  r = regime_exponent(Regime::PP, 2, 0.5, 1, false);
  CHECK(r.branch == RateBranch::Boundary);
  CHECK(r.log_exponent == 1.0);

  r = regime_exponent(Regime::PP, 2, 1, 0, true);
  CHECK(r.poly_exponent == doctest::Approx(-0.5));
  CHECK(r.log_exponent == doctest::Approx(0.5));

  r = regime_exponent(Regime::PE, 2, 1, 0, false);
  CHECK(r.poly_exponent == 0.0);
  CHECK(r.log_exponent == doctest::Approx(-1.5));
  CHECK(r.branch == RateBranch::Logarithmic);

  r = regime_exponent(Regime::EP, 1, 1, 0, false);
  CHECK(r.poly_exponent == -1.0);
  CHECK(r.log_exponent == doctest::Approx(1.5));
  r = regime_exponent(Regime::EP, 1, 0.3, 1, false);
  CHECK(r.branch == RateBranch::Parametric);
  r = regime_exponent(Regime::EP, 1, 0.3, 1, true);
  CHECK(r.log_exponent == 1.0);
  r = regime_exponent(Regime::EP, 1, 0.5, 1, false);
  CHECK(r.branch == RateBranch::Boundary);
  CHECK(r.loglog_exponent == 1.0);
}

TEST_CASE("regime exponent ranges") {
  CHECK_THROWS_AS(regime_exponent(Regime::PP, 1.4, 1, 0, false), DomainError);
  CHECK_THROWS_AS(regime_exponent(Regime::PP, 2, 0, 0, false), DomainError);
  CHECK_THROWS_AS(regime_exponent(Regime::PP, 2, 1, -2, false), DomainError);
  CHECK_THROWS_AS(regime_exponent(Regime::EP, 0, 1, 0, false), DomainError);
  // adaptive pp needs 3 < 2p + 2 min(s, 0)
  CHECK_THROWS_AS(regime_exponent(Regime::PP, 1.6, 1, -0.2, true), DomainError);
  CHECK_NOTHROW(regime_exponent(Regime::PP, 1.6, 1, -0.2, false));
}

TEST_CASE("rate order evaluation and description") {
  auto r = regime_exponent(Regime::PP, 2, 1, 0, true);
  const double n = 1e4;
  CHECK(r.evaluate(n) == doctest::Approx(std::pow(n, -0.5) * std::pow(1 + std::log(n), 0.5)));
  CHECK(r.describe().find("adaptive") != std::string::npos);
}

TEST_CASE("numeric rate approaches the closed form") {
  const int J = 512;
  const auto b = powers(4, J), u = powers(-2, J);
  const auto h = representer_coeffs(PointEval{0.3}, J);
  const double e = regime_exponent(Regime::PP, 2, 1, 0, false).poly_exponent;
  const double r = rate_fixed(h, b, u, 1e6, J);
  CHECK(std::abs(std::log(r) / std::log(1e6) - e) <= 0.1);
}

TEST_CASE("effective sample size") {
  CHECK(effective_sample_size(100.0, false) == 100.0);
  CHECK(effective_sample_size(100.0, true) == doctest::Approx(100.0 / (1 + std::log(100.0))));
}
