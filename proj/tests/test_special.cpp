#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mgcp/special.hpp"

using mgcp::LogTerm;
using mgcp::SeriesControl;
using mgcp::sum_series;

namespace {

// Relative error with a floor of 1 on the reference scale, so the zeros of
// ln Gamma (x = 1, 2) do not blow the quotient up.
double rel_err(double got, double ref) {
  return std::fabs(got - ref) / std::max(1.0, std::fabs(ref));
}

}  // namespace

TEST_CASE("log_gamma at the unit arguments") {
  CHECK(std::fabs(mgcp::log_gamma(1.0)) < 1e-15);
  CHECK(std::fabs(mgcp::log_gamma(2.0)) < 1e-15);
}

TEST_CASE("log_gamma(5.5) against the recursion oracle from Gamma(1/2)") {
  // Gamma(5.5) = 4.5 * 3.5 * 2.5 * 1.5 * 0.5 * sqrt(pi), assembled here
  // without any call into the unit under test.
  const double oracle =
      std::log(4.5 * 3.5 * 2.5 * 1.5 * 0.5) + 0.5 * std::log(std::numbers::pi);
  CHECK(rel_err(mgcp::log_gamma(5.5), oracle) < 1e-14);
  // Same value to 20 digits from an independent extended-precision run.
  CHECK(rel_err(mgcp::log_gamma(5.5), 3.9578139676187162939) < 1e-14);
}

TEST_CASE("log_gamma frozen spot values") {
  // 20-digit references computed with extended-precision arithmetic.
  CHECK(rel_err(mgcp::log_gamma(0.07), 2.6227537606032154926) < 1e-14);
  CHECK(rel_err(mgcp::log_gamma(3.25), 0.93580193110872535826) < 1e-14);
  CHECK(rel_err(mgcp::log_gamma(10.3), 13.482036786138356971) < 1e-14);
  CHECK(rel_err(mgcp::log_gamma(123.456), 469.60554712992946873) < 1e-14);
  CHECK(rel_err(mgcp::log_gamma(1e-3), 6.9071788853838536825) < 1e-14);
}

TEST_CASE("log_gamma tracks the platform lgamma over a wide grid") {
  // glibc's lgamma is a fully independent implementation, good to a few ulp.
  for (double x : {1e-6, 1e-3, 0.04, 0.2, 0.49, 0.5, 0.51, 0.9, 1.0, 1.3,
                   1.46, 2.0, 2.7, 3.9, 7.5, 15.0, 33.3, 120.0, 1.5e3, 4.7e4,
                   9.9e5}) {
    INFO("x = " << x);
    CHECK(rel_err(mgcp::log_gamma(x), std::lgamma(x)) < 1e-14);
  }
}

TEST_CASE("log_gamma rejects the nonpositive half-line") {
  CHECK_THROWS_AS(mgcp::log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(mgcp::log_gamma(-3.2), std::domain_error);
  CHECK_THROWS_AS(mgcp::log_gamma(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
}

TEST_CASE("log_pochhammer basics") {
  CHECK(mgcp::log_pochhammer(3.0, 0) == 0.0);
  CHECK(rel_err(mgcp::log_pochhammer(1.0, 4), std::log(24.0)) < 1e-14);
  // (0.5)_3 = 0.5 * 1.5 * 2.5, direct product oracle plus frozen reference.
  CHECK(rel_err(mgcp::log_pochhammer(0.5, 3), std::log(0.5 * 1.5 * 2.5)) <
        1e-14);
  CHECK(rel_err(mgcp::log_pochhammer(0.5, 3), 0.62860865942237413774) < 1e-14);
  CHECK(rel_err(mgcp::log_pochhammer(0.3, 7), 6.0520945282041735111) < 1e-14);
  CHECK(rel_err(mgcp::log_pochhammer(1.7, 40), 113.01339110034495728) < 1e-14);
}

TEST_CASE("log_pochhammer recurrence (x)_{k+1} = (x)_k (x+k)") {
  for (double x : {0.03, 0.5, 1.0, 2.75, 17.2, 301.0}) {
    for (long long k : {0LL, 1LL, 2LL, 5LL, 15LL, 16LL, 17LL, 40LL, 200LL}) {
      const double ratio = std::exp(mgcp::log_pochhammer(x, k + 1) -
                                    mgcp::log_pochhammer(x, k));
      INFO("x = " << x << " k = " << k);
      CHECK(std::fabs(ratio - (x + k)) <= 1e-12 * (x + k));
    }
  }
}

TEST_CASE("log_real_binomial") {
  CHECK(rel_err(mgcp::log_real_binomial(4.0, 2), std::log(6.0)) < 1e-14);
  // C(n + lambda t - 1, n) at lambda t = 1, n = 3: C(3,3) = 1.
  CHECK(std::fabs(mgcp::log_real_binomial(3.0, 3)) < 1e-14);
  CHECK(rel_err(mgcp::log_real_binomial(2.5, 2), std::log(2.5 * 1.5 / 2.0)) <
        1e-14);
  CHECK(rel_err(mgcp::log_real_binomial(7.5, 3), 3.799693820454226417) <
        1e-14);
  // top - k + 1 <= 0 leaves the positive Gamma domain.
  CHECK_THROWS_AS(mgcp::log_real_binomial(2.0, 4), std::domain_error);
  CHECK_THROWS_AS(mgcp::log_real_binomial(-1.5, 1), std::domain_error);
}

TEST_CASE("hyp3f2_terminating hand-checkable sums") {
  // A zero upper parameter terminates at the constant term.
  CHECK(mgcp::hyp3f2_terminating(1, 0, 0, 2, 2) == 1.0);
  // 1 + (1)(-1)(-1) / ((2)(2)(1)) = 1.25.
  CHECK(rel_err(mgcp::hyp3f2_terminating(1, -1, -1, 2, 2), 1.25) < 1e-14);
  // Threshold-law parameters k=0, N=2, K=1, n=1 give upper zeros again.
  CHECK(mgcp::hyp3f2_terminating(1, 0, 0, 2, 2) == 1.0);
  // Frozen extended-precision references: 13/6 and 569/35.
  CHECK(rel_err(mgcp::hyp3f2_terminating(1, -2, -3, 3, 2),
                2.1666666666666666667) < 1e-14);
  CHECK(rel_err(mgcp::hyp3f2_terminating(1, -5, -9, 4, 3),
                16.257142857142857143) < 1e-14);
}

TEST_CASE("hyp3f2_terminating matches exact rational summation") {
  using Rational = boost::multiprecision::cpp_rational;
  // Exact term-by-term sum in rational arithmetic; independent of the
  // double-precision recurrence inside the implementation.
  auto rational_3f2 = [](long long a1, long long a2, long long a3,
                         long long b1, long long b2) {
    Rational sum = 1, term = 1;
    for (long long m = 0;; ++m) {
      term *= Rational(a1 + m) * Rational(a2 + m) * Rational(a3 + m);
      term /= Rational(b1 + m) * Rational(b2 + m) * Rational(m + 1);
      if (term == 0) break;
      sum += term;
    }
    return sum.convert_to<double>();
  };
  for (long long a2 = -25; a2 <= -1; a2 += 3) {
    for (long long a3 : {-1LL, -4LL, -11LL, -19LL}) {
      for (long long b1 : {2LL, 5LL, 13LL}) {
        const double exact = rational_3f2(1, a2, a3, b1, 3);
        const double got = mgcp::hyp3f2_terminating(
            1.0, static_cast<double>(a2), static_cast<double>(a3),
            static_cast<double>(b1), 3.0);
        INFO("a2 = " << a2 << " a3 = " << a3 << " b1 = " << b1);
        CHECK(std::fabs(got - exact) <= 1e-13 * std::max(1.0, std::fabs(exact)));
      }
    }
  }
}

TEST_CASE("hyp3f2_terminating rejects bad parameter sets") {
  // No nonpositive-integer upper parameter: the unit-argument series is not
  // assumed convergent here.
  CHECK_THROWS_AS(mgcp::hyp3f2_terminating(1, 2, 3, 4, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(mgcp::hyp3f2_terminating(0.5, 1.5, 2.5, 4, 5),
                  std::invalid_argument);
  // b1 = -3 reaches zero at m = 4, before the a-side termination at m = 5.
  CHECK_THROWS_AS(mgcp::hyp3f2_terminating(1, -5, -9, -3, 3),
                  std::domain_error);
}

TEST_CASE("sum_series on geometric terms") {
  SeriesControl ctl;
  auto geometric = [](double r) {
    return [r](std::size_t h) {
      return LogTerm{static_cast<double>(h) * std::log(r), +1};
    };
  };
  const auto res = sum_series(geometric(0.5), ctl);
  CHECK(std::fabs(res.value - 2.0) < 2.0 * ctl.rel_tol * 10);
  CHECK(res.terms_used > 10);

  // Tail bound upper-bounds the true truncation error for all tested ratios.
  for (double r : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
    const auto partial = sum_series(geometric(r), ctl);
    const double truth = 1.0 / (1.0 - r);
    INFO("ratio " << r);
    CHECK(std::fabs(partial.value - truth) <= partial.tail_bound +
                                                  1e-15 * truth);
    CHECK(partial.tail_bound < 1e-9);
  }
}

TEST_CASE("sum_series reproduces the negative-binomial normalizer") {
  // Sum_h theta^h (lt)_h / h! = (1-theta)^{-lt}; theta = 0.5, lt = 1 gives 2.
  const double theta = 0.5, lt = 1.0;
  auto term = [&](std::size_t h) {
    const double k = static_cast<double>(h);
    return LogTerm{k * std::log(theta) + mgcp::log_pochhammer(lt, h) -
                       mgcp::log_gamma(k + 1.0),
                   +1};
  };
  const auto res = sum_series(term, SeriesControl{});
  CHECK(std::fabs(res.value - 2.0) < 1e-11);
}

TEST_CASE("sum_series stops immediately on an exactly-zero term") {
  auto zero = [](std::size_t) { return LogTerm{0.0, 0}; };
  const auto res = sum_series(zero, SeriesControl{});
  CHECK(res.value == 0.0);
  CHECK(res.terms_used == 1);
  CHECK(res.tail_bound == 0.0);
}

TEST_CASE("sum_series needs decreasing_run consecutive small terms") {
  // Two sub-tolerance terms followed by a fat geometric tail: with
  // decreasing_run = 3 the engine must keep going and pick up the tail.
  auto tricky = [](std::size_t h) {
    if (h == 0) return LogTerm{0.0, +1};  // 1.0
    if (h <= 2) return LogTerm{std::log(1e-15), +1};
    return LogTerm{static_cast<double>(h) * std::log(0.8), +1};
  };
  SeriesControl ctl;
  ctl.decreasing_run = 3;
  const auto full = sum_series(tricky, ctl);
  const double tail = std::pow(0.8, 3) / (1.0 - 0.8);
  CHECK(std::fabs(full.value - (1.0 + 2e-15 + tail)) < 1e-10);

  ctl.decreasing_run = 2;
  const auto early = sum_series(tricky, ctl);
  CHECK(early.terms_used == 3);
  CHECK(std::fabs(early.value - 1.0) < 1e-12);
}

TEST_CASE("sum_series reports non-convergence with its partial sum") {
  SeriesControl ctl;
  ctl.max_terms = 50;
  auto slow = [](std::size_t h) {
    return LogTerm{static_cast<double>(h) * std::log(0.999999), +1};
  };
  try {
    sum_series(slow, ctl);
    FAIL("expected SeriesNonConvergence");
  } catch (const mgcp::SeriesNonConvergence& e) {
    CHECK(e.terms_used == 50);
    CHECK(e.partial_sum > 49.0);  // ~50 near-unit terms
    CHECK(e.partial_sum < 51.0);
  }
}

TEST_CASE("compensated accumulation survives adversarial ordering") {
  // Plain left-to-right doubles lose both unit increments here.
  mgcp::KahanSum acc;
  acc.add(1.0);
  acc.add(1e100);
  acc.add(1.0);
  acc.add(-1e100);
  CHECK(acc.value() == 2.0);
}
