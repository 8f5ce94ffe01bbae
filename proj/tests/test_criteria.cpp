#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "gpduo/criteria.hpp"

using namespace gpduo::criteria;

namespace {

constexpr double kA = 11.7008965245;

// Closed-form stationary point of f (test oracle only).
double t_star(const CouplingParams& p) {
  return ((p.b2 - p.b1) + std::sqrt((p.b1 - p.b2) * (p.b1 - p.b2) + 4 * p.beta * p.beta)) /
         (2 * p.beta);
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned long seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  // b1, b2 in (0, a*), beta strictly below the existence bound by a margin
  CouplingParams existence() {
    CouplingParams p{uniform(0.01, 0.99) * kA, uniform(0.01, 0.99) * kA, 0};
    const double lower = std::sqrt((kA - p.b1) * (kA - p.b2));
    p.beta = uniform(0.001, 0.99) * lower;
    return p;
  }
  CouplingParams any() {
    return {uniform(1e-3, 2.0) * kA, uniform(1e-3, 2.0) * kA, uniform(1e-3, 2.0) * kA};
  }
};

}  // namespace

TEST_SUITE("criteria") {
  TEST_CASE("f_ratio closed cases") {
    const CouplingParams sym{3.0, 3.0, 2.0};
    CHECK(f_ratio(sym, kA, 1.0) == doctest::Approx(kA / 5.0).epsilon(1e-15));
    const CouplingParams p{2.0, 5.0, 1.0};
    CHECK(f_ratio(p, kA, 1e-9) == doctest::Approx(kA / p.b1).epsilon(1e-8));
    CHECK(f_ratio(p, kA, 1e9) == doctest::Approx(kA / p.b2).epsilon(1e-8));
  }

  TEST_CASE("f(t1) = 1 on the boundary beta = sqrt((a*-b1)(a*-b2))") {
    Gen g(11);
    for (int k = 0; k < 10000; ++k) {
      CouplingParams p{g.uniform(0.01, 0.99) * kA, g.uniform(0.01, 0.99) * kA, 0};
      p.beta = std::sqrt((kA - p.b1) * (kA - p.b2));
      const double t1 = std::sqrt((kA - p.b1) / (kA - p.b2));
      REQUIRE(std::abs(f_ratio(p, kA, t1) - 1) < 1e-12);
    }
  }

  TEST_CASE("f_inf above one inside the existence region") {
    Gen g(12);
    for (int k = 0; k < 10000; ++k) {
      const auto p = g.existence();
      const auto r = f_inf(p, kA);
      REQUIRE(r.value > 1 + 1e-9);
      REQUIRE(r.value <= kA / p.b1);
      REQUIRE(r.value <= kA / p.b2);
    }
  }

  TEST_CASE("f_inf matches the closed-form stationary point") {
    Gen g(13);
    for (int k = 0; k < 2000; ++k) {
      const auto p = g.any();
      const auto r = f_inf(p, kA);
      const double ts = t_star(p);
      REQUIRE(r.t_min == doctest::Approx(ts).epsilon(1e-9));
      REQUIRE(r.value == doctest::Approx(f_ratio(p, kA, ts)).epsilon(1e-13));
      REQUIRE(std::abs(f_ratio_derivative(p, kA, r.t_min)) < 1e-10);
    }
  }

  TEST_CASE("f_inf on the symmetric segment") {
    for (double beta : {0.1 * kA, 0.5 * kA, 0.9 * kA}) {
      const CouplingParams p{kA - beta, kA - beta, beta};
      const auto r = f_inf(p, kA);
      CHECK(r.t_min == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    }
    const CouplingParams eq{2.0, 2.0, 0.7};
    CHECK(f_ratio_derivative(eq, kA, 1.0) == 0.0);
    CHECK(f_inf(eq, kA).t_min == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("l_func") {
    const CouplingParams p{1.0, 3.0, 2.0};
    CHECK(l_func(p, 1.0) == doctest::Approx(2.0 / (0.5 + 1.5 + 2.0)).epsilon(1e-15));
    CHECK(l_func(p, 1e9) == doctest::Approx(2.0 / p.b2).epsilon(1e-8));
    CHECK(l_func(p, 0.0) == 0.0);
  }

  TEST_CASE("l(t) > l(1) for t > 1 under b1 < b2 <= 2 beta + b1") {
    Gen g(14);
    for (int k = 0; k < 10000; ++k) {
      const double b1 = g.uniform(0.001, 0.998) * kA;
      const double b2 = g.uniform(b1 / kA + 1e-6, 0.999) * kA;
      const double beta = g.uniform((b2 - b1) / 2, (b2 - b1) / 2 + kA);
      const CouplingParams p{b1, b2, beta};
      const double l1 = l_func(p, 1.0);
      for (int j = 1; j <= 50; ++j) {
        const double t = std::pow(100.0, j / 50.0);
        REQUIRE(l_func(p, t) > l1);
      }
    }
  }

  TEST_CASE("classify examples") {
    CHECK(classify({0.5 * kA, 0.5 * kA, 0.4 * kA}, kA).tag == Region::Existence);
    CHECK(classify({0.3 * kA, 0.5 * kA, 0.62 * kA}, kA).tag == Region::NoMinimizer);
    CHECK(classify({0.4 * kA, 0.6 * kA, 0.49 * kA}, kA).tag == Region::BorderlineUnequal);
    CHECK(classify({0.5 * kA, 0.5 * kA, 0.5 * kA}, kA).tag == Region::SegmentEqualB);
    CHECK(classify({kA, 0.5 * kA, 0.1 * kA}, kA).tag == Region::Indeterminate);
    CHECK(classify({1.2 * kA, 0.5 * kA, 0.1 * kA}, kA).tag == Region::NoMinimizer);
    // |b1 - b2| > 2 sqrt((a*-b1)(a*-b2)) between the bounds
    const CouplingParams wide{0.1 * kA, 0.99 * kA, 0.2 * kA};
    CHECK(classify(wide, kA).tag == Region::Indeterminate);
    CHECK(classify({0.5 * kA, 0.5 * kA, 0.4 * kA}, kA).detail.find("tolerance band") !=
          std::string::npos);
  }

  TEST_CASE("classify tolerance band") {
    const double b = 0.5 * kA;
    const double nudge = 1e-13 * kA;
    CHECK(classify({b, b, kA - b - nudge}, kA).tag == Region::SegmentEqualB);
    CHECK(classify({b, b, kA - b - nudge}, kA, 0.0).tag == Region::Existence);
    CHECK(classify({b, b, kA - b + nudge}, kA, 0.0).tag == Region::NoMinimizer);
  }

  TEST_CASE("classify is total and consistent with the predicates") {
    Gen g(15);
    for (int k = 0; k < 10000; ++k) {
      CouplingParams p = g.any();
      // sprinkle exact edge cases
      if (k % 7 == 0) p.b1 = kA;
      if (k % 11 == 0) p.b2 = p.b1;
      if (k % 13 == 0 && p.b1 < kA) p.beta = kA - p.b1;
      const auto label = classify(p, kA);
      const auto again = classify(p, kA);
      REQUIRE(label.tag == again.tag);
      const double lower = std::sqrt(std::max(0.0, (kA - p.b1) * (kA - p.b2)));
      const double upper = (2 * kA - p.b1 - p.b2) / 2;
      const bool none = p.b1 > kA || p.b2 > kA || p.beta > upper;
      switch (label.tag) {
        case Region::NoMinimizer: REQUIRE(none); break;
        case Region::Existence:
          REQUIRE(p.b1 < kA);
          REQUIRE(p.b2 < kA);
          REQUIRE(p.beta < lower);
          break;
        case Region::SegmentEqualB:
          REQUIRE(std::abs(p.b1 - p.b2) <= 1e-12 * kA);
          REQUIRE(std::abs(p.beta - (kA - p.b1)) <= 1e-12 * kA);
          break;
        case Region::BorderlineUnequal:
          REQUIRE(p.b1 != p.b2);
          REQUIRE(p.beta >= lower - 1e-12 * kA);
          REQUIRE(p.beta <= upper + 1e-12 * kA);
          break;
        case Region::Indeterminate: REQUIRE_FALSE(p.b1 > kA * (1 + 1e-12)); break;
      }
    }
  }

  TEST_CASE("quotient bounds") {
    const double t = kA / 3;
    auto qb = quotient_bounds({t, t, t}, kA);
    CHECK(qb.lower == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(qb.upper == doctest::Approx(1.5).epsilon(1e-15));
    qb = quotient_bounds({0.6 * kA, 0.6 * kA, 0.4 * kA}, kA);
    CHECK(qb.lower == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(qb.upper == doctest::Approx(1.0).epsilon(1e-15));
    Gen g(16);
    for (int k = 0; k < 1000; ++k) {
      auto p = g.any();
      if (p.b1 == p.b2) continue;
      qb = quotient_bounds(p, kA);
      REQUIRE(qb.lower > 0);
      REQUIRE(qb.lower < qb.upper);
    }
  }

  TEST_CASE("lipschitz gap") {
    const CouplingParams p{1.0, 2.0, 3.0};
    const auto same = lipschitz_gap(p, p, kA, 1.3, 1.3);
    CHECK(same.lhs == 0.0);
    CHECK(same.rhs == 0.0);
    // quotient bounds coincide on the symmetric segment, so O is known there
    const double beta = 0.3 * kA;
    const CouplingParams a{kA - beta, kA - beta, beta};
    const CouplingParams b{kA - beta - 0.01, kA - beta - 0.01, beta + 0.005};
    const auto qa = quotient_bounds(a, kA), qb = quotient_bounds(b, kA);
    const auto gap = lipschitz_gap(a, b, kA, qa.lower, qb.upper);
    CHECK(gap.lhs <= gap.rhs);
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS(classify({-1.0, 1.0, 1.0}, kA));
    CHECK_THROWS(f_inf({1.0, 1.0, 0.0}, kA));
    CHECK_THROWS(f_ratio({1.0, 1.0, 1.0}, kA, 0.0));
    CHECK(std::string(to_string(Region::SegmentEqualB)) == "SegmentEqualB");
  }
}
