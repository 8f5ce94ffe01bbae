#include <cmath>
#include <numbers>

#include "doctest.h"
#include "gpduo/blowup.hpp"
#include "gpduo/errors.hpp"

using namespace gpduo;
using namespace gpduo::blowup;

namespace {

const blowup::Townes& townes_data() {
  static const auto profile = townes::solve_townes(20.0, 4096, 1e-10);
  static const blowup::Townes t{&profile, townes::compute_constants(profile)};
  return t;
}

double a_star() { return townes_data().constants.a_star; }

SweepSpec small_sweep() {
  SweepSpec s;
  s.beta = 0.5 * a_star();
  s.eps_list = {0.2, 0.13, 0.09, 0.06};
  s.pot = PotentialSpec::harmonic();
  s.grid = Grid2D::make(256, 8);
  s.min_core_points = 4;
  return s;
}

const std::vector<SweepRecord>& small_records() {
  static const auto r = run_sweep(small_sweep(), townes_data());
  return r;
}

SweepRecord synthetic(double eps, double energy) {
  SweepRecord r;
  r.eps_raw = eps;
  r.energy = energy;
  r.l4_1 = r.l4_2 = 1;
  return r;
}

}  // namespace

TEST_SUITE("blowup") {

TEST_CASE("path couplings reproduce eps") {
  auto s = small_sweep();
  const double A = a_star();
  for (double e : {0.3, 0.01}) {
    auto [b1, b2] = s.couplings(e, A);
    CHECK(b1 == b2);
    CHECK(A - ((b1 + s.beta) + (b2 + s.beta)) / 2 == doctest::Approx(e).epsilon(1e-12));
    s.path = PathKind::Split;
    s.split = 0.5;
    std::tie(b1, b2) = s.couplings(e, A);
    CHECK(b1 < b2);
    CHECK(A - ((b1 + s.beta) + (b2 + s.beta)) / 2 == doctest::Approx(e).epsilon(1e-12));
    s.path = PathKind::Symmetric;
  }
}

TEST_CASE("sweep spec validation") {
  const double A = a_star();
  auto s = small_sweep();
  CHECK_NOTHROW(s.validate(A));
  s.eps_list = {0.1, 0.2};
  CHECK_THROWS_AS(s.validate(A), Error);
  s.eps_list = {0.6 * A};
  CHECK_THROWS_AS(s.validate(A), Error);
  s = small_sweep();
  s.beta = A;
  CHECK_THROWS_AS(s.validate(A), Error);
  s = small_sweep();
  s.path = PathKind::Split;
  s.split = 1.5;
  CHECK_THROWS_AS(s.validate(A), Error);
}

TEST_CASE("exponent targets") {
  CHECK(energy_exponent_target(2) == 0.5);
  CHECK(energy_exponent_target(4) == doctest::Approx(2.0 / 3));
  CHECK(l4_exponent_target(2) == -0.5);
  CHECK(l4_exponent_target(6) == -0.25);
}

TEST_CASE("power-law fit on exact data") {
  std::vector<double> e, y;
  for (int i = 0; i < 9; ++i) {
    e.push_back(0.1 * std::pow(10.0, -i / 4.0));
    y.push_back(3.5 * std::pow(e.back(), 0.5));
  }
  const auto f = fit_power_law(e, y);
  CHECK(f.exponent == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.constant == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(f.stderr_ < 1e-12);
  CHECK(f.window.size() == 9);
  // noisy data has a finite positive standard error
  y[3] *= 1.01;
  CHECK(fit_power_law(e, y).stderr_ > 0);
}

TEST_CASE("fits refuse short or narrow data") {
  std::vector<SweepRecord> rs{synthetic(0.1, 1), synthetic(0.05, 0.7)};
  CHECK_THROWS_WITH_AS(fit_energy_exponent(rs), doctest::Contains("InsufficientSpan"), Error);
  rs = {synthetic(0.1, 1), synthetic(0.07, 0.8), synthetic(0.05, 0.7), synthetic(0.01, 0.3)};
  CHECK_THROWS_WITH_AS(fit_l4_exponent(rs), doctest::Contains("InsufficientSpan"), Error);
  rs.push_back(synthetic(0.003, 0.2));
  CHECK_NOTHROW(fit_energy_exponent(rs));
}

TEST_CASE("limit constant ratio and its homogeneity in gamma") {
  const auto& t = townes_data();
  auto an = fields::analyze_potential(PotentialSpec::harmonic());
  REQUIRE(an.p0 == 2);
  const double c = townes::limit_constant(2, an.gamma, t.constants);
  std::vector<SweepRecord> rs;
  for (double e : {0.1, 0.01, 0.001}) rs.push_back(synthetic(e, c * std::sqrt(e)));
  for (double r : limit_constant_check(rs, t.constants, an)) CHECK(r == doctest::Approx(1).epsilon(1e-13));
  an.gamma *= 2;
  for (double r : limit_constant_check(rs, t.constants, an))
    CHECK(r == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-13));
}

TEST_CASE("profile distance vanishes on the exact rescaled Townes pair") {
  const auto& t = townes_data();
  const auto an = fields::analyze_potential(PotentialSpec::harmonic());
  const auto g = Grid2D::make(256, 8);
  const double eps_raw = 0.05, eps = std::pow(eps_raw, 0.25);
  const double lam = townes::lambda_star(an.p0, an.gamma, t.constants);
  minimizer::MinimizeResult r;
  r.u1 = r.u2 = fields::Field2D::zeros(g);
  r.max1 = r.max2 = {0.03, -0.02};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double d = std::hypot(x[0] - 0.03, x[1] + 0.02);
    r.u1.values[k] = lam / eps * t.profile->value_at(lam * d / eps) / std::sqrt(t.constants.a_star);
  }
  r.u2 = r.u1;
  CHECK(profile_distance(r, eps_raw, t, an) < 1e-6);
  // a wrong scale is visible
  CHECK(profile_distance(r, 2 * eps_raw, t, an) > 1e-2);
  CHECK_THROWS_WITH_AS(profile_distance(r, 1e-6, t, an), doctest::Contains("ResolutionExceeded"), Error);
}

TEST_CASE("boundary mass") {
  const auto g = Grid2D::make(64, 8);
  auto f = fields::Field2D::zeros(g);
  f.values[0] = 1;  // corner node
  CHECK(boundary_mass(f) == doctest::Approx(g.cell_area()));
  f.values[0] = 0;
  f.values[32 * 64 + 32] = 1;
  CHECK(boundary_mass(f) == 0.0);
}

TEST_CASE("small harmonic sweep follows the blow-up trends") {
  const auto& rs = small_records();
  REQUIRE(rs.size() == 4);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& r = rs[i];
    CHECK(r.energy > 0);
    CHECK(r.l4_1 > 0);
    CHECK(r.diff2 * 2 / r.beta <= r.energy);
    CHECK(std::abs(r.max1[0]) < 1e-8);
    if (i > 0) {
      CHECK(r.energy < rs[i - 1].energy);
      CHECK(r.l4_1 > rs[i - 1].l4_1);
      CHECK(r.profile_dist < rs[i - 1].profile_dist);
    }
  }
  const auto an = fields::analyze_potential(PotentialSpec::harmonic());
  const auto ratio = limit_constant_check(rs, townes_data().constants, an);
  CHECK(std::abs(ratio.back() - 1) < std::abs(ratio.front() - 1));
  const auto mu = rs.back().mu1 / (-(rs.back().b1 + rs.back().beta) / 2 * rs.back().l4_1);
  CHECK(std::abs(mu - 1) < 0.1);
}

TEST_CASE("sweeps are bitwise reproducible") {
  const auto again = run_sweep(small_sweep(), townes_data());
  const auto& rs = small_records();
  REQUIRE(again.size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(again[i].energy == rs[i].energy);
    CHECK(again[i].l4_1 == rs[i].l4_1);
    CHECK(again[i].mu2 == rs[i].mu2);
    CHECK(again[i].max1 == rs[i].max1);
    CHECK(again[i].profile_dist == rs[i].profile_dist);
  }
}

TEST_CASE("under-resolved sweeps are refused") {
  auto s = small_sweep();
  s.min_core_points = 16;
  CHECK_THROWS_WITH_AS(run_sweep(s, townes_data()), doctest::Contains("ResolutionExceeded"), Error);
  s = small_sweep();
  s.pot.v1.centers.clear();  // no common zero left
  CHECK_THROWS_AS(run_sweep(s, townes_data()), Error);
}

TEST_CASE("concentration report picks the nearest flattest zero") {
  PotentialSpec spec;
  spec.v1.centers = {{{1, 0}, 2}, {{-1, 0}, 4}};
  spec.v2 = spec.v1;
  const auto an = fields::analyze_potential(spec);
  REQUIRE(an.p0 == 4);
  std::vector<SweepRecord> rs;
  for (double e : {0.1, 0.01, 0.001}) {
    auto r = synthetic(e, 1);
    const double off = 0.5 * std::pow(e, 0.5);  // faster than eps^(1/6)
    r.max1 = {-1 + off, 0};
    r.max2 = {-1 + off, 0.5 * off};
    rs.push_back(r);
  }
  const auto rep = concentration_check(rs, an, 0.02);
  CHECK(rep.target == Point{-1, 0});
  CHECK(rep.converged);
  CHECK(rep.offsets_decreasing);
  CHECK(rep.pass());
  CHECK_FALSE(concentration_check(rs, an, 0.001).converged);
}

TEST_CASE("bump constant closed form") {
  // (1 - r^2)^3 normalized: int |grad|^2 = 42/5, int zeta^4 = 49/(13 pi)
  const double A = a_star(), beta = 0.5 * A;
  const auto g = Grid2D::make(256, 8);
  auto z = fields::Field2D::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double r2 = x[0] * x[0] + x[1] * x[1];
    if (r2 < 1) z.values[k] = std::pow(1 - r2, 3);
  }
  z.normalize();
  Spectral sp(g);
  const std::vector<double> zero(g.size(), 0.0);
  const auto t = fields::energy_terms(sp, z.values, z.values, {zero, zero});
  CHECK(t.kinetic1 == doctest::Approx(42.0 / 5).epsilon(1e-4));
  CHECK(t.quartic1 == doctest::Approx(49 / (13 * std::numbers::pi)).epsilon(1e-4));
  CHECK(bump_c_zeta(A, beta) == doctest::Approx(2 * (t.kinetic1 - (A - beta) / 2 * t.quartic1)).epsilon(1e-4));
}

TEST_CASE("separated wells keep the energy below the plateau") {
  const double A = a_star();
  const auto g = Grid2D::make(128, 8);
  const auto rep = separated_wells_scenario(g, {}, A);
  CHECK(rep.c_zeta == doctest::Approx(rep.c_zeta_exact).epsilon(1e-3));
  CHECK(rep.inf_potential >= rep.plateau);
  CHECK(rep.certificate);
  CHECK(rep.energy_below);
  CHECK(rep.energy <= rep.c_zeta);
  CHECK(rep.pass());
  CHECK(rep.trend_decreasing);
  WellsOptions half;
  half.plateau_factor = 0.5;
  half.trend_offsets.clear();
  const auto flipped = separated_wells_scenario(g, {}, A, half);
  CHECK_FALSE(flipped.certificate);
  CHECK_FALSE(flipped.pass());
}

}
