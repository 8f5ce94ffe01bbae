#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gpduo/criteria.hpp"
#include "gpduo/errors.hpp"
#include "gpduo/minimizer.hpp"
#include "gpduo/townes.hpp"

using namespace gpduo;
using namespace gpduo::minimizer;

namespace {

const townes::RadialProfile& q_profile() {
  static const auto p = townes::solve_townes(20.0, 4096, 1e-10);
  return p;
}

double a_star() {
  static const double a = townes::compute_constants(q_profile()).a_star;
  return a;
}

double l2_distance(const Field2D& a, const Field2D& b) {
  double s = 0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    const double d = a.values[k] - b.values[k];
    s += d * d;
  }
  return std::sqrt(s * a.grid.cell_area());
}

const MinimizeResult& existence_run() {
  static const MinimizeResult r = [] {
    const double A = a_star();
    FlowConfig cfg;
    cfg.grad_tol = 1e-8;
    return minimize({0.5 * A, 0.5 * A, 0.4 * A}, PotentialSpec::harmonic(), Grid2D::make(128, 8), cfg);
  }();
  return r;
}

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return out;
}

}  // namespace

TEST_SUITE("minimizer") {

TEST_CASE("existence point converges with nonnegative energy") {
  const auto& r = existence_run();
  CHECK(r.residual < 1e-6);
  CHECK(r.energy >= 0);
  CHECK(std::abs(r.terms.mass1 - 1) < 1e-12);
  CHECK(std::abs(r.terms.mass2 - 1) < 1e-12);
  // harmonic ground state of the linear problem is 2; attraction lowers it
  CHECK(r.energy < 2);
}

TEST_CASE("symmetric data gives identical components") {
  const auto& r = existence_run();
  CHECK(r.u1.values == r.u2.values);
  CHECK(r.mu1 == r.mu2);
  CHECK(r.max_index1 == r.max_index2);
}

TEST_CASE("difference term is bounded by the energy") {
  const double A = a_star();
  FlowConfig cfg;
  cfg.grad_tol = 1e-7;
  const CouplingParams p{0.3 * A, 0.5 * A, 0.2 * A};
  auto spec = PotentialSpec::harmonic();
  spec.v2.centers[0].at = {0.5, 0};
  const auto r = minimize(p, spec, Grid2D::make(128, 8), cfg);
  CHECK(r.diff2 > 0);
  CHECK(r.diff2 <= 2 / p.beta * r.energy);
}

TEST_CASE("accepted energies never increase") {
  const auto& r = existence_run();
  REQUIRE(r.history.size() > 2);
  for (std::size_t i = 1; i < r.history.size(); ++i)
    CHECK(r.history[i] <= r.history[i - 1] + 1e-13 * std::abs(r.history[i - 1]));
}

TEST_CASE("Euler-Lagrange residual and the two multiplier routes") {
  const auto& r = existence_run();
  const double A = a_star();
  const CouplingParams p{0.5 * A, 0.5 * A, 0.4 * A};
  const auto pot = fields::eval_potential(PotentialSpec::harmonic(), r.u1.grid);
  const auto m = multipliers(r.u1, r.u2, p, pot);
  CHECK(m.mu1 == doctest::Approx(r.mu1).epsilon(1e-10));
  CHECK(std::abs(m.mu1 - m.formula1) < 1e-8);
  CHECK(std::abs(m.mu2 - m.formula2) < 1e-8);
  // residual of -Lap u + V u - mu u - b u^3 - beta u_j^2 u, directly
  std::vector<double> g1;
  std::tie(g1, std::ignore) = fields::gradient(r.u1, r.u2, p, pot);
  double s = 0;
  for (std::size_t k = 0; k < g1.size(); ++k) {
    const double e = 0.5 * g1[k] - r.mu1 * r.u1.values[k];
    s += e * e;
  }
  CHECK(std::sqrt(s * r.u1.grid.cell_area()) < 1e-8);
}

TEST_CASE("multipliers reject non-unit masses") {
  const auto g = Grid2D::make(64, 8);
  Field2D small = Field2D::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) small.values[k] = std::exp(-0.5 * (g.node(k)[0] * g.node(k)[0] + g.node(k)[1] * g.node(k)[1]));
  const auto pot = fields::eval_potential(PotentialSpec::harmonic(), g);
  CHECK_THROWS_WITH_AS(multipliers(small, small, {1, 1, 1}, pot), doctest::Contains("MassViolation"),
                       Error);
}

TEST_CASE("weak single-component limit approaches the oscillator ground energy") {
  // first order perturbation: e(a) = 2 - a/(4 pi) + O(a^2), since the
  // ground state exp(-|x|^2/2)/sqrt(pi) has int phi^4 = 1/(2 pi)
  const auto g = Grid2D::make(64, 8);
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    v[k] = x[0] * x[0] + x[1] * x[1];
  }
  FlowConfig cfg;
  cfg.grad_tol = 1e-9;
  for (double a : {1e-2, 1e-3}) {
    const auto r = minimize_single(a, v, g, cfg);
    CHECK(r.residual < 1e-9);
    CHECK(std::abs(r.energy - (2 - a / (4 * std::numbers::pi))) < 4 * a * a);
    CHECK(r.l4 == doctest::Approx(1 / (2 * std::numbers::pi)).epsilon(2 * a));
  }
}

TEST_CASE("zero coupling reproduces single-component runs") {
  const double A = a_star();
  const auto g = Grid2D::make(64, 8);
  auto spec = PotentialSpec::harmonic();
  spec.v2.centers[0].at = {1, -0.5};
  spec.v2.modulator = 2;
  const auto pot = fields::eval_potential(spec, g);
  FlowConfig cfg;
  cfg.grad_tol = 1e-9;
  cfg.init_center = {0.3, -0.2};
  const auto two = minimize({0.3 * A, 0.6 * A, 0.0}, pot, g, cfg);
  const auto one = minimize_single(0.3 * A, pot.v1, g, cfg);
  const auto other = minimize_single(0.6 * A, pot.v2, g, cfg);
  CHECK(l2_distance(two.u1, one.u) < 1e-7);
  CHECK(l2_distance(two.u2, other.u) < 1e-7);
  CHECK(two.energy == doctest::Approx(one.energy + other.energy).epsilon(1e-12));
  CHECK(two.mu1 == doctest::Approx(one.mu).epsilon(1e-9));
  CHECK(two.mu2 == doctest::Approx(other.mu).epsilon(1e-9));
}

TEST_CASE("Townes-seeded and Gaussian starts reach the same minimizer") {
  const double A = a_star();
  FlowConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.init = InitKind::TownesSeeded;
  cfg.townes = {&q_profile(), A, {0, 0}, 3.0};
  const auto r = minimize({0.5 * A, 0.5 * A, 0.4 * A}, PotentialSpec::harmonic(), Grid2D::make(128, 8), cfg);
  CHECK(r.energy == doctest::Approx(existence_run().energy).epsilon(1e-12));
  CHECK(l2_distance(r.u1, existence_run().u1) < 1e-6);
}

TEST_CASE("warm start from the minimizer stops immediately") {
  const auto& base = existence_run();
  const double A = a_star();
  FlowConfig cfg;
  cfg.grad_tol = 1e-6;
  cfg.init = InitKind::WarmStart;
  cfg.warm = std::make_shared<std::pair<Field2D, Field2D>>(base.u1, base.u2);
  const auto r = minimize({0.5 * A, 0.5 * A, 0.4 * A}, PotentialSpec::harmonic(), base.u1.grid, cfg);
  CHECK(r.iters == 0);
  cfg.warm = std::make_shared<std::pair<Field2D, Field2D>>(base.u1, Field2D::zeros(Grid2D::make(64, 8)));
  CHECK_THROWS_AS(minimize({0.5 * A, 0.5 * A, 0.4 * A}, PotentialSpec::harmonic(), base.u1.grid, cfg),
                  Error);
}

TEST_CASE("iteration cap raises MaxItersExceeded") {
  const double A = a_star();
  FlowConfig cfg;
  cfg.max_iters = 2;
  CHECK_THROWS_WITH_AS(minimize({0.5 * A, 0.5 * A, 0.4 * A}, PotentialSpec::harmonic(), Grid2D::make(64, 8), cfg),
                       doctest::Contains("MaxItersExceeded"), Error);
}

TEST_CASE("quotient equals one on the critical segment") {
  const double A = a_star();
  const auto g = Grid2D::make(128, 16);
  const FlowConfig cfg;
  for (double beta : {0.25, 0.5, 0.75}) {
    const auto q = estimate_gn_quotient_pair({(1 - beta) * A, (1 - beta) * A, beta * A}, g, cfg);
    CHECK(std::abs(q.value - 1) < 1e-3);
    CHECK(q.residual < cfg.grad_tol);
  }
}

TEST_CASE("quotient at equal couplings matches the coinciding bounds") {
  const double A = a_star();
  const CouplingParams p{A / 3, A / 3, A / 3};
  const double q = estimate_gn_quotient(p, Grid2D::make(128, 16), {});
  const auto b = criteria::quotient_bounds(p, A);
  CHECK(b.lower == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(std::abs(q - 1.5) < 1e-3);
}

TEST_CASE("quotient estimates sit inside the analytic sandwich") {
  const double A = a_star();
  const auto g = Grid2D::make(128, 16);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> bd(0.2, 0.6), spread(-0.1, 0.1), bed(0.1, 0.5);
  const double tol = 1e-3;
  std::vector<CouplingParams> ps;
  std::vector<double> qs;
  for (int draw = 0; draw < 5; ++draw) {
    const double b = bd(rng);
    const CouplingParams p{(b + spread(rng)) * A, (b + spread(rng)) * A, bed(rng) * A};
    const double q = estimate_gn_quotient(p, g, {});
    const auto bounds = criteria::quotient_bounds(p, A);
    CHECK(q >= bounds.lower - tol);
    CHECK(q <= bounds.upper + tol);
    CHECK(q >= criteria::f_inf(p, A).value - tol);
    ps.push_back(p);
    qs.push_back(q);
  }
  for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
    const auto gap = criteria::lipschitz_gap(ps[i], ps[i + 1], A, qs[i], qs[i + 1]);
    CHECK(gap.lhs <= gap.rhs + 2 * tol);
  }
}

TEST_CASE("scaling escape separates nonexistence from existence") {
  const double A = a_star();
  const auto g = Grid2D::make(256, 32);
  const auto lambdas = geometric(1, 64, 13);
  const auto esc = scaling_escape_test({0.3 * A, 0.5 * A, 0.62 * A}, PotentialSpec::harmonic(), g, lambdas);
  CHECK(esc.verdict);
  const auto ok = scaling_escape_test({0.3 * A, 0.3 * A, 0.1 * A}, PotentialSpec::harmonic(), g, lambdas);
  CHECK_FALSE(ok.verdict);
  CHECK(ok.energies.back() > ok.energies.front());
  CHECK_THROWS_AS(scaling_escape_test({0.3 * A, 0.3 * A, 0.1 * A}, PotentialSpec::harmonic(), g, {2.0, 1.0}),
                  Error);
}

TEST_CASE("scaled energy agrees with the energy of the resampled pair") {
  const double A = a_star();
  const CouplingParams p{0.3 * A, 0.4 * A, 0.2 * A};
  const auto g = Grid2D::make(128, 12);
  auto gauss = [&](Point c, double w) {
    Field2D f = Field2D::zeros(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      const double dx = x[0] - c[0], dy = x[1] - c[1];
      f.values[k] = std::exp(-(dx * dx + dy * dy) / (2 * w * w));
    }
    f.normalize();
    return f;
  };
  const Field2D u1 = gauss({0.2, 0.1}, 1.0), u2 = gauss({-0.3, 0.0}, 1.3);
  const auto spec = PotentialSpec::harmonic();
  const auto pot = fields::eval_potential(spec, g);
  CHECK(scaled_energy(u1, u2, p, spec, 1.0) == doctest::Approx(fields::energy(u1, u2, p, pot)).epsilon(1e-13));
  for (double l : {1.2, 1.5, 2.0}) {
    const double direct = fields::energy(fields::rescale(u1, l), fields::rescale(u2, l), p, pot);
    CHECK(scaled_energy(u1, u2, p, spec, l) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("uniqueness probe at weak coupling") {
  const double A = a_star();
  const auto g = Grid2D::make(64, 8);
  FlowConfig cfg;
  cfg.grad_tol = 1e-8;
  const CouplingParams p{0.1 * A, 0.1 * A, 0.05 * A};
  const auto r = uniqueness_probe(p, PotentialSpec::harmonic(), g, cfg, 3);
  CHECK(r.energies.size() == 3);
  CHECK(r.max_pairwise_distance < 1e-4);
  const auto one = uniqueness_probe(p, PotentialSpec::harmonic(), g, cfg, 1);
  CHECK(one.max_pairwise_distance == 0.0);
}

TEST_CASE("sub-grid maximum location") {
  const auto g = Grid2D::make(64, 8);
  Field2D f = Field2D::zeros(g);
  const Point c{0.123, -0.0456};
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    f.values[k] = std::exp(-((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1])) / 2);
  }
  std::size_t idx = 0;
  const Point m = refine_maximum(f, &idx);
  CHECK(std::abs(m[0] - c[0]) < 1e-9);
  CHECK(std::abs(m[1] - c[1]) < 1e-9);
  CHECK(idx == 32 * 64 + 32);
  // ties resolve to the lowest flat index
  Field2D flat = Field2D::zeros(g);
  std::fill(flat.values.begin(), flat.values.end(), 1.0);
  refine_maximum(flat, &idx);
  CHECK(idx == 0);
}

}
