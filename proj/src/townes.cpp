#include "gpduo/townes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gpduo/errors.hpp"
#include "gpduo/ode.hpp"

namespace gpduo::townes {

namespace {

constexpr double kStartRadius = 1e-6;
constexpr double kTailLimit = 1e-8;
// Bracketing overshoot and undershoot trajectories must agree to this level
// out to the join radius.
constexpr double kMatchAgreement = 1e-8;
// Forward shooting is used while Q > kJoinLevel * q0. Past that the
// integration error feeds the growing mode, so the outer part comes from an
// inward integration started on the K0 asymptote, matched in value.
constexpr double kJoinLevel = 1e-2;
constexpr double kInwardStartPad = 10.0;

double log_k0(double r) {
  if (r < 300.0) return std::log(std::cyl_bessel_k(0.0, r));
  return 0.5 * std::log(std::numbers::pi / (2.0 * r)) - r + std::log1p(-1.0 / (8.0 * r));
}

double k0_ratio(double r, double r_ref) { return std::exp(log_k0(r) - log_k0(r_ref)); }

double k1_over_k0(double r) {
  if (r < 300.0) return std::cyl_bessel_k(1.0, r) / std::cyl_bessel_k(0.0, r);
  return (1.0 + 3.0 / (8.0 * r)) / (1.0 - 1.0 / (8.0 * r));
}

ode::State radial_rhs(double r, const ode::State& y) {
  return {y[1], -y[1] / r + y[0] - y[0] * y[0] * y[0]};
}

ode::State series_start(double q0) {
  const double c = (q0 - q0 * q0 * q0) / 4.0;
  return {q0 + c * kStartRadius * kStartRadius, 2.0 * c * kStartRadius};
}

enum class Shot { Overshoot, Undershoot };

Shot classify_shot(double q0, double r_end) {
  bool over = false;
  bool under = false;
  ode::Options opts;
  auto observer = [&](double, const ode::State& y) {
    if (y[0] < 0) over = true;
    else if (y[1] > 0) under = true;
    return !(over || under);
  };
  ode::integrate(radial_rhs, kStartRadius, series_start(q0), r_end, 1e-3, opts, observer);
  if (over) return Shot::Overshoot;
  // Never decayed through zero: amplitude too small (includes the constant
  // solution q0 = 1).
  return Shot::Undershoot;
}

// Integrates node to node, recording (Q, Q'). Entries past a sign change or
// upturn are marked invalid.
struct Trajectory {
  std::vector<double> q;
  std::vector<char> valid;
};

Trajectory record(double q0, const RadialGrid& grid) {
  Trajectory tr;
  tr.q.assign(grid.n_nodes, 0.0);
  tr.valid.assign(grid.n_nodes, 0);
  tr.q[0] = q0;
  tr.valid[0] = 1;
  ode::Options opts;
  ode::State y = series_start(q0);
  double r = kStartRadius;
  double h = 1e-3;
  for (std::size_t k = 1; k < grid.n_nodes; ++k) {
    const auto out = ode::integrate(radial_rhs, r, y, grid.nodes[k], h, opts);
    r = out.t;
    y = out.y;
    h = out.h_next;
    if (y[0] <= 0 || y[1] >= 0) break;
    tr.q[k] = y[0];
    tr.valid[k] = 1;
  }
  return tr;
}

// Integrates from r_max + pad down to the node `stop`, starting on
// c * K0(r) / K0(r_join) where r_join = nodes[stop]. Returns values at the
// nodes stop..n-1 (earlier entries zero).
std::vector<double> record_inward(double c, const RadialGrid& grid, std::size_t stop) {
  std::vector<double> q(grid.n_nodes, 0.0);
  const double r_join = grid.nodes[stop];
  const double r_start = grid.r_max + kInwardStartPad;
  const double a = c * k0_ratio(r_start, r_join);
  // s = -r turns the inward sweep into a forward one.
  auto rhs = [](double s, const ode::State& y) {
    const auto f = radial_rhs(-s, y);
    return ode::State{-f[0], -f[1]};
  };
  ode::Options opts;
  opts.atol = 0;
  ode::State y{a, -a * k1_over_k0(r_start)};
  double s = -r_start;
  double h = 1e-3;
  for (std::size_t k = grid.n_nodes; k-- > stop;) {
    const auto out = ode::integrate(rhs, s, y, -grid.nodes[k], h, opts);
    s = out.t;
    y = out.y;
    h = out.h_next;
    q[k] = y[0];
  }
  return q;
}

// Sample Q at any integer node index: even extension for k < 0, K0 tail past
// the last node.
double sample(const RadialProfile& p, std::ptrdiff_t k) {
  const auto n = static_cast<std::ptrdiff_t>(p.values.size());
  if (k < 0) k = -k;
  if (k < n) return p.values[static_cast<std::size_t>(k)];
  const double h = p.grid.spacing();
  return p.values.back() * k0_ratio(static_cast<double>(k) * h, p.grid.r_max);
}

// Tail of int_R^inf g(r) dr for g built from the K0 continuation.
template <class F>
double tail_integral(F&& g, double r0) {
  const double span = 40.0;
  const int m = 4000;
  const double h = span / m;
  double s = g(r0) + g(r0 + span);
  for (int i = 1; i < m; ++i) s += g(r0 + i * h) * ((i % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

constexpr double kD1[] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
constexpr double kD2c = -205.0 / 72;
constexpr double kD2[] = {8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

}  // namespace

RadialGrid RadialGrid::uniform(double r_max, std::size_t n_nodes) {
  require(n_nodes >= 16, "radial grid needs at least 16 nodes");
  require(r_max > 0, "r_max must be positive");
  RadialGrid g;
  g.r_max = r_max;
  g.n_nodes = n_nodes;
  g.nodes.resize(n_nodes);
  const double h = r_max / static_cast<double>(n_nodes - 1);
  for (std::size_t i = 0; i < n_nodes; ++i) g.nodes[i] = static_cast<double>(i) * h;
  g.nodes.back() = r_max;
  return g;
}

double RadialProfile::value_at(double r) const {
  r = std::abs(r);
  if (r >= grid.r_max) return values.back() * k0_ratio(r, grid.r_max);
  const double h = grid.spacing();
  const double s = r / h;
  const auto base = static_cast<std::ptrdiff_t>(std::floor(s)) - 3;
  // Lagrange weights on nodes base..base+7
  double result = 0;
  for (int a = 0; a < 8; ++a) {
    double w = 1;
    for (int b = 0; b < 8; ++b) {
      if (b == a) continue;
      w *= (s - static_cast<double>(base + b)) / static_cast<double>(a - b);
    }
    result += w * sample(*this, base + a);
  }
  return result;
}

std::vector<double> RadialProfile::derivative() const {
  const double h = grid.spacing();
  std::vector<double> d(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    double s = 0;
    for (int m = 1; m <= 4; ++m) s += kD1[m - 1] * (sample(*this, k + m) - sample(*this, k - m));
    d[i] = s / h;
  }
  return d;
}

std::vector<double> RadialProfile::second_derivative() const {
  const double h = grid.spacing();
  std::vector<double> d(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    double s = kD2c * values[i];
    for (int m = 1; m <= 4; ++m) s += kD2[m - 1] * (sample(*this, k + m) + sample(*this, k - m));
    d[i] = s / (h * h);
  }
  return d;
}

void RadialProfile::validate() const {
  require(values.size() == grid.n_nodes && grid.nodes.size() == grid.n_nodes,
          "profile size does not match its grid");
  require(grid.n_nodes >= 16, "profile needs at least 16 nodes");
  require(grid.nodes.front() == 0.0, "radial grid must start at 0");
  const double h = grid.spacing();
  for (std::size_t i = 0; i < grid.n_nodes; ++i)
    require(std::abs(grid.nodes[i] - static_cast<double>(i) * h) <= 1e-9 * grid.r_max,
            "radial grid must be uniform");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(values[i] > 0, "profile must be positive");
    if (i > 0) require(values[i] < values[i - 1], "profile must be strictly decreasing");
  }
  require(values.back() < kTailLimit, "profile tail must be below 1e-8 at r_max");
}

double TownesConstants::moment(double p) const {
  for (const auto& [order, value] : moments)
    if (std::abs(order - p) <= 1e-12 * std::max(1.0, std::abs(p))) return value;
  fail("MissingMoment", "moment of order " + num(p) + " was not computed");
}

RadialProfile solve_townes(double r_max, std::size_t n_nodes, double amp_tol) {
  require(r_max >= 15.0, "r_max must be >= 15");
  require(amp_tol > 0 && amp_tol <= 1e-6, "amp_tol must lie in (0, 1e-6]");
  require(n_nodes >= 64, "need at least 64 radial nodes");

  // Trajectories of the bracket endpoints diverge from Q near r ~ 18 in
  // double precision, so classification runs well past r_max.
  const double r_classify = r_max + 40.0;
  double lo = 1.0;
  double hi = 4.0;
  auto bracket_ok = [&] {
    return classify_shot(lo, r_classify) == Shot::Undershoot &&
           classify_shot(hi, r_classify) == Shot::Overshoot;
  };
  if (!bracket_ok()) {
    lo = 0.5;
    hi = 8.0;
    if (!bracket_ok()) fail("BracketFailure", "no sign change of the shot in [0.5, 8]");
  }
  int iterations = 0;
  for (;; ++iterations) {
    if (iterations >= 200) fail("NonConvergence", "amplitude bisection exceeded 200 iterations");
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    if (classify_shot(mid, r_classify) == Shot::Overshoot) hi = mid;
    else lo = mid;
  }
  if (hi - lo > amp_tol) fail("NonConvergence", "amplitude bracket wider than amp_tol");

  RadialProfile profile;
  profile.grid = RadialGrid::uniform(r_max, n_nodes);
  const Trajectory under = record(lo, profile.grid);
  const Trajectory over = record(hi, profile.grid);

  std::size_t match = 0;
  for (std::size_t k = 1; k < n_nodes; ++k) {
    if (!under.valid[k] || !over.valid[k]) break;
    if (std::abs(over.q[k] - under.q[k]) > kMatchAgreement * under.q[k]) break;
    match = k;
  }
  std::size_t join = 0;
  while (join < match && under.q[join] > kJoinLevel * lo) ++join;
  if (join == match || join < 8) fail("NonConvergence", "shooting trajectories separated too early");

  profile.values.resize(n_nodes);
  for (std::size_t k = 0; k <= join; ++k) profile.values[k] = 0.5 * (under.q[k] + over.q[k]);
  const double target = profile.values[join];
  std::vector<double> outer = record_inward(target, profile.grid, join);
  // The nonlinear term is small past the join radius, so the amplitude map
  // is nearly linear and a few secant steps pin it.
  double c_prev = target;
  double g_prev = outer[join] - target;
  double c = target * target / outer[join];
  for (int it = 0; it < 20 && std::abs(g_prev) > 1e-15 * target; ++it) {
    outer = record_inward(c, profile.grid, join);
    const double g = outer[join] - target;
    if (g == g_prev) break;
    const double next = c - g * (c - c_prev) / (g - g_prev);
    c_prev = c;
    g_prev = g;
    c = next;
  }
  for (std::size_t k = join + 1; k < n_nodes; ++k) profile.values[k] = outer[k];

  profile.validate();
  if (ode_residual(profile) > 10.0 * amp_tol)
    fail("NonConvergence", "profile residual exceeds 10 * amp_tol");
  return profile;
}

double gregory(std::span<const double> f, double h) {
  static constexpr double w[] = {95.0 / 288, 317.0 / 240, 23.0 / 30, 793.0 / 720, 157.0 / 160};
  const std::size_t n = f.size();
  require(n >= 10, "Gregory rule needs at least 10 nodes");
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double wi = 1.0;
    if (i < 5) wi = w[i];
    else if (n - 1 - i < 5) wi = w[n - 1 - i];
    s += wi * f[i];
  }
  return s * h;
}

TownesConstants compute_constants(const RadialProfile& profile,
                                  std::span<const double> moment_orders) {
  profile.validate();
  const auto& r = profile.grid.nodes;
  const auto& q = profile.values;
  const double h = profile.grid.spacing();
  const double rm = profile.grid.r_max;
  const double qm = q.back();
  const std::size_t n = q.size();
  const double two_pi = 2.0 * std::numbers::pi;

  auto tail_q = [&](double x) { return qm * k0_ratio(x, rm); };

  auto radial_integral = [&](auto&& integrand, auto&& tail_integrand, const char* what) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = integrand(i);
    const double body = gregory(f, h);
    const double tail = tail_integral(tail_integrand, rm);
    if (std::abs(tail) > 1e-8 * std::abs(body + tail))
      fail("QuadratureDivergence", std::string("tail of ") + what + " exceeds 1e-8 of the total");
    return two_pi * (body + tail);
  };

  TownesConstants c;
  c.q0 = q.front();
  const std::vector<double> dq = profile.derivative();
  c.a_star = radial_integral([&](std::size_t i) { return q[i] * q[i] * r[i]; },
                             [&](double x) { return std::pow(tail_q(x), 2) * x; }, "mass");
  c.kinetic = radial_integral(
      [&](std::size_t i) { return dq[i] * dq[i] * r[i]; },
      [&](double x) { return std::pow(tail_q(x) * k1_over_k0(x), 2) * x; }, "kinetic");
  c.l4 = radial_integral([&](std::size_t i) { return std::pow(q[i], 4) * r[i]; },
                         [&](double x) { return std::pow(tail_q(x), 4) * x; }, "quartic");
  for (double p : moment_orders) {
    require(p >= 0, "moment order must be non-negative");
    if (p == 0) {
      c.moments[p] = c.a_star;
      continue;
    }
    c.moments[p] = radial_integral(
        [&](std::size_t i) { return std::pow(r[i], p + 1) * q[i] * q[i]; },
        [&](double x) { return std::pow(x, p + 1) * std::pow(tail_q(x), 2); }, "moment");
  }
  return c;
}

double lambda_star(double p0, double gamma, const TownesConstants& constants) {
  require(p0 > 0 && gamma > 0, "p0 and gamma must be positive");
  const double m = constants.moment(p0);
  return std::pow(p0 * gamma / 4.0 * m, 1.0 / (p0 + 2.0));
}

double limit_constant(double p0, double gamma, const TownesConstants& constants) {
  require(p0 > 0 && gamma > 0, "p0 and gamma must be positive");
  const double m = constants.moment(p0);
  return (2.0 * p0 + 4.0) / (p0 * constants.a_star) *
         std::pow(p0 * gamma * m / 4.0, 2.0 / (p0 + 2.0));
}

double decay_slope(const RadialProfile& profile) {
  const double lo = 0.5 * profile.grid.r_max;
  const double hi = 0.75 * profile.grid.r_max;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    const double r = profile.grid.nodes[i];
    if (r < lo || r > hi) continue;
    const double v = profile.values[i];
    if (v < 1e-7) fail("WindowUnderflow", "profile below 1e-7 inside the decay fit window");
    const double y = std::log(v) + 0.5 * std::log(r);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
    ++count;
  }
  require(count >= 2, "decay fit window holds fewer than two nodes");
  const double m = static_cast<double>(count);
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double ode_residual(const RadialProfile& profile) {
  const std::vector<double> d1 = profile.derivative();
  const std::vector<double> d2 = profile.second_derivative();
  double worst = 0;
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    const double q = profile.values[i];
    const double r = profile.grid.nodes[i];
    // Q'/r -> Q''(0) at the origin
    const double radial = (i == 0) ? d2[0] : d1[i] / r;
    worst = std::max(worst, std::abs(d2[i] + radial - q + q * q * q));
  }
  return worst;
}

}  // namespace gpduo::townes
