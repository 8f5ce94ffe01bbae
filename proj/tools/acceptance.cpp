// Acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gpduo/blowup.hpp"
#include "gpduo/criteria.hpp"
#include "gpduo/errors.hpp"
#include "gpduo/minimizer.hpp"
#include "gpduo/serialize.hpp"
#include "gpduo/townes.hpp"

using namespace gpduo;
using criteria::CouplingParams;
using fields::PotentialSpec;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s  %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned long seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::vector<double> geometric(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (count - 1)));
  return out;
}

double mu_ratio(const blowup::SweepRecord& r) { return r.mu1 / (-(r.b1 + r.beta) / 2 * r.l4_1); }

}  // namespace

int main() {
  const auto profile = townes::solve_townes(20.0, 4096, 1e-10);
  const blowup::Townes T{&profile, townes::compute_constants(profile)};
  const auto& C = T.constants;
  const double A = C.a_star;
  std::printf("a* = %s\n", serialize::fmt17(A).c_str());

  criterion(1, "Townes identities", [&] {
    const double kin = rel(C.kinetic, C.a_star);
    const double quart = std::abs(C.l4 - 2 * C.a_star) / C.l4;
    const auto fine = townes::solve_townes(20.0, 8192, 1e-10);
    const double drift = rel(townes::compute_constants(fine).a_star, A);
    const double slope = townes::decay_slope(profile);
    const bool ok = kin < 1e-6 && quart < 1e-6 && drift < 1e-8 && std::abs(slope + 1) <= 0.02;
    return Outcome{ok, "kinetic " + fmt("%.2e", kin) + " quartic " + fmt("%.2e", quart) + " doubling " +
                           fmt("%.2e", drift) + " slope " + fmt("%.4f", slope)};
  });

  criterion(2, "GN equality", [&] {
    const double gap = rel(C.l4, 2 / A * C.kinetic * C.a_star);
    return Outcome{gap < 1e-6, "relative gap " + fmt("%.2e", gap)};
  });

  criterion(3, "phase diagram properties", [&] {
    Gen g(3);
    std::size_t bad_total = 0, bad_inf = 0, bad_t1 = 0, bad_l = 0;
    double worst_t1 = 0;
    for (int k = 0; k < 10000; ++k) {
      CouplingParams p{g.uniform(1e-3, 2) * A, g.uniform(1e-3, 2) * A, g.uniform(1e-3, 2) * A};
      if (k % 7 == 0) p.b1 = A;
      if (k % 11 == 0) p.b2 = p.b1;
      if (k % 13 == 0 && p.b1 < A) p.beta = A - p.b1;
      const auto tag = criteria::classify(p, A).tag;
      const double lower = std::sqrt(std::max(0.0, (A - p.b1) * (A - p.b2)));
      const double upper = (2 * A - p.b1 - p.b2) / 2;
      const bool none = p.b1 > A || p.b2 > A || p.beta > upper;
      bool consistent = true;
      switch (tag) {
        case criteria::Region::NoMinimizer: consistent = none; break;
        case criteria::Region::Existence: consistent = p.b1 < A && p.b2 < A && p.beta < lower; break;
        case criteria::Region::SegmentEqualB:
          consistent = std::abs(p.b1 - p.b2) <= 1e-12 * A && std::abs(p.beta - (A - p.b1)) <= 1e-12 * A;
          break;
        case criteria::Region::BorderlineUnequal:
          consistent = p.b1 != p.b2 && p.beta >= lower - 1e-12 * A && p.beta <= upper + 1e-12 * A;
          break;
        case criteria::Region::Indeterminate: consistent = !(p.b1 > A * (1 + 1e-12)); break;
      }
      if (!consistent) ++bad_total;
    }
    for (int k = 0; k < 10000; ++k) {
      CouplingParams p{g.uniform(0.01, 0.99) * A, g.uniform(0.01, 0.99) * A, 0};
      const double lower = std::sqrt((A - p.b1) * (A - p.b2));
      p.beta = g.uniform(0.001, 0.99) * lower;
      if (!(criteria::f_inf(p, A).value > 1)) ++bad_inf;
      p.beta = lower;
      const double t1 = std::sqrt((A - p.b1) / (A - p.b2));
      const double d = std::abs(criteria::f_ratio(p, A, t1) - 1);
      worst_t1 = std::max(worst_t1, d);
      if (d > 1e-12) ++bad_t1;
    }
    for (int k = 0; k < 10000; ++k) {
      const double b1 = g.uniform(0.001, 0.998) * A;
      const double b2 = g.uniform(b1 / A + 1e-6, 0.999) * A;
      const double beta = g.uniform((b2 - b1) / 2, (b2 - b1) / 2 + A);
      const CouplingParams p{b1, b2, beta};
      const double l1 = criteria::l_func(p, 1.0);
      for (int j = 1; j <= 50; ++j)
        if (!(criteria::l_func(p, std::pow(100.0, j / 50.0)) > l1)) ++bad_l;
    }
    const bool ok = bad_total + bad_inf + bad_t1 + bad_l == 0;
    return Outcome{ok, "classify " + std::to_string(bad_total) + " f_inf " + std::to_string(bad_inf) +
                           " f(t1) worst " + fmt("%.1e", worst_t1) + " l(t) " + std::to_string(bad_l) +
                           " violations"};
  });

  criterion(4, "quotient estimator", [&] {
    const auto g = Grid2D::make(256, 32);
    const minimizer::FlowConfig cfg;
    const double tol = 1e-3;
    double seg = 0;
    for (double b : {0.25, 0.5, 0.75})
      seg = std::max(seg, std::abs(minimizer::estimate_gn_quotient({(1 - b) * A, (1 - b) * A, b * A}, g, cfg) - 1));
    Gen r(4);
    std::vector<CouplingParams> ps;
    std::vector<double> qs;
    std::size_t sandwich = 0, lipschitz = 0;
    for (int k = 0; k < 20; ++k) {
      const double b = r.uniform(0.2, 0.6);
      const CouplingParams p{(b + r.uniform(-0.1, 0.1)) * A, (b + r.uniform(-0.1, 0.1)) * A,
                             r.uniform(0.1, 0.5) * A};
      const double q = minimizer::estimate_gn_quotient(p, g, cfg);
      const auto bounds = criteria::quotient_bounds(p, A);
      if (q < bounds.lower - tol || q > bounds.upper + tol) ++sandwich;
      ps.push_back(p);
      qs.push_back(q);
    }
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::size_t j = (i + 1) % ps.size();
      const auto gap = criteria::lipschitz_gap(ps[i], ps[j], A, qs[i], qs[j]);
      if (gap.lhs > gap.rhs + 2 * tol) ++lipschitz;
    }
    const bool ok = seg <= tol && sandwich == 0 && lipschitz == 0;
    return Outcome{ok, "segment |O-1| " + fmt("%.2e", seg) + " sandwich " + std::to_string(sandwich) +
                           "/20 lipschitz " + std::to_string(lipschitz) + "/20 violations"};
  });

  criterion(5, "existence and escape probes", [&] {
    const auto h = PotentialSpec::harmonic();
    const auto r = minimizer::minimize({0.5 * A, 0.5 * A, 0.4 * A}, h, Grid2D::make(256, 8), {});
    const auto g = Grid2D::make(256, 32);
    const auto lambdas = geometric(1, 64, 13);
    const bool esc = minimizer::scaling_escape_test({0.3 * A, 0.5 * A, 0.62 * A}, h, g, lambdas).verdict;
    const bool stay = minimizer::scaling_escape_test({0.3 * A, 0.3 * A, 0.1 * A}, h, g, lambdas).verdict;
    const bool ok = r.residual < 1e-6 && esc && !stay;
    return Outcome{ok, "residual " + fmt("%.2e", r.residual) + " escape " + (esc ? "true" : "false") +
                           " control " + (stay ? "true" : "false")};
  });

  // harmonic sweep shared by 6, 7, 8
  blowup::SweepSpec hs;
  hs.beta = 0.5 * A;
  hs.eps_list = geometric(1e-1, 1e-3, 9);
  hs.pot = PotentialSpec::harmonic();
  hs.grid = Grid2D::make(1024, 8);
  hs.min_core_points = 10;
  std::vector<blowup::SweepRecord> hr;
  const auto h_an = fields::analyze_potential(hs.pot);

  criterion(6, "harmonic blow-up exponents", [&] {
    hr = blowup::run_sweep(hs, T);
    const auto fe = blowup::fit_energy_exponent(hr);
    const auto fl = blowup::fit_l4_exponent(hr);
    const auto& last = hr.back();
    const double l4r = std::abs(last.l4_1 / last.l4_2 - 1);
    const double mur = std::abs(mu_ratio(last) - 1);
    const bool ok = std::abs(fe.exponent - 0.5) <= 0.05 && std::abs(fl.exponent + 0.5) <= 0.05 && l4r < 1e-2 &&
                    mur < 0.1;
    return Outcome{ok, "energy " + fmt("%.4f", fe.exponent) + " l4 " + fmt("%.4f", fl.exponent) +
                           " |l4 ratio-1| " + fmt("%.1e", l4r) + " |mu ratio-1| " + fmt("%.1e", mur)};
  });

  criterion(7, "limiting constant", [&] {
    if (hr.empty()) return Outcome{false, "harmonic sweep unavailable"};
    const double r = blowup::limit_constant_check(hr, C, h_an).back();
    return Outcome{std::abs(r - 1) < 0.05, "final ratio " + fmt("%.5f", r)};
  });

  criterion(8, "profile convergence", [&] {
    const auto g = Grid2D::make(256, 8);
    const double eps_raw = 0.05, eps = std::pow(eps_raw, 0.25);
    const double lam = townes::lambda_star(h_an.p0, h_an.gamma, C);
    minimizer::MinimizeResult syn;
    syn.u1 = fields::Field2D::zeros(g);
    syn.max1 = syn.max2 = {0.03, -0.02};
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      const double d = std::hypot(x[0] - 0.03, x[1] + 0.02);
      syn.u1.values[k] = lam / eps * profile.value_at(lam * d / eps) / std::sqrt(A);
    }
    syn.u2 = syn.u1;
    const double exact = blowup::profile_distance(syn, eps_raw, T, h_an);
    if (hr.empty()) return Outcome{false, "harmonic sweep unavailable; synthetic " + fmt("%.2e", exact)};
    const double fin = hr.back().profile_dist;
    return Outcome{fin < 0.05 && exact < 1e-6, "final " + fmt("%.2e", fin) + " synthetic " + fmt("%.2e", exact)};
  });

  criterion(9, "concentration at the flattest zero", [&] {
    blowup::SweepSpec s;
    s.beta = 0.5 * A;
    s.eps_list = geometric(1e-1, 1e-3, 9);
    s.pot.v1.centers = {{{1, 0}, 2}, {{-1, 0}, 4}};
    s.pot.v2 = s.pot.v1;
    s.grid = Grid2D::make(512, 8);
    s.min_core_points = 10;
    const auto rs = blowup::run_sweep(s, T);
    const auto an = fields::analyze_potential(s.pot);
    const auto rep = blowup::concentration_check(rs, an, s.grid.spacing());
    return Outcome{rep.pass() && an.p0 == 4, "target (" + fmt("%g", rep.target[0]) + "," + fmt("%g", rep.target[1]) +
                                                 ") distance " + fmt("%.4f", rep.final_distance) + " spacing " +
                                                 fmt("%.4f", rep.spacing) + " offsets " +
                                                 fmt("%.4f", rep.normalized_offsets.front()) + " -> " +
                                                 fmt("%.4f", rep.normalized_offsets.back())};
  });

  criterion(10, "uniqueness probe", [&] {
    minimizer::FlowConfig cfg;
    cfg.grad_tol = 1e-8;
    const auto r = minimizer::uniqueness_probe({0.1 * A, 0.1 * A, 0.05 * A}, PotentialSpec::harmonic(),
                                               Grid2D::make(128, 8), cfg, 8);
    return Outcome{r.max_pairwise_distance < 1e-4, "max pairwise " + fmt("%.2e", r.max_pairwise_distance)};
  });

  criterion(11, "separated wells", [&] {
    const auto r = blowup::separated_wells_scenario(Grid2D::make(128, 8), {}, A);
    return Outcome{r.pass(), "energy " + fmt("%.6f", r.energy) + " inf(V1+V2) " + fmt("%.6f", r.inf_potential) +
                                 " C_zeta " + fmt("%.6f", r.c_zeta)};
  });

  criterion(12, "determinism", [&] {
    blowup::SweepSpec s;
    s.beta = 0.5 * A;
    s.eps_list = {0.2, 0.13, 0.09, 0.06};
    s.pot = PotentialSpec::harmonic();
    s.grid = Grid2D::make(256, 8);
    s.min_core_points = 4;
    s.cfg.seed = 7;
    const auto a = serialize::records_to_csv(blowup::run_sweep(s, T));
    const auto b = serialize::records_to_csv(blowup::run_sweep(s, T));
    return Outcome{a == b, std::to_string(a.size()) + " bytes " + (a == b ? "identical" : "differ")};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
