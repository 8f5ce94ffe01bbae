#include "gpduo/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpduo/criteria.hpp"
#include "gpduo/errors.hpp"

namespace gpduo::blowup {

namespace {

// Warm starts are only initial guesses, so a small resampling loss is fine.
constexpr double kWarmAliasTol = 1e-6;
constexpr double kMinProfilePoints = 2;
constexpr double kOffsetFloor = 1e-9;  // in grid spacings

using fields::Field2D;
using minimizer::MinimizeResult;

double core_scale(double eps_raw, double p0) { return std::pow(eps_raw, 1 / (p0 + 2)); }

const PotentialAnalysis& checked(const PotentialAnalysis& a) {
  if (a.z_set.empty() || !(a.p0 > 0) || !std::isfinite(a.gamma))
    fail("AssumptionViolation", "potentials have no common flattest zero");
  return a;
}

Field2D bump(const Grid2D& g, const Point& c) {
  Field2D f = Field2D::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double r2 = (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
    if (r2 < 1) f.values[k] = std::pow(1 - r2, 3);
  }
  f.normalize();
  return f;
}

// zero on the unit ball about c, plateau + 0.1 |x - c|^2 outside radius 2
std::vector<double> well(const Grid2D& g, const Point& c, double plateau) {
  std::vector<double> v(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double r = std::hypot(x[0] - c[0], x[1] - c[1]);
    v[k] = (1 - fields::cutoff(r)) * (plateau + 0.1 * r * r);
  }
  return v;
}

}  // namespace

void SweepSpec::validate(double a_star) const {
  require(a_star > 0, "a* must be positive");
  require(beta > 0 && beta < a_star, "beta must lie in (0, a*)");
  require(!eps_list.empty(), "eps_list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0 && eps_list[i] < 0.5 * a_star, "eps values must lie in (0, a*/2)");
    if (i > 0) require(eps_list[i] < eps_list[i - 1], "eps_list must be strictly decreasing");
  }
  require(path == PathKind::Symmetric || std::abs(split) < 1, "split must lie in (-1, 1)");
  require(min_core_points >= 1, "min_core_points must be positive");
  require(boundary_mass_tol > 0, "boundary_mass_tol must be positive");
  pot.validate();
  cfg.validate();
  for (double e : eps_list) {
    const auto [b1, b2] = couplings(e, a_star);
    require(b1 > 0 && b2 > 0, "path leaves b_i > 0");
  }
}

std::pair<double, double> SweepSpec::couplings(double eps, double a_star) const {
  const double base = a_star - beta;
  if (path == PathKind::Symmetric) return {base - eps, base - eps};
  return {base - (1 + split) * eps, base - (1 - split) * eps};
}

double boundary_mass(const Field2D& u) {
  const Grid2D& g = u.grid;
  const double edge = 0.9 * g.extent;
  double s = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    if (std::max(std::abs(x[0]), std::abs(x[1])) > edge) s += u.values[k] * u.values[k];
  }
  return s * g.cell_area();
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Townes& townes,
                                   MinimizeResult* last) {
  require(townes.profile != nullptr, "sweep needs the Townes profile");
  const double a_star = townes.constants.a_star;
  spec.validate(a_star);
  const auto analysis = fields::analyze_potential(spec.pot);
  checked(analysis);
  const double p0 = analysis.p0;
  const double lam = townes::lambda_star(p0, analysis.gamma, townes.constants);
  const Point center = analysis.z_points().front();
  const auto pot = fields::eval_potential(spec.pot, spec.grid);
  const double h = spec.grid.spacing();

  std::vector<SweepRecord> records;
  MinimizeResult prev;
  for (std::size_t k = 0; k < spec.eps_list.size(); ++k) {
    const double eps = spec.eps_list[k];
    const auto [b1, b2] = spec.couplings(eps, a_star);
    const criteria::CouplingParams params{b1, b2, spec.beta};
    const auto region = criteria::classify(params, a_star);
    if (region.tag != criteria::Region::Existence)
      fail("InvalidArgument", std::string("sweep point is not in the existence region: ") +
                                  criteria::to_string(region.tag));
    const double core = core_scale(eps, p0);
    if (core < static_cast<double>(spec.min_core_points) * h)
      fail("ResolutionExceeded", "core scale " + num(core) + " spans fewer than " +
                                     std::to_string(spec.min_core_points) + " grid spacings");

    FlowConfig cfg = spec.cfg;
    if (k == 0) {
      cfg.init = minimizer::InitKind::TownesSeeded;
      cfg.townes = {townes.profile, a_star, center, lam / core};
    } else {
      const double ratio = core_scale(spec.eps_list[k - 1], p0) / core;
      Field2D w1 = fields::rescale_about(prev.u1, ratio, prev.max1, kWarmAliasTol);
      Field2D w2 = fields::rescale_about(prev.u2, ratio, prev.max2, kWarmAliasTol);
      cfg.init = minimizer::InitKind::WarmStart;
      cfg.warm = std::make_shared<std::pair<Field2D, Field2D>>(std::move(w1), std::move(w2));
    }
    MinimizeResult r = minimizer::minimize(params, pot, spec.grid, cfg);
    const double edge = std::max(boundary_mass(r.u1), boundary_mass(r.u2));
    if (edge > spec.boundary_mass_tol)
      fail("ResolutionExceeded", "mass " + num(edge) + " near the box boundary at eps " +
                                     num(eps));

    SweepRecord rec;
    rec.eps_raw = eps;
    rec.b1 = b1;
    rec.b2 = b2;
    rec.beta = spec.beta;
    rec.energy = r.energy;
    rec.l4_1 = r.l4_1;
    rec.l4_2 = r.l4_2;
    rec.diff2 = r.diff2;
    rec.mu1 = r.mu1;
    rec.mu2 = r.mu2;
    rec.max1 = r.max1;
    rec.max2 = r.max2;
    rec.profile_dist = profile_distance(r, eps, townes, analysis);
    records.push_back(rec);
    prev = std::move(r);
  }
  if (last) *last = std::move(prev);
  return records;
}

FitResult fit_power_law(const std::vector<double>& eps, const std::vector<double>& y) {
  require(eps.size() == y.size(), "fit inputs differ in length");
  if (eps.size() < 4) fail("InsufficientSpan", "need at least 4 records, got " + std::to_string(eps.size()));
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  require(*lo > 0, "eps values must be positive");
  if (std::log10(*hi / *lo) < 1.5)
    fail("InsufficientSpan", "eps values span less than 1.5 decades");
  const std::size_t n = eps.size();
  double mx = 0, my = 0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(y[i] > 0, "fitted quantity must be positive");
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  FitResult f;
  f.exponent = sxy / sxx;
  const double intercept = my - f.exponent * mx;
  f.constant = std::exp(intercept);
  double ssr = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - intercept - f.exponent * lx[i];
    ssr += e * e;
  }
  f.stderr_ = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  for (std::size_t i = 0; i < n; ++i) f.window.push_back(i);
  return f;
}

FitResult fit_energy_exponent(const std::vector<SweepRecord>& records) {
  std::vector<double> e, y;
  for (const auto& r : records) {
    e.push_back(r.eps_raw);
    y.push_back(r.energy);
  }
  return fit_power_law(e, y);
}

FitResult fit_l4_exponent(const std::vector<SweepRecord>& records, int component) {
  require(component >= 0 && component <= 2, "component must be 0, 1 or 2");
  std::vector<double> e, y;
  for (const auto& r : records) {
    e.push_back(r.eps_raw);
    y.push_back(component == 1 ? r.l4_1 : component == 2 ? r.l4_2 : std::sqrt(r.l4_1 * r.l4_2));
  }
  return fit_power_law(e, y);
}

std::vector<double> limit_constant_check(const std::vector<SweepRecord>& records,
                                         const townes::TownesConstants& constants,
                                         const PotentialAnalysis& analysis) {
  checked(analysis);
  const double p0 = analysis.p0;
  const double c = townes::limit_constant(p0, analysis.gamma, constants);
  std::vector<double> out;
  for (const auto& r : records) out.push_back(r.energy / std::pow(r.eps_raw, p0 / (p0 + 2)) / c);
  return out;
}

double profile_distance(const MinimizeResult& result, double eps_raw, const Townes& townes,
                        const PotentialAnalysis& analysis) {
  require(townes.profile != nullptr, "profile distance needs the Townes profile");
  require(eps_raw > 0, "eps_raw must be positive");
  checked(analysis);
  const double p0 = analysis.p0;
  const double eps = core_scale(eps_raw, p0);
  const double lam = townes::lambda_star(p0, analysis.gamma, townes.constants);
  const Grid2D& g = result.u1.grid;
  if (eps / lam < kMinProfilePoints * g.spacing())
    fail("ResolutionExceeded", "predicted core is narrower than two grid spacings");
  // eps u(eps y + x_i) vs lambda Q(lambda |y|)/||Q||; in x = eps y + x_i the
  // L2 norm is unchanged and the profile reads (lambda/eps) Q(lambda |x - x_i|/eps)/||Q||.
  const double amp = lam / eps / std::sqrt(townes.constants.a_star);
  double worst = 0;
  for (int i = 0; i < 2; ++i) {
    const Field2D& u = i == 0 ? result.u1 : result.u2;
    const Point c = i == 0 ? result.max1 : result.max2;
    double s = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      const double r = std::hypot(x[0] - c[0], x[1] - c[1]);
      const double d = u.values[k] - amp * townes.profile->value_at(lam * r / eps);
      s += d * d;
    }
    worst = std::max(worst, std::sqrt(s * g.cell_area()));
  }
  return worst;
}

ConcentrationReport concentration_check(const std::vector<SweepRecord>& records,
                                        const PotentialAnalysis& analysis, double spacing) {
  require(!records.empty(), "no records");
  require(spacing > 0, "spacing must be positive");
  checked(analysis);
  const auto zs = analysis.z_points();
  ConcentrationReport rep;
  rep.spacing = spacing;
  const Point fin = records.back().max1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < zs.size(); ++j) {
    const double d = std::hypot(fin[0] - zs[j][0], fin[1] - zs[j][1]);
    if (d < best) {
      best = d;
      rep.target = zs[j];
      rep.target_index = j;
    }
  }
  // offsets at round-off level count as exact concentration
  auto offset = [&](const SweepRecord& r) {
    const double d = std::max(std::hypot(r.max1[0] - rep.target[0], r.max1[1] - rep.target[1]),
                              std::hypot(r.max2[0] - rep.target[0], r.max2[1] - rep.target[1]));
    return d < kOffsetFloor * spacing ? 0.0 : d;
  };
  for (const auto& r : records)
    rep.normalized_offsets.push_back(offset(r) / core_scale(r.eps_raw, analysis.p0));
  rep.final_distance = offset(records.back());
  rep.converged = rep.final_distance < spacing;
  const double first = rep.normalized_offsets.front(), last = rep.normalized_offsets.back();
  rep.offsets_decreasing = records.size() >= 2 && (last < first || last == 0);
  return rep;
}

double bump_c_zeta(double a_star, double beta) {
  return 2 * (42.0 / 5 - (a_star - beta) * 49 / (26 * std::numbers::pi));
}

WellsReport separated_wells_scenario(const Grid2D& grid, const FlowConfig& cfg, double a_star,
                                     const WellsOptions& opts) {
  require(a_star > 0, "a* must be positive");
  require(opts.beta_fraction > 0 && opts.beta_fraction < 1, "beta_fraction must lie in (0, 1)");
  require(opts.separation > 4, "wells must be more than 4 apart");
  require(opts.plateau_factor > 0, "plateau_factor must be positive");
  require(opts.offset_fraction > 0, "offset_fraction must be positive");
  require(grid.extent > 0.5 * opts.separation + 2, "wells must fit inside the grid");
  cfg.validate();

  WellsReport rep;
  rep.a_star = a_star;
  rep.beta = opts.beta_fraction * a_star;
  rep.b = a_star - rep.beta - opts.offset_fraction * a_star;
  require(rep.b > 0, "offset leaves b > 0");
  const Point x1{-0.5 * opts.separation, 0}, x2{0.5 * opts.separation, 0};
  const Field2D z1 = bump(grid, x1), z2 = bump(grid, x2);

  // zeta_i vanish where V_i is nonzero, so E(zeta) = C_zeta for any plateau
  const std::vector<double> zero(grid.size(), 0.0);
  const criteria::CouplingParams seg{a_star - rep.beta, a_star - rep.beta, rep.beta};
  rep.c_zeta = fields::energy(z1, z2, seg, {zero, zero});
  rep.c_zeta_exact = bump_c_zeta(a_star, rep.beta);
  rep.plateau = opts.plateau_factor * rep.c_zeta;

  fields::Potentials pot{well(grid, x1, rep.plateau), well(grid, x2, rep.plateau)};
  rep.inf_potential = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k)
    rep.inf_potential = std::min(rep.inf_potential, pot.v1[k] + pot.v2[k]);

  FlowConfig c = cfg;
  c.init = minimizer::InitKind::WarmStart;
  c.warm = std::make_shared<std::pair<Field2D, Field2D>>(z1, z2);
  const auto r = minimizer::minimize({rep.b, rep.b, rep.beta}, pot, grid, c);
  rep.energy = r.energy;
  rep.residual = r.residual;
  rep.certificate = rep.c_zeta < rep.inf_potential;
  rep.energy_below = rep.energy < rep.inf_potential;

  // coincident wells: inf(V1 + V2) = 0, energies only trend toward 0
  const auto v0 = well(grid, {0, 0}, rep.plateau);
  const fields::Potentials same{v0, v0};
  const Field2D z0 = bump(grid, {0, 0});
  auto warm = std::make_shared<std::pair<Field2D, Field2D>>(z0, z0);
  rep.trend_offsets = opts.trend_offsets;
  for (double o : opts.trend_offsets) {
    const double b = a_star - rep.beta - o * a_star;
    require(b > 0, "trend offset leaves b > 0");
    FlowConfig t = cfg;
    t.init = minimizer::InitKind::WarmStart;
    t.warm = warm;
    const auto tr = minimizer::minimize({b, b, rep.beta}, same, grid, t);
    rep.trend_energies.push_back(tr.energy);
    warm = std::make_shared<std::pair<Field2D, Field2D>>(tr.u1, tr.u2);
  }
  rep.trend_decreasing = !rep.trend_energies.empty();
  for (std::size_t i = 1; i < rep.trend_energies.size(); ++i)
    rep.trend_decreasing = rep.trend_decreasing && rep.trend_energies[i] < rep.trend_energies[i - 1];
  return rep;
}

}  // namespace gpduo::blowup
