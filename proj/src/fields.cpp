#include "gpduo/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "gpduo/errors.hpp"
#include "gpduo/kernels.hpp"

namespace gpduo::fields {

namespace {

constexpr double kSameCenter = 1e-12;

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

bool same(const Point& a, const Point& b) { return distance(a, b) <= kSameCenter; }

void validate_component(const ComponentPotential& c, const char* name) {
  require(!c.centers.empty(), std::string(name) + " needs at least one center");
  require(c.modulator > 0 && std::isfinite(c.modulator),
          std::string(name) + " modulator must be positive");
  for (std::size_t j = 0; j < c.centers.size(); ++j) {
    require(c.centers[j].exponent > 0, std::string(name) + " exponents must be positive");
    for (std::size_t k = 0; k < j; ++k)
      require(!same(c.centers[j].at, c.centers[k].at),
              std::string(name) + " centers must be distinct");
  }
}

using Index = std::int64_t;

}  // namespace

double ComponentPotential::operator()(const Point& x) const {
  double v = modulator;
  for (const auto& c : centers) {
    const double dx = x[0] - c.at[0], dy = x[1] - c.at[1];
    const double r2 = dx * dx + dy * dy;
    v *= c.exponent == 2.0 ? r2 : std::pow(r2, 0.5 * c.exponent);
  }
  return v;
}

void PotentialSpec::validate() const {
  validate_component(v1, "V1");
  validate_component(v2, "V2");
}

PotentialSpec PotentialSpec::harmonic() {
  PotentialSpec s;
  s.v1.centers = {{{0, 0}, 2}};
  s.v2.centers = {{{0, 0}, 2}};
  return s;
}

std::vector<Point> PotentialAnalysis::z_points() const {
  std::vector<Point> out;
  for (std::size_t j : z_set) out.push_back(lambda_set[j]);
  return out;
}

PotentialAnalysis analyze_potential(const PotentialSpec& spec) {
  spec.validate();
  const auto& c1 = spec.v1.centers;
  const auto& c2 = spec.v2.centers;
  std::size_t shared = 0;
  while (shared < c1.size() && shared < c2.size() && same(c1[shared].at, c2[shared].at)) ++shared;
  for (std::size_t j = shared; j < c1.size(); ++j)
    for (std::size_t k = shared; k < c2.size(); ++k)
      if (same(c1[j].at, c2[k].at))
        fail("AssumptionViolation",
             "common zeros must be listed first and in the same order in both components");

  PotentialAnalysis a;
  for (std::size_t j = 0; j < shared; ++j) {
    a.lambda_set.push_back(c1[j].at);
    a.pbar.push_back(std::min(c1[j].exponent, c2[j].exponent));
  }
  if (shared == 0) return a;
  a.p0 = *std::max_element(a.pbar.begin(), a.pbar.end());

  auto flat = [&](const ComponentPotential& v, std::size_t j) {
    if (v.centers[j].exponent != a.p0) return 0.0;
    double g = v.modulator;
    for (std::size_t k = 0; k < v.centers.size(); ++k)
      if (k != j) g *= std::pow(distance(v.centers[j].at, v.centers[k].at), v.centers[k].exponent);
    return g;
  };
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < shared; ++j) {
    if (a.pbar[j] < a.p0) a.gamma_j.push_back(inf);
    else a.gamma_j.push_back(flat(spec.v1, j) + flat(spec.v2, j));
  }
  a.gamma = *std::min_element(a.gamma_j.begin(), a.gamma_j.end());
  for (std::size_t j = 0; j < shared; ++j)
    if (a.pbar[j] == a.p0 && a.gamma_j[j] == a.gamma) a.z_set.push_back(j);
  return a;
}

Potentials eval_potential(const PotentialSpec& spec, const Grid2D& grid) {
  spec.validate();
  Potentials p;
  p.v1.resize(grid.size());
  p.v2.resize(grid.size());
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < static_cast<Index>(grid.size()); ++k) {
    const Point x = grid.node(static_cast<std::size_t>(k));
    p.v1[k] = spec.v1(x);
    p.v2[k] = spec.v2(x);
  }
  return p;
}

Field2D Field2D::zeros(const Grid2D& grid) { return {grid, std::vector<double>(grid.size(), 0.0)}; }

double Field2D::mass() const { return kernels::dot(values, values, grid.n) * grid.cell_area(); }

void Field2D::normalize() {
  const double m = mass();
  require(m > 0 && std::isfinite(m), "cannot normalize a field with zero or non-finite mass");
  kernels::scale(values, 1.0 / std::sqrt(m), grid.n);
}

double EnergyTerms::total(const CouplingParams& p) const {
  return kinetic1 + kinetic2 + potential1 + potential2 - 0.5 * p.b1 * quartic1 -
         0.5 * p.b2 * quartic2 - p.beta * cross;
}

double EnergyTerms::component(int i, double a) const {
  return i == 1 ? kinetic1 + potential1 - 0.5 * a * quartic1
                : kinetic2 + potential2 - 0.5 * a * quartic2;
}

EnergyTerms energy_terms(Spectral& spectral, std::span<const double> u1,
                         std::span<const double> u2, const Potentials& pot) {
  const Grid2D& g = spectral.grid();
  const auto s = kernels::densities(u1, u2, pot.v1, pot.v2, g.n);
  const double w = g.cell_area();
  EnergyTerms t;
  t.kinetic1 = spectral.kinetic(u1);
  t.kinetic2 = u2.empty() ? 0.0 : spectral.kinetic(u2);
  t.potential1 = w * s.potential1;
  t.potential2 = w * s.potential2;
  t.quartic1 = w * s.quartic1;
  t.quartic2 = w * s.quartic2;
  t.cross = w * s.cross;
  t.diff2 = w * s.diff2;
  t.mass1 = w * s.mass1;
  t.mass2 = w * s.mass2;
  return t;
}

namespace {

void check_pair(const Field2D& u1, const Field2D& u2, const Potentials& pot) {
  require(u1.grid == u2.grid, "fields must share a grid");
  require(u1.values.size() == u1.grid.size() && u2.values.size() == u2.grid.size(),
          "field size does not match its grid");
  require(pot.v1.size() == u1.grid.size() && pot.v2.size() == u1.grid.size(),
          "potential arrays do not match the grid");
  for (const Field2D* u : {&u1, &u2}) {
    const double m = u->mass();
    if (!(std::abs(m - 1) <= kMassTolerance))
      fail("MassViolation", "field mass " + num(m) + " differs from 1 by more than 1e-8");
  }
}

}  // namespace

double energy(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
              const Potentials& pot) {
  check_pair(u1, u2, pot);
  Spectral sp(u1.grid);
  return energy_terms(sp, u1.values, u2.values, pot).total(params);
}

std::pair<std::vector<double>, std::vector<double>> gradient(const Field2D& u1, const Field2D& u2,
                                                             const CouplingParams& params,
                                                             const Potentials& pot) {
  check_pair(u1, u2, pot);
  const Grid2D& g = u1.grid;
  Spectral sp(g);
  std::vector<double> lap(g.size()), g1(g.size()), g2(g.size());
  sp.neg_laplacian(u1.values, lap);
  kernels::apply_hamiltonian(lap, u1.values, u2.values, pot.v1, params.b1, params.beta, g1, g.n);
  sp.neg_laplacian(u2.values, lap);
  kernels::apply_hamiltonian(lap, u2.values, u1.values, pot.v2, params.b2, params.beta, g2, g.n);
  kernels::scale(g1, 2.0, g.n);
  kernels::scale(g2, 2.0, g.n);
  return {std::move(g1), std::move(g2)};
}

namespace {

// Weight of node x_k in the trigonometric interpolant at s (period 2L, n even).
double periodic_sinc(double s, double xk, double extent, std::size_t n) {
  const double theta = std::numbers::pi * (s - xk) / extent;
  const double half = 0.5 * theta;
  const double sh = std::sin(half);
  if (std::abs(sh) < 1e-14) return 1.0;
  return std::sin(static_cast<double>(n) * half) / (static_cast<double>(n) * std::tan(half));
}

// Row i holds the weights sampling the source at lambda (x_i - c) + c; rows
// whose sample point leaves the box are zero.
std::vector<double> resample_matrix(const Grid2D& g, double lambda, double c) {
  const std::size_t n = g.n;
  std::vector<double> a(n * n, 0.0);
  const double L = g.extent;
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    const double s = lambda * (g.coordinate(static_cast<std::size_t>(i)) - c) + c;
    if (s < -L || s > L) continue;
    for (std::size_t k = 0; k < n; ++k)
      a[static_cast<std::size_t>(i) * n + k] = periodic_sinc(s, g.coordinate(k), L, n);
  }
  return a;
}

double alias_fraction(const Field2D& u, double lambda, const Point& c) {
  const Grid2D& g = u.grid;
  const std::size_t n = g.n;
  double lost = 0, total = 0;
  if (lambda > 1) {
    Spectral sp(g);
    Spectrum uhat;
    sp.forward(u.values, uhat);
    const std::size_t hc = sp.half_cols();
    const double kcut = std::numbers::pi * static_cast<double>(n) / (2 * g.extent) / lambda;
    for (std::size_t i = 0; i < n; ++i) {
      const double kx = std::abs(sp.wavenumber(i));
      for (std::size_t j = 0; j < hc; ++j) {
        const double ky = std::abs(sp.wavenumber(j));
        const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
        const double e = w * std::norm(uhat[i * hc + j]);
        total += e;
        if (kx > kcut || ky > kcut) lost += e;
      }
    }
  } else {
    // content outside the sampled window c + lambda (box - c)
    const double L = g.extent;
    const double lo0 = c[0] + lambda * (-L - c[0]), hi0 = c[0] + lambda * (L - c[0]);
    const double lo1 = c[1] + lambda * (-L - c[1]), hi1 = c[1] + lambda * (L - c[1]);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.node(k);
      const double e = u.values[k] * u.values[k];
      total += e;
      if (x[0] < lo0 || x[0] > hi0 || x[1] < lo1 || x[1] > hi1) lost += e;
    }
  }
  return total > 0 ? lost / total : 0.0;
}

}  // namespace

Field2D rescale_about(const Field2D& u, double lambda, const Point& c, double alias_tol) {
  require(lambda > 0 && std::isfinite(lambda), "rescale factor must be positive");
  if (lambda == 1.0) return u;
  const double lost = alias_fraction(u, lambda, c);
  if (lost > alias_tol)
    fail("AliasRisk", "rescale by " + num(lambda) + " would lose a fraction " +
                          num(lost) + " of the field");
  const Grid2D& g = u.grid;
  const std::size_t n = g.n;
  const std::vector<double> ax = resample_matrix(g, lambda, c[0]);
  const std::vector<double> ay = c[1] == c[0] ? ax : resample_matrix(g, lambda, c[1]);
  // T = U Ay^T, then out = lambda Ax T
  std::vector<double> t(n * n, 0.0);
#pragma omp parallel for schedule(static)
  for (Index ki = 0; ki < static_cast<Index>(n); ++ki) {
    const auto k = static_cast<std::size_t>(ki);
    const double* urow = &u.values[k * n];
    for (std::size_t j = 0; j < n; ++j) {
      const double* arow = &ay[j * n];
      double s = 0;
      for (std::size_t l = 0; l < n; ++l) s += urow[l] * arow[l];
      t[k * n + j] = s;
    }
  }
  Field2D out = Field2D::zeros(g);
#pragma omp parallel for schedule(static)
  for (Index ii = 0; ii < static_cast<Index>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    double* orow = &out.values[i * n];
    for (std::size_t k = 0; k < n; ++k) {
      const double a = ax[i * n + k];
      if (a == 0.0) continue;
      const double* trow = &t[k * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += a * trow[j];
    }
    for (std::size_t j = 0; j < n; ++j) orow[j] *= lambda;
  }
  return out;
}

double cutoff(double s) {
  s = std::abs(s);
  if (s <= 1) return 1;
  if (s >= 2) return 0;
  auto f = [](double t) { return t > 0 ? std::exp(-1 / t) : 0.0; };
  const double a = f(2 - s), b = f(s - 1);
  return a / (a + b);
}

TrialState trial_phi(const Point& x0, double tau, double cutoff_radius,
                     const townes::RadialProfile& profile, double a_star, const Grid2D& grid) {
  require(tau > 0 && cutoff_radius > 0, "tau and R must be positive");
  require(cutoff_radius * tau >= 10, "trial state needs R * tau >= 10");
  const double L = grid.extent;
  require(x0[0] - 2 * cutoff_radius >= -L && x0[0] + 2 * cutoff_radius <= L &&
              x0[1] - 2 * cutoff_radius >= -L && x0[1] + 2 * cutoff_radius <= L,
          "cut-off ball must fit inside the grid");
  TrialState t;
  t.phi = Field2D::zeros(grid);
  const double scale = tau / std::sqrt(a_star);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < static_cast<Index>(grid.size()); ++k) {
    const Point x = grid.node(static_cast<std::size_t>(k));
    const double r = distance(x, x0);
    const double chi = cutoff(r / cutoff_radius);
    t.phi.values[k] = chi == 0 ? 0.0 : scale * chi * profile.value_at(tau * r);
  }
  const double m = t.phi.mass();
  t.amplitude = 1 / std::sqrt(m);
  kernels::scale(t.phi.values, t.amplitude, grid.n);
  return t;
}

}  // namespace gpduo::fields
