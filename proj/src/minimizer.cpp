#include "gpduo/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "descent.hpp"
#include "gpduo/errors.hpp"
#include "gpduo/kernels.hpp"

namespace gpduo::minimizer {

namespace {

using descent::Fields;

constexpr double kNoise = 1e-14;
constexpr double kGaugeAliasTol = 1e-6;  // regauge resampling loss allowed mid-run
constexpr double kMaxGaugeDrift = 0.5;

// Two-component (or single, when nc == 1) energy on the unit spheres.
class EnergyModel : public descent::Model {
 public:
  EnergyModel(const Grid2D& g, std::vector<double> b, double beta,
              std::vector<const std::vector<double>*> v)
      : grid_(g), sp_(g), b_(std::move(b)), beta_(beta), v_(std::move(v)) {
    sigma_.assign(b_.size(), 1.0);
  }

  double evaluate(const Fields& u, Fields* grad) override {
    const std::size_t nc = u.size();
    const std::vector<double> empty;
    const auto& u2 = nc > 1 ? u[1] : empty;
    const auto& v2 = nc > 1 ? *v_[1] : empty;
    const auto s = kernels::densities(u[0], u2, *v_[0], v2, grid_.n);
    const double w = grid_.cell_area();
    terms_ = {};
    terms_.potential1 = w * s.potential1;
    terms_.potential2 = w * s.potential2;
    terms_.quartic1 = w * s.quartic1;
    terms_.quartic2 = w * s.quartic2;
    terms_.cross = w * s.cross;
    terms_.diff2 = w * s.diff2;
    terms_.mass1 = w * s.mass1;
    terms_.mass2 = w * s.mass2;
    if (grad) grad->resize(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      sp_.forward(u[i], uhat_);
      const double kin = sp_.kinetic(uhat_);
      (i == 0 ? terms_.kinetic1 : terms_.kinetic2) = kin;
      sigma_[i] = std::max(kin + (i == 0 ? terms_.potential1 : terms_.potential2), 1e-2);
      if (grad) {
        auto& g = (*grad)[i];
        g.resize(grid_.size());
        lap_.resize(grid_.size());
        sp_.neg_laplacian(uhat_, lap_);
        const auto& other = nc > 1 ? u[1 - i] : empty;
        kernels::apply_hamiltonian(lap_, u[i], other, *v_[i], b_[i], nc > 1 ? beta_ : 0.0, g,
                                   grid_.n);
        kernels::scale(g, 2.0, grid_.n);
      }
    }
    const double e = terms_.kinetic1 + terms_.kinetic2 + terms_.potential1 + terms_.potential2 -
                     0.5 * b_[0] * terms_.quartic1 - (nc > 1 ? 0.5 * b_[1] * terms_.quartic2 : 0) -
                     (nc > 1 ? beta_ * terms_.cross : 0);
    scale_ = terms_.kinetic1 + terms_.kinetic2 + terms_.potential1 + terms_.potential2 +
             b_[0] * terms_.quartic1 + (nc > 1 ? b_[1] * terms_.quartic2 + beta_ * terms_.cross : 0);
    return e;
  }

  double noise() const override { return kNoise * scale_; }

  // 1/2 S (sigma - Lap)^{-1} S with S = sqrt(sigma / (sigma + V)).
  void precondition(const Fields&, Fields& r) override {
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double sigma = sigma_[i];
      const auto& v = *v_[i];
      scaled_.resize(grid_.size());
      for (std::size_t k = 0; k < grid_.size(); ++k)
        scaled_[k] = r[i][k] * std::sqrt(sigma / (sigma + v[k]));
      sp_.solve_shifted(scaled_, sigma, r[i]);
      for (std::size_t k = 0; k < grid_.size(); ++k)
        r[i][k] *= 0.5 * std::sqrt(sigma / (sigma + v[k]));
    }
  }

  const fields::EnergyTerms& terms() const { return terms_; }

 private:
  Grid2D grid_;
  Spectral sp_;
  std::vector<double> b_;
  double beta_;
  std::vector<const std::vector<double>*> v_;
  std::vector<double> sigma_;
  fields::EnergyTerms terms_;
  double scale_ = 1;
  Spectrum uhat_;
  std::vector<double> lap_, scaled_;
};

// Ratio kinetic / weighted quartic on unit spheres, V = 0; gauge kinetic = 1.
class QuotientModel : public descent::Model {
 public:
  QuotientModel(const Grid2D& g, const CouplingParams& p) : grid_(g), sp_(g), p_(p) {}

  double evaluate(const Fields& u, Fields* grad) override {
    const std::vector<double> empty;
    const auto s = kernels::densities(u[0], u[1], empty, empty, grid_.n);
    const double w = grid_.cell_area();
    numer_ = w * (0.5 * p_.b1 * s.quartic1 + 0.5 * p_.b2 * s.quartic2 + p_.beta * s.cross);
    if (grad) grad->resize(2);
    kinetic_ = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      sp_.forward(u[i], uhat_);
      kin_[i] = sp_.kinetic(uhat_);
      kinetic_ += kin_[i];
      if (grad) {
        lap_[i].resize(grid_.size());
        sp_.neg_laplacian(uhat_, lap_[i]);
        (*grad)[i].resize(grid_.size());
      }
    }
    const double ratio = kinetic_ / numer_;
    if (grad) {
      for (std::size_t i = 0; i < 2; ++i) {
        kernels::apply_hamiltonian(lap_[i], u[i], u[1 - i], empty, ratio * (i == 0 ? p_.b1 : p_.b2),
                                   ratio * p_.beta, (*grad)[i], grid_.n);
        kernels::scale((*grad)[i], 2.0 / numer_, grid_.n);
      }
    }
    return ratio;
  }

  double noise() const override { return kNoise * kinetic_ / numer_; }

  void precondition(const Fields&, Fields& r) override {
    for (std::size_t i = 0; i < 2; ++i) {
      const double sigma = std::max(kin_[i], 1e-2);
      sp_.solve_shifted(r[i], sigma, r[i]);
      kernels::scale(r[i], 0.5 * numer_, grid_.n);
    }
  }

  // Keep the kinetic sum within 1% of one by a common rescaling about the
  // centre of mass of the pair.
  bool regauge(Fields& u) override {
    if (std::abs(kinetic_ - 1) <= 0.01) return false;
    const double lambda = 1 / std::sqrt(kinetic_);
    Point c{0, 0};
    double m = 0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double d = u[i][k] * u[i][k];
        const Point x = grid_.node(k);
        c[0] += d * x[0];
        c[1] += d * x[1];
        m += d;
      }
    c = {c[0] / m, c[1] / m};
    Fields w(2);
    for (std::size_t i = 0; i < 2; ++i) {
      Field2D f{grid_, u[i]};
      try {
        f = fields::rescale_about(f, lambda, c, kGaugeAliasTol);
      } catch (const Error& e) {
        if (e.kind() != "AliasRisk") throw;
        // The quotient is scale invariant: tolerate a moderate gauge drift
        // rather than resample a pair that fills the box.
        if (std::abs(kinetic_ - 1) <= kMaxGaugeDrift) return false;
        fail("NonConvergence", "minimizing pair spreads beyond the box (" + std::string(e.what()) +
                                   "); enlarge the grid extent");
      }
      f.normalize();
      w[i] = std::move(f.values);
    }
    u = std::move(w);
    return true;
  }

 private:
  Grid2D grid_;
  Spectral sp_;
  CouplingParams p_;
  double numer_ = 1, kinetic_ = 1;
  double kin_[2] = {1, 1};
  Spectrum uhat_;
  std::vector<double> lap_[2];
};

Field2D gaussian_field(const Grid2D& g, const Point& c, double wx, double wy) {
  Field2D f = Field2D::zeros(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const double dx = (x[0] - c[0]) / wx, dy = (x[1] - c[1]) / wy;
    f.values[k] = std::exp(-0.5 * (dx * dx + dy * dy));
  }
  f.normalize();
  return f;
}

std::pair<Field2D, Field2D> initial_state(const Grid2D& grid, const FlowConfig& cfg) {
  switch (cfg.init) {
    case InitKind::Gaussian: {
      Field2D f = gaussian_field(grid, cfg.init_center, cfg.init_width, cfg.init_width);
      return {f, f};
    }
    case InitKind::RandomGaussian: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> shift(-1, 1), width(0.5, 1.5);
      auto draw = [&] {
        const Point c{cfg.init_center[0] + shift(rng), cfg.init_center[1] + shift(rng)};
        const double wx = width(rng) * cfg.init_width, wy = width(rng) * cfg.init_width;
        return gaussian_field(grid, c, wx, wy);
      };
      Field2D a = draw();
      Field2D b = draw();
      return {std::move(a), std::move(b)};
    }
    case InitKind::TownesSeeded: {
      const auto& s = cfg.townes;
      require(s.profile != nullptr && s.a_star > 0, "Townes-seeded start needs a profile");
      const double room = grid.extent - std::max(std::abs(s.center[0]), std::abs(s.center[1]));
      const double r = std::max(room / 2.2, 10.0 / s.tau);
      Field2D f = fields::trial_phi(s.center, s.tau, r, *s.profile, s.a_star, grid).phi;
      return {f, f};
    }
    case InitKind::WarmStart: {
      require(cfg.warm != nullptr, "warm start needs a field pair");
      require(cfg.warm->first.grid == grid && cfg.warm->second.grid == grid,
              "warm start fields live on a different grid");
      Field2D a = cfg.warm->first, b = cfg.warm->second;
      a.normalize();
      b.normalize();
      return {std::move(a), std::move(b)};
    }
  }
  fail("InvalidArgument", "unknown initial state");
}

descent::Options options(const FlowConfig& cfg) {
  descent::Options o;
  o.max_iters = cfg.max_iters;
  o.grad_tol = cfg.grad_tol;
  o.first_step = cfg.dt;
  o.floor = cfg.energy_floor;
  return o;
}

// beta = 0 is allowed here: the decoupled problem is a useful reduction.
void check_couplings(const CouplingParams& p) {
  require(std::isfinite(p.b1) && std::isfinite(p.b2) && std::isfinite(p.beta),
          "coupling parameters must be finite");
  require(p.b1 > 0 && p.b2 > 0 && p.beta >= 0, "need b1, b2 > 0 and beta >= 0");
}

// Sign gauge: the energy is even in each component, so pick the positive
// branch without touching round-off level negative values in the tails.
void make_nonnegative(std::vector<double>& u) {
  double s = 0;
  for (double x : u) s += x;
  if (s < 0)
    for (double& x : u) x = -x;
}

}  // namespace

void FlowConfig::validate() const {
  require(dt > 0, "dt must be positive");
  require(grad_tol > 0, "grad_tol must be positive");
  require(max_iters > 0, "max_iters must be positive");
  require(init_width > 0, "init_width must be positive");
}

Point refine_maximum(const Field2D& u, std::size_t* grid_index) {
  const Grid2D& g = u.grid;
  const auto am = kernels::argmax(u.values, g.n);
  if (grid_index) *grid_index = am.index;
  const Point start = g.node(am.index);
  Spectral sp(g);
  Spectrum uhat;
  sp.forward(u.values, uhat);
  Point p = start;
  const double h = g.spacing();
  for (int it = 0; it < 20; ++it) {
    const auto d = sp.evaluate(uhat, p);
    const double det = d.dxx * d.dyy - d.dxy * d.dxy;
    if (!(det > 0) || d.dxx >= 0) break;
    double sx = -(d.dyy * d.dx - d.dxy * d.dy) / det;
    double sy = -(d.dxx * d.dy - d.dxy * d.dx) / det;
    const double len = std::hypot(sx, sy);
    if (len > 0.5 * h) {
      sx *= 0.5 * h / len;
      sy *= 0.5 * h / len;
    }
    p = {p[0] + sx, p[1] + sy};
    if (std::hypot(p[0] - start[0], p[1] - start[1]) > h) return start;
    if (len < 1e-13 * std::max(1.0, h)) break;
  }
  return p;
}

MinimizeResult minimize(const CouplingParams& params, const PotentialSpec& pot, const Grid2D& grid,
                        const FlowConfig& cfg) {
  return minimize(params, fields::eval_potential(pot, grid), grid, cfg);
}

MinimizeResult minimize(const CouplingParams& params, const Potentials& pot, const Grid2D& grid,
                        const FlowConfig& cfg) {
  check_couplings(params);
  cfg.validate();
  require(pot.v1.size() == grid.size() && pot.v2.size() == grid.size(),
          "potential arrays do not match the grid");
  auto [a, b] = initial_state(grid, cfg);
  Fields u{std::move(a.values), std::move(b.values)};
  EnergyModel model(grid, {params.b1, params.b2}, params.beta, {&pot.v1, &pot.v2});
  const auto outcome = descent::run(model, grid, u, options(cfg));

  MinimizeResult r;
  make_nonnegative(u[0]);
  make_nonnegative(u[1]);
  r.u1 = {grid, std::move(u[0])};
  r.u2 = {grid, std::move(u[1])};
  Fields final_u{r.u1.values, r.u2.values};
  Fields grad;
  r.energy = model.evaluate(final_u, &grad);
  r.terms = model.terms();
  r.mu1 = 0.5 * descent::inner(grid, grad[0], final_u[0]);
  r.mu2 = 0.5 * descent::inner(grid, grad[1], final_u[1]);
  r.residual = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<double> res(grid.size());
    kernels::combine(1.0, grad[i], -2 * (i == 0 ? r.mu1 : r.mu2), final_u[i], res, grid.n);
    r.residual = std::max(r.residual, std::sqrt(descent::inner(grid, res, res)));
  }
  r.iters = outcome.iters;
  r.history = outcome.history;
  r.l4_1 = r.terms.quartic1;
  r.l4_2 = r.terms.quartic2;
  r.diff2 = r.terms.diff2;
  r.max1 = refine_maximum(r.u1, &r.max_index1);
  r.max2 = refine_maximum(r.u2, &r.max_index2);
  return r;
}

SingleResult minimize_single(double a, const std::vector<double>& potential, const Grid2D& grid,
                             const FlowConfig& cfg) {
  require(a > 0, "interaction strength must be positive");
  cfg.validate();
  require(potential.size() == grid.size(), "potential array does not match the grid");
  auto init = initial_state(grid, cfg);
  Fields u{std::move(init.first.values)};
  EnergyModel model(grid, {a}, 0.0, {&potential});
  const auto outcome = descent::run(model, grid, u, options(cfg));
  SingleResult r;
  make_nonnegative(u[0]);
  r.u = {grid, u[0]};
  Fields grad;
  r.energy = model.evaluate(u, &grad);
  r.mu = 0.5 * descent::inner(grid, grad[0], u[0]);
  std::vector<double> res(grid.size());
  kernels::combine(1.0, grad[0], -2 * r.mu, u[0], res, grid.n);
  r.residual = std::sqrt(descent::inner(grid, res, res));
  r.iters = outcome.iters;
  r.l4 = model.terms().quartic1;
  return r;
}

Multipliers multipliers(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
                        const Potentials& pot) {
  const auto [g1, g2] = fields::gradient(u1, u2, params, pot);
  const Grid2D& g = u1.grid;
  Multipliers m;
  m.mu1 = 0.5 * descent::inner(g, g1, u1.values);
  m.mu2 = 0.5 * descent::inner(g, g2, u2.values);
  Spectral sp(g);
  const auto t = fields::energy_terms(sp, u1.values, u2.values, pot);
  // int (u1^2 - u2^2) u_i^2 = quartic_i - cross (i = 1), cross - quartic_2 (i = 2)
  const double a1 = params.a1(), a2 = params.a2();
  m.formula1 = t.component(1, a1) - 0.5 * a1 * t.quartic1 + params.beta * (t.quartic1 - t.cross);
  m.formula2 = t.component(2, a2) - 0.5 * a2 * t.quartic2 - params.beta * (t.cross - t.quartic2);
  return m;
}

QuotientResult estimate_gn_quotient_pair(const CouplingParams& params, const Grid2D& grid,
                                         const FlowConfig& cfg) {
  params.validate();
  cfg.validate();
  // Gaussian pair with kinetic sum one: each has kinetic 1/w^2 = 1/2.
  const double w = std::sqrt(2.0);
  Field2D a = gaussian_field(grid, {0, 0}, w, w);
  Fields u{a.values, a.values};
  QuotientModel model(grid, params);
  descent::Options o = options(cfg);
  o.floor = 0;
  descent::Outcome outcome;
  try {
    outcome = descent::run(model, grid, u, o);
  } catch (const Error& e) {
    if (e.kind() == "MaxItersExceeded" || e.kind() == "NonConvergence")
      fail("NonConvergence", std::string("quotient estimate: ") + e.what());
    throw;
  }
  QuotientResult r;
  r.value = outcome.value;
  r.residual = outcome.residual;
  r.iters = outcome.iters;
  r.u1 = {grid, std::move(u[0])};
  r.u2 = {grid, std::move(u[1])};
  make_nonnegative(r.u1.values);
  make_nonnegative(r.u2.values);
  return r;
}

double estimate_gn_quotient(const CouplingParams& params, const Grid2D& grid, const FlowConfig& cfg) {
  return estimate_gn_quotient_pair(params, grid, cfg).value;
}

double scaled_energy(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
                     const PotentialSpec& pot, double lambda) {
  require(lambda > 0, "lambda must be positive");
  const Grid2D& g = u1.grid;
  Spectral sp(g);
  const std::vector<double> empty;
  const auto t = fields::energy_terms(sp, u1.values, u2.values, {empty, empty});
  double pot_sum = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.node(k);
    const Point y{x[0] / lambda, x[1] / lambda};
    pot_sum += pot.v1(y) * u1.values[k] * u1.values[k] + pot.v2(y) * u2.values[k] * u2.values[k];
  }
  const double quartic = 0.5 * params.b1 * t.quartic1 + 0.5 * params.b2 * t.quartic2 +
                         params.beta * t.cross;
  return lambda * lambda * (t.kinetic1 + t.kinetic2 - quartic) + pot_sum * g.cell_area();
}

EscapeResult scaling_escape_test(const CouplingParams& params, const PotentialSpec& pot,
                                 const Grid2D& grid, const std::vector<double>& lambdas,
                                 const FlowConfig& cfg) {
  require(lambdas.size() >= 2, "need at least two scale factors");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    require(lambdas[i] > lambdas[i - 1], "scale factors must increase");
  auto seed = estimate_gn_quotient_pair(params, grid, cfg);
  // compact support: cut off at a quarter of the box
  const double radius = grid.extent / 4;
  for (Field2D* f : {&seed.u1, &seed.u2}) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Point x = grid.node(k);
      f->values[k] *= fields::cutoff(std::hypot(x[0], x[1]) / radius);
    }
    f->normalize();
  }
  EscapeResult r;
  r.lambdas = lambdas;
  for (double l : lambdas) r.energies.push_back(scaled_energy(seed.u1, seed.u2, params, pot, l));
  // eventually strictly decreasing: over the second half of the grid
  const std::size_t start = r.energies.size() / 2;
  bool decreasing = true;
  for (std::size_t i = std::max<std::size_t>(start, 1); i < r.energies.size(); ++i)
    decreasing = decreasing && r.energies[i] < r.energies[i - 1];
  r.verdict = decreasing && r.energies.back() < -10 * std::abs(r.energies.front());
  return r;
}

UniquenessResult uniqueness_probe(const CouplingParams& params, const PotentialSpec& pot,
                                  const Grid2D& grid, const FlowConfig& cfg, std::size_t n_starts) {
  require(n_starts >= 1, "need at least one start");
  const auto v = fields::eval_potential(pot, grid);
  std::vector<MinimizeResult> runs;
  UniquenessResult r;
  for (std::size_t s = 0; s < n_starts; ++s) {
    FlowConfig c = cfg;
    c.init = InitKind::RandomGaussian;
    c.seed = cfg.seed + s;
    runs.push_back(minimize(params, v, grid, c));
    r.energies.push_back(runs.back().energy);
  }
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      double d = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double e1 = runs[i].u1.values[k] - runs[j].u1.values[k];
        const double e2 = runs[i].u2.values[k] - runs[j].u2.values[k];
        d += e1 * e1 + e2 * e2;
      }
      r.max_pairwise_distance = std::max(r.max_pairwise_distance, std::sqrt(d * grid.cell_area()));
    }
  return r;
}

}  // namespace gpduo::minimizer
