#include "descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gpduo/errors.hpp"
#include "gpduo/kernels.hpp"

namespace gpduo::descent {

double inner(const Grid2D& grid, const std::vector<double>& a, const std::vector<double>& b) {
  return kernels::dot(a, b, grid.n) * grid.cell_area();
}

namespace {

constexpr std::size_t kPatience = 500;

struct Point1 {
  double t = 0;
  double value = 0;
  double slope = 0;
  Fields u;
  Fields grad;
};

class Engine {
 public:
  Engine(Model& m, const Grid2D& g) : model_(m), grid_(g) {}

  // Tangent projection x <- x - <x, u> u.
  void project(const Fields& u, Fields& x) const {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double c = inner(grid_, x[i], u[i]);
      kernels::combine(1.0, x[i], -c, u[i], x[i], grid_.n);
    }
  }

  double dot(const Fields& a, const Fields& b) const {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += inner(grid_, a[i], b[i]);
    return s;
  }

  Fields retract(const Fields& u, const Fields& d, double t, std::vector<double>& norms) const {
    Fields w(u.size());
    norms.assign(u.size(), 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
      w[i].resize(u[i].size());
      kernels::combine(1.0, u[i], t, d[i], w[i], grid_.n);
      norms[i] = std::sqrt(inner(grid_, w[i], w[i]));
      kernels::scale(w[i], 1.0 / norms[i], grid_.n);
    }
    return w;
  }

  double checked(double v) const {
    if (!std::isfinite(v)) fail("NaNDetected", "objective became non-finite");
    return v;
  }

  Point1 probe(const Fields& u, const Fields& d, double t) {
    Point1 p;
    p.t = t;
    std::vector<double> norms;
    p.u = retract(u, d, t, norms);
    p.value = checked(model_.evaluate(p.u, &p.grad));
    Fields r = p.grad;
    project(p.u, r);
    p.slope = 0;
    for (std::size_t i = 0; i < u.size(); ++i) p.slope += inner(grid_, r[i], d[i]) / norms[i];
    return p;
  }

 private:
  Model& model_;
  const Grid2D& grid_;
};

// Minimizer of the cubic Hermite interpolant on [0, t] (may extrapolate).
double cubic_step(double f0, double s0, double t, double f1, double s1) {
  const double d1 = s0 + s1 - 3 * (f0 - f1) / (0 - t);
  const double rad = d1 * d1 - s0 * s1;
  if (rad < 0) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::sqrt(rad);
  return t - t * (s1 + d2 - d1) / (s1 - s0 + 2 * d2);
}

constexpr int kSlopeProbes = 30;

// Finds t with |slope(t)| <= |s0|/2 by expansion and safeguarded regula
// falsi on the slope. Falls back to the farthest probe still descending.
bool slope_search(Engine& eng, const Fields& u, const Fields& d, double s0, double limit, Point1 p,
                  Point1& best) {
  double a = 0, sa = s0;
  double b = std::numeric_limits<double>::infinity(), sb = 0;
  Point1 lo;
  bool have_lo = false;
  for (int k = 0;; ++k) {
    const bool ok = p.value <= limit;
    if (ok && std::abs(p.slope) <= 0.5 * std::abs(s0)) {
      best = std::move(p);
      return true;
    }
    if (ok && p.slope < 0) {
      a = p.t;
      sa = p.slope;
      lo = std::move(p);
      have_lo = true;
    } else {
      b = p.t;
      sb = ok ? p.slope : 0;
    }
    if (k + 1 >= kSlopeProbes) break;
    double t;
    if (std::isfinite(b)) {
      t = sb > 0 ? a - sa * (b - a) / (sb - sa) : 0.5 * (a + b);
      t = std::clamp(t, a + 0.1 * (b - a), b - 0.1 * (b - a));
    } else {
      // secant through (0, s0) and (a, sa), kept within [1.5a, 4a]
      t = sa > s0 ? a * s0 / (s0 - sa) : 4 * a;
      t = std::clamp(t, 1.5 * a, 4 * a);
    }
    p = eng.probe(u, d, t);
  }
  if (have_lo) best = std::move(lo);
  return have_lo;
}

}  // namespace

Outcome run(Model& model, const Grid2D& grid, Fields& u, const Options& opts) {
  Engine eng(model, grid);
  Outcome out;
  const std::size_t nc = u.size();

  Fields grad;
  double value = eng.checked(model.evaluate(u, &grad));
  out.history.push_back(value);
  Fields dir, z_prev, r_prev;
  double rz_prev = 0;
  double step = opts.first_step;
  int stalls = 0;
  double best_residual = std::numeric_limits<double>::infinity();
  std::size_t best_iter = 0;

  for (std::size_t it = 0;; ++it) {
    Fields r = grad;
    eng.project(u, r);
    out.residual = 0;
    for (std::size_t i = 0; i < nc; ++i)
      out.residual = std::max(out.residual, std::sqrt(inner(grid, r[i], r[i])));
    out.value = value;
    out.iters = it;
    if (out.residual < opts.grad_tol) break;
    if (out.residual < 0.99 * best_residual) {
      best_residual = out.residual;
      best_iter = it;
    } else if (it - best_iter > kPatience) {
      fail("NonConvergence", "no progress below residual " + num(best_residual));
    }
    if (it >= opts.max_iters)
      fail("MaxItersExceeded", "descent stopped after " + std::to_string(it) +
                                   " iterations at residual " + num(out.residual));

    Fields z = r;
    model.precondition(u, z);
    eng.project(u, z);
    const double rz = eng.dot(r, z);
    bool restart = dir.empty() || rz_prev <= 0;
    double gamma = 0;
    if (!restart) {
      Fields zp = z_prev;
      eng.project(u, zp);
      gamma = std::max(0.0, (rz - eng.dot(r, zp)) / rz_prev);
    }
    Fields d(nc);
    for (std::size_t i = 0; i < nc; ++i) {
      d[i].resize(u[i].size());
      if (restart || gamma == 0) {
        kernels::combine(-1.0, z[i], 0.0, z[i], d[i], grid.n);
      } else {
        std::vector<double> moved = dir[i];
        kernels::combine(-1.0, z[i], gamma, moved, d[i], grid.n);
      }
    }
    if (!restart && gamma != 0) {
      eng.project(u, d);
      if (eng.dot(r, d) >= 0) {
        for (std::size_t i = 0; i < nc; ++i) kernels::combine(-1.0, z[i], 0.0, z[i], d[i], grid.n);
      }
    }
    const double s0 = eng.dot(r, d);
    const double tol = 4 * model.noise();

    // Line search: trial step, cubic refinement, then halving on failure.
    // When the trial changes the objective by less than round-off, only the
    // slope carries information and the search runs on it alone.
    Point1 best;
    best.value = value;
    bool accepted = false;
    Point1 trial = eng.probe(u, d, step);
    if (std::abs(trial.value - value) <= tol) {
      accepted = slope_search(eng, u, d, s0, value + tol, std::move(trial), best);
    } else {
      if (trial.value <= value + tol) {
        best = trial;
        accepted = true;
      }
      double tc = cubic_step(value, s0, trial.t, trial.value, trial.slope);
      if (std::isfinite(tc) && tc > 0) {
        tc = std::min(tc, 4 * trial.t);
        if (std::abs(tc - trial.t) > 1e-3 * trial.t) {
          Point1 c = eng.probe(u, d, tc);
          if (c.value <= value + tol && (!accepted || c.value < best.value)) {
            best = std::move(c);
            accepted = true;
          }
        }
      }
      double t = std::min(trial.t, std::isfinite(tc) && tc > 0 ? tc : trial.t);
      for (int halvings = 0; !accepted && halvings < 40; ++halvings) {
        t *= 0.5;
        Point1 h = eng.probe(u, d, t);
        if (h.value <= value + tol) {
          best = std::move(h);
          accepted = true;
        }
      }
    }
    if (!accepted) {
      if (++stalls > 3)
        fail("NonConvergence",
             "line search stalled at residual " + num(out.residual));
      dir.clear();
      rz_prev = 0;
      step = opts.first_step;
      continue;
    }
    stalls = 0;
    if (best.value < opts.floor)
      fail("EnergyDiverging", "objective fell below the floor " + num(opts.floor));
    step = std::max(best.t, 1e-6 * opts.first_step);
    u = std::move(best.u);
    grad = std::move(best.grad);
    value = best.value;
    out.history.push_back(value);
    dir = std::move(d);
    z_prev = std::move(z);
    rz_prev = rz;
    if (model.regauge(u)) {
      value = eng.checked(model.evaluate(u, &grad));
      dir.clear();
      rz_prev = 0;
    }
  }
  out.multipliers.resize(nc);
  for (std::size_t i = 0; i < nc; ++i) out.multipliers[i] = inner(grid, grad[i], u[i]);
  return out;
}

}  // namespace gpduo::descent
