#pragma once

// Descent on a product of unit L2 spheres (one per component).
//
// Directions are preconditioned Riemannian conjugate gradients (Polak-Ribiere
// with restart); the retraction is u <- (u + t d)/|u + t d|, so every iterate
// has unit mass. The line search fits a cubic to the objective and its slope
// and never accepts an increase beyond round-off.

#include <cstddef>
#include <functional>
#include <vector>

#include "gpduo/grid.hpp"

namespace gpduo::descent {

using Fields = std::vector<std::vector<double>>;

class Model {
 public:
  virtual ~Model() = default;
  // Objective at u; when grad is non-null also its unconstrained L2 gradient.
  virtual double evaluate(const Fields& u, Fields* grad) = 0;
  // Round-off scale of the objective at the last evaluation.
  virtual double noise() const = 0;
  // Applies an approximate inverse Hessian to r in place.
  virtual void precondition(const Fields& u, Fields& r) = 0;
  // Chance to re-gauge the iterate; return true if u changed.
  virtual bool regauge(Fields&) { return false; }
};

struct Options {
  std::size_t max_iters = 20000;
  double grad_tol = 1e-8;
  double first_step = 1.0;
  double floor = -1e6;  // EnergyDiverging below this
};

struct Outcome {
  double value = 0;
  double residual = 0;  // max_i |g_i - <g_i, u_i> u_i|
  std::vector<double> multipliers;  // <g_i, u_i>
  std::size_t iters = 0;
  std::vector<double> history;  // accepted objective values
};

// Runs until the residual is below grad_tol. Throws MaxItersExceeded,
// EnergyDiverging, NaNDetected, or NonConvergence (line search stalled).
Outcome run(Model& model, const Grid2D& grid, Fields& u, const Options& opts);

double inner(const Grid2D& grid, const std::vector<double>& a, const std::vector<double>& b);

}  // namespace gpduo::descent
