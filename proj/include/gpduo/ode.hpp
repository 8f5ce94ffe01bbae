#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

#include <array>
#include <cstddef>
#include <functional>

namespace gpduo::ode {

constexpr std::size_t kDim = 2;
using State = std::array<double, kDim>;
using Rhs = std::function<State(double, const State&)>;
// Called after each accepted step; return false to stop early.
using StepObserver = std::function<bool(double, const State&)>;

struct Options {
  double rtol = 1e-12;
  double atol = 1e-14;
  double h_min = 1e-14;
  std::size_t max_steps = 1000000;
};

struct Outcome {
  double t = 0;
  State y{};
  double h_next = 0;  // suggested size for the next call
  std::size_t steps = 0;
  bool stopped = false;  // observer asked to stop
};

// Integrates from t0 to t1 (t1 > t0), ending exactly on t1 unless stopped.
Outcome integrate(const Rhs& f, double t0, const State& y0, double t1, double h_guess,
                  const Options& opts, const StepObserver& observer = {});

}  // namespace gpduo::ode
