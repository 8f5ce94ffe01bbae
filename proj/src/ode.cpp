#include "gpduo/ode.hpp"

#include <algorithm>
#include <cmath>

#include "gpduo/errors.hpp"

namespace gpduo::ode {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (std::size_t i = 0; i < kDim; ++i) {
    double s = 0;
    for (const auto& [c, k] : terms) s += c * (*k)[i];
    out[i] += h * s;
  }
  return out;
}

}  // namespace

Outcome integrate(const Rhs& f, double t0, const State& y0, double t1, double h_guess,
                  const Options& opts, const StepObserver& observer) {
  Outcome out;
  out.t = t0;
  out.y = y0;
  double h = std::min(h_guess > 0 ? h_guess : (t1 - t0), t1 - t0);
  State k1 = f(t0, y0);
  while (out.t < t1) {
    if (out.steps >= opts.max_steps) fail("NonConvergence", "ODE step budget exhausted");
    bool last = false;
    if (out.t + h >= t1) {
      h = t1 - out.t;
      last = true;
    }
    const double t = out.t;
    const State& y = out.y;
    const State k2 = f(t + c2 * h, axpy(y, h, {{a21, &k1}}));
    const State k3 = f(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const State k4 = f(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 = f(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 =
        f(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = f(t + h, y5);
    double err = 0;
    for (std::size_t i = 0; i < kDim; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) fail("NonConvergence", "non-finite ODE state");
    if (err <= 1.0) {
      out.t = last ? t1 : t + h;
      out.y = y5;
      k1 = k7;  // FSAL
      ++out.steps;
      const double grow = err == 0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      out.h_next = h * grow;
      if (observer && !observer(out.t, out.y)) {
        out.stopped = true;
        return out;
      }
      if (!last) h = out.h_next;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < opts.h_min) fail("NonConvergence", "ODE step size underflow");
    }
  }
  if (out.h_next == 0) out.h_next = h;
  return out;
}

}  // namespace gpduo::ode
