#pragma once

// Test-only Townes oracle, independent of the library solver: fixed-step RK4
// shooting from both ends (series start at the origin, K0 start far out),
// Newton on (Q(0), tail amplitude) to match value and slope at r = 3, then
// Richardson extrapolation over two step sizes.

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

struct TownesRef {
  double q0;
  double a_star;
  double m2;
};

namespace detail {

using V = std::array<double, 2>;

inline V rhs(double r, V y) { return {y[1], -y[1] / r + y[0] - y[0] * y[0] * y[0]}; }

// Integrates y from r0 to r1 in m equal RK4 steps; mass accumulates
// int Q^2 r dr and m2 int Q^2 r^3 dr by Simpson on the step nodes.
inline V rk4(V y, double r0, double r1, int m, double* mass, double* m2) {
  const double h = (r1 - r0) / m;
  std::vector<double> f0(m + 1), f2(m + 1);
  auto rec = [&](int k, double r, V s) {
    f0[k] = s[0] * s[0] * r;
    f2[k] = s[0] * s[0] * r * r * r;
  };
  rec(0, r0, y);
  double r = r0;
  for (int k = 0; k < m; ++k) {
    const V k1 = rhs(r, y);
    const V k2 = rhs(r + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    const V k3 = rhs(r + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    const V k4 = rhs(r + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    for (int i = 0; i < 2; ++i) y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    r = r0 + (k + 1) * h;
    rec(k + 1, r, y);
  }
  if (mass) {
    double s0 = f0[0] + f0[m], s2 = f2[0] + f2[m];
    for (int k = 1; k < m; ++k) {
      s0 += f0[k] * ((k % 2) ? 4 : 2);
      s2 += f2[k] * ((k % 2) ? 4 : 2);
    }
    *mass += std::abs(s0 * h / 3);
    *m2 += std::abs(s2 * h / 3);
  }
  return y;
}

inline TownesRef solve(int per_unit) {
  const double r0 = 1e-4, rj = 3.0, R = 30.0;
  const int mf = 2 * static_cast<int>((rj - r0) * per_unit / 2);
  const int mb = 2 * static_cast<int>((R - rj) * per_unit / 2);
  auto fwd = [&](double q0, double* ms, double* m2) {
    const double c = (q0 - q0 * q0 * q0) / 4;
    return rk4({q0 + c * r0 * r0, 2 * c * r0}, r0, rj, mf, ms, m2);
  };
  auto bwd = [&](double c, double* ms, double* m2) {
    const double k0 = std::cyl_bessel_k(0.0, R), k1 = std::cyl_bessel_k(1.0, R);
    return rk4({c * k0, -c * k1}, R, rj, mb, ms, m2);
  };
  auto mismatch = [&](double q0, double c) {
    const V a = fwd(q0, nullptr, nullptr), b = bwd(c, nullptr, nullptr);
    return V{a[0] - b[0], a[1] - b[1]};
  };
  double q0 = 2.2, c = 3.5;
  for (int it = 0; it < 30; ++it) {
    const V g = mismatch(q0, c);
    const double dq = 1e-7, dc = 1e-7;
    const V gq = mismatch(q0 + dq, c), gc = mismatch(q0, c + dc);
    const double j00 = (gq[0] - g[0]) / dq, j10 = (gq[1] - g[1]) / dq;
    const double j01 = (gc[0] - g[0]) / dc, j11 = (gc[1] - g[1]) / dc;
    const double det = j00 * j11 - j01 * j10;
    const double sq = (g[0] * j11 - g[1] * j01) / det;
    const double sc = (j00 * g[1] - j10 * g[0]) / det;
    q0 -= sq;
    c -= sc;
    if (std::abs(sq) < 1e-15 && std::abs(sc) < 1e-15) break;
  }
  double mass = 0, m2 = 0;
  fwd(q0, &mass, &m2);
  bwd(c, &mass, &m2);
  // Core disc r < r0 where Q is flat; the region r > R is negligible.
  mass += q0 * q0 * r0 * r0 / 2;
  const double two_pi = 2 * M_PI;
  return {q0, two_pi * mass, two_pi * m2};
}

}  // namespace detail

inline TownesRef townes_reference() {
  const TownesRef a = detail::solve(100);
  const TownesRef b = detail::solve(200);
  auto rich = [](double coarse, double fine) { return fine + (fine - coarse) / 15.0; };
  return {rich(a.q0, b.q0), rich(a.a_star, b.a_star), rich(a.m2, b.m2)};
}

}  // namespace oracle
