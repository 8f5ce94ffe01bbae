#pragma once

// Ground state Q of -Q'' - Q'/r + Q - Q^3 = 0 on [0, inf) and the constants
// derived from it: a* = ||Q||_2^2, the kinetic and quartic integrals, and the
// radial moments int |x|^p Q^2 dx that fix the blow-up profile scale.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace gpduo::townes {

struct RadialGrid {
  double r_max = 0;
  std::size_t n_nodes = 0;
  std::vector<double> nodes;

  static RadialGrid uniform(double r_max, std::size_t n_nodes);
  double spacing() const { return r_max / static_cast<double>(n_nodes - 1); }
};

struct RadialProfile {
  RadialGrid grid;
  std::vector<double> values;

  // Q at an arbitrary radius: 8-point Lagrange interpolation using the even
  // extension at r = 0 and the K0 asymptote beyond r_max.
  double value_at(double r) const;
  // Q' at the nodes by eighth-order central differences.
  std::vector<double> derivative() const;
  std::vector<double> second_derivative() const;
  // Checks the stored invariants (positive, decreasing, tail, uniform nodes).
  void validate() const;
};

struct TownesConstants {
  double a_star = 0;
  double q0 = 0;
  double kinetic = 0;
  double l4 = 0;
  std::map<double, double> moments;  // p -> int |x|^p Q^2 dx

  // Throws MissingMoment when p was not computed.
  double moment(double p) const;
};

inline constexpr double kDefaultMomentOrders[] = {0, 1, 2, 3, 4, 6};

RadialProfile solve_townes(double r_max, std::size_t n_nodes, double amp_tol);

TownesConstants compute_constants(const RadialProfile& profile,
                                  std::span<const double> moment_orders = kDefaultMomentOrders);

// (p0 * gamma / 4 * M_p0)^(1 / (p0 + 2))
double lambda_star(double p0, double gamma, const TownesConstants& constants);

// (2 p0 + 4) / (p0 a*) * (p0 gamma M_p0 / 4)^(2 / (p0 + 2))
double limit_constant(double p0, double gamma, const TownesConstants& constants);

// Least-squares slope of log Q + log(r)/2 against r on [r_max/2, 3 r_max/4].
double decay_slope(const RadialProfile& profile);
inline bool decay_slope_in_contract(double slope) { return slope >= -1.02 && slope <= -0.98; }

// Sup norm of Q'' + Q'/r - Q + Q^3 over the nodes, derivatives by finite
// differences.
double ode_residual(const RadialProfile& profile);

// Integral of f over [0, r_max] on uniform nodes, sixth-order Gregory rule.
double gregory(std::span<const double> f, double h);

}  // namespace gpduo::townes
