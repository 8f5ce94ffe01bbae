#pragma once

// Closed-form side of the existence theory: the coupling triple, the region
// classification, the auxiliary ratio f(t) and its infimum, l(t), and the
// analytic bounds on the quotient O(b1, b2, beta).

#include <limits>
#include <string>

namespace gpduo::criteria {

struct CouplingParams {
  double b1 = 0;
  double b2 = 0;
  double beta = 0;

  double a1() const { return b1 + beta; }
  double a2() const { return b2 + beta; }
  // Throws InvalidArgument unless b1, b2, beta are all positive and finite.
  void validate() const;
};

enum class Region { Existence, NoMinimizer, BorderlineUnequal, SegmentEqualB, Indeterminate };

const char* to_string(Region r);

struct RegionLabel {
  Region tag = Region::Indeterminate;
  std::string detail;
};

struct QuotientBounds {
  double lower = 0;
  double upper = 0;
};

struct FInf {
  double t_min = 0;  // 0 or +inf when a boundary limit wins
  double value = 0;
};

struct LipschitzGap {
  double lhs = 0;
  double rhs = 0;
};

inline constexpr double kDefaultBand = 1e-12;  // relative to a*

// (a*/2)(1 + t^2) / (b1/2 + (b2/2) t^2 + beta t), t > 0
double f_ratio(const CouplingParams& p, double a_star, double t);
double f_ratio_derivative(const CouplingParams& p, double a_star, double t);

FInf f_inf(const CouplingParams& p, double a_star);

// (t^2 + t) / ((b2/2) t^2 + beta t + b1/2), t >= 0
double l_func(const CouplingParams& p, double t);

RegionLabel classify(const CouplingParams& p, double a_star, double band = kDefaultBand);

QuotientBounds quotient_bounds(const CouplingParams& p, double a_star);

// lhs = |1/o_p - 1/o_q| for caller-supplied quotient estimates,
// rhs = (3/a*) |p - q|.
LipschitzGap lipschitz_gap(const CouplingParams& p, const CouplingParams& q, double a_star,
                           double o_p, double o_q);

}  // namespace gpduo::criteria
