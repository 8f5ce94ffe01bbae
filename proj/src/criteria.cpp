#include "gpduo/criteria.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gpduo/errors.hpp"

namespace gpduo::criteria {

void CouplingParams::validate() const {
  require(std::isfinite(b1) && std::isfinite(b2) && std::isfinite(beta),
          "coupling parameters must be finite");
  require(b1 > 0 && b2 > 0 && beta > 0, "coupling parameters must be positive");
}

const char* to_string(Region r) {
  switch (r) {
    case Region::Existence: return "Existence";
    case Region::NoMinimizer: return "NoMinimizer";
    case Region::BorderlineUnequal: return "BorderlineUnequal";
    case Region::SegmentEqualB: return "SegmentEqualB";
    case Region::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

double f_ratio(const CouplingParams& p, double a_star, double t) {
  require(t > 0, "f_ratio needs t > 0");
  return 0.5 * a_star * (1 + t * t) / (0.5 * p.b1 + 0.5 * p.b2 * t * t + p.beta * t);
}

double f_ratio_derivative(const CouplingParams& p, double a_star, double t) {
  const double d = 0.5 * p.b1 + 0.5 * p.b2 * t * t + p.beta * t;
  const double g = p.beta * t * t + (p.b1 - p.b2) * t - p.beta;
  return 0.5 * a_star * g / (d * d);
}

FInf f_inf(const CouplingParams& p, double a_star) {
  p.validate();
  // With t = tan(theta), 1/f is a sinusoid in 2 theta; golden section on
  // theta in [0, pi/2] brackets the interior minimum of f.
  auto objective = [&](double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return -(0.5 * p.b1 * c * c + 0.5 * p.b2 * s * s + p.beta * s * c);
  };
  const double invphi = (std::sqrt(5.0) - 1) / 2;
  double lo = 0, hi = std::numbers::pi / 2;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double t = std::tan(0.5 * (lo + hi));
  // Newton polish on the stationarity polynomial beta t^2 + (b1-b2) t - beta.
  for (int it = 0; it < 50 && t > 0 && std::isfinite(t); ++it) {
    if (std::abs(f_ratio_derivative(p, a_star, t)) < 1e-10 && it > 0) break;
    const double g = p.beta * t * t + (p.b1 - p.b2) * t - p.beta;
    const double dg = 2 * p.beta * t + (p.b1 - p.b2);
    if (dg == 0) break;
    const double next = t - g / dg;
    if (!(next > 0)) break;
    t = next;
  }
  FInf best{0.0, a_star / p.b1};
  if (a_star / p.b2 < best.value) best = {std::numeric_limits<double>::infinity(), a_star / p.b2};
  if (t > 0 && std::isfinite(t)) {
    const double v = f_ratio(p, a_star, t);
    if (v <= best.value) best = {t, v};
  }
  return best;
}

double l_func(const CouplingParams& p, double t) {
  require(t >= 0, "l_func needs t >= 0");
  return (t * t + t) / (0.5 * p.b2 * t * t + p.beta * t + 0.5 * p.b1);
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

RegionLabel classify(const CouplingParams& p, double a_star, double band) {
  p.validate();
  require(a_star > 0, "a* must be positive");
  require(band >= 0, "tolerance band must be non-negative");
  const double tol = band * a_star;
  const double upper = (2 * a_star - p.b1 - p.b2) / 2;
  const std::string band_note = "; tolerance band " + fmt(tol);

  if (p.b1 > a_star + tol || p.b2 > a_star + tol)
    return {Region::NoMinimizer, "some b_i exceeds a*" + band_note};
  if (p.beta > upper + tol)
    return {Region::NoMinimizer, "beta > (2a* - b1 - b2)/2 = " + fmt(upper) + band_note};
  if (std::abs(p.b1 - a_star) <= tol || std::abs(p.b2 - a_star) <= tol)
    return {Region::Indeterminate, "b_i = a* is not settled by the existence theorems" + band_note};

  const double lower = std::sqrt((a_star - p.b1) * (a_star - p.b2));
  if (p.beta < lower - tol)
    return {Region::Existence,
            "beta < sqrt((a*-b1)(a*-b2)) = " + fmt(lower) + band_note};

  const bool equal_b = std::abs(p.b1 - p.b2) <= tol;
  if (equal_b) {
    if (std::abs(p.beta - (a_star - p.b1)) <= tol)
      return {Region::SegmentEqualB,
              "beta = a* - b; existence holds iff the segment energy is below inf(V1 + V2)" +
                  band_note};
    return {Region::Indeterminate, "equal b off the segment within the band" + band_note};
  }
  const bool gap_ok = std::abs(p.b1 - p.b2) <= 2 * lower + tol;
  if (gap_ok && p.beta >= lower - tol && p.beta <= upper + tol)
    return {Region::BorderlineUnequal,
            "beta in [" + fmt(lower) + ", " + fmt(upper) +
                "]; existence only known for beta near the lower endpoint (O > 1 check)" +
                band_note};
  return {Region::Indeterminate,
          "|b1 - b2| > 2 sqrt((a*-b1)(a*-b2)) with beta between the bounds" + band_note};
}

QuotientBounds quotient_bounds(const CouplingParams& p, double a_star) {
  p.validate();
  return {a_star / std::max(p.a1(), p.a2()), 2 * a_star / (p.b1 + p.b2 + 2 * p.beta)};
}

LipschitzGap lipschitz_gap(const CouplingParams& p, const CouplingParams& q, double a_star,
                           double o_p, double o_q) {
  p.validate();
  q.validate();
  require(o_p > 0 && o_q > 0, "quotient estimates must be positive");
  const double d = std::hypot(p.b1 - q.b1, p.b2 - q.b2, p.beta - q.beta);
  return {std::abs(1 / o_p - 1 / o_q), 3 / a_star * d};
}

}  // namespace gpduo::criteria
