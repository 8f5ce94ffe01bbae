#pragma once

// Continuation sweeps toward the critical segment b_i + beta -> a*, power-law
// fits of the energy and L4 norms, the limiting constant, profile and
// concentration checks, and the separated-wells scenario.

#include <cstddef>
#include <string>
#include <vector>

#include "gpduo/minimizer.hpp"
#include "gpduo/townes.hpp"

namespace gpduo::blowup {

using fields::PotentialAnalysis;
using fields::PotentialSpec;
using minimizer::FlowConfig;

enum class PathKind { Symmetric, Split };

// eps = a* - (a1 + a2)/2 with a_i = b_i + beta.
//   Symmetric: b1 = b2 = a* - beta - eps
//   Split:     b1 = a* - beta - (1 + split) eps, b2 = a* - beta - (1 - split) eps
//              (experimental)
struct SweepSpec {
  double beta = 0;
  std::vector<double> eps_list;  // strictly decreasing
  PathKind path = PathKind::Symmetric;
  double split = 0;
  PotentialSpec pot;
  Grid2D grid;
  FlowConfig cfg;
  std::size_t min_core_points = 16;
  double boundary_mass_tol = 1e-8;

  void validate(double a_star) const;
  std::pair<double, double> couplings(double eps, double a_star) const;
};

struct SweepRecord {
  double eps_raw = 0;
  double b1 = 0, b2 = 0, beta = 0;
  double energy = 0;
  double l4_1 = 0, l4_2 = 0;
  double diff2 = 0;
  double mu1 = 0, mu2 = 0;
  Point max1{0, 0}, max2{0, 0};
  double profile_dist = 0;
};

struct Townes {
  const townes::RadialProfile* profile = nullptr;
  townes::TownesConstants constants;
};

// Fields of the last point are returned through last when non-null.
std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const Townes& townes,
                                   minimizer::MinimizeResult* last = nullptr);

// Mass of each component within the outer tenth of the box (sup-norm distance).
double boundary_mass(const fields::Field2D& u);

struct FitResult {
  double exponent = 0;
  double constant = 0;  // exp(intercept)
  double stderr_ = 0;   // standard error of the slope
  std::vector<std::size_t> window;
};

// Least squares of log y against log eps_raw. InsufficientSpan with fewer than
// 4 records or less than 1.5 decades of eps_raw.
FitResult fit_power_law(const std::vector<double>& eps, const std::vector<double>& y);
FitResult fit_energy_exponent(const std::vector<SweepRecord>& records);
// Component 1, 2, or 0 for the geometric mean of both.
FitResult fit_l4_exponent(const std::vector<SweepRecord>& records, int component = 0);

inline double energy_exponent_target(double p0) { return p0 / (p0 + 2); }
inline double l4_exponent_target(double p0) { return -2 / (p0 + 2); }

// energy_k / eps_k^(p0/(p0+2)) / limit_constant(p0, gamma)
std::vector<double> limit_constant_check(const std::vector<SweepRecord>& records,
                                         const townes::TownesConstants& constants,
                                         const PotentialAnalysis& analysis);

// Max over components of the L2 distance between eps u_i(eps x + x_i) and
// lambda Q(lambda |x|)/||Q||, with eps = eps_raw^(1/(p0+2)), evaluated in
// the original coordinates. ResolutionExceeded when the predicted core
// eps/lambda spans fewer than two grid spacings.
double profile_distance(const minimizer::MinimizeResult& result, double eps_raw,
                        const Townes& townes, const PotentialAnalysis& analysis);

struct ConcentrationReport {
  Point target{0, 0};  // nearest flattest zero to the final maximum
  std::size_t target_index = 0;
  double final_distance = 0;
  double spacing = 0;
  std::vector<double> normalized_offsets;  // |x_i - x0| / eps, max over i
  bool converged = false;                  // final distance below one spacing
  bool offsets_decreasing = false;         // last below first, or exactly at the zero
  bool pass() const { return converged && offsets_decreasing; }
};

ConcentrationReport concentration_check(const std::vector<SweepRecord>& records,
                                        const PotentialAnalysis& analysis, double spacing);

struct WellsOptions {
  double beta_fraction = 0.5;        // beta = beta_fraction a*
  double separation = 5;             // |x1 - x2| > 4
  double plateau_factor = 2;         // plateau height in units of C_zeta
  double offset_fraction = 1e-3;     // b_i = a* - beta - offset_fraction a*
  std::vector<double> trend_offsets{0.2, 0.1, 0.05};  // coincident wells
};

struct WellsReport {
  double a_star = 0, beta = 0, b = 0;
  double c_zeta = 0;           // E(zeta1, zeta2) on the segment, on the grid
  double c_zeta_exact = 0;     // closed form for the (1 - r^2)^3 bumps
  double plateau = 0;          // plateau_factor * c_zeta
  double inf_potential = 0;    // min over nodes of V1 + V2
  double energy = 0;           // minimized energy at the offset point
  double residual = 0;
  bool certificate = false;    // c_zeta < inf(V1 + V2)
  bool energy_below = false;   // energy < inf(V1 + V2)
  std::vector<double> trend_offsets;
  std::vector<double> trend_energies;  // coincident wells
  bool trend_decreasing = false;
  bool pass() const { return certificate && energy_below; }
};

WellsReport separated_wells_scenario(const Grid2D& grid, const FlowConfig& cfg, double a_star,
                                     const WellsOptions& opts = {});

// Closed form of sum_i int |grad zeta|^2 - (a* - beta)/2 int zeta^4 for the
// normalized bump c (1 - r^2)^3 on the unit disc: 2 (42/5 - (a* - beta) 49/(26 pi)).
double bump_c_zeta(double a_star, double beta);

}  // namespace gpduo::blowup
