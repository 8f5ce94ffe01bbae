#pragma once

// Wavefunctions on the periodic square grid, polynomial traps, the two
// component energy and its L2 gradient, spectral rescaling and the cut-off
// Townes trial state.

#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpduo/criteria.hpp"
#include "gpduo/grid.hpp"
#include "gpduo/spectral.hpp"
#include "gpduo/townes.hpp"

namespace gpduo::fields {

using criteria::CouplingParams;

struct Center {
  Point at{0, 0};
  double exponent = 2;
};

// h * prod_j |x - x_j|^{p_j}
struct ComponentPotential {
  std::vector<Center> centers;
  double modulator = 1;

  double operator()(const Point& x) const;
};

struct PotentialSpec {
  ComponentPotential v1;
  ComponentPotential v2;

  void validate() const;
  static PotentialSpec harmonic();  // V1 = V2 = |x|^2
};

struct PotentialAnalysis {
  std::vector<Point> lambda_set;  // common zeros, in listing order
  std::vector<double> pbar;       // min(p1j, p2j) per common zero
  double p0 = 0;
  std::vector<double> gamma_j;    // +inf where pbar_j < p0
  double gamma = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> z_set;  // indices into lambda_set

  std::vector<Point> z_points() const;
};

PotentialAnalysis analyze_potential(const PotentialSpec& spec);

struct Potentials {
  std::vector<double> v1;
  std::vector<double> v2;
};

Potentials eval_potential(const PotentialSpec& spec, const Grid2D& grid);

struct Field2D {
  Grid2D grid;
  std::vector<double> values;

  static Field2D zeros(const Grid2D& grid);
  double mass() const;
  void normalize();
};

// Integrals of the energy densities (spacing^2 weights, spectral kinetic).
struct EnergyTerms {
  double kinetic1 = 0, kinetic2 = 0;
  double potential1 = 0, potential2 = 0;
  double quartic1 = 0, quartic2 = 0;  // int u_i^4
  double cross = 0;                    // int u1^2 u2^2
  double diff2 = 0;                    // int (u1^2 - u2^2)^2
  double mass1 = 0, mass2 = 0;

  double total(const CouplingParams& p) const;
  // E^i_a(u_i) = int |grad u_i|^2 + V_i u_i^2 - (a/2) u_i^4
  double component(int i, double a) const;
};

EnergyTerms energy_terms(Spectral& spectral, std::span<const double> u1,
                         std::span<const double> u2, const Potentials& pot);

inline constexpr double kMassTolerance = 1e-8;

// Throws MassViolation when a mass is off by more than 1e-8.
double energy(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
              const Potentials& pot);

// g_i = 2(-Lap u_i + V_i u_i - b_i u_i^3 - beta u_j^2 u_i)
std::pair<std::vector<double>, std::vector<double>> gradient(const Field2D& u1, const Field2D& u2,
                                                             const CouplingParams& params,
                                                             const Potentials& pot);

inline constexpr double kAliasThreshold = 1e-10;

// lambda * u(lambda (x - c) + c), resampled with the trigonometric
// interpolant. AliasRisk when more than alias_tol of the mass would be lost.
Field2D rescale_about(const Field2D& u, double lambda, const Point& c,
                      double alias_tol = kAliasThreshold);
inline Field2D rescale(const Field2D& u, double lambda) { return rescale_about(u, lambda, {0, 0}); }

// Smooth cut-off of |y|: 1 on [0, 1], 0 on [2, inf), C-infinity transition.
double cutoff(double s);

struct TrialState {
  Field2D phi;
  double amplitude = 1;  // normalizing factor A
};

TrialState trial_phi(const Point& x0, double tau, double cutoff_radius,
                     const townes::RadialProfile& profile, double a_star, const Grid2D& grid);

// Flat float64 row-major binary (u1 then u2) with a JSON sidecar
// <path>.json holding {n, extent, components}.
void write_fields(const std::string& path, const std::vector<const Field2D*>& fields);
std::vector<Field2D> read_fields(const std::string& path);

}  // namespace gpduo::fields
