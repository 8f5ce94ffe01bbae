#pragma once

// Constrained minimization of the two-component energy under the double
// mass constraint, Lagrange multipliers, the Gagliardo-Nirenberg type
// quotient O(b1, b2, beta) and the existence / uniqueness probes.

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gpduo/fields.hpp"

namespace gpduo::minimizer {

using criteria::CouplingParams;
using fields::Field2D;
using fields::Potentials;
using fields::PotentialSpec;

enum class InitKind { Gaussian, RandomGaussian, TownesSeeded, WarmStart };

struct TownesSeed {
  const townes::RadialProfile* profile = nullptr;
  double a_star = 0;
  Point center{0, 0};
  double tau = 1;  // core scale of Q(tau |x - center|)
};

struct FlowConfig {
  // Initial trial step of the line search (the preconditioned direction has
  // a natural step of order one).
  double dt = 1.0;
  std::size_t max_iters = 20000;
  double grad_tol = 1e-6;
  std::uint64_t seed = 1;
  InitKind init = InitKind::Gaussian;
  double init_width = 1.0;  // Gaussian initial state
  Point init_center{0, 0};
  TownesSeed townes;
  std::shared_ptr<const std::pair<Field2D, Field2D>> warm;
  double energy_floor = -1e6;

  void validate() const;
};

struct MinimizeResult {
  Field2D u1, u2;
  double energy = 0;
  double mu1 = 0, mu2 = 0;
  double residual = 0;
  std::size_t iters = 0;
  Point max1{0, 0}, max2{0, 0};        // sub-grid maxima (spectral Newton)
  std::size_t max_index1 = 0, max_index2 = 0;  // grid maxima, lowest index on ties
  double l4_1 = 0, l4_2 = 0;
  double diff2 = 0;
  fields::EnergyTerms terms;
  std::vector<double> history;  // energies of accepted steps
};

struct SingleResult {
  Field2D u;
  double energy = 0;
  double mu = 0;
  double residual = 0;
  std::size_t iters = 0;
  double l4 = 0;
};

MinimizeResult minimize(const CouplingParams& params, const PotentialSpec& pot, const Grid2D& grid,
                        const FlowConfig& cfg);
// Same on pre-evaluated potential arrays (non-polynomial traps).
MinimizeResult minimize(const CouplingParams& params, const Potentials& pot, const Grid2D& grid,
                        const FlowConfig& cfg);

SingleResult minimize_single(double a, const std::vector<double>& potential, const Grid2D& grid,
                             const FlowConfig& cfg);

struct Multipliers {
  double mu1 = 0, mu2 = 0;                  // <g_i, u_i>/2
  double formula1 = 0, formula2 = 0;        // energy-splitting formula
};

// Throws MassViolation for non-unit masses.
Multipliers multipliers(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
                        const Potentials& pot);

struct QuotientResult {
  double value = 0;
  double residual = 0;
  std::size_t iters = 0;
  Field2D u1, u2;  // minimizing pair, gauge: kinetic sum 1
};

QuotientResult estimate_gn_quotient_pair(const CouplingParams& params, const Grid2D& grid,
                                         const FlowConfig& cfg);
double estimate_gn_quotient(const CouplingParams& params, const Grid2D& grid, const FlowConfig& cfg);

struct EscapeResult {
  std::vector<double> lambdas;
  std::vector<double> energies;
  bool verdict = false;
};

EscapeResult scaling_escape_test(const CouplingParams& params, const PotentialSpec& pot,
                                 const Grid2D& grid, const std::vector<double>& lambdas,
                                 const FlowConfig& cfg = {});

// Energy of lambda u(lambda x) by the exact scaling law
// lambda^2 (kinetic - quartic part) + sum int V_i(x / lambda) u_i^2.
double scaled_energy(const Field2D& u1, const Field2D& u2, const CouplingParams& params,
                     const PotentialSpec& pot, double lambda);

struct UniquenessResult {
  double max_pairwise_distance = 0;
  std::vector<double> energies;
};

UniquenessResult uniqueness_probe(const CouplingParams& params, const PotentialSpec& pot,
                                  const Grid2D& grid, const FlowConfig& cfg, std::size_t n_starts);

// Sub-grid maximum of u by Newton steps on the trigonometric interpolant,
// starting from the grid maximum (lowest flat index on ties).
Point refine_maximum(const Field2D& u, std::size_t* grid_index = nullptr);

}  // namespace gpduo::minimizer
