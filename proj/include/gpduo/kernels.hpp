#pragma once

// Grid-wide pointwise kernels and reductions over n x n row-major arrays.
//
// The functions in gpduo::kernels are OpenMP-parallel over rows. Reductions
// accumulate one partial per row and then sum the partials in row order, so
// results do not depend on the thread count. gpduo::kernels::serial holds the
// plain single-loop reference versions used by the tests and the benchmark.

#include <cstddef>
#include <span>

namespace gpduo::kernels {

// Raw (unweighted) sums of the energy densities. Multiply by spacing^2 to get
// integrals. Fields of the second component may be empty, in which case the
// second-component and coupling sums are zero.
struct DensitySums {
  double mass1 = 0, mass2 = 0;
  double potential1 = 0, potential2 = 0;  // sum V_i u_i^2
  double quartic1 = 0, quartic2 = 0;      // sum u_i^4
  double cross = 0;                        // sum u_1^2 u_2^2
  double diff2 = 0;                        // sum (u_1^2 - u_2^2)^2
};

struct ArgMax {
  std::size_t index = 0;
  double value = 0;
};

using CSpan = std::span<const double>;
using MSpan = std::span<double>;

DensitySums densities(CSpan u1, CSpan u2, CSpan v1, CSpan v2, std::size_t rows);

// out = lap + v*u - b*u^3 - beta*w^2*u. Empty v or w drop their terms.
void apply_hamiltonian(CSpan lap, CSpan u, CSpan w, CSpan v, double b, double beta, MSpan out,
                       std::size_t rows);

double dot(CSpan a, CSpan b, std::size_t rows);

// out = alpha*x + beta*y (out may alias x or y)
void combine(double alpha, CSpan x, double beta, CSpan y, MSpan out, std::size_t rows);

void multiply(CSpan x, CSpan w, MSpan out, std::size_t rows);

void scale(MSpan x, double s, std::size_t rows);

// Largest entry; ties resolve to the lowest flat index.
ArgMax argmax(CSpan x, std::size_t rows);

namespace serial {

DensitySums densities(CSpan u1, CSpan u2, CSpan v1, CSpan v2, std::size_t rows);
void apply_hamiltonian(CSpan lap, CSpan u, CSpan w, CSpan v, double b, double beta, MSpan out,
                       std::size_t rows);
double dot(CSpan a, CSpan b, std::size_t rows);
void combine(double alpha, CSpan x, double beta, CSpan y, MSpan out, std::size_t rows);
void multiply(CSpan x, CSpan w, MSpan out, std::size_t rows);
void scale(MSpan x, double s, std::size_t rows);
ArgMax argmax(CSpan x, std::size_t rows);

}  // namespace serial

}  // namespace gpduo::kernels
