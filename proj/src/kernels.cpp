#include "gpduo/kernels.hpp"

#include <cassert>
#include <cstdint>
#include <vector>

namespace gpduo::kernels {

namespace {

using Index = std::int64_t;

void accumulate(DensitySums& into, const DensitySums& row) {
  into.mass1 += row.mass1;
  into.mass2 += row.mass2;
  into.potential1 += row.potential1;
  into.potential2 += row.potential2;
  into.quartic1 += row.quartic1;
  into.quartic2 += row.quartic2;
  into.cross += row.cross;
  into.diff2 += row.diff2;
}

// Sums one contiguous range; shared by the row-parallel and serial paths so
// the per-point arithmetic is identical.
DensitySums density_range(CSpan u1, CSpan u2, CSpan v1, CSpan v2, std::size_t begin,
                          std::size_t end) {
  DensitySums s;
  const bool two = !u2.empty();
  for (std::size_t k = begin; k < end; ++k) {
    const double a = u1[k] * u1[k];
    s.mass1 += a;
    s.quartic1 += a * a;
    if (!v1.empty()) s.potential1 += v1[k] * a;
    if (two) {
      const double b = u2[k] * u2[k];
      s.mass2 += b;
      s.quartic2 += b * b;
      s.cross += a * b;
      s.diff2 += (a - b) * (a - b);
      if (!v2.empty()) s.potential2 += v2[k] * b;
    }
  }
  return s;
}

inline double hamiltonian_point(double lap, double u, double w, double v, double b, double beta) {
  return lap + v * u - b * u * u * u - beta * w * w * u;
}

}  // namespace

DensitySums densities(CSpan u1, CSpan u2, CSpan v1, CSpan v2, std::size_t rows) {
  const std::size_t cols = u1.size() / rows;
  std::vector<DensitySums> partial(rows);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    partial[static_cast<std::size_t>(r)] = density_range(u1, u2, v1, v2, begin, begin + cols);
  }
  DensitySums total;
  for (const auto& p : partial) accumulate(total, p);
  return total;
}

void apply_hamiltonian(CSpan lap, CSpan u, CSpan w, CSpan v, double b, double beta, MSpan out,
                       std::size_t rows) {
  const std::size_t cols = u.size() / rows;
  const bool has_w = !w.empty();
  const bool has_v = !v.empty();
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    for (std::size_t k = begin; k < begin + cols; ++k)
      out[k] = hamiltonian_point(lap[k], u[k], has_w ? w[k] : 0.0, has_v ? v[k] : 0.0, b, beta);
  }
}

double dot(CSpan a, CSpan b, std::size_t rows) {
  const std::size_t cols = a.size() / rows;
  std::vector<double> partial(rows);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    double s = 0;
    for (std::size_t k = begin; k < begin + cols; ++k) s += a[k] * b[k];
    partial[static_cast<std::size_t>(r)] = s;
  }
  double total = 0;
  for (double p : partial) total += p;
  return total;
}

void combine(double alpha, CSpan x, double beta, CSpan y, MSpan out, std::size_t rows) {
  const std::size_t cols = x.size() / rows;
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    for (std::size_t k = begin; k < begin + cols; ++k) out[k] = alpha * x[k] + beta * y[k];
  }
}

void multiply(CSpan x, CSpan w, MSpan out, std::size_t rows) {
  const std::size_t cols = x.size() / rows;
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    for (std::size_t k = begin; k < begin + cols; ++k) out[k] = x[k] * w[k];
  }
}

void scale(MSpan x, double s, std::size_t rows) {
  const std::size_t cols = x.size() / rows;
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    for (std::size_t k = begin; k < begin + cols; ++k) x[k] *= s;
  }
}

ArgMax argmax(CSpan x, std::size_t rows) {
  const std::size_t cols = x.size() / rows;
  std::vector<ArgMax> partial(rows);
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < static_cast<Index>(rows); ++r) {
    const std::size_t begin = static_cast<std::size_t>(r) * cols;
    ArgMax best{begin, x[begin]};
    for (std::size_t k = begin + 1; k < begin + cols; ++k)
      if (x[k] > best.value) best = {k, x[k]};
    partial[static_cast<std::size_t>(r)] = best;
  }
  ArgMax best = partial.front();
  for (const auto& p : partial)
    if (p.value > best.value) best = p;
  return best;
}

namespace serial {

DensitySums densities(CSpan u1, CSpan u2, CSpan v1, CSpan v2, std::size_t /*rows*/) {
  return density_range(u1, u2, v1, v2, 0, u1.size());
}

void apply_hamiltonian(CSpan lap, CSpan u, CSpan w, CSpan v, double b, double beta, MSpan out,
                       std::size_t /*rows*/) {
  for (std::size_t k = 0; k < u.size(); ++k)
    out[k] = hamiltonian_point(lap[k], u[k], w.empty() ? 0.0 : w[k], v.empty() ? 0.0 : v[k], b,
                               beta);
}

double dot(CSpan a, CSpan b, std::size_t /*rows*/) {
  double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void combine(double alpha, CSpan x, double beta, CSpan y, MSpan out, std::size_t /*rows*/) {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha * x[k] + beta * y[k];
}

void multiply(CSpan x, CSpan w, MSpan out, std::size_t /*rows*/) {
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * w[k];
}

void scale(MSpan x, double s, std::size_t /*rows*/) {
  for (double& v : x) v *= s;
}

ArgMax argmax(CSpan x, std::size_t /*rows*/) {
  ArgMax best{0, x[0]};
  for (std::size_t k = 1; k < x.size(); ++k)
    if (x[k] > best.value) best = {k, x[k]};
  return best;
}

}  // namespace serial

}  // namespace gpduo::kernels
