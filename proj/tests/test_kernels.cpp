#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gpduo/kernels.hpp"

using namespace gpduo;
namespace par = gpduo::kernels;
namespace ser = gpduo::kernels::serial;

namespace {

struct Case {
  std::size_t n;
  std::vector<double> u1, u2, v1, v2, lap;
};

Case random_case(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> pos(0, 4);
  Case c{n, {}, {}, {}, {}, {}};
  for (std::size_t k = 0; k < n * n; ++k) {
    c.u1.push_back(g(rng));
    c.u2.push_back(g(rng));
    c.v1.push_back(pos(rng));
    c.v2.push_back(pos(rng));
    c.lap.push_back(g(rng));
  }
  return c;
}

bool close(double a, double b, double tol = 1e-13) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Runs f with the given OpenMP team size, restoring the previous one.
template <class F>
auto with_threads(int t, F f) {
  const int prev = omp_get_max_threads();
  omp_set_num_threads(t);
  auto r = f();
  omp_set_num_threads(prev);
  return r;
}

constexpr std::size_t kSizes[] = {1, 3, 17, 64, 130};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("pointwise kernels match the serial reference bitwise") {
  for (std::size_t n : kSizes) {
    const auto c = random_case(n, 100 + n);
    std::vector<double> a(n * n), b(n * n);
    par::apply_hamiltonian(c.lap, c.u1, c.u2, c.v1, 1.3, 0.4, a, n);
    ser::apply_hamiltonian(c.lap, c.u1, c.u2, c.v1, 1.3, 0.4, b, n);
    CHECK(a == b);
    par::apply_hamiltonian(c.lap, c.u1, {}, {}, 2.0, 0.0, a, n);
    ser::apply_hamiltonian(c.lap, c.u1, {}, {}, 2.0, 0.0, b, n);
    CHECK(a == b);
    par::combine(0.7, c.u1, -1.9, c.u2, a, n);
    ser::combine(0.7, c.u1, -1.9, c.u2, b, n);
    CHECK(a == b);
    par::multiply(c.u1, c.v1, a, n);
    ser::multiply(c.u1, c.v1, b, n);
    CHECK(a == b);
    a = c.u1;
    b = c.u1;
    par::scale(a, 3.25, n);
    ser::scale(b, 3.25, n);
    CHECK(a == b);
  }
}

TEST_CASE("apply_hamiltonian against its formula") {
  const auto c = random_case(9, 7);
  std::vector<double> out(81);
  par::apply_hamiltonian(c.lap, c.u1, c.u2, c.v1, 1.3, 0.4, out, 9);
  for (std::size_t k = 0; k < 81; ++k) {
    const double u = c.u1[k], w = c.u2[k];
    CHECK(close(out[k], c.lap[k] + c.v1[k] * u - 1.3 * u * u * u - 0.4 * w * w * u, 1e-15));
  }
}

TEST_CASE("combine may alias its inputs") {
  const auto c = random_case(17, 3);
  std::vector<double> x = c.u1, expect(c.u1.size());
  ser::combine(2.0, c.u1, 0.5, c.u2, expect, 17);
  par::combine(2.0, x, 0.5, c.u2, x, 17);
  CHECK(x == expect);
}

TEST_CASE("reductions agree with the serial reference") {
  for (std::size_t n : kSizes) {
    const auto c = random_case(n, 200 + n);
    const auto p = par::densities(c.u1, c.u2, c.v1, c.v2, n);
    const auto s = ser::densities(c.u1, c.u2, c.v1, c.v2, n);
    CHECK(close(p.mass1, s.mass1));
    CHECK(close(p.mass2, s.mass2));
    CHECK(close(p.potential1, s.potential1));
    CHECK(close(p.potential2, s.potential2));
    CHECK(close(p.quartic1, s.quartic1));
    CHECK(close(p.quartic2, s.quartic2));
    CHECK(close(p.cross, s.cross));
    CHECK(close(p.diff2, s.diff2));
    CHECK(close(par::dot(c.u1, c.u2, n), ser::dot(c.u1, c.u2, n), 1e-12));
    const auto single = par::densities(c.u1, {}, c.v1, {}, n);
    CHECK(single.mass2 == 0);
    CHECK(single.cross == 0);
    CHECK(close(single.quartic1, s.quartic1));
  }
}

TEST_CASE("density sums against direct formulas") {
  const auto c = random_case(5, 11);
  double m = 0, q = 0, x = 0, d = 0;
  for (std::size_t k = 0; k < 25; ++k) {
    const double a = c.u1[k] * c.u1[k], b = c.u2[k] * c.u2[k];
    m += a;
    q += a * a;
    x += a * b;
    d += (a - b) * (a - b);
  }
  const auto s = par::densities(c.u1, c.u2, c.v1, c.v2, 5);
  CHECK(close(s.mass1, m));
  CHECK(close(s.quartic1, q));
  CHECK(close(s.cross, x));
  CHECK(close(s.diff2, d));
}

TEST_CASE("parallel results do not depend on the thread count") {
  const auto c = random_case(130, 5);
  const auto d1 = with_threads(1, [&] { return par::densities(c.u1, c.u2, c.v1, c.v2, 130); });
  const auto dot1 = with_threads(1, [&] { return par::dot(c.u1, c.lap, 130); });
  for (int t : {2, 3, 8}) {
    const auto dt = with_threads(t, [&] { return par::densities(c.u1, c.u2, c.v1, c.v2, 130); });
    CHECK(dt.mass1 == d1.mass1);
    CHECK(dt.quartic2 == d1.quartic2);
    CHECK(dt.diff2 == d1.diff2);
    CHECK(with_threads(t, [&] { return par::dot(c.u1, c.lap, 130); }) == dot1);
  }
}

TEST_CASE("argmax ties resolve to the lowest index") {
  for (std::size_t n : kSizes) {
    auto c = random_case(n, 300 + n);
    const auto p = par::argmax(c.u1, n);
    const auto s = ser::argmax(c.u1, n);
    CHECK(p.index == s.index);
    CHECK(p.value == s.value);
    if (n * n < 2) continue;
    // plant two equal maxima
    const std::size_t lo = n * n / 3, hi = n * n - 1;
    c.u1[lo] = c.u1[hi] = 100;
    CHECK(par::argmax(c.u1, n).index == lo);
    CHECK(with_threads(4, [&] { return par::argmax(c.u1, n).index; }) == lo);
  }
}

}
