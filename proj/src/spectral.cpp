#include "gpduo/spectral.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>

#include "gpduo/errors.hpp"

namespace gpduo {

Grid2D Grid2D::make(std::size_t n, double extent) {
  require(n >= 64 && (n & (n - 1)) == 0, "grid size must be a power of two >= 64");
  require(extent >= 8.0, "grid half-width must be >= 8");
  return Grid2D{n, extent};
}

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans live for the process lifetime; FFTW planning is not thread-safe, so
// every planner call goes through the mutex.
PlanPair plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  static bool threads_ready = false;
  std::lock_guard lock(planner_mutex());
  if (!threads_ready) {
    fftw_init_threads();
    threads_ready = true;
  }
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  fftw_plan_with_nthreads(omp_get_max_threads());
  const int ni = static_cast<int>(n);
  double* in = fftw_alloc_real(n * n);
  fftw_complex* out = fftw_alloc_complex(n * (n / 2 + 1));
  PlanPair p;
  p.forward = fftw_plan_dft_r2c_2d(ni, ni, in, out, FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_2d(ni, ni, out, in, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  if (!p.forward || !p.inverse) fail("InvalidArgument", "FFTW planning failed");
  cache.emplace(n, p);
  return p;
}

using Index = std::int64_t;

}  // namespace

Spectral::Spectral(const Grid2D& grid) : grid_(grid) {
  const std::size_t n = grid_.n;
  const PlanPair p = plans_for(n);
  plan_forward_ = p.forward;
  plan_inverse_ = p.inverse;
  real_buf_ = fftw_alloc_real(n * n);
  complex_buf_ = fftw_alloc_complex(spectrum_size());
  k2_.resize(spectrum_size());
  const std::size_t hc = half_cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double kx = wavenumber(i);
    for (std::size_t j = 0; j < hc; ++j) {
      const double ky = wavenumber(j);
      k2_[i * hc + j] = kx * kx + ky * ky;
    }
  }
}

Spectral::~Spectral() {
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

double Spectral::wavenumber(std::size_t index) const {
  const auto n = static_cast<std::int64_t>(grid_.n);
  auto m = static_cast<std::int64_t>(index);
  if (m > n / 2) m -= n;
  return std::numbers::pi * static_cast<double>(m) / grid_.extent;
}

void Spectral::forward(std::span<const double> u, Spectrum& out) {
  std::memcpy(real_buf_, u.data(), grid_.size() * sizeof(double));
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), real_buf_, cbuf);
  out.resize(spectrum_size());
  std::memcpy(static_cast<void*>(out.data()), cbuf, spectrum_size() * sizeof(fftw_complex));
}

void Spectral::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  auto* cbuf = static_cast<fftw_complex*>(complex_buf_);
  std::memcpy(cbuf, in.data(), spectrum_size() * sizeof(fftw_complex));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_), cbuf, real_buf_);
  const double norm = 1.0 / static_cast<double>(grid_.size());
  const std::size_t total = grid_.size();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < static_cast<Index>(total); ++k) out[k] = real_buf_[k] * norm;
}

void Spectral::neg_laplacian(const Spectrum& uhat, std::span<double> out) {
  scratch_.resize(spectrum_size());
  const std::size_t total = spectrum_size();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < static_cast<Index>(total); ++k) scratch_[k] = uhat[k] * k2_[k];
  inverse(scratch_, out);
}

void Spectral::neg_laplacian(std::span<const double> u, std::span<double> out) {
  Spectrum uhat;
  forward(u, uhat);
  neg_laplacian(uhat, out);
}

double Spectral::kinetic(const Spectrum& uhat) const {
  const std::size_t n = grid_.n;
  const std::size_t hc = half_cols();
  std::vector<double> partial(n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < static_cast<Index>(n); ++i) {
    double s = 0;
    const std::size_t base = static_cast<std::size_t>(i) * hc;
    for (std::size_t j = 0; j < hc; ++j) {
      const double w = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      s += w * k2_[base + j] * std::norm(uhat[base + j]);
    }
    partial[static_cast<std::size_t>(i)] = s;
  }
  double total = 0;
  for (double p : partial) total += p;
  const double nn = static_cast<double>(grid_.size());
  return total * grid_.cell_area() / nn;
}

double Spectral::kinetic(std::span<const double> u) {
  Spectrum uhat;
  forward(u, uhat);
  return kinetic(uhat);
}

void Spectral::solve_shifted(std::span<const double> rhs, double sigma, std::span<double> out) {
  forward(rhs, scratch_);
  const std::size_t total = spectrum_size();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < static_cast<Index>(total); ++k) scratch_[k] /= (sigma + k2_[k]);
  inverse(scratch_, out);
}

PointDerivatives Spectral::evaluate(const Spectrum& uhat, const Point& p) const {
  const std::size_t n = grid_.n;
  const std::size_t hc = half_cols();
  const double x = p[0] + grid_.extent;
  const double y = p[1] + grid_.extent;
  std::vector<std::complex<double>> ey(hc);
  for (std::size_t j = 0; j < hc; ++j) {
    const double ky = wavenumber(j);
    ey[j] = (j == n / 2) ? 0.0 : std::polar(1.0, ky * y);
  }
  PointDerivatives d;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == n / 2) continue;
    const double kx = wavenumber(i);
    const std::complex<double> ex = std::polar(1.0, kx * x);
    for (std::size_t j = 0; j < hc; ++j) {
      if (j == n / 2) continue;
      const double ky = wavenumber(j);
      const double w = (j == 0) ? 1.0 : 2.0;
      const std::complex<double> t = uhat[i * hc + j] * ex * ey[j] * w;
      const std::complex<double> it(0.0, 1.0);
      d.value += t.real();
      d.dx += (it * kx * t).real();
      d.dy += (it * ky * t).real();
      d.dxx += -kx * kx * t.real();
      d.dxy += -kx * ky * t.real();
      d.dyy += -ky * ky * t.real();
    }
  }
  const double norm = 1.0 / static_cast<double>(grid_.size());
  d.value *= norm;
  d.dx *= norm;
  d.dy *= norm;
  d.dxx *= norm;
  d.dxy *= norm;
  d.dyy *= norm;
  return d;
}

}  // namespace gpduo
