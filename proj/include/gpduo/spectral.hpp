#pragma once

// Fourier machinery on a Grid2D: real-to-complex transforms, the spectral
// Laplacian, kinetic energy by Parseval, shifted Helmholtz solves and
// evaluation of the trigonometric interpolant at arbitrary points.
//
// Plans are built once per grid size with FFTW_ESTIMATE (deterministic plan
// choice) and shared; each Spectral instance owns its own aligned work
// buffers, so distinct instances may be used from different threads.

#include <complex>
#include <span>
#include <vector>

#include "gpduo/grid.hpp"

namespace gpduo {

using Spectrum = std::vector<std::complex<double>>;

struct PointDerivatives {
  double value = 0;
  double dx = 0, dy = 0;
  double dxx = 0, dxy = 0, dyy = 0;
};

class Spectral {
 public:
  explicit Spectral(const Grid2D& grid);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  const Grid2D& grid() const { return grid_; }
  std::size_t half_cols() const { return grid_.n / 2 + 1; }
  std::size_t spectrum_size() const { return grid_.n * half_cols(); }

  // Unnormalized forward transform.
  void forward(std::span<const double> u, Spectrum& out);
  // Normalized inverse: inverse(forward(u)) == u.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

  // -Laplacian of the field whose spectrum is given.
  void neg_laplacian(const Spectrum& uhat, std::span<double> out);
  void neg_laplacian(std::span<const double> u, std::span<double> out);

  // Integral of |grad u|^2 over the box.
  double kinetic(const Spectrum& uhat) const;
  double kinetic(std::span<const double> u);

  // out = (sigma - Laplacian)^{-1} rhs, sigma > 0.
  void solve_shifted(std::span<const double> rhs, double sigma, std::span<double> out);

  // Squared wavenumber magnitudes on the half-spectrum layout.
  std::span<const double> k2() const { return k2_; }
  double wavenumber(std::size_t index) const;  // signed k for a full-axis index

  // Value, gradient and Hessian of the trigonometric interpolant at p.
  // Nyquist modes are dropped.
  PointDerivatives evaluate(const Spectrum& uhat, const Point& p) const;

 private:
  Grid2D grid_;
  std::vector<double> k2_;
  Spectrum scratch_;
  double* real_buf_ = nullptr;
  void* complex_buf_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
};

}  // namespace gpduo
