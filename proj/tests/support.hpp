#pragma once

// Independent reference computations for the unit tests. None of these use
// the library's transforms.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "oblim/grid.hpp"
#include "oblim/model.hpp"
#include "oblim/random.hpp"
#include "oblim/spectral.hpp"

namespace oblim::test {

constexpr double kPi = 3.14159265358979323846;

inline double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, max_diff(a[i], b[i]));
  return m;
}

inline double max_diff(const SymTensorField& a, const SymTensorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.components.size(); ++i) m = std::max(m, max_diff(a.components[i], b.components[i]));
  return m;
}

// Periodic neighbour along one axis.
inline std::size_t shifted(const GridSpec& g, std::size_t idx, int axis, int by) {
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::size_t stride = 1;
  for (int a = g.dim - 1; a > axis; --a) stride *= n;
  const std::size_t coord = (idx / stride) % n;
  const std::size_t moved = (coord + n + static_cast<std::size_t>(by + static_cast<int>(n))) % n;
  return idx + (moved - coord) * stride;
}

// Fourth-order centred first derivative.
inline Field fd4(const Field& f, int axis) {
  const GridSpec& g = f.grid();
  const double h = g.spacing();
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = (-f[shifted(g, i, axis, 2)] + 8.0 * f[shifted(g, i, axis, 1)] - 8.0 * f[shifted(g, i, axis, -1)] +
              f[shifted(g, i, axis, -2)]) /
             (12.0 * h);
  }
  return out;
}

// Fourth-order centred second derivative along one axis.
inline Field fd4_second(const Field& f, int axis) {
  const GridSpec& g = f.grid();
  const double h = g.spacing();
  Field out(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] = (-f[shifted(g, i, axis, 2)] + 16.0 * f[shifted(g, i, axis, 1)] - 30.0 * f[i] +
              16.0 * f[shifted(g, i, axis, -1)] - f[shifted(g, i, axis, -2)]) /
             (12.0 * h * h);
  }
  return out;
}

inline Field fd4_laplacian(const Field& f) {
  Field out(f.grid());
  for (int a = 0; a < f.grid().dim; ++a) out += fd4_second(f, a);
  return out;
}

// Direct O(N^2) discrete Fourier transform on a 2D grid, full complex layout
// indexed [m0][m1] with m in [0, n).
struct DirectDft2 {
  int n;
  double L;
  std::vector<std::complex<double>> c;

  std::complex<double>& at(int m0, int m1) { return c[static_cast<std::size_t>(m0 * n + m1)]; }
  static int signed_mode(int m, int n) { return m < n / 2 ? m : m - n; }
  double wavenumber(int m) const { return 2.0 * kPi / L * signed_mode(m, n); }
};

inline DirectDft2 direct_forward(const Field& f) {
  const GridSpec& g = f.grid();
  DirectDft2 out{g.n, g.box_length, std::vector<std::complex<double>>(static_cast<std::size_t>(g.n * g.n))};
  for (int m0 = 0; m0 < g.n; ++m0)
    for (int m1 = 0; m1 < g.n; ++m1) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
          const double angle = -2.0 * kPi * (static_cast<double>(m0 * i) + static_cast<double>(m1 * j)) / g.n;
          acc += f[flat_index(g, i, j)] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      out.at(m0, m1) = acc / static_cast<double>(g.n * g.n);
    }
  return out;
}

inline Field direct_inverse(const DirectDft2& d, const GridSpec& g) {
  Field out(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) {
      std::complex<double> acc = 0.0;
      for (int m0 = 0; m0 < g.n; ++m0)
        for (int m1 = 0; m1 < g.n; ++m1) {
          const double angle = 2.0 * kPi * (static_cast<double>(m0 * i) + static_cast<double>(m1 * j)) / g.n;
          acc += d.c[static_cast<std::size_t>(m0 * g.n + m1)] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      out[flat_index(g, i, j)] = acc.real();
    }
  return out;
}

inline CompressibleState random_compressible(const GridSpec& g, double epsilon, double amp, std::uint64_t seed,
                                             int max_mode = 4) {
  Lcg64 gen(seed);
  CompressibleState s = CompressibleState::rest(g, epsilon);
  Field phi = random_band_limited(g, gen, max_mode);
  phi *= amp / std::max(phi.max_abs(), 1e-300);
  s.phi = phi;
  VectorField u = random_band_limited_vector(g, gen, max_mode);
  u *= amp / std::max(u.max_abs(), 1e-300);
  s.u = u;
  Field eta = random_band_limited(g, gen, max_mode);
  eta *= amp / std::max(eta.max_abs(), 1e-300);
  s.eta = Field(g, 1.0) + eta;
  SymTensorField tau = random_band_limited_tensor(g, gen, max_mode);
  tau *= amp / std::max(tau.max_abs(), 1e-300);
  s.tau = tau;
  return s;
}

inline IncompressibleState random_incompressible(const GridSpec& g, double amp, std::uint64_t seed,
                                                 int max_mode = 4) {
  const CompressibleState c = random_compressible(g, 1.0, amp, seed, max_mode);
  IncompressibleState s = IncompressibleState::rest(g);
  s.u = leray_project(c.u);
  s.eta = c.eta;
  s.tau = c.tau;
  return s;
}

}  // namespace oblim::test
