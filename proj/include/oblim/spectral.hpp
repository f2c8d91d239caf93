#pragma once

// Fourier pseudo-spectral calculus on the periodic grid.
//
// Transform normalization: the forward transform is unscaled,
//   fhat_m = sum_x f(x) exp(-i k_m . x),
// and the inverse divides by n^dim. Real-to-complex storage keeps the last
// axis halved (n/2 + 1 entries), the other axes full, row-major.
//
// Odd derivatives drop the Nyquist coefficient; the same "derivative
// wavenumber" (zero at Nyquist) is used for every operator so that
// divergence(gradient f) and laplacian(f) agree to round-off.

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "oblim/grid.hpp"

namespace oblim {

using Complex = std::complex<double>;

/// Half-complex Fourier coefficients of a real Field.
struct Spectrum {
  GridSpec grid;
  std::vector<Complex> coeffs;

  Spectrum() = default;
  explicit Spectrum(const GridSpec& g);

  std::size_t size() const { return coeffs.size(); }
  Complex& operator[](std::size_t i) { return coeffs[i]; }
  const Complex& operator[](std::size_t i) const { return coeffs[i]; }

  Spectrum& operator+=(const Spectrum& other);
  Spectrum& operator-=(const Spectrum& other);
  Spectrum& operator*=(double s);
  /// this += s * other
  Spectrum& axpy(double s, const Spectrum& other);
};

/// Per-grid mode table plus cached FFT plans. Shared, immutable after
/// construction, safe to use from several threads.
class SpectralContext {
 public:
  static std::shared_ptr<const SpectralContext> get(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t spectral_size() const { return kd_[0].size(); }
  /// Integer mode number along an axis for coefficient idx.
  int mode(std::size_t idx, int axis) const { return modes_[static_cast<std::size_t>(axis)][idx]; }
  /// Derivative wavenumber (zero on the Nyquist mode) along an axis.
  double kd(std::size_t idx, int axis) const { return kd_[static_cast<std::size_t>(axis)][idx]; }
  /// |k_d|^2
  double ksq(std::size_t idx) const { return ksq_[idx]; }
  /// True if the mode survives the dealiasing truncation.
  bool retained(std::size_t idx) const { return retained_[idx] != 0; }
  /// Number of times the coefficient appears in the full (Hermitian) spectrum.
  double hermitian_weight(std::size_t idx) const { return hermitian_weight_[idx]; }
  /// Coefficient index of integer mode vector m (m in [-n/2, n/2) per axis,
  /// last component in [0, n/2]).
  std::size_t index_of(const int* m) const;

  Spectrum forward(const Field& f) const;
  Field inverse(const Spectrum& s) const;

  ~SpectralContext();
  SpectralContext(const SpectralContext&) = delete;
  SpectralContext& operator=(const SpectralContext&) = delete;

 private:
  explicit SpectralContext(const GridSpec& grid);

  GridSpec grid_;
  std::vector<std::vector<int>> modes_;
  std::vector<std::vector<double>> kd_;
  std::vector<double> ksq_;
  std::vector<char> retained_;
  std::vector<double> hermitian_weight_;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
};

Spectrum forward(const Field& f);
Field inverse(const Spectrum& s);

/// Multiplies by i*k_axis in place.
void differentiate(Spectrum& s, int axis);
/// Zeroes every mode outside the retained band in place.
void truncate(Spectrum& s);
/// (cell volume / n^dim) * sum over the full spectrum of |fhat|^2, which by
/// Parseval equals the L2 norm squared of the field.
double parseval_norm_squared(const Spectrum& s);

Field spectral_derivative(const Field& f, int axis);
VectorField gradient(const Field& f);
Field divergence(const VectorField& v);
Field laplacian(const Field& f);
/// (div tau)_i = sum_j d_j tau_ij
VectorField tensor_divergence(const SymTensorField& tau);
Field dealias(const Field& f);

/// v - grad lap^{-1} div v. The mean of each component is untouched.
VectorField leray_project(const VectorField& v);
/// Leray projection of a vector of component spectra, in place.
void leray_project(std::vector<Spectrum>& components);

/// (sum_{|alpha| <= order} int |d^alpha f|^2 w dx)^{1/2}; derivatives are
/// spectral, the integral is the equal-weight rule. Multi-indices alpha are
/// unordered (d_x d_y counted once). Vector fields sum their components;
/// tensor fields use the Frobenius norm (off-diagonal slots count twice).
double sobolev_norm(const Field& f, int order, const std::optional<Field>& weight = std::nullopt);
double sobolev_norm(const VectorField& v, int order, const std::optional<Field>& weight = std::nullopt);
double sobolev_norm(const SymTensorField& t, int order,
                    const std::optional<Field>& weight = std::nullopt);

/// All multi-indices with |alpha| <= order in dim dimensions, ordered by
/// total degree.
std::vector<std::vector<int>> multi_indices(int dim, int order);

}  // namespace oblim
