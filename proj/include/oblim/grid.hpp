#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oblim {

/// Uniform periodic grid on [0, box_length)^dim with n points per axis.
///
/// Samples are stored row-major: axis 0 varies slowest. Wavenumbers along an
/// axis are k = 2*pi*m / box_length for integer m in [-n/2, n/2).
struct GridSpec {
  int dim = 2;
  int n = 64;
  double box_length = 6.283185307179586;
  double dealias_fraction = 2.0 / 3.0;

  std::size_t size() const;
  double spacing() const { return box_length / n; }
  double cell_volume() const;
  double volume() const;
  /// 2*pi / box_length
  double wavenumber_unit() const;
  /// Number of independent symmetric-tensor slots, dim*(dim+1)/2.
  int tensor_slots() const { return dim * (dim + 1) / 2; }
  /// Coordinate of grid index i along any axis.
  double coordinate(int i) const { return i * spacing(); }

  bool operator==(const GridSpec&) const = default;
};

/// Validating constructor; throws ConfigError on odd n, n < 8,
/// box_length <= 0, dim outside {2,3} or dealias_fraction outside (0,1].
GridSpec make_grid(int dim, int n, double box_length, double dealias_fraction = 2.0 / 3.0);

/// Throws DomainError unless the two grids are identical.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

/// Real scalar samples on a grid.
class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0);
  Field(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

  double max_abs() const;
  double mean() const;
  bool all_finite() const;

  bool operator==(const Field&) const = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);
/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// Flat index of a multi-index (i0, i1[, i2]).
std::size_t flat_index(const GridSpec& grid, int i0, int i1, int i2 = 0);

/// Samples f(x) at every grid point; x has grid.dim entries.
template <class Fn>
Field sample(const GridSpec& grid, Fn&& fn) {
  Field out(grid);
  const int n = grid.n;
  double x[3] = {0.0, 0.0, 0.0};
  std::size_t idx = 0;
  if (grid.dim == 2) {
    for (int i = 0; i < n; ++i) {
      x[0] = grid.coordinate(i);
      for (int j = 0; j < n; ++j) {
        x[1] = grid.coordinate(j);
        out[idx++] = fn(std::span<const double>(x, 2));
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      x[0] = grid.coordinate(i);
      for (int j = 0; j < n; ++j) {
        x[1] = grid.coordinate(j);
        for (int k = 0; k < n; ++k) {
          x[2] = grid.coordinate(k);
          out[idx++] = fn(std::span<const double>(x, 3));
        }
      }
    }
  }
  return out;
}

/// dim scalar components on a shared grid.
struct VectorField {
  std::vector<Field> components;

  VectorField() = default;
  explicit VectorField(const GridSpec& grid, double fill = 0.0);
  explicit VectorField(std::vector<Field> comps);

  const GridSpec& grid() const { return components.front().grid(); }
  int dim() const { return static_cast<int>(components.size()); }
  Field& operator[](int i) { return components[static_cast<std::size_t>(i)]; }
  const Field& operator[](int i) const { return components[static_cast<std::size_t>(i)]; }

  VectorField& operator+=(const VectorField& other);
  VectorField& operator-=(const VectorField& other);
  VectorField& operator*=(double s);
  double max_abs() const;

  bool operator==(const VectorField&) const = default;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

/// Symmetric tensor field, upper triangle stored row by row:
/// 2D slots (00, 01, 11); 3D slots (00, 01, 02, 11, 12, 22).
struct SymTensorField {
  std::vector<Field> components;

  SymTensorField() = default;
  explicit SymTensorField(const GridSpec& grid, double fill = 0.0);
  explicit SymTensorField(std::vector<Field> comps);

  static int slot(int i, int j, int dim);
  /// Frobenius multiplicity of a slot: 1 on the diagonal, 2 off it.
  static double multiplicity(int slot, int dim);
  static bool is_diagonal(int slot, int dim);

  const GridSpec& grid() const { return components.front().grid(); }
  int dim() const;
  Field& at(int i, int j) { return components[static_cast<std::size_t>(slot(i, j, dim()))]; }
  const Field& at(int i, int j) const {
    return components[static_cast<std::size_t>(slot(i, j, dim()))];
  }

  SymTensorField& operator+=(const SymTensorField& other);
  SymTensorField& operator-=(const SymTensorField& other);
  SymTensorField& operator*=(double s);
  double max_abs() const;

  bool operator==(const SymTensorField&) const = default;
};

SymTensorField operator+(SymTensorField a, const SymTensorField& b);
SymTensorField operator-(SymTensorField a, const SymTensorField& b);
SymTensorField operator*(double s, SymTensorField a);

/// Frobenius L2 inner product, sum_ij <a_ij, b_ij>, by torus quadrature.
double inner(const SymTensorField& a, const SymTensorField& b);
double inner(const VectorField& a, const VectorField& b);
double inner(const Field& a, const Field& b);

}  // namespace oblim
