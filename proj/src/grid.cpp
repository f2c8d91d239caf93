#include "oblim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oblim/errors.hpp"

namespace oblim {

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
  return total;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

double GridSpec::volume() const { return std::pow(box_length, dim); }

double GridSpec::wavenumber_unit() const { return 2.0 * std::numbers::pi / box_length; }

GridSpec make_grid(int dim, int n, double box_length, double dealias_fraction) {
  if (dim != 2 && dim != 3) throw ConfigError("dim", "must be 2 or 3, got " + std::to_string(dim));
  if (n < 8 || n % 2 != 0)
    throw ConfigError("n", "must be even and >= 8, got " + std::to_string(n));
  if (!(box_length > 0.0) || !std::isfinite(box_length))
    throw ConfigError("box_length", "must be positive");
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
    throw ConfigError("dealias", "must lie in (0, 1]");
  return GridSpec{dim, n, box_length, dealias_fraction};
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) throw DomainError(std::string("grid mismatch in ") + what);
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("field length does not match grid");
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return values_.empty() ? 0.0 : s / static_cast<double>(values_.size());
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "hadamard");
  Field out(a.grid());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

std::size_t flat_index(const GridSpec& grid, int i0, int i1, int i2) {
  const auto n = static_cast<std::size_t>(grid.n);
  if (grid.dim == 2) return static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1);
  return (static_cast<std::size_t>(i0) * n + static_cast<std::size_t>(i1)) * n +
         static_cast<std::size_t>(i2);
}

// ---------------------------------------------------------------------------

VectorField::VectorField(const GridSpec& grid, double fill)
    : components(static_cast<std::size_t>(grid.dim), Field(grid, fill)) {}

VectorField::VectorField(std::vector<Field> comps) : components(std::move(comps)) {
  if (components.empty()) throw DomainError("vector field needs components");
  for (const auto& c : components) require_same_grid(c.grid(), components.front().grid(), "VectorField");
  if (static_cast<int>(components.size()) != components.front().grid().dim)
    throw DomainError("vector field component count must equal grid dimension");
}

VectorField& VectorField::operator+=(const VectorField& other) {
  for (int i = 0; i < dim(); ++i) (*this)[i] += other[i];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
  for (int i = 0; i < dim(); ++i) (*this)[i] -= other[i];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.max_abs());
  return m;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

// ---------------------------------------------------------------------------

SymTensorField::SymTensorField(const GridSpec& grid, double fill)
    : components(static_cast<std::size_t>(grid.tensor_slots()), Field(grid, fill)) {}

SymTensorField::SymTensorField(std::vector<Field> comps) : components(std::move(comps)) {
  if (components.empty()) throw DomainError("tensor field needs components");
  const auto& g = components.front().grid();
  for (const auto& c : components) require_same_grid(c.grid(), g, "SymTensorField");
  if (static_cast<int>(components.size()) != g.tensor_slots())
    throw DomainError("tensor field slot count must equal dim*(dim+1)/2");
}

int SymTensorField::slot(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  // Row i of the upper triangle starts after rows 0..i-1, which hold
  // dim, dim-1, ... entries.
  return i * dim - i * (i - 1) / 2 + (j - i);
}

bool SymTensorField::is_diagonal(int s, int dim) {
  for (int i = 0; i < dim; ++i)
    if (slot(i, i, dim) == s) return true;
  return false;
}

double SymTensorField::multiplicity(int s, int dim) { return is_diagonal(s, dim) ? 1.0 : 2.0; }

int SymTensorField::dim() const { return components.front().grid().dim; }

SymTensorField& SymTensorField::operator+=(const SymTensorField& other) {
  for (std::size_t s = 0; s < components.size(); ++s) components[s] += other.components[s];
  return *this;
}

SymTensorField& SymTensorField::operator-=(const SymTensorField& other) {
  for (std::size_t s = 0; s < components.size(); ++s) components[s] -= other.components[s];
  return *this;
}

SymTensorField& SymTensorField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

double SymTensorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.max_abs());
  return m;
}

SymTensorField operator+(SymTensorField a, const SymTensorField& b) { return a += b; }
SymTensorField operator-(SymTensorField a, const SymTensorField& b) { return a -= b; }
SymTensorField operator*(double s, SymTensorField a) { return a *= s; }

double inner(const Field& a, const Field& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += inner(a[i], b[i]);
  return s;
}

double inner(const SymTensorField& a, const SymTensorField& b) {
  const int dim = a.dim();
  double s = 0.0;
  for (int slot = 0; slot < static_cast<int>(a.components.size()); ++slot)
    s += SymTensorField::multiplicity(slot, dim) *
         inner(a.components[static_cast<std::size_t>(slot)], b.components[static_cast<std::size_t>(slot)]);
  return s;
}

}  // namespace oblim
