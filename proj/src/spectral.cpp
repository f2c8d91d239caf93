#include "oblim/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "oblim/errors.hpp"

namespace oblim {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }

}  // namespace

Spectrum::Spectrum(const GridSpec& g) : grid(g) {
  std::size_t count = static_cast<std::size_t>(g.n / 2 + 1);
  for (int d = 0; d + 1 < g.dim; ++d) count *= static_cast<std::size_t>(g.n);
  coeffs.assign(count, Complex(0.0, 0.0));
}

Spectrum& Spectrum::operator+=(const Spectrum& other) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += other.coeffs[i];
  return *this;
}

Spectrum& Spectrum::operator-=(const Spectrum& other) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= other.coeffs[i];
  return *this;
}

Spectrum& Spectrum::operator*=(double s) {
  for (auto& c : coeffs) c *= s;
  return *this;
}

Spectrum& Spectrum::axpy(double s, const Spectrum& other) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += s * other.coeffs[i];
  return *this;
}

// ---------------------------------------------------------------------------

SpectralContext::SpectralContext(const GridSpec& grid) : grid_(grid) {
  const int n = grid.n;
  const int dim = grid.dim;
  const int half = n / 2 + 1;
  const double unit = grid.wavenumber_unit();
  const double cutoff = grid.dealias_fraction * (n / 2);

  std::size_t count = static_cast<std::size_t>(half);
  for (int d = 0; d + 1 < dim; ++d) count *= static_cast<std::size_t>(n);

  modes_.assign(static_cast<std::size_t>(dim), std::vector<int>(count));
  kd_.assign(static_cast<std::size_t>(dim), std::vector<double>(count));
  ksq_.assign(count, 0.0);
  retained_.assign(count, 1);
  hermitian_weight_.assign(count, 2.0);

  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rest = idx;
    const int last = static_cast<int>(rest % static_cast<std::size_t>(half));
    rest /= static_cast<std::size_t>(half);
    int m[3] = {0, 0, 0};
    m[dim - 1] = last;
    for (int a = dim - 2; a >= 0; --a) {
      m[a] = signed_mode(static_cast<int>(rest % static_cast<std::size_t>(n)), n);
      rest /= static_cast<std::size_t>(n);
    }
    double ksq = 0.0;
    for (int a = 0; a < dim; ++a) {
      modes_[static_cast<std::size_t>(a)][idx] = m[a];
      const bool nyquist = std::abs(m[a]) == n / 2;
      const double k = nyquist ? 0.0 : unit * m[a];
      kd_[static_cast<std::size_t>(a)][idx] = k;
      ksq += k * k;
      if (std::abs(m[a]) > cutoff) retained_[idx] = 0;
    }
    ksq_[idx] = ksq;
    if (last == 0 || last == n / 2) hermitian_weight_[idx] = 1.0;
  }

  int dims[3] = {n, n, n};
  std::vector<double> real(grid.size());
  std::vector<Complex> cplx(count);
  std::lock_guard lock(planner_mutex());
  plan_forward_ = fftw_plan_dft_r2c(dim, dims, real.data(),
                                    reinterpret_cast<fftw_complex*>(cplx.data()),
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_inverse_ = fftw_plan_dft_c2r(dim, dims, reinterpret_cast<fftw_complex*>(cplx.data()),
                                    real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_forward_ == nullptr || plan_inverse_ == nullptr)
    throw DomainError("FFTW planning failed");
}

SpectralContext::~SpectralContext() {
  std::lock_guard lock(planner_mutex());
  if (plan_forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_inverse_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
}

std::shared_ptr<const SpectralContext> SpectralContext::get(const GridSpec& grid) {
  using Key = std::tuple<int, int, double, double>;
  static std::mutex cache_mutex;
  static std::map<Key, std::shared_ptr<const SpectralContext>> cache;
  const Key key{grid.dim, grid.n, grid.box_length, grid.dealias_fraction};
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const SpectralContext> ctx(new SpectralContext(grid));
  cache.emplace(key, ctx);
  return ctx;
}

std::size_t SpectralContext::index_of(const int* m) const {
  const int n = grid_.n;
  const int half = n / 2 + 1;
  std::size_t idx = 0;
  for (int a = 0; a + 1 < grid_.dim; ++a) {
    const int i = m[a] < 0 ? m[a] + n : m[a];
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  return idx * static_cast<std::size_t>(half) + static_cast<std::size_t>(m[grid_.dim - 1]);
}

Spectrum SpectralContext::forward(const Field& f) const {
  require_same_grid(f.grid(), grid_, "forward transform");
  Spectrum out(grid_);
  // r2c does not modify its input, but the FFTW signature is non-const.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_forward_), const_cast<double*>(f.values().data()),
                       reinterpret_cast<fftw_complex*>(out.coeffs.data()));
  return out;
}

Field SpectralContext::inverse(const Spectrum& s) const {
  require_same_grid(s.grid, grid_, "inverse transform");
  std::vector<Complex> scratch = s.coeffs;  // c2r destroys its input
  Field out(grid_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_inverse_),
                       reinterpret_cast<fftw_complex*>(scratch.data()), out.values().data());
  out *= 1.0 / static_cast<double>(grid_.size());
  return out;
}

// ---------------------------------------------------------------------------

Spectrum forward(const Field& f) { return SpectralContext::get(f.grid())->forward(f); }

Field inverse(const Spectrum& s) { return SpectralContext::get(s.grid)->inverse(s); }

void differentiate(Spectrum& s, int axis) {
  if (axis < 0 || axis >= s.grid.dim) throw DomainError("derivative axis out of range");
  const auto ctx = SpectralContext::get(s.grid);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= Complex(0.0, ctx->kd(i, axis));
}

void truncate(Spectrum& s) {
  const auto ctx = SpectralContext::get(s.grid);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!ctx->retained(i)) s[i] = Complex(0.0, 0.0);
}

double parseval_norm_squared(const Spectrum& s) {
  const auto ctx = SpectralContext::get(s.grid);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += ctx->hermitian_weight(i) * std::norm(s[i]);
  return sum * s.grid.cell_volume() / static_cast<double>(s.grid.size());
}

Field spectral_derivative(const Field& f, int axis) {
  if (axis < 0 || axis >= f.grid().dim) throw DomainError("derivative axis out of range");
  auto s = forward(f);
  differentiate(s, axis);
  return inverse(s);
}

VectorField gradient(const Field& f) {
  const auto s = forward(f);
  std::vector<Field> comps;
  for (int a = 0; a < f.grid().dim; ++a) {
    auto d = s;
    differentiate(d, a);
    comps.push_back(inverse(d));
  }
  return VectorField(std::move(comps));
}

Field divergence(const VectorField& v) {
  Spectrum acc(v.grid());
  for (int a = 0; a < v.dim(); ++a) {
    require_same_grid(v[a].grid(), v.grid(), "divergence");
    auto s = forward(v[a]);
    differentiate(s, a);
    acc += s;
  }
  return inverse(acc);
}

Field laplacian(const Field& f) {
  auto s = forward(f);
  const auto ctx = SpectralContext::get(f.grid());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= -ctx->ksq(i);
  return inverse(s);
}

VectorField tensor_divergence(const SymTensorField& tau) {
  const int dim = tau.dim();
  std::vector<Spectrum> slots;
  for (const auto& c : tau.components) {
    require_same_grid(c.grid(), tau.grid(), "tensor_divergence");
    slots.push_back(forward(c));
  }
  std::vector<Field> comps;
  for (int i = 0; i < dim; ++i) {
    Spectrum acc(tau.grid());
    for (int j = 0; j < dim; ++j) {
      auto s = slots[static_cast<std::size_t>(SymTensorField::slot(i, j, dim))];
      differentiate(s, j);
      acc += s;
    }
    comps.push_back(inverse(acc));
  }
  return VectorField(std::move(comps));
}

Field dealias(const Field& f) {
  auto s = forward(f);
  truncate(s);
  return inverse(s);
}

void leray_project(std::vector<Spectrum>& v) {
  if (v.empty()) return;
  const auto ctx = SpectralContext::get(v.front().grid);
  const int dim = static_cast<int>(v.size());
  for (std::size_t i = 0; i < v.front().size(); ++i) {
    const double ksq = ctx->ksq(i);
    if (ksq == 0.0) continue;
    Complex kdotv(0.0, 0.0);
    for (int a = 0; a < dim; ++a) kdotv += ctx->kd(i, a) * v[static_cast<std::size_t>(a)][i];
    for (int a = 0; a < dim; ++a) v[static_cast<std::size_t>(a)][i] -= ctx->kd(i, a) * kdotv / ksq;
  }
}

VectorField leray_project(const VectorField& v) {
  std::vector<Spectrum> s;
  for (const auto& c : v.components) s.push_back(forward(c));
  leray_project(s);
  std::vector<Field> comps;
  for (const auto& c : s) comps.push_back(inverse(c));
  return VectorField(std::move(comps));
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> multi_indices(int dim, int order) {
  std::vector<std::vector<int>> out;
  for (int degree = 0; degree <= order; ++degree) {
    if (dim == 2) {
      for (int a = degree; a >= 0; --a) out.push_back({a, degree - a});
    } else {
      for (int a = degree; a >= 0; --a)
        for (int b = degree - a; b >= 0; --b) out.push_back({a, b, degree - a - b});
    }
  }
  return out;
}

namespace {

void check_weight(const GridSpec& grid, const std::optional<Field>& weight) {
  if (!weight) return;
  require_same_grid(grid, weight->grid(), "sobolev_norm weight");
  for (std::size_t i = 0; i < weight->size(); ++i)
    if (!((*weight)[i] > 0.0)) throw DomainError("sobolev_norm weight must be strictly positive");
}

// Sum over multi-indices of the weighted squared L2 norm of d^alpha f.
double sobolev_squared(const Field& f, int order, const std::optional<Field>& weight) {
  if (order < 0 || order > 4) throw DomainError("sobolev order must lie in 0..4");
  const auto& grid = f.grid();
  const auto ctx = SpectralContext::get(grid);
  const Spectrum base = order > 0 ? ctx->forward(f) : Spectrum();
  double total = 0.0;
  for (const auto& alpha : multi_indices(grid.dim, order)) {
    int degree = 0;
    for (int a : alpha) degree += a;
    Field deriv;
    if (degree == 0) {
      deriv = f;
    } else {
      Spectrum s = base;
      for (std::size_t i = 0; i < s.size(); ++i) {
        Complex mult(1.0, 0.0);
        for (int a = 0; a < grid.dim; ++a)
          for (int p = 0; p < alpha[static_cast<std::size_t>(a)]; ++p) mult *= Complex(0.0, ctx->kd(i, a));
        s[i] *= mult;
      }
      deriv = ctx->inverse(s);
    }
    double sum = 0.0;
    if (weight) {
      for (std::size_t i = 0; i < deriv.size(); ++i) sum += (*weight)[i] * (deriv[i] * deriv[i]);
    } else {
      for (std::size_t i = 0; i < deriv.size(); ++i) sum += deriv[i] * deriv[i];
    }
    total += sum;
  }
  return total * grid.cell_volume();
}

}  // namespace

double sobolev_norm(const Field& f, int order, const std::optional<Field>& weight) {
  check_weight(f.grid(), weight);
  return std::sqrt(sobolev_squared(f, order, weight));
}

double sobolev_norm(const VectorField& v, int order, const std::optional<Field>& weight) {
  check_weight(v.grid(), weight);
  double total = 0.0;
  for (const auto& c : v.components) total += sobolev_squared(c, order, weight);
  return std::sqrt(total);
}

double sobolev_norm(const SymTensorField& t, int order, const std::optional<Field>& weight) {
  check_weight(t.grid(), weight);
  const int dim = t.dim();
  double total = 0.0;
  for (std::size_t s = 0; s < t.components.size(); ++s)
    total += SymTensorField::multiplicity(static_cast<int>(s), dim) *
             sobolev_squared(t.components[s], order, weight);
  return std::sqrt(total);
}

}  // namespace oblim
