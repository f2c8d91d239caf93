#include "oblim/random.hpp"

#include "oblim/errors.hpp"
#include "oblim/spectral.hpp"

namespace oblim {

namespace {

// A mode vector is canonical if its last component is positive, or the last
// component is zero and the first nonzero component is positive. Every
// nonzero real mode pair {m, -m} has exactly one canonical member.
bool canonical(const int* m, int dim) {
  if (m[dim - 1] > 0) return true;
  for (int a = 0; a < dim; ++a) {
    if (m[a] > 0) return true;
    if (m[a] < 0) return false;
  }
  return false;
}

}  // namespace

Field random_band_limited(const GridSpec& grid, Lcg64& gen, int max_mode) {
  if (max_mode < 1 || max_mode >= grid.n / 2) throw ConfigError("max_mode", "outside (0, n/2)");
  const auto ctx = SpectralContext::get(grid);
  Spectrum s(grid);
  const double scale = 0.5 * static_cast<double>(grid.size());
  const int dim = grid.dim;
  int m[3] = {0, 0, 0};
  auto visit = [&]() {
    if (!canonical(m, dim)) return;
    const double a = gen.symmetric();
    const double b = gen.symmetric();
    const Complex c = scale * Complex(a, -b);
    s[ctx->index_of(m)] = c;
    if (m[dim - 1] == 0) {
      int neg[3] = {-m[0], -m[1], -m[2]};
      s[ctx->index_of(neg)] = std::conj(c);
    }
  };
  if (dim == 2) {
    for (m[0] = -max_mode; m[0] <= max_mode; ++m[0])
      for (m[1] = 0; m[1] <= max_mode; ++m[1]) visit();
  } else {
    for (m[0] = -max_mode; m[0] <= max_mode; ++m[0])
      for (m[1] = -max_mode; m[1] <= max_mode; ++m[1])
        for (m[2] = 0; m[2] <= max_mode; ++m[2]) visit();
  }
  return ctx->inverse(s);
}

VectorField random_band_limited_vector(const GridSpec& grid, Lcg64& gen, int max_mode) {
  std::vector<Field> comps;
  for (int i = 0; i < grid.dim; ++i) comps.push_back(random_band_limited(grid, gen, max_mode));
  return VectorField(std::move(comps));
}

SymTensorField random_band_limited_tensor(const GridSpec& grid, Lcg64& gen, int max_mode) {
  std::vector<Field> comps;
  for (int s = 0; s < grid.tensor_slots(); ++s) comps.push_back(random_band_limited(grid, gen, max_mode));
  return SymTensorField(std::move(comps));
}

}  // namespace oblim
