#include "oblim/model.hpp"

#include <cassert>
#include <cmath>

#include "oblim/errors.hpp"

namespace oblim {

void PhysicalParams::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(a > 0.0 && std::isfinite(a), "a", "must be positive");
  require(gamma > 1.0 && std::isfinite(gamma), "gamma", "must be > 1");
  require(mu1 > 0.0 && std::isfinite(mu1), "mu1", "must be positive");
  require(mu2 > 0.0 && std::isfinite(mu2), "mu2", "must be positive");
  require(nu > 0.0 && std::isfinite(nu), "nu", "must be positive");
  require(beta >= 0.0 && std::isfinite(beta), "beta", "must be >= 0");
  require(k > 0.0 && std::isfinite(k), "k", "must be positive");
  require(L_poly >= 1.0 && std::isfinite(L_poly), "L_poly", "must be >= 1");
  require(zbar >= 0.0 && std::isfinite(zbar), "zbar", "must be >= 0");
  require(A0 > 0.0 && std::isfinite(A0), "A0", "must be positive");
}

Field CompressibleState::density() const {
  Field rho(phi.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 + epsilon * phi[i];
  return rho;
}

CompressibleState CompressibleState::rest(const GridSpec& grid, double epsilon) {
  return CompressibleState{Field(grid), VectorField(grid), Field(grid, 1.0), SymTensorField(grid),
                           epsilon, 0.0};
}

IncompressibleState IncompressibleState::rest(const GridSpec& grid) {
  return IncompressibleState{VectorField(grid), Field(grid, 1.0), SymTensorField(grid), Field(grid),
                             0.0};
}

TendencyParts::TendencyParts(const GridSpec& grid)
    : d_phi(grid), d_u(grid), d_eta(grid), d_tau(grid) {}

TendencyParts& TendencyParts::operator+=(const TendencyParts& other) {
  d_phi += other.d_phi;
  d_u += other.d_u;
  d_eta += other.d_eta;
  d_tau += other.d_tau;
  return *this;
}

TendencyParts Tendency::total() const {
  TendencyParts out = stiff_linear;
  out += nonstiff;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void require_positive_density(const Field& rho) {
  for (std::size_t i = 0; i < rho.size(); ++i)
    if (!(rho[i] > 0.0)) throw StateError("density non-positive");
}

}  // namespace

Field pressure(const Field& rho, const PhysicalParams& p) {
  require_positive_density(rho);
  Field out(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = p.a * std::pow(rho[i], p.gamma);
  return out;
}

Field pressure_prime(const Field& rho, const PhysicalParams& p) {
  require_positive_density(rho);
  Field out(rho.grid());
  for (std::size_t i = 0; i < rho.size(); ++i) out[i] = p.a * p.gamma * std::pow(rho[i], p.gamma - 1.0);
  return out;
}

SymTensorField recombine_stress(const SymTensorField& tau, const Field& eta, const PhysicalParams& p) {
  require_same_grid(tau.grid(), eta.grid(), "recombine_stress");
  SymTensorField out = tau;
  const int dim = tau.dim();
  for (int i = 0; i < dim; ++i) {
    Field& diag = out.at(i, i);
    for (std::size_t x = 0; x < diag.size(); ++x) diag[x] += p.k * eta[x];
  }
  return out;
}

std::vector<std::string> validate_state(const CompressibleState& s) {
  std::vector<std::string> out;
  const auto& g = s.phi.grid();
  bool grids_ok = s.eta.grid() == g && s.u.dim() == g.dim && s.tau.dim() == g.dim;
  for (const auto& c : s.u.components) grids_ok = grids_ok && c.grid() == g;
  for (const auto& c : s.tau.components) grids_ok = grids_ok && c.grid() == g;
  if (!grids_ok) {
    out.emplace_back("grid mismatch between fields");
    return out;
  }
  bool finite = s.phi.all_finite() && s.eta.all_finite();
  for (const auto& c : s.u.components) finite = finite && c.all_finite();
  for (const auto& c : s.tau.components) finite = finite && c.all_finite();
  if (!finite) out.emplace_back("non-finite values");
  if (!(s.epsilon > 0.0 && s.epsilon <= 1.0)) out.emplace_back("epsilon outside (0, 1]");
  if (!(s.time >= 0.0)) out.emplace_back("negative time");
  for (std::size_t i = 0; i < s.phi.size(); ++i)
    if (!(1.0 + s.epsilon * s.phi[i] > 0.0)) {
      out.emplace_back("density non-positive");
      break;
    }
  for (std::size_t i = 0; i < s.eta.size(); ++i)
    if (s.eta[i] < -1e-12) {
      out.emplace_back("polymer density negative");
      break;
    }
  return out;
}

std::vector<std::string> validate_state(const IncompressibleState& s) {
  std::vector<std::string> out;
  const auto& g = s.eta.grid();
  bool grids_ok = s.pi.grid() == g && s.u.dim() == g.dim && s.tau.dim() == g.dim;
  for (const auto& c : s.u.components) grids_ok = grids_ok && c.grid() == g;
  for (const auto& c : s.tau.components) grids_ok = grids_ok && c.grid() == g;
  if (!grids_ok) {
    out.emplace_back("grid mismatch between fields");
    return out;
  }
  bool finite = s.eta.all_finite() && s.pi.all_finite();
  for (const auto& c : s.u.components) finite = finite && c.all_finite();
  for (const auto& c : s.tau.components) finite = finite && c.all_finite();
  if (!finite) {
    out.emplace_back("non-finite values");
    return out;
  }
  if (!(s.time >= 0.0)) out.emplace_back("negative time");
  if (divergence(s.u).max_abs() >= 1e-10) out.emplace_back("velocity not divergence-free");
  if (std::abs(s.pi.mean()) > 1e-12 * (1.0 + s.pi.max_abs())) out.emplace_back("pressure mean not zero");
  for (std::size_t i = 0; i < s.eta.size(); ++i)
    if (s.eta[i] < -1e-12) {
      out.emplace_back("polymer density negative");
      break;
    }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

namespace {

Field derivative_of(const SpectralContext& ctx, const Spectrum& s, int axis) {
  Spectrum d = s;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= Complex(0.0, ctx.kd(i, axis));
  return ctx.inverse(d);
}

// sum_j d_j (q u_j) in spectral space.
Spectrum flux_divergence(const SpectralContext& ctx, const Field& q, const VectorField& u) {
  Spectrum acc(ctx.grid());
  for (int j = 0; j < u.dim(); ++j) {
    const Spectrum prod = ctx.forward(hadamard(q, u[j]));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += Complex(0.0, ctx.kd(i, j)) * prod[i];
  }
  return acc;
}

void truncate_with(const SpectralContext& ctx, Spectrum& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!ctx.retained(i)) s[i] = Complex(0.0, 0.0);
}

// G[i][j] = d_j u_i from the packed velocity spectra.
std::vector<std::vector<Field>> velocity_gradient(const SpectralContext& ctx, const Packed& y,
                                                  const Layout& lay) {
  std::vector<std::vector<Field>> grad(static_cast<std::size_t>(lay.dim));
  for (int i = 0; i < lay.dim; ++i)
    for (int j = 0; j < lay.dim; ++j)
      grad[static_cast<std::size_t>(i)].push_back(
          derivative_of(ctx, y[static_cast<std::size_t>(lay.u(i))], j));
  return grad;
}

VectorField tensor_divergence_of(const SpectralContext& ctx, const Packed& y, const Layout& lay) {
  std::vector<Field> comps;
  for (int i = 0; i < lay.dim; ++i) {
    Spectrum acc(ctx.grid());
    for (int j = 0; j < lay.dim; ++j) {
      const auto& t = y[static_cast<std::size_t>(lay.tau(SymTensorField::slot(i, j, lay.dim)))];
      for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += Complex(0.0, ctx.kd(m, j)) * t[m];
    }
    comps.push_back(ctx.inverse(acc));
  }
  return VectorField(std::move(comps));
}

// Explicit eta and tau right-hand sides, shared by both systems:
//   eta: -div(eta u)
//   tau: -div(u tau) + grad_u tau + tau grad_u^T + k eta (grad_u + grad_u^T)
void polymer_nonstiff(const SpectralContext& ctx, const VectorField& u,
                      const std::vector<std::vector<Field>>& G, const Field& eta,
                      const SymTensorField& tau, const PhysicalParams& p, const Layout& lay,
                      Packed& out) {
  const int dim = lay.dim;
  const std::size_t npts = eta.size();

  Spectrum d_eta = flux_divergence(ctx, eta, u);
  d_eta *= -1.0;
  truncate_with(ctx, d_eta);
  out[static_cast<std::size_t>(lay.eta())] = std::move(d_eta);

  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const int slot = SymTensorField::slot(i, j, dim);
      const auto& Gi = G[static_cast<std::size_t>(i)];
      const auto& Gj = G[static_cast<std::size_t>(j)];
      Field stretch(ctx.grid());
      for (std::size_t x = 0; x < npts; ++x) {
        double acc = 0.0;
        for (int l = 0; l < dim; ++l)
          acc += Gi[static_cast<std::size_t>(l)][x] * tau.at(l, j)[x] +
                 tau.at(i, l)[x] * Gj[static_cast<std::size_t>(l)][x];
        acc += p.k * eta[x] * (Gi[static_cast<std::size_t>(j)][x] + Gj[static_cast<std::size_t>(i)][x]);
        stretch[x] = acc;
      }
      Spectrum d_tau = ctx.forward(stretch);
      d_tau -= flux_divergence(ctx, tau.components[static_cast<std::size_t>(slot)], u);
      truncate_with(ctx, d_tau);
      out[static_cast<std::size_t>(lay.tau(slot))] = std::move(d_tau);
    }
  }
}

TendencyParts to_parts(const Packed& y, const GridSpec& grid) {
  const auto ctx = SpectralContext::get(grid);
  const Layout lay{grid.dim};
  TendencyParts out(grid);
  out.d_phi = ctx->inverse(y[static_cast<std::size_t>(lay.phi())]);
  for (int i = 0; i < grid.dim; ++i) out.d_u[i] = ctx->inverse(y[static_cast<std::size_t>(lay.u(i))]);
  out.d_eta = ctx->inverse(y[static_cast<std::size_t>(lay.eta())]);
  for (int s = 0; s < grid.tensor_slots(); ++s)
    out.d_tau.components[static_cast<std::size_t>(s)] = ctx->inverse(y[static_cast<std::size_t>(lay.tau(s))]);
  return out;
}

}  // namespace

Packed pack(const CompressibleState& s) {
  const auto ctx = SpectralContext::get(s.grid());
  const Layout lay{s.grid().dim};
  Packed y(static_cast<std::size_t>(lay.count()));
  y[static_cast<std::size_t>(lay.phi())] = ctx->forward(s.phi);
  for (int i = 0; i < lay.dim; ++i) y[static_cast<std::size_t>(lay.u(i))] = ctx->forward(s.u[i]);
  y[static_cast<std::size_t>(lay.eta())] = ctx->forward(s.eta);
  for (int t = 0; t < s.grid().tensor_slots(); ++t)
    y[static_cast<std::size_t>(lay.tau(t))] = ctx->forward(s.tau.components[static_cast<std::size_t>(t)]);
  return y;
}

Packed pack(const IncompressibleState& s) {
  const auto ctx = SpectralContext::get(s.grid());
  const Layout lay{s.grid().dim};
  Packed y(static_cast<std::size_t>(lay.count()));
  y[static_cast<std::size_t>(lay.phi())] = Spectrum(s.grid());
  for (int i = 0; i < lay.dim; ++i) y[static_cast<std::size_t>(lay.u(i))] = ctx->forward(s.u[i]);
  y[static_cast<std::size_t>(lay.eta())] = ctx->forward(s.eta);
  for (int t = 0; t < s.grid().tensor_slots(); ++t)
    y[static_cast<std::size_t>(lay.tau(t))] = ctx->forward(s.tau.components[static_cast<std::size_t>(t)]);
  return y;
}

CompressibleState unpack_compressible(const Packed& y, const CompressibleState& like) {
  auto parts = to_parts(y, like.grid());
  return CompressibleState{std::move(parts.d_phi), std::move(parts.d_u), std::move(parts.d_eta),
                           std::move(parts.d_tau), like.epsilon, like.time};
}

IncompressibleState unpack_incompressible(const Packed& y, const IncompressibleState& like) {
  auto parts = to_parts(y, like.grid());
  return IncompressibleState{std::move(parts.d_u), std::move(parts.d_eta), std::move(parts.d_tau),
                             like.pi, like.time};
}

void axpy(Packed& y, double s, const Packed& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(s, x[i]);
}

Packed compressible_nonstiff(const CompressibleState& s, const Packed& y, const PhysicalParams& p) {
  const GridSpec& grid = s.grid();
  const auto ctx_ptr = SpectralContext::get(grid);
  const SpectralContext& ctx = *ctx_ptr;
  const Layout lay{grid.dim};
  const int dim = grid.dim;
  const double eps = s.epsilon;
  const std::size_t npts = grid.size();

  Packed out(static_cast<std::size_t>(lay.count()));

  // Continuity: -div(phi u) = -u.grad(phi) - phi div(u).
  {
    Spectrum d_phi = flux_divergence(ctx, s.phi, s.u);
    d_phi *= -1.0;
    truncate_with(ctx, d_phi);
    out[static_cast<std::size_t>(lay.phi())] = std::move(d_phi);
  }

  const auto G = velocity_gradient(ctx, y, lay);
  const auto& phi_hat = y[static_cast<std::size_t>(lay.phi())];
  std::vector<Field> grad_phi;
  for (int j = 0; j < dim; ++j) grad_phi.push_back(derivative_of(ctx, phi_hat, j));

  std::vector<Field> lap_u;
  std::vector<Field> graddiv_u;
  {
    Spectrum div_hat(grid);
    for (int j = 0; j < dim; ++j) {
      const auto& uj = y[static_cast<std::size_t>(lay.u(j))];
      for (std::size_t m = 0; m < div_hat.size(); ++m) div_hat[m] += Complex(0.0, ctx.kd(m, j)) * uj[m];
    }
    for (int i = 0; i < dim; ++i) {
      Spectrum lap = y[static_cast<std::size_t>(lay.u(i))];
      for (std::size_t m = 0; m < lap.size(); ++m) lap[m] *= -ctx.ksq(m);
      lap_u.push_back(ctx.inverse(lap));
      graddiv_u.push_back(derivative_of(ctx, div_hat, i));
    }
  }
  const VectorField div_tau = tensor_divergence_of(ctx, y, lay);

  // grad(beta (L-1) eta + zbar eta^2)
  std::vector<Field> grad_g;
  {
    Field g(grid);
    for (std::size_t x = 0; x < npts; ++x)
      g[x] = p.beta * (p.L_poly - 1.0) * s.eta[x] + p.zbar * s.eta[x] * s.eta[x];
    Spectrum g_hat = ctx.forward(g);
    truncate_with(ctx, g_hat);
    for (int j = 0; j < dim; ++j) grad_g.push_back(derivative_of(ctx, g_hat, j));
  }

  const double a_gamma = p.a * p.gamma;
  for (int i = 0; i < dim; ++i) {
    const auto& Gi = G[static_cast<std::size_t>(i)];
    Field rhs(grid);
    for (std::size_t x = 0; x < npts; ++x) {
      const double dens_pert = eps * s.phi[x];
      const double rho = 1.0 + dens_pert;
      if (!(rho > 0.0)) throw StateError("density non-positive");
      const double inv_rho = 1.0 / rho;
      const double inv_rho_m1 = -dens_pert / rho;
      // (a gamma - P'(rho)/rho) / eps without cancellation.
      const double acoustic_residue =
          p.gamma == 2.0 ? 0.0
                         : -a_gamma * std::expm1((p.gamma - 2.0) * std::log1p(dens_pert)) / eps;
      double adv = 0.0;
      for (int j = 0; j < dim; ++j) adv += s.u[j][x] * Gi[static_cast<std::size_t>(j)][x];
      rhs[x] = -adv + acoustic_residue * grad_phi[static_cast<std::size_t>(i)][x] -
               inv_rho * grad_g[static_cast<std::size_t>(i)][x] +
               p.mu1 * inv_rho_m1 * lap_u[static_cast<std::size_t>(i)][x] +
               p.mu2 * inv_rho_m1 * graddiv_u[static_cast<std::size_t>(i)][x] +
               (p.beta / p.k) * inv_rho * div_tau[i][x];
    }
    Spectrum rhs_hat = ctx.forward(rhs);
    truncate_with(ctx, rhs_hat);
    out[static_cast<std::size_t>(lay.u(i))] = std::move(rhs_hat);
  }

  polymer_nonstiff(ctx, s.u, G, s.eta, s.tau, p, lay, out);
  return out;
}

Packed compressible_stiff_apply(const Packed& y, double epsilon, const PhysicalParams& p) {
  const GridSpec& grid = y.front().grid;
  const auto ctx = SpectralContext::get(grid);
  const Layout lay{grid.dim};
  const int dim = grid.dim;
  Packed out;
  for (const auto& s : y) out.emplace_back(s.grid);
  const double s_ac = 1.0 / epsilon;
  const double c_ac = p.a * p.gamma / epsilon;
  for (std::size_t m = 0; m < y.front().size(); ++m) {
    const double ksq = ctx->ksq(m);
    Complex kdotu(0.0, 0.0);
    for (int j = 0; j < dim; ++j) kdotu += ctx->kd(m, j) * y[static_cast<std::size_t>(lay.u(j))][m];
    const Complex I(0.0, 1.0);
    out[static_cast<std::size_t>(lay.phi())][m] = -s_ac * I * kdotu;
    const Complex phi = y[static_cast<std::size_t>(lay.phi())][m];
    for (int i = 0; i < dim; ++i) {
      const double ki = ctx->kd(m, i);
      out[static_cast<std::size_t>(lay.u(i))][m] =
          -c_ac * I * ki * phi - p.mu1 * ksq * y[static_cast<std::size_t>(lay.u(i))][m] - p.mu2 * ki * kdotu;
    }
    out[static_cast<std::size_t>(lay.eta())][m] = -p.nu * ksq * y[static_cast<std::size_t>(lay.eta())][m];
    for (int t = 0; t < grid.tensor_slots(); ++t)
      out[static_cast<std::size_t>(lay.tau(t))][m] =
          -(p.nu * ksq + 0.5 * p.A0) * y[static_cast<std::size_t>(lay.tau(t))][m];
  }
  return out;
}

void compressible_stiff_solve(Packed& rhs, double h, double epsilon, const PhysicalParams& p) {
  const GridSpec& grid = rhs.front().grid;
  const auto ctx = SpectralContext::get(grid);
  const Layout lay{grid.dim};
  const int dim = grid.dim;
  const double s_ac = 1.0 / epsilon;
  const double c_ac = p.a * p.gamma / epsilon;
  const Complex I(0.0, 1.0);
  for (std::size_t m = 0; m < rhs.front().size(); ++m) {
    const double ksq = ctx->ksq(m);
    if (ksq > 0.0) {
      // Split u into the component along k and the part normal to it; the
      // normal part only feels shear viscosity, the parallel part couples
      // to phi through a 2x2 system.
      const double kk = std::sqrt(ksq);
      double khat[3] = {0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) khat[a] = ctx->kd(m, a) / kk;
      Complex u_par(0.0, 0.0);
      for (int a = 0; a < dim; ++a) u_par += khat[a] * rhs[static_cast<std::size_t>(lay.u(a))][m];
      const Complex r_phi = rhs[static_cast<std::size_t>(lay.phi())][m];

      const Complex a11(1.0, 0.0);
      const Complex a12 = I * h * s_ac * kk;
      const Complex a21 = I * h * c_ac * kk;
      const Complex a22(1.0 + h * (p.mu1 + p.mu2) * ksq, 0.0);
      const Complex det = a11 * a22 - a12 * a21;
      assert(std::abs(det) > 0.0);
      const Complex phi_new = (a22 * r_phi - a12 * u_par) / det;
      const Complex par_new = (a11 * u_par - a21 * r_phi) / det;
      const double perp_scale = 1.0 / (1.0 + h * p.mu1 * ksq);

      rhs[static_cast<std::size_t>(lay.phi())][m] = phi_new;
      for (int a = 0; a < dim; ++a) {
        Complex& ua = rhs[static_cast<std::size_t>(lay.u(a))][m];
        const Complex perp = ua - khat[a] * u_par;
        ua = perp * perp_scale + khat[a] * par_new;
      }
    }
    rhs[static_cast<std::size_t>(lay.eta())][m] /= (1.0 + h * p.nu * ksq);
    for (int t = 0; t < grid.tensor_slots(); ++t)
      rhs[static_cast<std::size_t>(lay.tau(t))][m] /= (1.0 + h * (p.nu * ksq + 0.5 * p.A0));
  }
}

Packed incompressible_nonstiff(const IncompressibleState& s, const Packed& y, const PhysicalParams& p) {
  const GridSpec& grid = s.grid();
  const auto ctx_ptr = SpectralContext::get(grid);
  const SpectralContext& ctx = *ctx_ptr;
  const Layout lay{grid.dim};
  const int dim = grid.dim;
  const std::size_t npts = grid.size();

  Packed out(static_cast<std::size_t>(lay.count()));
  out[static_cast<std::size_t>(lay.phi())] = Spectrum(grid);

  const auto G = velocity_gradient(ctx, y, lay);
  const VectorField div_tau = tensor_divergence_of(ctx, y, lay);
  std::vector<Spectrum> du;
  for (int i = 0; i < dim; ++i) {
    const auto& Gi = G[static_cast<std::size_t>(i)];
    Field rhs(grid);
    for (std::size_t x = 0; x < npts; ++x) {
      double adv = 0.0;
      for (int j = 0; j < dim; ++j) adv += s.u[j][x] * Gi[static_cast<std::size_t>(j)][x];
      rhs[x] = -adv + (p.beta / p.k) * div_tau[i][x];
    }
    Spectrum rhs_hat = ctx.forward(rhs);
    truncate_with(ctx, rhs_hat);
    du.push_back(std::move(rhs_hat));
  }
  leray_project(du);
  for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(lay.u(i))] = std::move(du[static_cast<std::size_t>(i)]);

  polymer_nonstiff(ctx, s.u, G, s.eta, s.tau, p, lay, out);
  return out;
}

Packed incompressible_stiff_apply(const Packed& y, const PhysicalParams& p) {
  const GridSpec& grid = y.front().grid;
  const auto ctx = SpectralContext::get(grid);
  const Layout lay{grid.dim};
  Packed out;
  for (const auto& s : y) out.emplace_back(s.grid);
  for (std::size_t m = 0; m < y.front().size(); ++m) {
    const double ksq = ctx->ksq(m);
    for (int i = 0; i < grid.dim; ++i)
      out[static_cast<std::size_t>(lay.u(i))][m] = -p.mu1 * ksq * y[static_cast<std::size_t>(lay.u(i))][m];
    out[static_cast<std::size_t>(lay.eta())][m] = -p.nu * ksq * y[static_cast<std::size_t>(lay.eta())][m];
    for (int t = 0; t < grid.tensor_slots(); ++t)
      out[static_cast<std::size_t>(lay.tau(t))][m] =
          -(p.nu * ksq + 0.5 * p.A0) * y[static_cast<std::size_t>(lay.tau(t))][m];
  }
  return out;
}

void incompressible_stiff_solve(Packed& rhs, double h, const PhysicalParams& p) {
  const GridSpec& grid = rhs.front().grid;
  const auto ctx = SpectralContext::get(grid);
  const Layout lay{grid.dim};
  for (std::size_t m = 0; m < rhs.front().size(); ++m) {
    const double ksq = ctx->ksq(m);
    for (int i = 0; i < grid.dim; ++i) rhs[static_cast<std::size_t>(lay.u(i))][m] /= (1.0 + h * p.mu1 * ksq);
    rhs[static_cast<std::size_t>(lay.eta())][m] /= (1.0 + h * p.nu * ksq);
    for (int t = 0; t < grid.tensor_slots(); ++t)
      rhs[static_cast<std::size_t>(lay.tau(t))][m] /= (1.0 + h * (p.nu * ksq + 0.5 * p.A0));
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

Tendency compressible_tendency(const CompressibleState& s, const PhysicalParams& p) {
  const auto violations = validate_state(s);
  if (!violations.empty()) throw StateError(violations.front());
  const auto y = detail::pack(s);
  return Tendency{detail::to_parts(detail::compressible_stiff_apply(y, s.epsilon, p), s.grid()),
                  detail::to_parts(detail::compressible_nonstiff(s, y, p), s.grid())};
}

Tendency incompressible_tendency(const IncompressibleState& s, const PhysicalParams& p) {
  if (divergence(s.u).max_abs() > 1e-8) throw StateError("velocity not divergence-free");
  const auto y = detail::pack(s);
  return Tendency{detail::to_parts(detail::incompressible_stiff_apply(y, p), s.grid()),
                  detail::to_parts(detail::incompressible_nonstiff(s, y, p), s.grid())};
}

}  // namespace oblim
