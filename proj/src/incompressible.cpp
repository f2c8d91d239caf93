#include "oblim/incompressible.hpp"

#include <algorithm>
#include <cmath>

#include "oblim/errors.hpp"
#include "oblim/spectral.hpp"

namespace oblim {

namespace {

void project_velocity(detail::Packed& y, int dim) {
  const detail::Layout lay{dim};
  std::vector<Spectrum> u;
  for (int i = 0; i < dim; ++i) u.push_back(std::move(y[static_cast<std::size_t>(lay.u(i))]));
  leray_project(u);
  for (int i = 0; i < dim; ++i) y[static_cast<std::size_t>(lay.u(i))] = std::move(u[static_cast<std::size_t>(i)]);
}

}  // namespace

Field recover_pressure(const IncompressibleState& s, const PhysicalParams& p) {
  const GridSpec& grid = s.grid();
  const auto ctx = SpectralContext::get(grid);
  const int dim = grid.dim;

  std::vector<Spectrum> u_hat;
  for (int i = 0; i < dim; ++i) u_hat.push_back(ctx->forward(s.u[i]));
  const VectorField div_tau = tensor_divergence(s.tau);

  Spectrum div_force(grid);
  for (int i = 0; i < dim; ++i) {
    Field force(grid);
    for (int j = 0; j < dim; ++j) {
      Spectrum d = u_hat[static_cast<std::size_t>(i)];
      differentiate(d, j);
      const Field dj_ui = ctx->inverse(d);
      for (std::size_t x = 0; x < force.size(); ++x) force[x] -= s.u[j][x] * dj_ui[x];
    }
    for (std::size_t x = 0; x < force.size(); ++x) force[x] += (p.beta / p.k) * div_tau[i][x];
    Spectrum f_hat = ctx->forward(force);
    truncate(f_hat);
    differentiate(f_hat, i);
    div_force += f_hat;
  }
  for (std::size_t m = 0; m < div_force.size(); ++m) {
    const double ksq = ctx->ksq(m);
    div_force[m] = ksq > 0.0 ? -div_force[m] / ksq : Complex(0.0, 0.0);
  }
  return ctx->inverse(div_force);
}

IncompressibleState projection_step(const IncompressibleState& s, const ImexConfig& cfg,
                                    const PhysicalParams& p) {
  const int dim = s.grid().dim;
  const double dt = cfg.dt;
  const double h = 0.5 * dt;
  const detail::Packed y = detail::pack(s);

  detail::Packed stage = y;
  detail::axpy(stage, h, detail::incompressible_nonstiff(s, y, p));
  detail::incompressible_stiff_solve(stage, h, p);
  project_velocity(stage, dim);
  const IncompressibleState stage_state = detail::unpack_incompressible(stage, s);

  detail::Packed next = y;
  detail::axpy(next, dt, detail::incompressible_nonstiff(stage_state, stage, p));
  detail::axpy(next, dt, detail::incompressible_stiff_apply(stage, p));
  project_velocity(next, dim);
  IncompressibleState out = detail::unpack_incompressible(next, s);
  out.time = s.time + dt;
  out.pi = recover_pressure(out, p);
  return out;
}

namespace {

Sample incompressible_sample(const IncompressibleState& s, const PhysicalParams& p) {
  const CompressibleState view = as_compressible(s);
  Sample smp;
  smp.time = s.time;
  smp.energy = energy_E(view, p);
  smp.dissipation = dissipation_D(view, p);
  const Field div = divergence(s.u);
  smp.div_u_h1 = sobolev_norm(div, 1);
  smp.pprime_grad_phi_h1 = 0.0;
  smp.div_u_max = div.max_abs();
  return smp;
}

}  // namespace

Trajectory run_incompressible(const IncompressibleState& s0, const ImexConfig& cfg,
                              const PhysicalParams& p,
                              const std::vector<IncompressibleObserver>& observers) {
  cfg.validate();
  p.validate();
  if (auto v = validate_state(s0); !v.empty()) throw StateError(v.front());
  const double u0 = s0.u.max_abs();
  if (cfg.dt > advective_dt_limit(s0.grid(), u0))
    throw ConfigError("dt", "violates the advective CFL guard");
  const double speed_cap = 2.0 * std::max(1.0, u0);

  Trajectory traj;
  auto record = [&](const IncompressibleState& s) {
    Sample smp = incompressible_sample(s, p);
    for (const auto& obs : observers) obs(s, smp);
    traj.samples.push_back(std::move(smp));
  };

  const long steps = cfg.steps();
  IncompressibleState s = s0;
  record(s);
  for (long n = 1; n <= steps; ++n) {
    s = projection_step(s, cfg, p);
    s.time = s0.time + static_cast<double>(n) * cfg.dt;
    if (n % cfg.callback_stride == 0 || n == steps) {
      if (auto v = validate_state(s); !v.empty()) throw StepError(s.time, v.front());
      if (s.u.max_abs() > speed_cap) throw StepError(s.time, "velocity exceeded the CFL guard");
      record(s);
    }
  }
  return traj;
}

IncompressibleState matched_incompressible_init(const GridSpec& grid, const PhysicalParams& p,
                                                double delta, std::uint64_t seed) {
  p.validate();
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "must be >= 0");
  if (delta == 0.0) return IncompressibleState::rest(grid);
  const SeededProfiles prof = seeded_profiles(grid, seed);
  IncompressibleState s = IncompressibleState::rest(grid);
  s.u = delta * prof.solenoidal;
  s.eta = Field(grid, 1.0) + delta * prof.eta;
  s.tau = delta * prof.tau;
  s.pi = recover_pressure(s, p);
  return s;
}

}  // namespace oblim
