#include "oblim/compressible.hpp"

#include <algorithm>
#include <cmath>

#include "oblim/errors.hpp"
#include "oblim/random.hpp"
#include "oblim/spectral.hpp"

namespace oblim {

void ImexConfig::validate() const {
  if (scheme != "ARS-CN2") throw ConfigError("scheme", "only ARS-CN2 is supported");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt", "must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", "must be >= 0");
  if (callback_stride < 1) throw ConfigError("callback_stride", "must be >= 1");
}

long ImexConfig::steps() const { return std::lround(t_end / dt); }

double advective_dt_limit(const GridSpec& grid, double max_speed) {
  return 0.5 * grid.spacing() / std::max(1.0, max_speed);
}

CompressibleState imex_step(const CompressibleState& s, const ImexConfig& cfg, const PhysicalParams& p) {
  const double dt = cfg.dt;
  const double h = 0.5 * dt;
  const detail::Packed y = detail::pack(s);

  detail::Packed stage = y;
  detail::axpy(stage, h, detail::compressible_nonstiff(s, y, p));
  detail::compressible_stiff_solve(stage, h, s.epsilon, p);
  const CompressibleState stage_state = detail::unpack_compressible(stage, s);

  detail::Packed next = y;
  detail::axpy(next, dt, detail::compressible_nonstiff(stage_state, stage, p));
  detail::axpy(next, dt, detail::compressible_stiff_apply(stage, s.epsilon, p));
  CompressibleState out = detail::unpack_compressible(next, s);
  out.time = s.time + dt;
  return out;
}

namespace {

Sample compressible_sample(const CompressibleState& s, const PhysicalParams& p) {
  Sample smp;
  smp.time = s.time;
  smp.energy = energy_E(s, p);
  smp.dissipation = dissipation_D(s, p);
  const auto [div_h1, flux_h1] = acoustic_norms(s, p);
  smp.div_u_h1 = div_h1;
  smp.pprime_grad_phi_h1 = flux_h1;
  smp.div_u_max = divergence(s.u).max_abs();
  return smp;
}

}  // namespace

Trajectory run(const CompressibleState& s0, const ImexConfig& cfg, const PhysicalParams& p,
               const std::vector<CompressibleObserver>& observers) {
  cfg.validate();
  p.validate();
  if (auto v = validate_state(s0); !v.empty()) throw StateError(v.front());
  const double u0 = s0.u.max_abs();
  if (cfg.dt > advective_dt_limit(s0.grid(), u0))
    throw ConfigError("dt", "violates the advective CFL guard");
  const double speed_cap = 2.0 * std::max(1.0, u0);

  Trajectory traj;
  auto record = [&](const CompressibleState& s) {
    Sample smp = compressible_sample(s, p);
    for (const auto& obs : observers) obs(s, smp);
    traj.samples.push_back(std::move(smp));
  };

  const long steps = cfg.steps();
  CompressibleState s = s0;
  record(s);
  for (long n = 1; n <= steps; ++n) {
    s = imex_step(s, cfg, p);
    s.time = s0.time + static_cast<double>(n) * cfg.dt;
    if (auto v = validate_state(s); !v.empty()) throw StepError(s.time, v.front());
    if (n % cfg.callback_stride == 0 || n == steps) {
      if (s.u.max_abs() > speed_cap) throw StepError(s.time, "velocity exceeded the CFL guard");
      record(s);
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------

namespace {

template <class T>
void normalize_max(T& f) {
  const double m = f.max_abs();
  if (m > 0.0) f *= 1.0 / m;
}

}  // namespace

SeededProfiles seeded_profiles(const GridSpec& grid, std::uint64_t seed) {
  Lcg64 gen(seed);
  SeededProfiles out;
  out.solenoidal = leray_project(random_band_limited_vector(grid, gen));
  normalize_max(out.solenoidal);
  out.potential = gradient(random_band_limited(grid, gen));
  normalize_max(out.potential);
  out.phi = random_band_limited(grid, gen);
  normalize_max(out.phi);
  out.eta = random_band_limited(grid, gen);
  normalize_max(out.eta);
  out.tau = random_band_limited_tensor(grid, gen);
  normalize_max(out.tau);
  return out;
}

CompressibleState well_prepared_init(const GridSpec& grid, const PhysicalParams& p, double epsilon,
                                     double delta, std::uint64_t seed) {
  p.validate();
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon", "must lie in (0, 1]");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("delta", "must be >= 0");
  if (delta == 0.0) return CompressibleState::rest(grid, epsilon);

  const SeededProfiles prof = seeded_profiles(grid, seed);
  CompressibleState s = CompressibleState::rest(grid, epsilon);
  s.u = delta * prof.solenoidal + (epsilon * delta) * prof.potential;
  s.phi = (epsilon * delta) * prof.phi;
  s.eta = Field(grid, 1.0) + delta * prof.eta;
  s.tau = delta * prof.tau;

  double eta_min = s.eta[0];
  for (std::size_t i = 0; i < s.eta.size(); ++i) eta_min = std::min(eta_min, s.eta[i]);
  if (eta_min < 0.5) throw ConfigError("delta", "too large: initial polymer density drops below 1/2");
  if (s.phi.max_abs() > 0.5) throw ConfigError("delta", "too large: |phi_0| exceeds 1/2");
  return s;
}

}  // namespace oblim
