#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oblim/diagnostics.hpp"
#include "oblim/model.hpp"

namespace oblim {

/// Time stepping controls shared by both solvers.
///
/// The only scheme is "ARS-CN2": a two-stage additive scheme with an
/// implicit half step on the stiff linear part followed by an explicit
/// midpoint update,
///   (I - dt/2 L) Y = y + dt/2 N(y),
///   y' = y + dt (N(Y) + L Y).
/// Its stiff stability function is (1 + z/2)/(1 - z/2), the Crank-Nicolson
/// one, so acoustic modes are neither damped nor amplified.
struct ImexConfig {
  double dt = 1e-3;
  std::string scheme = "ARS-CN2";
  double t_end = 1.0;
  int callback_stride = 10;

  void validate() const;
  /// round(t_end / dt)
  long steps() const;
};

/// Largest dt allowed by the advective guard 0.5 h / max(1, max|u|).
double advective_dt_limit(const GridSpec& grid, double max_speed);

using CompressibleObserver = std::function<void(const CompressibleState&, Sample&)>;

/// One step of the compressible system. Does not validate the result;
/// run() does.
CompressibleState imex_step(const CompressibleState& s, const ImexConfig& cfg, const PhysicalParams& p);

/// Integrates to cfg.t_end, recording a Sample (energy, dissipation and
/// acoustic norms) at t = 0, every callback_stride steps and at the end.
/// Observers see the state and may fill in extra fields of the sample.
/// Throws StepError (with the failing time) on an invalid state or when
/// max|u| exceeds twice max(1, max|u0|).
Trajectory run(const CompressibleState& s0, const ImexConfig& cfg, const PhysicalParams& p,
               const std::vector<CompressibleObserver>& observers = {});

/// The epsilon-independent ingredients of seeded initial data, each scaled to
/// unit max norm: a divergence-free velocity, a gradient velocity, density,
/// polymer-density and stress profiles. All modes satisfy |m_a| <= 4.
struct SeededProfiles {
  VectorField solenoidal;
  VectorField potential;
  Field phi;
  Field eta;
  SymTensorField tau;
};
SeededProfiles seeded_profiles(const GridSpec& grid, std::uint64_t seed);

/// Well-prepared data:
///   u = delta * solenoidal + eps * delta * potential,
///   phi = eps * delta * phi-profile,
///   eta = 1 + delta * eta-profile,
///   tau = delta * tau-profile,
/// so that ||div u||_{H^1} and ||grad phi||_{H^1} are O(eps * delta).
/// Throws ConfigError when eta would drop below 1/2 or |phi| above 1/2.
CompressibleState well_prepared_init(const GridSpec& grid, const PhysicalParams& p, double epsilon,
                                     double delta, std::uint64_t seed);

}  // namespace oblim
