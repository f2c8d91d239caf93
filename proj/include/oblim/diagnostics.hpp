#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "oblim/model.hpp"

namespace oblim {

/// Weighted H^3 energy: ||phi||^2_{H^3_{P'(rho)}} + ||u||^2_{H^3_rho}
/// + [beta(L-1) + 2 zbar] ||eta - 1||^2_{H^3} + beta/(2k^2) ||tau||^2_{H^3}.
struct EnergyReport {
  double total = 0.0;
  double e_phi = 0.0;
  double e_u = 0.0;
  double e_eta = 0.0;
  double e_tau = 0.0;
  double time = 0.0;
};

/// mu1 ||grad u||^2 + mu2 ||div u||^2 + nu [beta(L-1) + 2 zbar] ||grad eta||^2
/// + beta A0/(4k^2) ||tau||^2 + beta nu/(2k^2) ||grad tau||^2, all in H^3.
struct DissipationReport {
  double total = 0.0;
  double grad_u = 0.0;
  double div_u = 0.0;
  double grad_eta = 0.0;
  double tau = 0.0;
  double grad_tau = 0.0;
  double time = 0.0;
};

/// Squared L2 distances between a compressible and an incompressible state
/// plus the integrated relative entropy.
struct GapReport {
  double g_u = 0.0;
  double g_eta = 0.0;
  double g_tau = 0.0;
  double g_pi = 0.0;
  double total = 0.0;
  double time = 0.0;
  double epsilon = 0.0;
};

/// Least-squares fit log(gap) = beta0 * log(eps) + intercept.
struct RateFit {
  double beta0_hat = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;
};

/// One recorded callback of a run.
struct Sample {
  double time = 0.0;
  EnergyReport energy;
  DissipationReport dissipation;
  double div_u_h1 = 0.0;
  double pprime_grad_phi_h1 = 0.0;
  double div_u_max = 0.0;
  std::optional<GapReport> gap;
};

struct Trajectory {
  std::vector<Sample> samples;

  std::vector<double> times() const;
};

EnergyReport energy_E(const CompressibleState& s, const PhysicalParams& p);
DissipationReport dissipation_D(const CompressibleState& s, const PhysicalParams& p);

/// Pointwise relative entropy (1/eps^2) a/(gamma-1) [rho^gamma - gamma(rho-1) - 1]
/// for rho = 1 + x, evaluated without catastrophic cancellation.
double relative_entropy_density(double x, double epsilon, const PhysicalParams& p);

struct RelativeEntropy {
  Field density;
  double integral = 0.0;
};
RelativeEntropy relative_entropy(const CompressibleState& s, const PhysicalParams& p);

/// ||sqrt(rho) - 1||_{L2} / (eps <Pi, 1>^{1/2}); zero when the state is at
/// equilibrium density.
double sqrt_density_lemma_check(const CompressibleState& s, const PhysicalParams& p);

/// Requires equal grids and |t_c - t_i| <= time_tolerance.
GapReport convergence_gap(const CompressibleState& sc, const IncompressibleState& si,
                          const PhysicalParams& p, double time_tolerance = 1e-9);

/// (||div u||_{H^1}, ||P'(rho) grad phi||_{H^1})
std::pair<double, double> acoustic_norms(const CompressibleState& s, const PhysicalParams& p);

/// max_n [E(t_n) + int_0^{t_n} D dt - E(0)] / max(E(0), 1e-300), with the
/// time integral of D taken by the trapezoidal rule over the samples.
double energy_inequality_monitor(const Trajectory& traj);

RateFit fit_rate(std::vector<std::pair<double, double>> points);

/// sup over samples of (||div u||_{H^1} + ||P'(rho) grad phi||_{H^1}) / eps
double acoustic_ratio(const Trajectory& traj, double epsilon);

/// The incompressible state viewed as a compressible one with phi = 0.
CompressibleState as_compressible(const IncompressibleState& s, double epsilon = 1.0);

}  // namespace oblim
