#include "oblim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oblim/errors.hpp"
#include "oblim/spectral.hpp"

namespace oblim {

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(samples.size());
  for (const auto& s : samples) t.push_back(s.time);
  return t;
}

namespace {

double sq(double x) { return x * x; }

// sum over components of ||grad f_c||^2_{H^3}, with optional per-component
// multiplicities (Frobenius for tensors).
double gradient_energy(const std::vector<Field>& comps, const std::vector<double>& mult) {
  double total = 0.0;
  for (std::size_t c = 0; c < comps.size(); ++c)
    total += mult[c] * sq(sobolev_norm(gradient(comps[c]), 3));
  return total;
}

}  // namespace

EnergyReport energy_E(const CompressibleState& s, const PhysicalParams& p) {
  const Field rho = s.density();
  const Field weight_phi = pressure_prime(rho, p);
  EnergyReport r;
  r.e_phi = sq(sobolev_norm(s.phi, 3, weight_phi));
  r.e_u = sq(sobolev_norm(s.u, 3, rho));
  Field eta_m1 = s.eta;
  for (std::size_t i = 0; i < eta_m1.size(); ++i) eta_m1[i] -= 1.0;
  r.e_eta = p.eta_energy_weight() * sq(sobolev_norm(eta_m1, 3));
  r.e_tau = p.beta / (2.0 * p.k * p.k) * sq(sobolev_norm(s.tau, 3));
  r.total = r.e_phi + r.e_u + r.e_eta + r.e_tau;
  r.time = s.time;
  return r;
}

DissipationReport dissipation_D(const CompressibleState& s, const PhysicalParams& p) {
  const int dim = s.grid().dim;
  DissipationReport r;
  r.grad_u = p.mu1 * gradient_energy(s.u.components, std::vector<double>(static_cast<std::size_t>(dim), 1.0));
  r.div_u = p.mu2 * sq(sobolev_norm(divergence(s.u), 3));
  r.grad_eta = p.nu * p.eta_energy_weight() * sq(sobolev_norm(gradient(s.eta), 3));
  r.tau = p.beta * p.A0 / (4.0 * p.k * p.k) * sq(sobolev_norm(s.tau, 3));
  std::vector<double> mult;
  for (int slot = 0; slot < s.grid().tensor_slots(); ++slot)
    mult.push_back(SymTensorField::multiplicity(slot, dim));
  r.grad_tau = p.beta * p.nu / (2.0 * p.k * p.k) * gradient_energy(s.tau.components, mult);
  r.total = r.grad_u + r.div_u + r.grad_eta + r.tau + r.grad_tau;
  r.time = s.time;
  return r;
}

double relative_entropy_density(double x, double epsilon, const PhysicalParams& p) {
  if (!(x > -1.0)) throw StateError("density non-positive");
  const double g = p.gamma;
  // f(x) = (1+x)^g - 1 - g x
  double f = 0.0;
  if (std::abs(x) <= 0.5) {
    // Binomial series from the quadratic term on; avoids the cancellation in
    // the closed form and terminates exactly for integer gamma.
    double coeff = g * (g - 1.0) / 2.0;
    double power = x * x;
    for (int j = 2; j < 80; ++j) {
      const double term = coeff * power;
      f += term;
      if (std::abs(term) <= 1e-18 * std::abs(f)) break;
      coeff *= (g - j) / (j + 1.0);
      power *= x;
    }
  } else {
    f = std::expm1(g * std::log1p(x)) - g * x;
  }
  return p.a / (g - 1.0) * f / (epsilon * epsilon);
}

RelativeEntropy relative_entropy(const CompressibleState& s, const PhysicalParams& p) {
  RelativeEntropy out{Field(s.grid()), 0.0};
  double sum = 0.0;
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const double v = relative_entropy_density(s.epsilon * s.phi[i], s.epsilon, p);
    out.density[i] = v;
    sum += v;
  }
  out.integral = sum * s.grid().cell_volume();
  return out;
}

double sqrt_density_lemma_check(const CompressibleState& s, const PhysicalParams& p) {
  const double pi_integral = relative_entropy(s, p).integral;
  double num = 0.0;
  for (std::size_t i = 0; i < s.phi.size(); ++i) {
    const double x = s.epsilon * s.phi[i];
    num += sq(x / (std::sqrt(1.0 + x) + 1.0));
  }
  num *= s.grid().cell_volume();
  if (pi_integral == 0.0) return 0.0;
  return std::sqrt(num) / (s.epsilon * std::sqrt(pi_integral));
}

GapReport convergence_gap(const CompressibleState& sc, const IncompressibleState& si,
                          const PhysicalParams& p, double time_tolerance) {
  require_same_grid(sc.grid(), si.grid(), "convergence_gap");
  if (std::abs(sc.time - si.time) > time_tolerance)
    throw DomainError("convergence_gap: states at different times");
  const GridSpec& g = sc.grid();
  const double cell = g.cell_volume();
  GapReport r;
  r.time = sc.time;
  r.epsilon = sc.epsilon;

  double gu = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const double root_rho = std::sqrt(1.0 + sc.epsilon * sc.phi[x]);
    for (int i = 0; i < g.dim; ++i) gu += sq(root_rho * sc.u[i][x] - si.u[i][x]);
  }
  r.g_u = gu * cell;

  double geta = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) geta += sq(sc.eta[x] - si.eta[x]);
  r.g_eta = geta * cell;

  double gtau = 0.0;
  for (int slot = 0; slot < g.tensor_slots(); ++slot) {
    const auto& a = sc.tau.components[static_cast<std::size_t>(slot)];
    const auto& b = si.tau.components[static_cast<std::size_t>(slot)];
    double part = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) part += sq(a[x] - b[x]);
    gtau += SymTensorField::multiplicity(slot, g.dim) * part;
  }
  r.g_tau = gtau * cell;

  r.g_pi = relative_entropy(sc, p).integral;
  r.total = r.g_u + r.g_eta + r.g_tau + r.g_pi;
  return r;
}

std::pair<double, double> acoustic_norms(const CompressibleState& s, const PhysicalParams& p) {
  const double div_norm = sobolev_norm(divergence(s.u), 1);
  const Field pp = pressure_prime(s.density(), p);
  VectorField flux = gradient(s.phi);
  for (int i = 0; i < flux.dim(); ++i)
    for (std::size_t x = 0; x < pp.size(); ++x) flux[i][x] *= pp[x];
  return {div_norm, sobolev_norm(flux, 1)};
}

double energy_inequality_monitor(const Trajectory& traj) {
  if (traj.samples.empty()) throw DomainError("energy_inequality_monitor: empty trajectory");
  const auto& samples = traj.samples;
  if (samples.size() == 1) return 0.0;
  const double e0 = samples.front().energy.total;
  const double scale = std::max(e0, 1e-300);
  double worst = -std::numeric_limits<double>::infinity();
  double dissipated = 0.0;
  for (std::size_t n = 1; n < samples.size(); ++n) {
    const double dt = samples[n].time - samples[n - 1].time;
    dissipated += 0.5 * (samples[n].dissipation.total + samples[n - 1].dissipation.total) * dt;
    worst = std::max(worst, (samples[n].energy.total + dissipated - e0) / scale);
  }
  return worst;
}

RateFit fit_rate(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3) throw DomainError("fit_rate needs at least 3 points");
  for (const auto& [eps, gap] : points)
    if (!(eps > 0.0) || !(gap > 0.0) || !std::isfinite(eps) || !std::isfinite(gap))
      throw DomainError("fit_rate needs positive finite values");
  // Sorting makes the result independent of input order, bit for bit.
  std::sort(points.begin(), points.end());
  const double count = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [eps, gap] : points) {
    mx += std::log(eps);
    my += std::log(gap);
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [eps, gap] : points) {
    const double dx = std::log(eps) - mx;
    const double dy = std::log(gap) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw DomainError("fit_rate needs distinct epsilon values");
  RateFit fit;
  fit.beta0_hat = sxy / sxx;
  fit.intercept = my - fit.beta0_hat * mx;
  double ss_res = 0.0;
  for (const auto& [eps, gap] : points)
    ss_res += sq(std::log(gap) - (fit.intercept + fit.beta0_hat * std::log(eps)));
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.points = std::move(points);
  return fit;
}

double acoustic_ratio(const Trajectory& traj, double epsilon) {
  if (traj.samples.empty()) throw DomainError("acoustic_ratio: empty trajectory");
  if (!(epsilon > 0.0)) throw DomainError("acoustic_ratio: epsilon must be positive");
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, (s.div_u_h1 + s.pprime_grad_phi_h1) / epsilon);
  return worst;
}

CompressibleState as_compressible(const IncompressibleState& s, double epsilon) {
  return CompressibleState{Field(s.grid()), s.u, s.eta, s.tau, epsilon, s.time};
}

}  // namespace oblim
