#pragma once

// Compressible Oldroyd-B perturbation system and its incompressible limit.
//
// Unknowns of the compressible system: density perturbation phi
// (rho = 1 + eps*phi), velocity u, polymer number density eta and the shifted
// extra stress tau = T - k*eta*I. The limit system drops phi and enforces
// div u = 0 through the Leray projector.

#include <string>
#include <vector>

#include "oblim/grid.hpp"
#include "oblim/spectral.hpp"

namespace oblim {

struct PhysicalParams {
  double a = 1.0;       // pressure coefficient, P = a rho^gamma
  double gamma = 2.0;   // adiabatic exponent, > 1
  double mu1 = 0.1;     // shear viscosity
  double mu2 = 0.1;     // second viscosity
  double nu = 0.1;      // centre-of-mass diffusion
  double beta = 0.5;    // polymeric fraction
  double k = 1.0;       // Boltzmann constant times temperature
  double L_poly = 2.0;  // bead count
  double zbar = 0.1;    // interaction coefficient
  double A0 = 1.0;      // Rouse spectral gap

  /// Throws ConfigError naming the first offending parameter.
  void validate() const;
  /// beta*(L-1) + 2*zbar, the weight of the eta part of the energy.
  double eta_energy_weight() const { return beta * (L_poly - 1.0) + 2.0 * zbar; }
};

struct CompressibleState {
  Field phi;
  VectorField u;
  Field eta;
  SymTensorField tau;
  double epsilon = 1.0;
  double time = 0.0;

  const GridSpec& grid() const { return phi.grid(); }
  /// rho = 1 + eps*phi
  Field density() const;
  /// phi = 0, u = 0, eta = 1, tau = 0.
  static CompressibleState rest(const GridSpec& grid, double epsilon);
};

struct IncompressibleState {
  VectorField u;
  Field eta;
  SymTensorField tau;
  Field pi;
  double time = 0.0;

  const GridSpec& grid() const { return eta.grid(); }
  static IncompressibleState rest(const GridSpec& grid);
};

/// The four right-hand-side slots of either system.
struct TendencyParts {
  Field d_phi;
  VectorField d_u;
  Field d_eta;
  SymTensorField d_tau;

  explicit TendencyParts(const GridSpec& grid);
  TendencyParts& operator+=(const TendencyParts& other);
};

/// Right-hand side split for IMEX integration; stiff_linear + nonstiff is the
/// full tendency.
struct Tendency {
  TendencyParts stiff_linear;
  TendencyParts nonstiff;

  TendencyParts total() const;
};

/// P(rho) = a rho^gamma; throws StateError on non-positive density.
Field pressure(const Field& rho, const PhysicalParams& p);
/// P'(rho) = a gamma rho^(gamma-1)
Field pressure_prime(const Field& rho, const PhysicalParams& p);

/// T = tau + k eta I
SymTensorField recombine_stress(const SymTensorField& tau, const Field& eta, const PhysicalParams& p);

Tendency compressible_tendency(const CompressibleState& s, const PhysicalParams& p);
Tendency incompressible_tendency(const IncompressibleState& s, const PhysicalParams& p);

/// Human-readable invariant violations; empty when the state is valid.
std::vector<std::string> validate_state(const CompressibleState& s);
std::vector<std::string> validate_state(const IncompressibleState& s);

namespace detail {

// Packed spectral representation used by the time steppers. Slot order is
// [phi, u_0..u_{dim-1}, eta, tau slots...] for both systems; the
// incompressible system keeps its phi slot at zero.
struct Layout {
  int dim;
  int phi() const { return 0; }
  int u(int i) const { return 1 + i; }
  int eta() const { return 1 + dim; }
  int tau(int slot) const { return 2 + dim + slot; }
  int count() const { return 2 + dim + dim * (dim + 1) / 2; }
};

using Packed = std::vector<Spectrum>;

Packed pack(const CompressibleState& s);
Packed pack(const IncompressibleState& s);
/// Inverse transforms; epsilon and time are copied from the template state.
CompressibleState unpack_compressible(const Packed& y, const CompressibleState& like);
IncompressibleState unpack_incompressible(const Packed& y, const IncompressibleState& like);

/// Explicit part of the compressible right-hand side, dealiased, given the
/// physical state and its packed spectrum.
Packed compressible_nonstiff(const CompressibleState& s, const Packed& y, const PhysicalParams& p);
/// L y for the constant-coefficient stiff operator.
Packed compressible_stiff_apply(const Packed& y, double epsilon, const PhysicalParams& p);
/// Solves (I - h L) x = rhs mode by mode, in place.
void compressible_stiff_solve(Packed& rhs, double h, double epsilon, const PhysicalParams& p);

Packed incompressible_nonstiff(const IncompressibleState& s, const Packed& y, const PhysicalParams& p);
Packed incompressible_stiff_apply(const Packed& y, const PhysicalParams& p);
void incompressible_stiff_solve(Packed& rhs, double h, const PhysicalParams& p);

/// y += s*x slotwise.
void axpy(Packed& y, double s, const Packed& x);

}  // namespace detail

}  // namespace oblim
