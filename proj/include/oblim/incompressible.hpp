#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oblim/compressible.hpp"

namespace oblim {

using IncompressibleObserver = std::function<void(const IncompressibleState&, Sample&)>;

/// One ARS-CN2 step of the limit system; the velocity is Leray-projected at
/// both stages and the pressure slot is refreshed from the new state.
IncompressibleState projection_step(const IncompressibleState& s, const ImexConfig& cfg,
                                    const PhysicalParams& p);

/// Zero-mean pi with lap(pi) = div(-u.grad u + (beta/k) div tau). This is the
/// full limit pressure, i.e. it already contains the polymer part
/// beta(L-1) eta + zbar eta^2.
Field recover_pressure(const IncompressibleState& s, const PhysicalParams& p);

/// As run() for the compressible system; samples carry the energy of the
/// state viewed with phi = 0 and the max norm of div u.
Trajectory run_incompressible(const IncompressibleState& s0, const ImexConfig& cfg,
                              const PhysicalParams& p,
                              const std::vector<IncompressibleObserver>& observers = {});

/// Limit data matched to well_prepared_init with the same seed and delta:
/// u = delta * solenoidal profile, identical eta and tau, pi recovered.
IncompressibleState matched_incompressible_init(const GridSpec& grid, const PhysicalParams& p,
                                                double delta, std::uint64_t seed);

}  // namespace oblim
