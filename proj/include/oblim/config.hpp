#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oblim/compressible.hpp"
#include "oblim/grid.hpp"
#include "oblim/model.hpp"

namespace oblim {

/// Everything a run or an epsilon sweep needs, plus the monitor tolerances
/// the study checks before reporting success.
struct StudyConfig {
  GridSpec grid;
  PhysicalParams params;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  double delta = 0.01;
  std::uint64_t seed = 7;
  double dt = 1e-3;
  double t_end = 1.0;
  int callback_stride = 10;
  std::string output_dir = "out";

  double energy_tolerance = 1e-3;  // relative energy-inequality violation
  double growth_limit = 2.0;       // E(t) <= growth_limit * E(0)
  double acoustic_spread = 3.0;    // consecutive acoustic ratios
  double beta0_min = 1.6;
  double beta0_max = 2.4;
  double r2_min = 0.98;

  ImexConfig imex() const;
};

/// Parses the flat "key = value" format: one pair per line, '#' starts a
/// comment, lists are comma separated. Unknown or repeated keys are errors.
/// Missing keys keep the defaults above (2D, n = 64, box 2*pi, dealias 2/3,
/// gamma = 2, a = 1, mu1 = mu2 = nu = 0.1, beta = 0.5, k = 1, L_poly = 2,
/// zbar = 0.1, A0 = 1). Throws ConfigError; syntax errors carry the line
/// number, constraint violations the key.
StudyConfig parse_config(std::string_view text);
StudyConfig load_config(const std::filesystem::path& path);

/// The accepted keys, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace oblim
