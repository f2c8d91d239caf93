#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oblim/config.hpp"
#include "oblim/diagnostics.hpp"

namespace oblim {

struct StudyOptions {
  bool timestamp = true;           // leading "# generated ..." line in every CSV
  int store_snapshots = 0;         // every k-th sample is saved; 0 disables
  std::optional<std::filesystem::path> output_dir;  // overrides the config
};

struct SummaryRow {
  double epsilon = 0.0;
  double sup_gap = 0.0;
  double beta0_hat_running = 0.0;  // NaN until three positive gaps exist
  double acoustic_ratio = 0.0;
  double energy_violation = 0.0;
  double max_growth = 0.0;         // max E(t)/E(0); not written to the CSV
};

/// A monitor outside its tolerance, or a solver that stopped early.
struct Failure {
  std::string monitor;
  double epsilon = 0.0;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct StudyReport {
  std::vector<SummaryRow> rows;
  std::optional<RateFit> fit;
  std::string fit_status;
  std::vector<Failure> failures;
  std::filesystem::path output_dir;

  /// 0 when every monitor passed, 3 otherwise.
  int exit_code() const { return failures.empty() ? 0 : 3; }
};

/// The epsilon sweep: one limit run, then one compressible run per epsilon
/// compared against it at every sample. Writes into the output directory
///   timeseries_limit.csv, timeseries_eps_<eps>.csv, summary.csv,
///   rate_fit.csv, failures.csv and optionally snapshots/.
/// ConfigError and IoError propagate; solver failures become Failures.
StudyReport run_study(const StudyConfig& cfg, const StudyOptions& opt = {});

/// A single compressible run at the first configured epsilon.
StudyReport simulate(const StudyConfig& cfg, const StudyOptions& opt = {});

/// A single run of the limit system.
StudyReport simulate_limit(const StudyConfig& cfg, const StudyOptions& opt = {});

/// 17 significant digits, the format of every number in the CSVs.
std::string format_number(double v);

/// Time-series CSV text; samples without a gap get NaN gap columns.
std::string timeseries_csv(const Trajectory& traj, bool timestamp);

inline constexpr const char* kTimeseriesHeader =
    "t,E_total,e_phi,e_u,e_eta,e_tau,D_total,div_u_H1,Pprime_gradphi_H1,gap_total,g_u,g_eta,g_tau,g_pi";
inline constexpr const char* kSummaryHeader =
    "epsilon,sup_gap,beta0_hat_running,acoustic_ratio,energy_violation";

}  // namespace oblim
