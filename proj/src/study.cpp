#include "oblim/study.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "oblim/compressible.hpp"
#include "oblim/errors.hpp"
#include "oblim/incompressible.hpp"
#include "oblim/snapshot.hpp"

namespace oblim {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kLimitDivergenceTolerance = 1e-8;

std::string timestamp_line() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ\n", &tm);
  return buf;
}

// Shortest round-trip spelling, used in file names.
std::string epsilon_tag(double eps) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, eps);
  return std::string(buf, ec == std::errc() ? end : buf);
}

// Whole-file replace through a temporary, so readers never see a partial row.
void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << text;
    if (!out.flush()) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

fs::path prepare_dir(const StudyConfig& cfg, const StudyOptions& opt) {
  const fs::path dir = opt.output_dir ? *opt.output_dir : fs::path(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  if (opt.store_snapshots > 0) {
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw IoError("cannot create snapshot directory: " + ec.message());
  }
  return dir;
}

std::string summary_csv(const std::vector<SummaryRow>& rows, bool timestamp) {
  std::string out = timestamp ? timestamp_line() : std::string();
  out += kSummaryHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.epsilon) + ',' + format_number(r.sup_gap) + ',' + format_number(r.beta0_hat_running) +
           ',' + format_number(r.acoustic_ratio) + ',' + format_number(r.energy_violation) + '\n';
  }
  return out;
}

std::string failures_csv(const std::vector<Failure>& failures, bool timestamp) {
  std::string out = timestamp ? timestamp_line() : std::string();
  out += "monitor,epsilon,value,limit,detail\n";
  for (const auto& f : failures) {
    std::string detail = f.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    std::replace(detail.begin(), detail.end(), '\n', ' ');
    out += f.monitor + ',' + format_number(f.epsilon) + ',' + format_number(f.value) + ',' + format_number(f.limit) +
           ',' + detail + '\n';
  }
  return out;
}

std::string rate_fit_csv(const StudyReport& rep, bool timestamp) {
  std::string out = timestamp ? timestamp_line() : std::string();
  out += "beta0_hat,intercept,r_squared,points,status\n";
  if (rep.fit) {
    out += format_number(rep.fit->beta0_hat) + ',' + format_number(rep.fit->intercept) + ',' +
           format_number(rep.fit->r_squared) + ',' + std::to_string(rep.fit->points.size()) + ',' + rep.fit_status +
           '\n';
  } else {
    out += "nan,nan,nan,0," + rep.fit_status + '\n';
  }
  return out;
}

double max_growth(const Trajectory& traj) {
  const double e0 = traj.samples.front().energy.total;
  double worst = 0.0;
  for (const auto& s : traj.samples) {
    const double e = s.energy.total;
    if (e0 > 0.0) worst = std::max(worst, e / e0);
    else if (e > 0.0) worst = std::numeric_limits<double>::infinity();
  }
  return worst;
}

// Running fit over the rows so far; NaN while it is not defined.
double running_slope(const std::vector<SummaryRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (!(r.sup_gap > 0.0)) return kNaN;
    pts.emplace_back(r.epsilon, r.sup_gap);
  }
  if (pts.size() < 3) return kNaN;
  return fit_rate(pts).beta0_hat;
}

void check_energy(const StudyConfig& cfg, const SummaryRow& row, std::vector<Failure>& failures) {
  if (!(row.energy_violation <= cfg.energy_tolerance))
    failures.push_back({"energy_inequality", row.epsilon, row.energy_violation, cfg.energy_tolerance,
                        "relative violation of E(t) + int D <= E(0)"});
  if (!(row.max_growth <= cfg.growth_limit))
    failures.push_back({"energy_growth", row.epsilon, row.max_growth, cfg.growth_limit, "max E(t)/E(0)"});
}

class SnapshotSink {
 public:
  SnapshotSink(fs::path dir, std::string prefix, int stride)
      : dir_(std::move(dir)), prefix_(std::move(prefix)), stride_(stride) {}

  template <class State>
  void operator()(const State& s) {
    if (stride_ > 0 && index_ % stride_ == 0) {
      char name[32];
      std::snprintf(name, sizeof name, "_%05d.obm", index_);
      save_snapshot(s, dir_ / "snapshots" / (prefix_ + name));
    }
    ++index_;
  }

 private:
  fs::path dir_;
  std::string prefix_;
  int stride_;
  int index_ = 0;
};

struct LimitRun {
  Trajectory traj;
  std::vector<IncompressibleState> states;
};

LimitRun run_limit(const StudyConfig& cfg, const fs::path& dir, const StudyOptions& opt, bool keep_states) {
  LimitRun out;
  SnapshotSink sink(dir, "limit", opt.store_snapshots);
  const IncompressibleState s0 = matched_incompressible_init(cfg.grid, cfg.params, cfg.delta, cfg.seed);
  IncompressibleObserver obs = [&](const IncompressibleState& s, Sample&) {
    if (keep_states) out.states.push_back(s);
    sink(s);
  };
  out.traj = run_incompressible(s0, cfg.imex(), cfg.params, {obs});
  return out;
}

void check_limit(const Trajectory& traj, std::vector<Failure>& failures) {
  double worst = 0.0;
  for (const auto& s : traj.samples) worst = std::max(worst, s.div_u_max);
  if (!(worst <= kLimitDivergenceTolerance))
    failures.push_back({"limit_divergence", 0.0, worst, kLimitDivergenceTolerance, "max |div u| of the limit run"});
}

Trajectory run_member(const StudyConfig& cfg, double eps, const fs::path& dir, const StudyOptions& opt,
                      const std::vector<IncompressibleState>* reference) {
  SnapshotSink sink(dir, "eps_" + epsilon_tag(eps), opt.store_snapshots);
  std::size_t index = 0;
  CompressibleObserver obs = [&](const CompressibleState& s, Sample& smp) {
    if (reference) {
      if (index >= reference->size()) throw StateError("limit run has fewer samples than the compressible run");
      smp.gap = convergence_gap(s, (*reference)[index], cfg.params, 0.5 * cfg.dt);
    }
    ++index;
    sink(s);
  };
  const CompressibleState s0 = well_prepared_init(cfg.grid, cfg.params, eps, cfg.delta, cfg.seed);
  return run(s0, cfg.imex(), cfg.params, {obs});
}

SummaryRow summarize(double eps, const Trajectory& traj) {
  SummaryRow row;
  row.epsilon = eps;
  row.sup_gap = kNaN;
  bool any_gap = false;
  double sup = 0.0;
  for (const auto& s : traj.samples) {
    if (s.gap) {
      any_gap = true;
      sup = std::max(sup, s.gap->total);
    }
  }
  if (any_gap) row.sup_gap = sup;
  row.beta0_hat_running = kNaN;
  row.acoustic_ratio = acoustic_ratio(traj, eps);
  row.energy_violation = energy_inequality_monitor(traj);
  row.max_growth = max_growth(traj);
  return row;
}

void write_tail(const StudyReport& rep, const fs::path& dir, const StudyOptions& opt) {
  write_atomic(dir / "summary.csv", summary_csv(rep.rows, opt.timestamp));
  write_atomic(dir / "failures.csv", failures_csv(rep.failures, opt.timestamp));
}

}  // namespace

std::string timeseries_csv(const Trajectory& traj, bool timestamp) {
  std::string out = timestamp ? timestamp_line() : std::string();
  out += kTimeseriesHeader;
  out += '\n';
  for (const auto& s : traj.samples) {
    const double gap[5] = {s.gap ? s.gap->total : kNaN, s.gap ? s.gap->g_u : kNaN, s.gap ? s.gap->g_eta : kNaN,
                           s.gap ? s.gap->g_tau : kNaN, s.gap ? s.gap->g_pi : kNaN};
    const double cols[] = {s.time,          s.energy.total,       s.energy.e_phi,      s.energy.e_u,
                           s.energy.e_eta,  s.energy.e_tau,       s.dissipation.total, s.div_u_h1,
                           s.pprime_grad_phi_h1, gap[0], gap[1], gap[2], gap[3], gap[4]};
    bool first = true;
    for (double c : cols) {
      if (!first) out += ',';
      out += format_number(c);
      first = false;
    }
    out += '\n';
  }
  return out;
}

StudyReport run_study(const StudyConfig& cfg, const StudyOptions& opt) {
  StudyReport rep;
  rep.output_dir = prepare_dir(cfg, opt);

  LimitRun limit;
  try {
    limit = run_limit(cfg, rep.output_dir, opt, true);
  } catch (const StepError& e) {
    rep.failures.push_back({"limit_solver", 0.0, e.time(), cfg.t_end, e.what()});
    rep.fit_status = "skipped: limit run failed";
    write_tail(rep, rep.output_dir, opt);
    write_atomic(rep.output_dir / "rate_fit.csv", rate_fit_csv(rep, opt.timestamp));
    return rep;
  }
  write_atomic(rep.output_dir / "timeseries_limit.csv", timeseries_csv(limit.traj, opt.timestamp));
  check_limit(limit.traj, rep.failures);

  for (double eps : cfg.epsilons) {
    Trajectory traj;
    try {
      traj = run_member(cfg, eps, rep.output_dir, opt, &limit.states);
    } catch (const StepError& e) {
      rep.failures.push_back({"solver", eps, e.time(), cfg.t_end, e.what()});
      write_tail(rep, rep.output_dir, opt);
      continue;
    }
    write_atomic(rep.output_dir / ("timeseries_eps_" + epsilon_tag(eps) + ".csv"),
                 timeseries_csv(traj, opt.timestamp));
    SummaryRow row = summarize(eps, traj);
    check_energy(cfg, row, rep.failures);
    rep.rows.push_back(row);
    rep.rows.back().beta0_hat_running = running_slope(rep.rows);
    write_tail(rep, rep.output_dir, opt);
  }

  // Consecutive members of the sweep, in the configured order.
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const double a = rep.rows[i - 1].acoustic_ratio;
    const double b = rep.rows[i].acoustic_ratio;
    if (a == 0.0 && b == 0.0) continue;
    const double spread = std::max(a, b) / std::min(a, b);
    if (!(spread <= cfg.acoustic_spread))
      rep.failures.push_back({"acoustic_spread", rep.rows[i].epsilon, spread, cfg.acoustic_spread,
                              "ratio against epsilon " + format_number(rep.rows[i - 1].epsilon)});
  }

  std::vector<std::pair<double, double>> pts;
  bool all_zero = !rep.rows.empty();
  for (const auto& r : rep.rows) {
    pts.emplace_back(r.epsilon, r.sup_gap);
    if (r.sup_gap != 0.0) all_zero = false;
  }
  if (rep.rows.size() < 3) {
    rep.fit_status = "skipped: needs at least 3 epsilons, have " + std::to_string(rep.rows.size());
  } else if (all_zero) {
    rep.fit_status = "degenerate: zero gaps";
  } else {
    try {
      rep.fit = fit_rate(pts);
      rep.fit_status = "ok";
    } catch (const DomainError& e) {
      rep.fit_status = std::string("skipped: ") + e.what();
      rep.failures.push_back({"rate_fit", 0.0, kNaN, kNaN, e.what()});
    }
  }
  if (rep.fit) {
    const double b = rep.fit->beta0_hat;
    if (!(b >= cfg.beta0_min && b <= cfg.beta0_max))
      rep.failures.push_back({"rate_slope", 0.0, b, b < cfg.beta0_min ? cfg.beta0_min : cfg.beta0_max,
                              "fitted slope outside the accepted band"});
    if (!(rep.fit->r_squared >= cfg.r2_min))
      rep.failures.push_back({"rate_r2", 0.0, rep.fit->r_squared, cfg.r2_min, "fit quality"});
  }

  write_tail(rep, rep.output_dir, opt);
  write_atomic(rep.output_dir / "rate_fit.csv", rate_fit_csv(rep, opt.timestamp));
  return rep;
}

StudyReport simulate(const StudyConfig& cfg, const StudyOptions& opt) {
  StudyReport rep;
  rep.output_dir = prepare_dir(cfg, opt);
  rep.fit_status = "skipped: single run";
  const double eps = cfg.epsilons.front();
  try {
    const Trajectory traj = run_member(cfg, eps, rep.output_dir, opt, nullptr);
    write_atomic(rep.output_dir / ("timeseries_eps_" + epsilon_tag(eps) + ".csv"),
                 timeseries_csv(traj, opt.timestamp));
    rep.rows.push_back(summarize(eps, traj));
    check_energy(cfg, rep.rows.back(), rep.failures);
  } catch (const StepError& e) {
    rep.failures.push_back({"solver", eps, e.time(), cfg.t_end, e.what()});
  }
  write_tail(rep, rep.output_dir, opt);
  return rep;
}

StudyReport simulate_limit(const StudyConfig& cfg, const StudyOptions& opt) {
  StudyReport rep;
  rep.output_dir = prepare_dir(cfg, opt);
  rep.fit_status = "skipped: single run";
  try {
    const LimitRun limit = run_limit(cfg, rep.output_dir, opt, false);
    write_atomic(rep.output_dir / "timeseries_limit.csv", timeseries_csv(limit.traj, opt.timestamp));
    check_limit(limit.traj, rep.failures);
    SummaryRow row;
    row.energy_violation = energy_inequality_monitor(limit.traj);
    row.max_growth = max_growth(limit.traj);
    check_energy(cfg, row, rep.failures);
  } catch (const StepError& e) {
    rep.failures.push_back({"limit_solver", 0.0, e.time(), cfg.t_end, e.what()});
  }
  write_atomic(rep.output_dir / "failures.csv", failures_csv(rep.failures, opt.timestamp));
  return rep;
}

}  // namespace oblim
