#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "oblim/config.hpp"
#include "oblim/diagnostics.hpp"
#include "oblim/errors.hpp"
#include "oblim/snapshot.hpp"
#include "oblim/study.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kRuntime = 3, kIo = 4 };

void print_report(const oblim::StudyReport& rep) {
  for (const auto& r : rep.rows) {
    std::printf("eps=%-8g sup_gap=%-12.6g acoustic_ratio=%-10.4g energy_violation=%.3g\n", r.epsilon, r.sup_gap,
                r.acoustic_ratio, r.energy_violation);
  }
  if (rep.fit)
    std::printf("beta0_hat=%.4f r2=%.5f\n", rep.fit->beta0_hat, rep.fit->r_squared);
  else if (!rep.fit_status.empty())
    std::printf("rate fit: %s\n", rep.fit_status.c_str());
  for (const auto& f : rep.failures)
    std::fprintf(stderr, "FAIL %s eps=%g value=%g limit=%g %s\n", f.monitor.c_str(), f.epsilon, f.value, f.limit,
                 f.detail.c_str());
  std::printf("output: %s\n", rep.output_dir.string().c_str());
}

void print_field(const char* name, const oblim::Field& f) {
  std::printf("  %-8s l2=%.17g max=%.17g mean=%.17g\n", name, std::sqrt(oblim::inner(f, f)), f.max_abs(), f.mean());
}

int inspect(const std::string& path) {
  const oblim::AnyState any = oblim::load_snapshot(path);
  const oblim::PhysicalParams params;
  if (const auto* s = std::get_if<oblim::CompressibleState>(&any)) {
    const auto& g = s->grid();
    std::printf("kind=compressible dim=%d n=%d box_length=%.17g epsilon=%.17g time=%.17g\n", g.dim, g.n,
                g.box_length, s->epsilon, s->time);
    print_field("phi", s->phi);
    for (int i = 0; i < s->u.dim(); ++i) print_field(("u" + std::to_string(i)).c_str(), s->u[i]);
    print_field("eta", s->eta);
    for (std::size_t i = 0; i < s->tau.components.size(); ++i)
      print_field(("tau" + std::to_string(i)).c_str(), s->tau.components[i]);
    std::printf("E_total=%.17g (default parameters)\n", oblim::energy_E(*s, params).total);
  } else {
    const auto& t = std::get<oblim::IncompressibleState>(any);
    const auto& g = t.grid();
    std::printf("kind=incompressible dim=%d n=%d box_length=%.17g time=%.17g\n", g.dim, g.n, g.box_length, t.time);
    for (int i = 0; i < t.u.dim(); ++i) print_field(("u" + std::to_string(i)).c_str(), t.u[i]);
    print_field("eta", t.eta);
    for (std::size_t i = 0; i < t.tau.components.size(); ++i)
      print_field(("tau" + std::to_string(i)).c_str(), t.tau.components[i]);
    print_field("pi", t.pi);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible Oldroyd-B runs and low-Mach convergence studies"};
  app.require_subcommand(1);

  std::string config_path, snapshot_path, output_dir;
  bool no_timestamp = false;
  int store_snapshots = 0;

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "key=value configuration file")->required();
    sub->add_option("--output-dir", output_dir, "overrides output_dir from the config");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the generated-at line from CSV files");
    sub->add_option("--store-snapshots", store_snapshots, "save every k-th sample as a snapshot")
        ->check(CLI::NonNegativeNumber);
  };
  CLI::App* sim = app.add_subcommand("simulate", "single compressible run at the first epsilon");
  CLI::App* lim = app.add_subcommand("simulate-limit", "single run of the incompressible limit");
  CLI::App* study = app.add_subcommand("study", "full epsilon sweep with rate fit");
  CLI::App* insp = app.add_subcommand("inspect", "print a snapshot header and field norms");
  add_run_flags(sim);
  add_run_flags(lim);
  add_run_flags(study);
  insp->add_option("snapshot", snapshot_path, "snapshot file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (insp->parsed()) return inspect(snapshot_path);

    const oblim::StudyConfig cfg = oblim::load_config(config_path);
    oblim::StudyOptions opt;
    opt.timestamp = !no_timestamp;
    opt.store_snapshots = store_snapshots;
    if (!output_dir.empty()) opt.output_dir = output_dir;

    oblim::StudyReport rep;
    if (sim->parsed()) rep = oblim::simulate(cfg, opt);
    else if (lim->parsed()) rep = oblim::simulate_limit(cfg, opt);
    else rep = oblim::run_study(cfg, opt);
    print_report(rep);
    return rep.exit_code();
  } catch (const oblim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const oblim::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
