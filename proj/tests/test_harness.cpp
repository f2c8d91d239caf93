#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oblim/compressible.hpp"
#include "oblim/config.hpp"
#include "oblim/errors.hpp"
#include "oblim/incompressible.hpp"
#include "oblim/snapshot.hpp"
#include "oblim/study.hpp"
#include "support.hpp"

using namespace oblim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("OBLIM_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "oblim_tests";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key().empty() ? std::string("<line> ") + e.what() : e.key();
  }
  return "<accepted>";
}

StudyConfig tiny_study(const fs::path& out) {
  return parse_config(
      "dim=2\nn=16\nepsilons=0.4,0.2,0.1\ndelta=0.01\nseed=7\ndt=0.005\nt_end=0.1\ncallback_stride=5\n"
      "output_dir=" + out.string() + "\n");
}

}  // namespace

TEST_SUITE("harness_cli") {

TEST_CASE("config with defaults") {
  const StudyConfig c =
      parse_config("dim=2\nn=64\nepsilons=0.4,0.2,0.1\ndelta=0.01\nseed=7\ndt=0.001\nt_end=1.0");
  CHECK(c.grid.dim == 2);
  CHECK(c.grid.n == 64);
  CHECK(c.grid.box_length == doctest::Approx(2.0 * oblim::test::kPi));
  CHECK(c.grid.dealias_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(c.epsilons == std::vector<double>{0.4, 0.2, 0.1});
  CHECK(c.seed == 7);
  CHECK(c.params.gamma == 2.0);
  CHECK(c.params.a == 1.0);
  CHECK(c.params.mu1 == 0.1);
  CHECK(c.params.mu2 == 0.1);
  CHECK(c.params.nu == 0.1);
  CHECK(c.params.beta == 0.5);
  CHECK(c.params.k == 1.0);
  CHECK(c.params.L_poly == 2.0);
  CHECK(c.params.zbar == 0.1);
  CHECK(c.params.A0 == 1.0);
}

TEST_CASE("config syntax") {
  const StudyConfig c = parse_config(
      "# header comment\n\n  dim = 3   # trailing\nn=16\r\nepsilons = 0.5 , 0.25\nseed=18446744073709551615\n"
      "output_dir = some dir\n");
  CHECK(c.grid.dim == 3);
  CHECK(c.epsilons == std::vector<double>{0.5, 0.25});
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.output_dir == "some dir");
}

TEST_CASE("config errors") {
  CHECK(config_error_key("n=63") == "n");
  try {
    parse_config("n=63");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("even") != std::string::npos);
  }
  try {
    parse_config("epsilons=0.1,0.2");
    FAIL("accepted ascending epsilons");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("epsilons must be strictly descending") != std::string::npos);
  }
  CHECK(config_error_key("epsilons=0.2,0.2") == "epsilons");
  CHECK(config_error_key("epsilons=1.5,0.2") == "epsilons");
  CHECK(config_error_key("color=blue") == "color");
  CHECK(config_error_key("dt=0") == "dt");
  CHECK(config_error_key("dt=fast") == "dt");
  CHECK(config_error_key("gamma=1") == "gamma");
  CHECK(config_error_key("mu1=-1") == "mu1");
  CHECK(config_error_key("delta=-0.1") == "delta");
  CHECK(config_error_key("dim=4") == "dim");
  CHECK(config_error_key("n=16\nn=32") == "n");
  CHECK(config_error_key("seed=-3") == "seed");
  CHECK(config_error_key("callback_stride=0") == "callback_stride");
  const std::string line = config_error_key("dim=2\njust words\n");
  CHECK(line.find("line 2") != std::string::npos);
}

TEST_CASE("snapshot round trip is bit exact") {
  const fs::path dir = scratch("snapshot");
  const GridSpec g = make_grid(2, 16, 2.5);
  CompressibleState rest = CompressibleState::rest(g, 0.3);
  rest.time = 0.125;
  save_snapshot(rest, dir / "rest.obm");
  const auto back = std::get<CompressibleState>(load_snapshot(dir / "rest.obm"));
  CHECK(back.phi == rest.phi);
  CHECK(back.u == rest.u);
  CHECK(back.eta == rest.eta);
  CHECK(back.tau == rest.tau);
  CHECK(back.epsilon == rest.epsilon);
  CHECK(back.time == rest.time);
  CHECK(back.grid().box_length == 2.5);

  for (int dim : {2, 3}) {
    const GridSpec gd = make_grid(dim, dim == 2 ? 32 : 12, 2.0 * oblim::test::kPi);
    const PhysicalParams p;
    const CompressibleState sc = imex_step(well_prepared_init(gd, p, 0.1, 0.05, 3), ImexConfig{}, p);
    save_snapshot(sc, dir / "c.obm");
    const auto c = std::get<CompressibleState>(load_snapshot(dir / "c.obm"));
    CHECK(c.phi == sc.phi);
    CHECK(c.u == sc.u);
    CHECK(c.eta == sc.eta);
    CHECK(c.tau == sc.tau);
    CHECK(c.time == sc.time);
    CHECK(encode_snapshot(c) == encode_snapshot(sc));

    const IncompressibleState si =
        projection_step(matched_incompressible_init(gd, p, 0.05, 3), ImexConfig{}, p);
    save_snapshot(si, dir / "i.obm");
    const auto i = std::get<IncompressibleState>(load_snapshot(dir / "i.obm"));
    CHECK(i.u == si.u);
    CHECK(i.eta == si.eta);
    CHECK(i.tau == si.tau);
    CHECK(i.pi == si.pi);
    CHECK(i.time == si.time);
  }
}

TEST_CASE("snapshot layout") {
  const GridSpec g = make_grid(2, 8, 1.0);
  CompressibleState s = CompressibleState::rest(g, 0.5);
  s.phi[0] = 1.0;
  const auto bytes = encode_snapshot(s);
  CHECK(bytes.size() == kSnapshotHeaderBytes + 7 * 64 * 8 + 4);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "OBM1");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[6] == 2);
  CHECK(bytes[7] == 0);
  CHECK(bytes[8] == 8);
  CHECK(bytes[36] == 7);
  // phi[0] = 1.0 little-endian: 00 .. 00 f0 3f
  CHECK(bytes[kSnapshotHeaderBytes + 6] == 0xf0);
  CHECK(bytes[kSnapshotHeaderBytes + 7] == 0x3f);
  CHECK(encode_snapshot(IncompressibleState::rest(g))[7] == 1);
}

TEST_CASE("damaged snapshots are rejected") {
  const GridSpec g = make_grid(2, 12, 1.0);
  const PhysicalParams p;
  const auto good = encode_snapshot(well_prepared_init(g, p, 0.5, 0.05, 1));

  auto truncated = good;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_snapshot(truncated), IoError);
  CHECK_THROWS_AS(decode_snapshot(std::vector<std::uint8_t>(good.begin(), good.begin() + 20)), IoError);
  CHECK_THROWS_AS(decode_snapshot({}), IoError);

  auto magic = good;
  magic[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_snapshot(magic), doctest::Contains("magic"), IoError);

  auto version = good;
  version[4] = 2;
  CHECK_THROWS_WITH_AS(decode_snapshot(version), doctest::Contains("version"), IoError);

  auto flipped = good;
  flipped[kSnapshotHeaderBytes + 100] ^= 0x10;
  CHECK_THROWS_WITH_AS(decode_snapshot(flipped), doctest::Contains("checksum"), IoError);

  const fs::path dir = scratch("damaged");
  {
    std::ofstream out(dir / "short.obm", std::ios::binary);
    out.write(reinterpret_cast<const char*>(truncated.data()), static_cast<std::streamsize>(truncated.size()));
  }
  CHECK_THROWS_AS(load_snapshot(dir / "short.obm"), IoError);
  CHECK_THROWS_AS(load_snapshot(dir / "missing.obm"), IoError);
}

TEST_CASE("study writes complete, reproducible output") {
  const fs::path a = scratch("study_a"), b = scratch("study_b");
  StudyOptions opt;
  opt.timestamp = false;
  const StudyReport ra = run_study(tiny_study(a), opt);
  const StudyReport rb = run_study(tiny_study(b), opt);
  CHECK(ra.exit_code() == rb.exit_code());
  REQUIRE(ra.rows.size() == 3);
  REQUIRE(ra.fit.has_value());
  CHECK(ra.fit_status == "ok");
  for (const char* f : {"summary.csv", "rate_fit.csv", "failures.csv", "timeseries_limit.csv",
                        "timeseries_eps_0.4.csv", "timeseries_eps_0.2.csv", "timeseries_eps_0.1.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }

  const std::string summary = slurp(a / "summary.csv");
  std::istringstream lines(summary);
  std::string line;
  std::getline(lines, line);
  CHECK(line == kSummaryHeader);
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
  }
  CHECK(rows == 3);
  CHECK(slurp(a / "timeseries_eps_0.2.csv").rfind(kTimeseriesHeader, 0) == 0);
  CHECK(!fs::exists(a / "summary.csv.tmp"));

  StudyOptions stamped;
  const StudyReport rc = run_study(tiny_study(scratch("study_c")), stamped);
  CHECK(slurp(rc.output_dir / "summary.csv").rfind("# generated ", 0) == 0);
}

TEST_CASE("study edge cases") {
  StudyOptions opt;
  opt.timestamp = false;

  const fs::path rest_dir = scratch("study_rest");
  StudyConfig rest = tiny_study(rest_dir);
  rest.delta = 0.0;
  const StudyReport r = run_study(rest, opt);
  CHECK(r.exit_code() == 0);
  CHECK(r.fit_status == "degenerate: zero gaps");
  for (const auto& row : r.rows) CHECK(row.sup_gap == 0.0);
  CHECK(slurp(rest_dir / "rate_fit.csv").find("degenerate: zero gaps") != std::string::npos);

  const fs::path single_dir = scratch("study_single");
  StudyConfig single = tiny_study(single_dir);
  single.epsilons = {0.2};
  single.callback_stride = 2;
  opt.store_snapshots = 3;
  const StudyReport s = run_study(single, opt);
  CHECK(s.rows.size() == 1);
  CHECK(!s.fit.has_value());
  CHECK(s.fit_status.rfind("skipped", 0) == 0);
  CHECK(fs::exists(single_dir / "summary.csv"));
  CHECK(fs::exists(single_dir / "snapshots" / "eps_0.2_00000.obm"));
  CHECK(fs::exists(single_dir / "snapshots" / "limit_00003.obm"));
  const auto snap = std::get<CompressibleState>(load_snapshot(single_dir / "snapshots" / "eps_0.2_00003.obm"));
  CHECK(snap.time == doctest::Approx(0.03));
}

TEST_CASE("study monitors report failures") {
  StudyOptions opt;
  opt.timestamp = false;
  const fs::path dir = scratch("study_strict");
  StudyConfig cfg = tiny_study(dir);
  cfg.beta0_min = 5.0;
  cfg.beta0_max = 6.0;
  const StudyReport r = run_study(cfg, opt);
  CHECK(r.exit_code() == 3);
  bool found = false;
  for (const auto& f : r.failures) found = found || f.monitor == "rate_slope";
  CHECK(found);
  CHECK(slurp(dir / "failures.csv").find("rate_slope") != std::string::npos);
}

TEST_CASE("single runs") {
  StudyOptions opt;
  opt.timestamp = false;
  const fs::path dir = scratch("single_runs");
  const StudyConfig cfg = tiny_study(dir);
  const StudyReport c = simulate(cfg, opt);
  CHECK(c.exit_code() == 0);
  CHECK(fs::exists(dir / "timeseries_eps_0.4.csv"));
  const StudyReport l = simulate_limit(cfg, opt);
  CHECK(l.exit_code() == 0);
  CHECK(fs::exists(dir / "timeseries_limit.csv"));
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-2.5) == "-2.5");
}

}  // TEST_SUITE
