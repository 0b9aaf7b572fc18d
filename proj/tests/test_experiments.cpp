#include "kspread/error.hpp"
#include "kspread/experiments.hpp"
#include "kspread/figures.hpp"

#include <doctest.h>

#include <chrono>
#include <fstream>

using namespace kspread;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kspread_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::size_t count_lines(const fs::path& f) {
  std::ifstream in(f);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

} // namespace

TEST_CASE("default hz grid") {
  const auto g = default_hz_grid();
  REQUIRE(g.size() == 30);
  CHECK(g.front() == doctest::Approx(0.01));
  CHECK(g.back() == doctest::Approx(2.5));
  CHECK(std::is_sorted(g.begin(), g.end()));
  const auto dense = std::count_if(g.begin(), g.end(), [](double h) { return h >= 0.8 - 1e-12 && h <= 1.8 + 1e-12; });
  CHECK(dense == 16);
}

TEST_CASE("L=4 point") {
  const auto t0 = std::chrono::steady_clock::now();
  const PointResult r = run_point({4, 1.0, 1.0, 0.2}, parse_operator_spec("SzT"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.ok);
  CHECK(r.K == 91);
  CHECK(r.b.size() == 90);
  CHECK(r.termination == Termination::natural);
  CHECK(secs < 1.0);
  CHECK(r.saturation.kc_mean > 0.0);
  CHECK(r.saturation.kc_mean < 90.0);
  CHECK(std::abs(r.saturation.kc_mean - r.kc_infinite) <= 2.0 * r.saturation.kc_std);
  CHECK(r.times.empty());

  PointOptions keep;
  keep.keep_trace = true;
  const PointResult t = run_point({4, 1.0, 1.0, 0.2}, parse_operator_spec("SzT"), keep);
  CHECK(t.times.size() == 2000);
  CHECK(t.kc.size() == 2000);
  CHECK(t.sigma_log == r.sigma_log);

  const PointResult back = point_from_json(json::parse(to_json(r).dump()));
  CHECK(back.b == r.b);
  CHECK(back.saturation.kc_mean == r.saturation.kc_mean);
  CHECK(back.sigma_log == r.sigma_log);
}

TEST_CASE("point errors carry context and keep their type") {
  try {
    run_point({6, 1.0, 1.0, 0.2}, parse_operator_spec("sites:3z+4x"));
    FAIL("expected SymmetryViolation");
  } catch (const SymmetryViolation& e) {
    CHECK(std::string(e.what()).find("hz=0.2") != std::string::npos);
  }
}

TEST_CASE("cache round trip and key separation") {
  const fs::path dir = fresh_dir("cache");
  const ResultCache cache(dir);
  const SpinChainParams p{4, 1.0, 1.0, 0.5};
  const auto op = parse_operator_spec("SxT");
  bool hit = true;
  const auto a = lanczos_for(p, op, {}, cache, &hit);
  CHECK_FALSE(hit);
  const auto b = lanczos_for(p, op, {}, cache, &hit);
  CHECK(hit);
  CHECK(a.b == b.b);
  CHECK(a.K == b.K);

  PointOptions other;
  other.lanczos.tol = 1e-6;
  lanczos_for(p, op, other, cache, &hit);
  CHECK_FALSE(hit);
  lanczos_for({4, 1.0, 1.0, 0.5000000001}, op, {}, cache, &hit);
  CHECK_FALSE(hit);

  const auto e1 = sector_spectrum({7, 1.0, 1.0, 0.3}, Sector::even, cache);
  const auto e2 = sector_spectrum({7, 1.0, 1.0, 0.3}, Sector::even, cache);
  CHECK(e1 == e2);
  CHECK(e1.size() == 72);

  CHECK(stable_hash("abc") == stable_hash("abc"));
  CHECK(stable_hash("abc") != stable_hash("abd"));
  CHECK(stable_hash("").size() == 16);
}

TEST_CASE("sweep config parsing") {
  const json j = json::parse(R"({"L": 4, "hz_values": [0.2, 2.5], "operators": ["SzT", "random:3"],
                                "eta_L": 7, "r_wd": "surmise", "grid": {"log_points": 500},
                                "tau": {"policy": "half_grid"}})");
  const SweepConfig c = sweep_config_from_json(j);
  CHECK(c.base.L == 4);
  CHECK(c.hz_values.size() == 2);
  CHECK(c.eta.reference.wigner_dyson == kRTildeGoeSurmise);
  CHECK(c.grid.log_points == 500);
  CHECK(c.tau.kind == TauPolicy::Kind::half_grid);

  const SweepConfig again = sweep_config_from_json(to_json(c));
  CHECK(again.hash() == c.hash());

  SweepConfig moved = c;
  moved.output_dir = "elsewhere";
  moved.workers = 7;
  CHECK(moved.hash() == c.hash());
  moved.hz_values[0] = 0.21;
  CHECK(moved.hash() != c.hash());

  CHECK(sweep_config_from_json(json::parse(R"({"r_wd": 0.53})")).eta.reference.wigner_dyson == 0.53);

  for (const char* bad : {R"({"Lx": 4})", R"({"hz_values": []})", R"({"hz_values": [-1]})",
                          R"({"operators": ["Sq"]})", R"({"grid": {"bogus": 1}})", R"({"tau": {"policy": "x"}})",
                          R"({"r_wd": "gue"})", R"({"L": "six"})", R"({"L": 1})"})
    CHECK_THROWS_AS(sweep_config_from_json(json::parse(bad)), ConfigError);
}

TEST_CASE("fast profile") {
  SweepConfig c;
  apply_fast_profile(c);
  CHECK(c.base.L == 5);
  CHECK(c.eta_L == 11);
}

TEST_CASE("small sweep: determinism, outputs and resume") {
  const fs::path out = fresh_dir("sweep");
  SweepConfig c;
  c.base = {4, 1.0, 1.0, 0.0};
  c.hz_values = {0.2, 1.0, 2.5};
  c.operators = {"SzT", "random:1"};
  c.eta_L = 7;
  c.output_dir = out / "a";
  c.workers = 2;

  const RunRecord a = run_sweep(c);
  CHECK(a.all_ok());
  CHECK(a.points.size() == 6);
  CHECK(a.eta.size() == 3);
  CHECK(a.at(0, 0).K == 91);
  CHECK(a.at(1, 2).op == "random:1");
  CHECK(a.at(1, 2).params.hz == 2.5);
  for (const char* f : {"record.json", "eta.csv", "curves_SzT.csv", "curves_random_1.csv", "points.jsonl"})
    CHECK(fs::exists(c.output_dir / f));
  CHECK(count_lines(c.output_dir / "points.jsonl") == 9);

  // resume: nothing recomputed, identical digest
  const RunRecord resumed = run_sweep(c);
  CHECK(resumed.digest() == a.digest());
  CHECK(count_lines(c.output_dir / "points.jsonl") == 9);
  for (const auto& p : resumed.points) CHECK(p.cached);

  // serial run in a fresh directory gives the same numbers
  SweepConfig serial = c;
  serial.output_dir = out / "b";
  serial.workers = 1;
  serial.cache_dir = out / "b_cache";
  const RunRecord b = run_sweep(serial);
  CHECK(b.digest() == a.digest());

  // interrupted journal: drop the last lines, rerun fills them in
  {
    std::ifstream in(serial.output_dir / "points.jsonl");
    std::vector<std::string> lines;
    for (std::string l; std::getline(in, l);) lines.push_back(l);
    in.close();
    std::ofstream trunc(serial.output_dir / "points.jsonl");
    for (std::size_t i = 0; i + 3 < lines.size(); ++i) trunc << lines[i] << '\n';
    trunc << lines.back().substr(0, lines.back().size() / 2); // torn line
  }
  const RunRecord refilled = run_sweep(serial);
  CHECK(refilled.digest() == a.digest());
}

TEST_CASE("sweep records failures and continues") {
  const fs::path out = fresh_dir("sweep_fail");
  SweepConfig c;
  c.base = {4, 1.0, 1.0, 0.0};
  c.hz_values = {0.3};
  c.operators = {"SzT", "sites:2z+3x"};
  c.compute_eta = false;
  c.output_dir = out;
  const RunRecord r = run_sweep(c);
  CHECK_FALSE(r.all_ok());
  CHECK(r.at(0, 0).ok);
  CHECK_FALSE(r.at(1, 0).ok);
  CHECK(r.at(1, 0).error.find("reflection") != std::string::npos);
}

TEST_CASE("file tags") {
  CHECK(file_tag("sites:3z+4z") == "sites_3z_4z");
  CHECK(file_tag("random:7") == "random_7");
}

TEST_CASE("handpick search on a synthetic pair") {
  // Integrable-like sequence with a higher long-time complexity than the chaotic one.
  const PointOptions o;
  const auto chaotic = lanczos_for({4, 1.0, 1.0, 0.2}, parse_operator_spec("SxT"), o).b;
  const auto integrable = lanczos_for({4, 1.0, 1.0, 2.5}, parse_operator_spec("SxT"), o).b;
  const std::size_t idx[] = {1, 3, 5};
  const HandpickSearch s = search_handpick_inversion(chaotic, integrable, idx);
  CHECK(s.evaluations > 0);
  if (s.found) {
    CHECK((s.kc_edited < s.kc_chaotic) == (s.kc_integrable > s.kc_chaotic));
    for (std::size_t i = 0; i < integrable.size(); ++i)
      if (i != 0 && i != 2 && i != 4) CHECK(s.edited[i] == integrable[i]);
  }
  CHECK_THROWS_AS(run_figure("fig9", {}), ConfigError);
  CHECK(figure_names().size() == 8);
}
