#include "kspread/error.hpp"
#include "kspread/experiments.hpp"
#include "kspread/figures.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <optional>

using namespace kspread;

namespace {

enum Exit { ok = 0, partial = 1, config = 2 };

struct Common {
  int L = 6;
  double J = 1.0;
  double hx = 1.0;
  int eta_L = 13;
  double tol = 1e-8;
  std::size_t max_iter = 0;
  bool fast = false;
  std::string cache;
  std::string r_wd;
  unsigned workers = 0;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool chain = true) {
  if (chain) {
    app->add_option("--L", c.L, "chain length")->check(CLI::Range(2, 20));
    app->add_option("--J", c.J, "Ising coupling");
    app->add_option("--hx", c.hx, "transverse field");
  }
  app->add_option("--eta-L", c.eta_L, "chain length for level statistics")->check(CLI::Range(3, 16));
  app->add_option("--tol", c.tol, "relative Lanczos closure threshold")->check(CLI::PositiveNumber);
  app->add_option("--max-iter", c.max_iter, "cap on Lanczos coefficients (0: none)");
  app->add_flag("--fast", c.fast, "L=5, eta-L=11");
  app->add_option("--cache", c.cache, "cache directory (default: $KSPREAD_CACHE_DIR or <out>/cache)");
  app->add_option("--r-wd", c.r_wd, "Wigner-Dyson reference: ensemble, surmise or a number");
  app->add_option("--workers", c.workers, "worker threads (0: all cores)");
  app->add_flag("-q,--quiet", c.quiet, "no progress output");
}

double parse_r_wd(const std::string& s) {
  if (s.empty()) return kRTildeGoeEnsemble;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  return parse_wigner_dyson_reference(s);
}

ResultCache make_cache(const Common& c, const std::filesystem::path& out) {
  if (!c.cache.empty()) return ResultCache(c.cache);
  if (auto env = ResultCache::dir_from_env()) return ResultCache(*env);
  return ResultCache(out / "cache");
}

ProgressFn progress_for(const Common& c) {
  if (c.quiet) return {};
  return [](std::string_view msg) { std::cerr << msg << '\n'; };
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov complexity and Lanczos-coefficient statistics for the mixed-field Ising chain"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  std::filesystem::path out = "kspread-out";

  // point
  auto* point = app.add_subcommand("point", "one (hz, operator) computation");
  add_common(point, common);
  double hz = 0.2;
  std::string op_text = "SzT";
  std::string sector_text = "even";
  bool store_basis = false;
  bool trace = false;
  point->add_option("--hz", hz, "longitudinal field");
  point->add_option("--operator", op_text, "SzT | SxT | SyT | random:<seed> | sites:3z+4z");
  point->add_option("--sector", sector_text, "parity sector (even|odd)");
  point->add_flag("--store-basis", store_basis, "keep Krylov vectors and report orthonormality");
  point->add_flag("--trace", trace, "also write the K_C(t) trace");
  point->add_option("--out", out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "hz sweep for one or more operators plus the eta curve");
  add_common(sweep, common);
  std::string config_file;
  std::vector<std::string> operators;
  std::vector<double> hz_values;
  bool no_eta = false;
  sweep->add_option("--config", config_file, "JSON config; command-line flags override its fields");
  sweep->add_option("--operator", operators, "operator spec (repeatable)");
  sweep->add_option("--hz", hz_values, "explicit hz values (default: 30-point grid)");
  sweep->add_flag("--no-eta", no_eta, "skip level statistics");
  sweep->add_option("--out", out, "output directory");

  // figure
  auto* figure = app.add_subcommand("figure", "write the data behind one figure (fig1..fig8 or all)");
  add_common(figure, common);
  std::string figure_name;
  std::uint64_t seed = 1;
  figure->add_option("name", figure_name, "fig1..fig8 or all")->required();
  figure->add_option("--seed", seed, "seed of the random operator");
  figure->add_option("--out", out, "output directory");

  // eta
  auto* eta_cmd = app.add_subcommand("eta", "level-spacing ratio and eta of one sector spectrum");
  add_common(eta_cmd, common);
  double eta_hz = 0.2;
  std::string eta_sector = "even";
  eta_cmd->add_option("--hz", eta_hz, "longitudinal field");
  eta_cmd->add_option("--sector", eta_sector, "parity sector (even|odd)");
  eta_cmd->add_option("--out", out, "output directory (for the cache)");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "re-derive the Poisson and GOE reference values");
  std::size_t poisson_levels = 100000;
  std::size_t goe_samples = 20;
  Eigen::Index goe_dim = 1000;
  calibrate->add_option("--poisson-levels", poisson_levels);
  calibrate->add_option("--goe-samples", goe_samples);
  calibrate->add_option("--goe-dim", goe_dim);
  calibrate->add_option("--seed", seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::config;
  }

  try {
    if (common.fast) {
      common.L = 5;
      common.eta_L = 11;
    }
    LanczosOptions lopts{common.tol, common.max_iter, false};

    if (point->parsed()) {
      const SpinChainParams params{common.L, common.J, common.hx, hz};
      params.validate();
      const auto op = parse_operator_spec(op_text);
      PointOptions popts;
      popts.sector = parse_sector(sector_text);
      popts.lanczos = lopts;
      popts.lanczos.store_basis = store_basis;
      popts.keep_trace = trace;
      std::filesystem::create_directories(out);
      const ResultCache cache = make_cache(common, out);
      const PointResult r = run_point(params, op, popts, cache);
      json j = to_json(r);
      if (store_basis) {
        const auto lr = lanczos_for(params, op, popts, {});
        j["orthonormality_error"] = orthonormality_error(lr);
      }
      const std::string tag = file_tag(op.canonical()) + "_hz" + std::to_string(hz);
      write_coefficients_csv(out / ("b_" + tag + ".csv"), r.b);
      if (trace) write_trace_csv(out / ("kc_" + tag + ".csv"), r.times, r.kc);
      std::cout << j.dump(2) << '\n';
      return Exit::ok;
    }

    if (sweep->parsed()) {
      SweepConfig cfg;
      if (!config_file.empty()) {
        json j;
        try {
          j = read_json(config_file);
        } catch (const std::exception& e) {
          throw ConfigError("cannot read config '" + config_file + "': " + e.what());
        }
        cfg = sweep_config_from_json(j);
      }
      auto set = [&](const char* flag) { return sweep->count(flag) > 0; };
      if (set("--L")) cfg.base.L = common.L;
      if (set("--J")) cfg.base.J = common.J;
      if (set("--hx")) cfg.base.hx = common.hx;
      if (set("--eta-L")) cfg.eta_L = common.eta_L;
      if (set("--tol")) cfg.lanczos.tol = common.tol;
      if (set("--max-iter")) cfg.lanczos.max_iter = common.max_iter;
      if (set("--r-wd")) cfg.eta.reference.wigner_dyson = parse_r_wd(common.r_wd);
      if (set("--workers")) cfg.workers = common.workers;
      if (!operators.empty()) cfg.operators = operators;
      if (!hz_values.empty()) cfg.hz_values = hz_values;
      if (no_eta) cfg.compute_eta = false;
      if (set("--out") || config_file.empty()) cfg.output_dir = out;
      if (!common.cache.empty()) cfg.cache_dir = common.cache;
      if (common.fast) apply_fast_profile(cfg);
      cfg.validate();
      const auto t0 = std::chrono::steady_clock::now();
      const RunRecord rec = run_sweep(cfg, progress_for(common));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << "config " << rec.config_hash << "  digest " << rec.digest() << "  " << rec.points.size()
                << " points in " << secs << " s -> " << cfg.output_dir.string() << '\n';
      for (const auto& p : rec.points)
        if (!p.ok) std::cerr << "failed: " << p.op << " hz=" << p.params.hz << ": " << p.error << '\n';
      for (const auto& e : rec.eta)
        if (!e.ok) std::cerr << "failed: eta hz=" << e.hz << ": " << e.error << '\n';
      return rec.all_ok() ? Exit::ok : Exit::partial;
    }

    if (figure->parsed()) {
      FigureOptions fo;
      fo.fast = common.fast;
      fo.L = common.L;
      fo.eta_L = common.eta_L;
      fo.J = common.J;
      fo.hx = common.hx;
      fo.random_seed = seed;
      fo.lanczos = lopts;
      fo.output_dir = out;
      if (!common.cache.empty()) fo.cache_dir = common.cache;
      fo.workers = common.workers;
      fo.progress = progress_for(common);
      std::vector<std::string> names;
      if (figure_name == "all") names = figure_names();
      else names = {figure_name};
      bool all_ok = true;
      for (const auto& n : names) {
        const FigureOutput fig = run_figure(n, fo);
        all_ok = all_ok && fig.ok;
        std::cout << n << ": " << fig.files.size() << " files under " << (out / n).string()
                  << (fig.ok ? "" : " (incomplete)") << '\n';
      }
      return all_ok ? Exit::ok : Exit::partial;
    }

    if (eta_cmd->parsed()) {
      const SpinChainParams params{common.eta_L, common.J, common.hx, eta_hz};
      params.validate();
      EtaOptions eo;
      eo.reference.wigner_dyson = parse_r_wd(common.r_wd);
      const Sector s = parse_sector(eta_sector);
      const ResultCache cache = make_cache(common, out);
      const EtaResult r = eta_for(params, s, eo, cache);
      std::cout << json{{"L", params.L},
                        {"hz", eta_hz},
                        {"sector", r.sector},
                        {"n_levels", r.n_levels},
                        {"r_mean", r.r_mean},
                        {"eta", r.eta}}
                       .dump(2)
                << '\n';
      return Exit::ok;
    }

    if (calibrate->parsed()) {
      const Calibration c = calibrate_references(poisson_levels, goe_samples, goe_dim, seed);
      std::cout << json{{"r_poisson", c.r_poisson},
                        {"r_poisson_reference", kRTildePoisson},
                        {"r_goe", c.r_goe},
                        {"r_goe_ensemble_reference", kRTildeGoeEnsemble},
                        {"r_goe_surmise", kRTildeGoeSurmise},
                        {"poisson_levels", c.poisson_levels},
                        {"goe_samples", c.goe_samples},
                        {"goe_dim", c.goe_dim}}
                       .dump(2)
                << '\n';
      return Exit::ok;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config;
  } catch (const SymmetryViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return Exit::config;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return Exit::config;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::partial;
  }
  return Exit::ok;
}
