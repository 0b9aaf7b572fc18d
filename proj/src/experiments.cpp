#include "kspread/experiments.hpp"

#include "kspread/error.hpp"
#include "kspread/normalize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace kspread {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Round-trip formatting so cache keys distinguish every distinct double.
std::string num(double x) { return json(x).dump(); }

std::string chain_key(const SpinChainParams& p, Sector s) {
  return "L=" + std::to_string(p.L) + "|J=" + num(p.J) + "|hx=" + num(p.hx) + "|hz=" + num(p.hz) +
         "|sector=" + std::string(to_string(s));
}

std::string describe(const SpinChainParams& p, std::string_view op) {
  std::ostringstream os;
  os << "point (L=" << p.L << ", J=" << p.J << ", hx=" << p.hx << ", hz=" << p.hz << ", op=" << op << "): ";
  return os.str();
}

// Re-raises the active kspread error with a context prefix, keeping its type.
[[noreturn]] void rethrow_with_context(const std::string& ctx) {
  try {
    throw;
  } catch (const SymmetryViolation& e) {
    throw SymmetryViolation(ctx + e.what());
  } catch (const ResourceError& e) {
    throw ResourceError(ctx + e.what());
  } catch (const DimensionMismatch& e) {
    throw DimensionMismatch(ctx + e.what());
  } catch (const NotHermitian& e) {
    throw NotHermitian(ctx + e.what());
  } catch (const DegenerateSpectrum& e) {
    throw DegenerateSpectrum(ctx + e.what());
  } catch (const InsufficientData& e) {
    throw InsufficientData(ctx + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(ctx + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(ctx + e.what());
  } catch (const Error& e) {
    throw Error(ctx + e.what());
  }
}

double number_or_nan(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

Termination parse_termination(const std::string& s) {
  if (s == "natural") return Termination::natural;
  if (s == "tolerance") return Termination::tolerance;
  if (s == "max_iter") return Termination::max_iter;
  throw ConfigError("unknown termination '" + s + "'");
}

std::string_view to_string(TauPolicy::Kind k) {
  switch (k) {
  case TauPolicy::Kind::plateau_band: return "plateau_band";
  case TauPolicy::Kind::half_grid: return "half_grid";
  case TauPolicy::Kind::fixed: return "fixed";
  }
  return "?";
}

TauPolicy::Kind parse_tau_kind(const std::string& s) {
  if (s == "plateau_band") return TauPolicy::Kind::plateau_band;
  if (s == "half_grid") return TauPolicy::Kind::half_grid;
  if (s == "fixed") return TauPolicy::Kind::fixed;
  throw ConfigError("unknown tau policy '" + s + "' (plateau_band|half_grid|fixed)");
}

void check_keys(const json& j, const std::set<std::string>& allowed, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + std::string(where));
}

} // namespace

json to_json(const PointResult& r) {
  json j = {{"params", to_json(r.params)},
            {"operator", r.op},
            {"ok", r.ok},
            {"error", r.error},
            {"K", r.K},
            {"b", r.b},
            {"termination", std::string(to_string(r.termination))},
            {"sigma_log", r.sigma_log},
            {"log_ratio_mean", r.log_ratio_mean},
            {"tau", r.saturation.tau},
            {"kc_mean", r.saturation.kc_mean},
            {"kc_std", r.saturation.kc_std},
            {"window_samples", r.saturation.window_samples},
            {"tau_fallback", r.saturation.tau_fallback},
            {"kc_infinite", r.kc_infinite},
            {"seconds", r.seconds},
            {"cached", r.cached}};
  return j;
}

PointResult point_from_json(const json& j) {
  PointResult r;
  r.params = params_from_json(j.at("params"));
  r.op = j.at("operator").get<std::string>();
  r.ok = j.at("ok").get<bool>();
  r.error = j.value("error", std::string{});
  r.K = j.at("K").get<Eigen::Index>();
  r.b = j.at("b").get<std::vector<double>>();
  r.termination = parse_termination(j.at("termination").get<std::string>());
  r.sigma_log = number_or_nan(j, "sigma_log");
  r.log_ratio_mean = number_or_nan(j, "log_ratio_mean");
  r.saturation.tau = number_or_nan(j, "tau");
  r.saturation.kc_mean = number_or_nan(j, "kc_mean");
  r.saturation.kc_std = number_or_nan(j, "kc_std");
  r.saturation.window_samples = j.value("window_samples", std::size_t{0});
  r.saturation.tau_fallback = j.value("tau_fallback", false);
  r.kc_infinite = number_or_nan(j, "kc_infinite");
  r.seconds = j.value("seconds", 0.0);
  r.cached = j.value("cached", false);
  return r;
}

LanczosResult lanczos_for(const SpinChainParams& params, const OperatorSpec& op, const PointOptions& opts,
                          const ResultCache& cache, bool* cache_hit) {
  params.validate();
  const std::string key = "lanczos|" + chain_key(params, opts.sector) + "|op=" + op.canonical() +
                          "|tol=" + num(opts.lanczos.tol) + "|max_iter=" + std::to_string(opts.lanczos.max_iter);
  if (cache_hit) *cache_hit = false;
  if (!opts.lanczos.store_basis) {
    if (auto hit = cache.load_json(key)) {
      LanczosResult r;
      r.b = hit->at("b").get<std::vector<double>>();
      r.K = hit->at("K").get<Eigen::Index>();
      r.hilbert_dim = hit->at("hilbert_dim").get<Eigen::Index>();
      r.termination = parse_termination(hit->at("termination").get<std::string>());
      if (cache_hit) *cache_hit = true;
      return r;
    }
  }
  const auto basis = build_parity_basis(params.L, opts.sector);
  const auto h = sector_hamiltonian(params, basis);
  const auto o = build_sector_operator(op, basis);
  LanczosResult r = lanczos(h, OperatorVector::flatten(o), opts.lanczos);
  cache.store_json(key, {{"b", r.b},
                         {"K", r.K},
                         {"hilbert_dim", r.hilbert_dim},
                         {"termination", std::string(to_string(r.termination))}});
  return r;
}

PointResult run_point(const SpinChainParams& params, const OperatorSpec& op, const PointOptions& opts,
                      const ResultCache& cache) {
  const auto t0 = Clock::now();
  PointResult out;
  out.params = params;
  out.op = op.canonical();
  try {
    const LanczosResult lr = lanczos_for(params, op, opts, cache, &out.cached);
    out.K = lr.K;
    out.b = lr.b;
    out.termination = lr.termination;
    if (lr.b.size() >= 2) {
      out.sigma_log = sigma_log(lr.b);
      out.log_ratio_mean = log_ratio_mean(lr.b);
    } else {
      out.sigma_log = out.log_ratio_mean = std::numeric_limits<double>::quiet_NaN();
    }
    ComplexityTrace trace = complexity_trace(lr.b, opts.grid, opts.tau);
    out.saturation = trace.saturation;
    out.kc_infinite = trace.kc_infinite;
    if (opts.keep_trace) {
      out.times = std::move(trace.times);
      out.kc = std::move(trace.kc);
    }
  } catch (const Error&) {
    rethrow_with_context(describe(params, op.canonical()));
  }
  out.ok = true;
  out.seconds = seconds_since(t0);
  return out;
}

std::vector<double> sector_spectrum(const SpinChainParams& params, Sector sector, const ResultCache& cache) {
  params.validate();
  const std::string key = "spectrum|" + chain_key(params, sector);
  if (auto hit = cache.load_vector(key)) return *hit;
  const auto basis = build_parity_basis(params.L, sector);
  const auto h = sector_hamiltonian(params, basis);
  auto e = symmetric_eigenvalues(h.matrix().real());
  cache.store_vector(key, e);
  return e;
}

EtaResult eta_for(const SpinChainParams& params, Sector sector, const EtaOptions& opts, const ResultCache& cache) {
  const auto e = sector_spectrum(params, sector, cache);
  return eta(e, opts, std::string(to_string(sector)));
}

std::vector<double> default_hz_grid() {
  std::vector<double> hz;
  for (int i = 0; i < 7; ++i) hz.push_back(0.01 * std::pow(80.0, i / 7.0));
  for (int i = 0; i < 16; ++i) hz.push_back(0.8 + i / 15.0);
  for (int i = 1; i <= 7; ++i) hz.push_back(1.8 + 0.1 * i);
  return hz;
}

void SweepConfig::validate() const {
  if (base.L < 2) throw ConfigError("L must be >= 2");
  if (!std::isfinite(base.J) || !std::isfinite(base.hx)) throw ConfigError("J and hx must be finite");
  if (hz_values.empty()) throw ConfigError("hz_values must not be empty");
  for (double hz : hz_values)
    if (!std::isfinite(hz) || !(hz > 0.0)) throw ConfigError("hz values must be finite and positive");
  if (operators.empty()) throw ConfigError("at least one operator is required");
  for (const auto& op : operators) parse_operator_spec(op);
  if (compute_eta && eta_L < 3) throw ConfigError("eta_L must be >= 3");
  if (!(lanczos.tol >= 0.0)) throw ConfigError("tol must be nonnegative");
  if (!(grid.t_min > 0.0) || grid.uniform_points < 2) throw ConfigError("time grid needs t_min > 0 and >= 2 uniform points");
  if (grid.log_points + grid.uniform_points <= kMinWindowSamples)
    throw ConfigError("time grid too small for the saturation window");
  if (!(eta.trim_fraction >= 0.0 && eta.trim_fraction < 0.5)) throw ConfigError("trim_fraction must lie in [0, 0.5)");
}

PointOptions SweepConfig::point_options() const {
  PointOptions o;
  o.sector = sector;
  o.lanczos = lanczos;
  o.lanczos.store_basis = false;
  o.grid = grid;
  o.tau = tau;
  return o;
}

json SweepConfig::numerical_json() const {
  std::vector<std::string> ops;
  for (const auto& op : operators) ops.push_back(parse_operator_spec(op).canonical());
  return {{"schema", std::string(kCacheSchema)},
          {"L", base.L},
          {"J", base.J},
          {"hx", base.hx},
          {"hz_values", hz_values},
          {"operators", ops},
          {"sector", std::string(to_string(sector))},
          {"eta_L", eta_L},
          {"eta_sector", std::string(to_string(eta_sector))},
          {"compute_eta", compute_eta},
          {"tol", lanczos.tol},
          {"max_iter", lanczos.max_iter},
          {"grid",
           {{"log_points", grid.log_points},
            {"uniform_points", grid.uniform_points},
            {"t_min", grid.t_min},
            {"horizon", grid.horizon},
            {"t_max", grid.t_max_override}}},
          {"tau",
           {{"policy", std::string(to_string(tau.kind))},
            {"band", tau.band},
            {"consecutive", tau.consecutive},
            {"fixed_tau", tau.fixed_tau}}},
          {"r_poisson", eta.reference.poisson},
          {"r_wd", eta.reference.wigner_dyson},
          {"trim_fraction", eta.trim_fraction}};
}

std::string SweepConfig::hash() const { return stable_hash(numerical_json().dump()); }

json to_json(const SweepConfig& c) {
  json j = c.numerical_json();
  j.erase("schema");
  j["output_dir"] = c.output_dir.string();
  if (c.cache_dir) j["cache_dir"] = c.cache_dir->string();
  j["workers"] = c.workers;
  return j;
}

SweepConfig sweep_config_from_json(const json& j) {
  check_keys(j,
             {"L", "J", "hx", "hz_values", "operators", "sector", "eta_L", "eta_sector", "compute_eta", "tol",
              "max_iter", "grid", "tau", "r_poisson", "r_wd", "trim_fraction", "output_dir", "cache_dir", "workers"},
             "sweep config");
  SweepConfig c;
  try {
    c.base.L = j.value("L", c.base.L);
    c.base.J = j.value("J", c.base.J);
    c.base.hx = j.value("hx", c.base.hx);
    if (j.contains("hz_values")) c.hz_values = j.at("hz_values").get<std::vector<double>>();
    if (j.contains("operators")) c.operators = j.at("operators").get<std::vector<std::string>>();
    if (j.contains("sector")) c.sector = parse_sector(j.at("sector").get<std::string>());
    c.eta_L = j.value("eta_L", c.eta_L);
    if (j.contains("eta_sector")) c.eta_sector = parse_sector(j.at("eta_sector").get<std::string>());
    c.compute_eta = j.value("compute_eta", c.compute_eta);
    c.lanczos.tol = j.value("tol", c.lanczos.tol);
    c.lanczos.max_iter = j.value("max_iter", c.lanczos.max_iter);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, {"log_points", "uniform_points", "t_min", "horizon", "t_max"}, "grid");
      c.grid.log_points = g.value("log_points", c.grid.log_points);
      c.grid.uniform_points = g.value("uniform_points", c.grid.uniform_points);
      c.grid.t_min = g.value("t_min", c.grid.t_min);
      c.grid.horizon = g.value("horizon", c.grid.horizon);
      c.grid.t_max_override = g.value("t_max", c.grid.t_max_override);
    }
    if (j.contains("tau")) {
      const auto& t = j.at("tau");
      check_keys(t, {"policy", "band", "consecutive", "fixed_tau"}, "tau");
      if (t.contains("policy")) c.tau.kind = parse_tau_kind(t.at("policy").get<std::string>());
      c.tau.band = t.value("band", c.tau.band);
      c.tau.consecutive = t.value("consecutive", c.tau.consecutive);
      c.tau.fixed_tau = t.value("fixed_tau", c.tau.fixed_tau);
    }
    c.eta.reference.poisson = j.value("r_poisson", c.eta.reference.poisson);
    if (j.contains("r_wd")) {
      const auto& w = j.at("r_wd");
      c.eta.reference.wigner_dyson = w.is_string() ? parse_wigner_dyson_reference(w.get<std::string>()) : w.get<double>();
    }
    c.eta.trim_fraction = j.value("trim_fraction", c.eta.trim_fraction);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("cache_dir")) c.cache_dir = fs::path(j.at("cache_dir").get<std::string>());
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sweep config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

void apply_fast_profile(SweepConfig& c) {
  c.base.L = 5;
  c.eta_L = 11;
}

bool RunRecord::all_ok() const {
  return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.ok; }) &&
         std::all_of(eta.begin(), eta.end(), [](const auto& e) { return e.ok; });
}

const PointResult& RunRecord::at(std::size_t op_index, std::size_t hz_index) const {
  if (hz_index >= hz_values.size()) throw InvalidArgument("hz index out of range");
  return points.at(op_index * hz_values.size() + hz_index);
}

std::string RunRecord::digest() const {
  json j = json::array();
  for (const auto& p : points) {
    json e = to_json(p);
    e.erase("seconds");
    e.erase("cached");
    j.push_back(e);
  }
  for (const auto& e : eta)
    j.push_back({{"hz", e.hz}, {"ok", e.ok}, {"r_mean", e.result.r_mean}, {"eta", e.result.eta}});
  return stable_hash(config_hash + j.dump());
}

json to_json(const RunRecord& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(to_json(p));
  json eta = json::array();
  for (const auto& e : r.eta)
    eta.push_back({{"hz", e.hz},
                   {"ok", e.ok},
                   {"error", e.error},
                   {"r_mean", e.result.r_mean},
                   {"eta", e.result.eta},
                   {"n_levels", e.result.n_levels},
                   {"sector", e.result.sector}});
  return {{"config_hash", r.config_hash}, {"version", r.version}, {"wall_seconds", r.wall_seconds},
          {"digest", r.digest()},         {"points", pts},         {"eta", eta}};
}

std::string file_tag(std::string_view op) {
  std::string out;
  for (char c : op) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_');
  return out;
}

RunRecord run_sweep(const SweepConfig& config, const ProgressFn& progress) {
  config.validate();
  const auto t0 = Clock::now();
  std::vector<OperatorSpec> ops;
  for (const auto& s : config.operators) ops.push_back(parse_operator_spec(s));

  fs::create_directories(config.output_dir);
  ResultCache cache;
  if (config.cache_dir) cache = ResultCache(*config.cache_dir);
  else if (auto env = ResultCache::dir_from_env()) cache = ResultCache(*env);
  else cache = ResultCache(config.output_dir / "cache");

  RunRecord record;
  record.config_hash = config.hash();
  const std::size_t n_hz = config.hz_values.size();
  record.hz_values = config.hz_values;
  record.points.resize(ops.size() * n_hz);
  if (config.compute_eta) record.eta.resize(n_hz);

  // Resume from points already flushed by an earlier run of this config.
  const fs::path journal = config.output_dir / "points.jsonl";
  std::vector<bool> point_done(record.points.size(), false), eta_done(n_hz, false);
  if (std::ifstream in{journal}) {
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        continue; // torn final line from an interrupted run
      }
      if (j.value("config_hash", std::string{}) != record.config_hash) continue;
      const auto hz_index = j.at("hz_index").get<std::size_t>();
      if (hz_index >= n_hz) continue;
      if (j.at("kind") == "point") {
        const auto op_index = j.at("op_index").get<std::size_t>();
        if (op_index >= ops.size()) continue;
        auto p = point_from_json(j.at("result"));
        if (!p.ok) continue;
        p.cached = true;
        record.points[op_index * n_hz + hz_index] = std::move(p);
        point_done[op_index * n_hz + hz_index] = true;
      } else if (j.at("kind") == "eta" && config.compute_eta) {
        EtaPoint e;
        e.hz = config.hz_values[hz_index];
        e.ok = true;
        e.result.r_mean = j.at("r_mean").get<double>();
        e.result.eta = j.at("eta").get<double>();
        e.result.n_levels = j.at("n_levels").get<std::size_t>();
        e.result.sector = j.at("sector").get<std::string>();
        record.eta[hz_index] = e;
        eta_done[hz_index] = true;
      }
    }
  }

  std::ofstream journal_out(journal, std::ios::app);
  std::mutex journal_mutex;
  auto flush_line = [&](const json& j, std::string_view message) {
    std::lock_guard lock(journal_mutex);
    journal_out << j.dump() << '\n';
    journal_out.flush();
    if (progress) progress(message);
  };

  std::vector<std::function<void()>> tasks;
  if (config.compute_eta) {
    for (std::size_t h = 0; h < n_hz; ++h) {
      if (eta_done[h]) continue;
      tasks.emplace_back([&, h] {
        EtaPoint e;
        e.hz = config.hz_values[h];
        SpinChainParams p = config.base;
        p.L = config.eta_L;
        p.hz = e.hz;
        try {
          e.result = eta_for(p, config.eta_sector, config.eta, cache);
          e.ok = true;
          flush_line({{"config_hash", record.config_hash},
                      {"kind", "eta"},
                      {"hz_index", h},
                      {"r_mean", e.result.r_mean},
                      {"eta", e.result.eta},
                      {"n_levels", e.result.n_levels},
                      {"sector", e.result.sector}},
                     "eta hz=" + num(e.hz) + " -> " + num(e.result.eta));
        } catch (const std::exception& ex) {
          e.error = ex.what();
          if (progress) progress("eta hz=" + num(e.hz) + " FAILED: " + e.error);
        }
        record.eta[h] = std::move(e);
      });
    }
  }
  const PointOptions popts = config.point_options();
  for (std::size_t o = 0; o < ops.size(); ++o) {
    for (std::size_t h = 0; h < n_hz; ++h) {
      const std::size_t slot = o * n_hz + h;
      if (point_done[slot]) continue;
      tasks.emplace_back([&, o, h, slot] {
        SpinChainParams p = config.base;
        p.hz = config.hz_values[h];
        PointResult r;
        try {
          r = run_point(p, ops[o], popts, cache);
          flush_line({{"config_hash", record.config_hash},
                      {"kind", "point"},
                      {"op_index", o},
                      {"hz_index", h},
                      {"result", to_json(r)}},
                     ops[o].canonical() + " hz=" + num(p.hz) + " K=" + std::to_string(r.K) +
                         " <K_C>=" + num(r.saturation.kc_mean));
        } catch (const std::exception& ex) {
          r.params = p;
          r.op = ops[o].canonical();
          r.ok = false;
          r.error = ex.what();
          if (progress) progress(std::string("FAILED: ") + r.error);
        }
        record.points[slot] = std::move(r);
      });
    }
  }

  unsigned workers = config.workers ? config.workers : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, tasks.size())));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) tasks[i]();
      });
  }

  for (std::size_t h = 0; h < n_hz && config.compute_eta; ++h) record.eta[h].hz = config.hz_values[h];
  record.wall_seconds = seconds_since(t0);

  // Summary outputs.
  if (config.compute_eta) {
    std::vector<EtaRow> rows;
    for (const auto& e : record.eta)
      if (e.ok) rows.push_back({e.hz, e.result});
    write_eta_csv(config.output_dir / "eta.csv", rows);
  }
  for (std::size_t o = 0; o < ops.size(); ++o) {
    std::vector<double> hz, eta, sigma, kc;
    for (std::size_t h = 0; h < n_hz; ++h) {
      const auto& p = record.points[o * n_hz + h];
      const bool eta_ok = !config.compute_eta || record.eta[h].ok;
      if (!p.ok || !eta_ok) continue;
      hz.push_back(config.hz_values[h]);
      eta.push_back(config.compute_eta ? record.eta[h].result.eta : std::numeric_limits<double>::quiet_NaN());
      sigma.push_back(p.sigma_log);
      kc.push_back(p.saturation.kc_mean);
    }
    CurveSet curves;
    try {
      curves = make_curve_set(hz, eta, sigma, kc);
    } catch (const Error&) {
      // Too few or constant points: emit raw columns only.
      const std::vector<double> nan(hz.size(), std::numeric_limits<double>::quiet_NaN());
      curves = CurveSet{hz, eta, sigma, kc, nan, nan};
    }
    write_curves_csv(config.output_dir / ("curves_" + file_tag(ops[o].canonical()) + ".csv"), curves);
  }
  json rec = to_json(record);
  rec["config"] = to_json(config);
  write_json(config.output_dir / "record.json", rec);
  return record;
}

} // namespace kspread
