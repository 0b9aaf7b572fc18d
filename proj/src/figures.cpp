#include "kspread/figures.hpp"

#include "kspread/error.hpp"
#include "kspread/io.hpp"
#include "kspread/krylov.hpp"
#include "kspread/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kspread {

namespace fs = std::filesystem;

namespace {

constexpr double kFigureHz[] = {0.2, 1.35, 2.5};

std::string hz_tag(double hz) {
  std::ostringstream os;
  os << hz;
  return "hz" + os.str();
}

std::vector<double> scaled_edit(std::span<const double> b, std::span<const std::size_t> indices, double f,
                                std::vector<CoefficientEdit>* edits) {
  std::vector<CoefficientEdit> e;
  for (std::size_t i : indices) {
    if (i < 1 || i > b.size()) throw InvalidArgument("handpick index out of range");
    e.emplace_back(i, f * b[i - 1]);
  }
  auto out = handpick(b, e);
  if (edits) *edits = std::move(e);
  return out;
}

// Histogram of log(b_n/b_{n+1}) on fixed edges shared by the three panels.
void write_histogram(const fs::path& file, std::span<const double> b, double lo, double hi, int bins) {
  const auto r = log_ratios(b);
  std::vector<double> centers(static_cast<std::size_t>(bins)), counts(centers.size(), 0.0), density(centers.size());
  const double w = (hi - lo) / bins;
  for (int i = 0; i < bins; ++i) centers[static_cast<std::size_t>(i)] = lo + (i + 0.5) * w;
  for (double x : r) {
    const int k = std::clamp(static_cast<int>(std::floor((x - lo) / w)), 0, bins - 1);
    counts[static_cast<std::size_t>(k)] += 1.0;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) density[i] = counts[i] / (static_cast<double>(r.size()) * w);
  write_csv(file, {"log_ratio", "count", "density"}, {centers, counts, density});
}

struct Context {
  const FigureOptions& opts;
  fs::path dir;
  ResultCache cache;
  int L;
  int eta_L;
  FigureOutput out;

  SpinChainParams params(double hz, int l) const { return {l, opts.J, opts.hx, hz}; }

  PointOptions point_options(bool keep_trace) const {
    PointOptions p;
    p.lanczos = opts.lanczos;
    p.lanczos.store_basis = false;
    p.keep_trace = keep_trace;
    return p;
  }

  void note(std::string_view msg) const {
    if (opts.progress) opts.progress(msg);
  }

  fs::path file(const std::string& name) {
    out.files.push_back(dir / name);
    return dir / name;
  }
};

// fig1 / fig3: three h_z points for one operator.
void three_points(Context& ctx, const std::string& op_text) {
  const auto op = parse_operator_spec(op_text);
  std::vector<PointResult> points;
  std::vector<double> etas;
  for (double hz : kFigureHz) {
    ctx.note(op_text + " hz=" + std::to_string(hz));
    points.push_back(run_point(ctx.params(hz, ctx.L), op, ctx.point_options(true), ctx.cache));
    etas.push_back(eta_for(ctx.params(hz, ctx.eta_L), Sector::even, {}, ctx.cache).eta);
  }
  double lo = 0.0, hi = 0.0;
  for (const auto& p : points)
    for (double x : log_ratios(p.b)) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  const double edge = std::max(std::abs(lo), std::abs(hi));
  json panels = json::array();
  json a = {{"panel", "a"}, {"kind", "line"}, {"x", "n"}, {"y", "b_n"}, {"files", json::array()}};
  json b = {{"panel", "b"}, {"kind", "step"}, {"x", "log_ratio"}, {"y", "density"}, {"files", json::array()}};
  json c = {{"panel", "c"}, {"kind", "line"}, {"x", "t"}, {"y", "K_C"}, {"logx", true}, {"files", json::array()}};
  std::vector<double> hz_col, eta_col, sig_col, mean_col, kc_col, sd_col, kinf_col, k_col;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::string tag = hz_tag(kFigureHz[i]);
    write_coefficients_csv(ctx.file("b_" + tag + ".csv"), p.b);
    write_histogram(ctx.file("log_ratio_hist_" + tag + ".csv"), p.b, -edge, edge, 60);
    write_trace_csv(ctx.file("kc_" + tag + ".csv"), p.times, p.kc);
    a["files"].push_back("b_" + tag + ".csv");
    b["files"].push_back("log_ratio_hist_" + tag + ".csv");
    c["files"].push_back("kc_" + tag + ".csv");
    hz_col.push_back(kFigureHz[i]);
    eta_col.push_back(etas[i]);
    sig_col.push_back(p.sigma_log);
    mean_col.push_back(p.log_ratio_mean);
    kc_col.push_back(p.saturation.kc_mean);
    sd_col.push_back(p.saturation.kc_std);
    kinf_col.push_back(p.kc_infinite);
    k_col.push_back(static_cast<double>(p.K));
  }
  write_csv(ctx.file("summary.csv"),
            {"hz", "eta", "sigma_log", "log_ratio_mean", "kc_mean", "kc_std", "kc_infinite", "K"},
            {hz_col, eta_col, sig_col, mean_col, kc_col, sd_col, kinf_col, k_col});
  panels.push_back(a);
  panels.push_back(b);
  panels.push_back(c);
  ctx.out.manifest["panels"] = panels;
  ctx.out.manifest["summary"] = "summary.csv";
  ctx.out.manifest["operator"] = op.canonical();
}

// fig2/4/6 (normalized) and fig7/8 (raw) over the h_z grid.
void sweep_figure(Context& ctx, const std::string& op_text, bool normalized) {
  SweepConfig cfg;
  cfg.base = ctx.params(0.0, ctx.L);
  cfg.hz_values = ctx.opts.hz_values;
  cfg.operators = {op_text};
  cfg.eta_L = ctx.eta_L;
  cfg.lanczos = ctx.opts.lanczos;
  cfg.output_dir = ctx.dir / "sweep";
  cfg.cache_dir = *ctx.cache.dir();
  cfg.workers = ctx.opts.workers;
  const RunRecord rec = run_sweep(cfg, ctx.opts.progress);
  ctx.out.ok = rec.all_ok();

  std::vector<double> hz, eta, sigma, kc;
  for (std::size_t h = 0; h < rec.hz_values.size(); ++h) {
    const auto& p = rec.at(0, h);
    if (!p.ok || !rec.eta[h].ok) continue;
    hz.push_back(rec.hz_values[h]);
    eta.push_back(rec.eta[h].result.eta);
    sigma.push_back(p.sigma_log);
    kc.push_back(p.saturation.kc_mean);
  }
  json panels = json::array();
  if (normalized) {
    const CurveSet curves = make_curve_set(hz, eta, sigma, kc);
    write_curves_csv(ctx.file("curves.csv"), curves);
    panels.push_back({{"panel", "main"},
                      {"kind", "lines"},
                      {"files", {"curves.csv"}},
                      {"x", "hz"},
                      {"y", {"eta", "sigma_norm", "kc_norm"}},
                      {"labels", {"eta", "-sigma_log (normalized)", "<K_C> (normalized)"}}});
  } else {
    write_csv(ctx.file("curves_raw.csv"), {"hz", "eta", "sigma_log", "kc_mean"}, {hz, eta, sigma, kc});
    panels.push_back({{"panel", "eta"}, {"kind", "line"}, {"files", {"curves_raw.csv"}}, {"x", "hz"}, {"y", "eta"}});
    panels.push_back(
        {{"panel", "sigma"}, {"kind", "line"}, {"files", {"curves_raw.csv"}}, {"x", "hz"}, {"y", "sigma_log"}});
    panels.push_back({{"panel", "kc"}, {"kind", "line"}, {"files", {"curves_raw.csv"}}, {"x", "hz"}, {"y", "kc_mean"}});
  }
  if (hz.size() >= 2) {
    ctx.out.manifest["pearson_kc_eta"] = pearson(kc, eta);
    ctx.out.manifest["pearson_sigma_eta"] = pearson(sigma, eta);
  }
  ctx.out.manifest["panels"] = panels;
  ctx.out.manifest["operator"] = parse_operator_spec(op_text).canonical();
  ctx.out.manifest["hz_values"] = cfg.hz_values;
  ctx.out.manifest["config_hash"] = rec.config_hash;
  ctx.out.manifest["digest"] = rec.digest();
}

void handpick_figure(Context& ctx) {
  const auto op = parse_operator_spec("SxT");
  const PointOptions popts = ctx.point_options(false);
  const auto chaotic = lanczos_for(ctx.params(0.2, ctx.L), op, popts, ctx.cache);
  const auto integrable = lanczos_for(ctx.params(2.5, ctx.L), op, popts, ctx.cache);
  const std::size_t indices[] = {1, 3, 5};
  ctx.note("searching b_1, b_3, b_5 edits");
  const HandpickSearch s = search_handpick_inversion(chaotic.b, integrable.b, indices);
  ctx.out.ok = s.found;

  write_coefficients_csv(ctx.file("b_chaotic.csv"), chaotic.b);
  write_coefficients_csv(ctx.file("b_integrable.csv"), integrable.b);
  write_coefficients_csv(ctx.file("b_integrable_handpicked.csv"), s.edited);
  const std::vector<std::pair<std::string, const std::vector<double>*>> traces = {
      {"kc_chaotic.csv", &chaotic.b}, {"kc_integrable.csv", &integrable.b}, {"kc_integrable_handpicked.csv", &s.edited}};
  for (const auto& [name, b] : traces) {
    const auto t = complexity_trace(*b);
    write_trace_csv(ctx.file(name), t.times, t.kc);
  }
  json edits = json::array();
  for (const auto& [i, v] : s.edits) edits.push_back({{"index", i}, {"value", v}});
  const json found = {{"edits", edits},
                      {"factor", s.factor},
                      {"found", s.found},
                      {"kc_chaotic", s.kc_chaotic},
                      {"kc_integrable", s.kc_integrable},
                      {"kc_integrable_handpicked", s.kc_edited},
                      {"sigma_before", s.sigma_before},
                      {"sigma_after", s.sigma_after},
                      {"evaluations", s.evaluations}};
  write_json(ctx.file("handpick_config.json"), found);
  ctx.out.manifest["handpick"] = found;
  ctx.out.manifest["panels"] = json::array(
      {{{"panel", "a"},
        {"kind", "line"},
        {"x", "n"},
        {"y", "b_n"},
        {"xlim", {0, 20}},
        {"files", {"b_chaotic.csv", "b_integrable.csv", "b_integrable_handpicked.csv"}}},
       {{"panel", "b"},
        {"kind", "line"},
        {"x", "t"},
        {"y", "K_C"},
        {"logx", true},
        {"files", {"kc_chaotic.csv", "kc_integrable.csv", "kc_integrable_handpicked.csv"}}}});
}

} // namespace

HandpickSearch search_handpick_inversion(std::span<const double> b_chaotic, std::span<const double> b_integrable,
                                         std::span<const std::size_t> indices, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) throw InvalidArgument("target fraction must lie in (0, 1]");
  HandpickSearch s;
  s.kc_chaotic = infinite_time_average(b_chaotic);
  s.kc_integrable = infinite_time_average(b_integrable);
  s.sigma_before = sigma_log(b_integrable);
  const bool lower = s.kc_integrable > s.kc_chaotic;
  const double target = lower ? target_fraction * s.kc_chaotic : s.kc_chaotic / target_fraction;
  auto satisfied = [&](double kc) { return lower ? kc < target : kc > target; };
  auto eval = [&](double f) {
    ++s.evaluations;
    return infinite_time_average(scaled_edit(b_integrable, indices, f, nullptr));
  };

  // Bracket: `inner` fails, `outer` succeeds.
  double inner = 1.0, outer = 0.0;
  bool bracketed = false;
  for (int k = 1;; ++k) {
    const double f = lower ? 1.0 - 0.05 * k : 1.0 + 0.05 * k;
    if (f <= 0.0 || f > 5.0) break;
    if (satisfied(eval(f))) {
      outer = f;
      bracketed = true;
      break;
    }
    inner = f;
  }
  if (!bracketed) {
    s.edited.assign(b_integrable.begin(), b_integrable.end());
    s.kc_edited = s.kc_integrable;
    s.sigma_after = s.sigma_before;
    return s;
  }
  for (int it = 0; it < 8; ++it) {
    const double mid = 0.5 * (inner + outer);
    if (satisfied(eval(mid))) outer = mid;
    else inner = mid;
  }
  s.found = true;
  s.factor = outer;
  s.edited = scaled_edit(b_integrable, indices, outer, &s.edits);
  s.kc_edited = infinite_time_average(s.edited);
  s.sigma_after = sigma_log(s.edited);
  return s;
}

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
  return names;
}

FigureOutput run_figure(std::string_view name, const FigureOptions& opts) {
  const auto& names = figure_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw ConfigError("unknown figure '" + std::string(name) + "' (fig1..fig8)");

  ResultCache cache;
  if (opts.cache_dir) cache = ResultCache(*opts.cache_dir);
  else if (auto env = ResultCache::dir_from_env()) cache = ResultCache(*env);
  else cache = ResultCache(opts.output_dir / "cache");

  Context ctx{opts, opts.output_dir / std::string(name), cache, opts.fast ? 5 : opts.L, opts.fast ? 11 : opts.eta_L, {}};
  fs::create_directories(ctx.dir);
  ctx.out.name = std::string(name);
  ctx.out.manifest = {{"figure", name},
                      {"version", std::string(kVersion)},
                      {"plot_script", "tools/plot_figures.py"},
                      {"L", ctx.L},
                      {"eta_L", ctx.eta_L},
                      {"J", opts.J},
                      {"hx", opts.hx},
                      {"tol", opts.lanczos.tol}};

  const std::string random_op = "random:" + std::to_string(opts.random_seed);
  if (name == "fig1") three_points(ctx, "SzT");
  else if (name == "fig3") three_points(ctx, "SxT");
  else if (name == "fig2") sweep_figure(ctx, "SzT", true);
  else if (name == "fig4") sweep_figure(ctx, "SxT", true);
  else if (name == "fig6") sweep_figure(ctx, random_op, true);
  else if (name == "fig7") sweep_figure(ctx, "SzT", false);
  else if (name == "fig8") sweep_figure(ctx, "SxT", false);
  else if (name == "fig5") handpick_figure(ctx);

  json files = json::array();
  for (const auto& f : ctx.out.files) files.push_back(fs::relative(f, ctx.dir).string());
  ctx.out.manifest["files"] = files;
  write_json(ctx.dir / "manifest.json", ctx.out.manifest);
  ctx.out.files.push_back(ctx.dir / "manifest.json");
  return ctx.out;
}

} // namespace kspread
