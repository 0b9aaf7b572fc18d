#pragma once

#include "kspread/dynamics.hpp"
#include "kspread/experiments.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kspread {

// Result of scaling b_i (i in `indices`) of an integrable sequence by a
// common factor until its long-time K-complexity crosses the chaotic one.
struct HandpickSearch {
  bool found = false;
  double factor = 1.0;
  std::vector<CoefficientEdit> edits;
  std::vector<double> edited;
  double kc_chaotic = 0.0;
  double kc_integrable = 0.0;
  double kc_edited = 0.0;
  double sigma_before = 0.0;
  double sigma_after = 0.0;
  std::size_t evaluations = 0;
};

// Scans factors away from 1 in steps of 0.05 (downwards when the integrable
// sequence saturates higher, upwards otherwise, up to 5x), then bisects the
// bracketing interval. The edited sequence ends at or beyond
// target_fraction * kc_chaotic (or kc_chaotic / target_fraction when raising).
HandpickSearch search_handpick_inversion(std::span<const double> b_chaotic, std::span<const double> b_integrable,
                                         std::span<const std::size_t> indices, double target_fraction = 0.8);

struct FigureOptions {
  bool fast = false; // L=5 / eta_L=11
  int L = 6;
  int eta_L = 13;
  double J = 1.0;
  double hx = 1.0;
  std::vector<double> hz_values = default_hz_grid();
  std::uint64_t random_seed = 1;
  LanczosOptions lanczos{};
  std::filesystem::path output_dir = "figures";
  std::optional<std::filesystem::path> cache_dir;
  unsigned workers = 0;
  ProgressFn progress;
};

struct FigureOutput {
  std::string name;
  std::vector<std::filesystem::path> files;
  json manifest;
  bool ok = true;
};

const std::vector<std::string>& figure_names();

// Writes the CSV data for one figure under <output_dir>/<name>/ together with
// manifest.json describing the panels. Unknown names raise ConfigError.
FigureOutput run_figure(std::string_view name, const FigureOptions& opts);

} // namespace kspread
