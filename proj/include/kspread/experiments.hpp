#pragma once

#include "kspread/cache.hpp"
#include "kspread/dynamics.hpp"
#include "kspread/io.hpp"
#include "kspread/krylov.hpp"
#include "kspread/operator_spec.hpp"
#include "kspread/spectral.hpp"
#include "kspread/spin_model.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kspread {

inline constexpr std::string_view kVersion = "0.1.0";

// Everything one (h_z, operator) computation needs besides the chain itself.
struct PointOptions {
  Sector sector = Sector::even;
  LanczosOptions lanczos{};
  TimeGridSpec grid{};
  TauPolicy tau{};
  bool keep_trace = false;
};

struct PointResult {
  SpinChainParams params;
  std::string op; // canonical operator spec
  bool ok = false;
  std::string error;

  Eigen::Index K = 0;
  std::vector<double> b;
  Termination termination = Termination::natural;
  double sigma_log = 0.0;
  double log_ratio_mean = 0.0;
  SaturationStats saturation;
  double kc_infinite = 0.0;
  double seconds = 0.0;
  bool cached = false;

  // Filled when PointOptions::keep_trace is set.
  std::vector<double> times;
  std::vector<double> kc;
};

json to_json(const PointResult& r);
PointResult point_from_json(const json& j);

// build -> project -> lanczos -> evolve -> saturation_stats -> sigma_log.
// Module errors propagate with the failing point named in the message.
PointResult run_point(const SpinChainParams& params, const OperatorSpec& op, const PointOptions& opts = {},
                      const ResultCache& cache = {});

// Lanczos stage only (cached), for callers that post-process b themselves.
LanczosResult lanczos_for(const SpinChainParams& params, const OperatorSpec& op, const PointOptions& opts,
                          const ResultCache& cache = {}, bool* cache_hit = nullptr);

// Sorted sector spectrum of the chain, cached by (L, J, hx, hz, sector).
std::vector<double> sector_spectrum(const SpinChainParams& params, Sector sector, const ResultCache& cache = {});

EtaResult eta_for(const SpinChainParams& params, Sector sector, const EtaOptions& opts = {},
                  const ResultCache& cache = {});

// 7 log-spaced points on [0.01, 0.8), 16 uniform on [0.8, 1.8], 7 uniform on (1.8, 2.5].
std::vector<double> default_hz_grid();

struct SweepConfig {
  SpinChainParams base{}; // hz ignored
  std::vector<double> hz_values = default_hz_grid();
  std::vector<std::string> operators{"SzT"};
  Sector sector = Sector::even;
  int eta_L = 13;
  Sector eta_sector = Sector::even;
  bool compute_eta = true;
  LanczosOptions lanczos{};
  TimeGridSpec grid{};
  TauPolicy tau{};
  EtaOptions eta{};
  std::filesystem::path output_dir = "kspread-out";
  std::optional<std::filesystem::path> cache_dir;
  unsigned workers = 0; // 0: hardware concurrency

  // Throws ConfigError; also parses every operator spec.
  void validate() const;
  PointOptions point_options() const;
  // Fields that change numerical output, canonicalized. Paths and worker
  // count are excluded.
  json numerical_json() const;
  std::string hash() const;
};

json to_json(const SweepConfig& c);
// Missing fields keep their defaults; unknown fields raise ConfigError.
SweepConfig sweep_config_from_json(const json& j);

// The --fast profile: L=5 for Lanczos quantities and L=11 for eta.
void apply_fast_profile(SweepConfig& c);

struct EtaPoint {
  double hz = 0.0;
  bool ok = false;
  std::string error;
  EtaResult result;
};

struct RunRecord {
  std::string config_hash;
  std::string version{kVersion};
  double wall_seconds = 0.0;
  std::vector<double> hz_values;
  std::vector<PointResult> points; // operator-major, then hz order
  std::vector<EtaPoint> eta;       // hz order; empty when eta is disabled

  bool all_ok() const;
  const PointResult& at(std::size_t op_index, std::size_t hz_index) const;
  // Hash of numerical content only (no timings or cache flags).
  std::string digest() const;
};

json to_json(const RunRecord& r);

using ProgressFn = std::function<void(std::string_view message)>;

// Computes every (h_z, operator) point and the eta curve with a bounded
// worker pool. Each finished point is appended to <output_dir>/points.jsonl;
// a rerun with the same config hash reuses those lines. On completion
// writes record.json, eta.csv and one curves_<op>.csv per operator.
RunRecord run_sweep(const SweepConfig& config, const ProgressFn& progress = {});

// Operator name safe for file names ("sites:3z+4z" -> "sites_3z_4z").
std::string file_tag(std::string_view op);

} // namespace kspread
