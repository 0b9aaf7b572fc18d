#pragma once

#include "kspread/dense_operator.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace kspread {

// Occupation probabilities |phi_n(t)|^2 of the Krylov chain, one column per time.
struct ChainEvolution {
  std::vector<double> times;
  RealMatrix occupations; // K x times.size()
};

// phi(t) = exp(i T t) e_0 with T the symmetric tridiagonal matrix whose
// off-diagonal is b. Equivalent to d/dt phi_n = b_n phi_{n-1} - b_{n+1} phi_{n+1}
// up to the gauge phase i^n.
ChainEvolution evolve(std::span<const double> b, std::span<const double> times);

// sum_n n |phi_n(t)|^2 for every column.
std::vector<double> k_complexity(const RealMatrix& occupations);

// K_C(t) without materializing the occupation matrix.
std::vector<double> k_complexity_series(std::span<const double> b, std::span<const double> times);

struct TauPolicy {
  enum class Kind {
    // First time K_C enters and stays within +-band of the plateau reference
    // for `consecutive` samples; falls back to half the grid.
    plateau_band,
    half_grid,
    fixed,
  };
  Kind kind = Kind::plateau_band;
  double band = 0.10;
  std::size_t consecutive = 20;
  double fixed_tau = 0.0;
};

struct SaturationStats {
  double tau = 0.0;
  double kc_mean = 0.0;
  double kc_std = 0.0;
  std::size_t window_samples = 0;
  bool tau_fallback = false;
};

inline constexpr std::size_t kMinWindowSamples = 50;

// Time-weighted (trapezoid) mean and standard deviation of K_C over t > tau.
// `plateau` is the reference used by the band policy; when absent the
// trapezoid mean of the second half of the series is used.
SaturationStats saturation_stats(std::span<const double> kc, std::span<const double> times,
                                 const TauPolicy& policy = {}, std::optional<double> plateau = {});

struct InfiniteTimeAverage {
  double kc = 0.0;
  std::vector<double> occupations; // time-averaged |phi_n|^2
  std::size_t degenerate_groups = 0;
};

// Long-time average of |phi_n(t)|^2 from the eigenvectors of T. Degenerate
// eigenvalues are averaged within their subspace.
InfiniteTimeAverage infinite_time_occupations(std::span<const double> b);
double infinite_time_average(std::span<const double> b);

// (index, value) with 1-based indices: (1, x) replaces b_1.
using CoefficientEdit = std::pair<std::size_t, double>;
std::vector<double> handpick(std::span<const double> b, std::span<const CoefficientEdit> edits);

struct ComplexityTrace {
  std::vector<double> times;
  std::vector<double> kc;
  Eigen::Index K = 1;
  SaturationStats saturation;
  double kc_infinite = 0.0;
};

struct TimeGridSpec {
  std::size_t log_points = 1000;
  std::size_t uniform_points = 1000;
  double t_min = 0.01;
  // t_max = horizon * K / mean(b) unless t_max_override > 0
  double horizon = 10.0;
  double t_max_override = 0.0;
};

// Log-spaced points on [t_min, t_max/10) followed by uniform points on [t_max/10, t_max].
std::vector<double> make_time_grid(std::span<const double> b, const TimeGridSpec& spec = {});

// evolve + k_complexity + saturation_stats with the band reference taken
// from the infinite-time average.
ComplexityTrace complexity_trace(std::span<const double> b, const TimeGridSpec& grid = {},
                                 const TauPolicy& policy = {});

} // namespace kspread
