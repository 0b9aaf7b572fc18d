#pragma once

#include "kspread/dense_operator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kspread {

// Mean of min(r, 1/r) for Poissonian levels: 2 ln 2 - 1.
inline constexpr double kRTildePoisson = 0.38629436111989057;
// GOE value from large-matrix numerics.
inline constexpr double kRTildeGoeEnsemble = 0.5307;
// GOE 3x3 Wigner-like surmise: 4 - 2 sqrt(3).
inline constexpr double kRTildeGoeSurmise = 0.5358983848622454;

struct RatioReference {
  double poisson = kRTildePoisson;
  double wigner_dyson = kRTildeGoeEnsemble;
};

// "ensemble" or "surmise"; anything else is a ConfigError.
double parse_wigner_dyson_reference(std::string_view name);

// min(r_n, 1/r_n) with r_n = s_n / s_{n-1}, s_n = e_{n+1} - e_n. Energies must
// be sorted ascending; a spacing below 1e-12 of the spectral width raises
// DegenerateSpectrum.
std::vector<double> spacing_ratios(std::span<const double> energies);

struct EtaResult {
  double r_mean = 0.0;
  double eta = 0.0;
  std::size_t n_levels = 0;
  std::string sector;
};

struct EtaOptions {
  RatioReference reference{};
  // Fraction of levels dropped from each spectral edge before the statistic.
  double trim_fraction = 0.0;
};

EtaResult eta(std::span<const double> energies, const EtaOptions& opts = {}, std::string sector = {});

// Sorted eigenvalues of a real symmetric matrix.
std::vector<double> symmetric_eigenvalues(const RealMatrix& m);

struct Calibration {
  double r_poisson = 0.0;
  double r_goe = 0.0;
  std::size_t poisson_levels = 0;
  std::size_t goe_samples = 0;
  Eigen::Index goe_dim = 0;
};

// Re-derives both reference constants from synthetic spectra: i.i.d. uniform
// levels and dense GOE matrices.
Calibration calibrate_references(std::size_t poisson_levels, std::size_t goe_samples, Eigen::Index goe_dim,
                                 std::uint64_t seed);

std::vector<double> poisson_spectrum(std::size_t n, std::uint64_t seed);
// Eigenvalues of (A + A^T)/2 with A i.i.d. standard normal.
std::vector<double> goe_spectrum(Eigen::Index dim, std::uint64_t seed);

} // namespace kspread
