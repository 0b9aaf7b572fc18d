#pragma once

#include <span>
#include <vector>

namespace kspread {

// (X - min X) / (max X - min X)
std::vector<double> minmax01(std::span<const double> x);

// Rescales x to eta's range, X' = X (max eta - min eta) / (max X - min X),
// then shifts by the Euclidean-optimal offset mean(X' - eta).
std::vector<double> normalize_to_eta(std::span<const double> x, std::span<const double> eta);

// -sigma_log, so every curve rises with chaos.
std::vector<double> orient_sigma(std::span<const double> sigma);

// Sample Pearson correlation coefficient.
double pearson(std::span<const double> x, std::span<const double> y);

struct CurveSet {
  std::vector<double> hz;
  std::vector<double> eta;
  std::vector<double> sigma_raw;
  std::vector<double> kc_raw;
  std::vector<double> sigma_norm; // normalize_to_eta(orient_sigma(sigma_raw), eta)
  std::vector<double> kc_norm;
};

// Raw curves must share hz's length.
CurveSet make_curve_set(std::vector<double> hz, std::vector<double> eta, std::vector<double> sigma,
                        std::vector<double> kc);

} // namespace kspread
