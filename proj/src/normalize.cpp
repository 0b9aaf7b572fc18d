#include "kspread/normalize.hpp"

#include "kspread/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kspread {

namespace {

double range_of(std::span<const double> x, const char* what) {
  if (x.empty()) throw InvalidArgument(std::string(what) + " series is empty");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double r = *hi - *lo;
  if (!(r > 0.0)) throw InvalidArgument(std::string(what) + " series is constant; cannot normalize");
  return r;
}

} // namespace

std::vector<double> minmax01(std::span<const double> x) {
  const double r = range_of(x, "input");
  const double lo = *std::min_element(x.begin(), x.end());
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [&](double v) { return (v - lo) / r; });
  return out;
}

std::vector<double> normalize_to_eta(std::span<const double> x, std::span<const double> eta) {
  if (x.size() != eta.size()) throw DimensionMismatch("curve and eta differ in length");
  const double scale = range_of(eta, "eta") / range_of(x, "input");
  std::vector<double> out(x.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] * scale;
    shift += out[i] - eta[i];
  }
  shift /= static_cast<double>(x.size());
  for (double& v : out) v -= shift;
  return out;
}

std::vector<double> orient_sigma(std::span<const double> sigma) {
  std::vector<double> out(sigma.size());
  std::transform(sigma.begin(), sigma.end(), out.begin(), [](double v) { return -v; });
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("correlation needs two equal series of length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw InvalidArgument("correlation of a constant series is undefined");
  return sxy / std::sqrt(sxx * syy);
}

CurveSet make_curve_set(std::vector<double> hz, std::vector<double> eta, std::vector<double> sigma,
                        std::vector<double> kc) {
  const std::size_t n = hz.size();
  if (eta.size() != n || sigma.size() != n || kc.size() != n)
    throw DimensionMismatch("curve set columns differ in length");
  CurveSet out;
  out.sigma_norm = normalize_to_eta(orient_sigma(sigma), eta);
  out.kc_norm = normalize_to_eta(kc, eta);
  out.hz = std::move(hz);
  out.eta = std::move(eta);
  out.sigma_raw = std::move(sigma);
  out.kc_raw = std::move(kc);
  return out;
}

} // namespace kspread
