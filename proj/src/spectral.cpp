#include "kspread/spectral.hpp"

#include "kspread/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace kspread {

double parse_wigner_dyson_reference(std::string_view name) {
  if (name == "ensemble") return kRTildeGoeEnsemble;
  if (name == "surmise") return kRTildeGoeSurmise;
  throw ConfigError("unknown Wigner-Dyson reference '" + std::string(name) + "' (ensemble|surmise)");
}

std::vector<double> spacing_ratios(std::span<const double> e) {
  if (e.size() < 3) throw InvalidArgument("spacing ratios need at least three levels");
  for (std::size_t i = 0; i + 1 < e.size(); ++i)
    if (!(e[i + 1] >= e[i])) throw InvalidArgument("energies must be finite and sorted ascending");
  const double width = e.back() - e.front();
  const double min_gap = 1e-12 * width;
  std::vector<double> out;
  out.reserve(e.size() - 2);
  double prev = e[1] - e[0];
  if (!(prev > min_gap)) throw DegenerateSpectrum("zero level spacing at index 0; desymmetrize the spectrum");
  for (std::size_t n = 1; n + 1 < e.size(); ++n) {
    const double s = e[n + 1] - e[n];
    if (!(s > min_gap))
      throw DegenerateSpectrum("zero level spacing at index " + std::to_string(n) + "; desymmetrize the spectrum");
    const double r = s / prev;
    out.push_back(std::min(r, 1.0 / r));
    prev = s;
  }
  return out;
}

EtaResult eta(std::span<const double> energies, const EtaOptions& opts, std::string sector) {
  if (!(opts.trim_fraction >= 0.0 && opts.trim_fraction < 0.5)) throw InvalidArgument("trim fraction must lie in [0, 0.5)");
  const auto trim = static_cast<std::size_t>(std::floor(opts.trim_fraction * static_cast<double>(energies.size())));
  const auto used = energies.subspan(trim, energies.size() - 2 * trim);
  const auto r = spacing_ratios(used);
  EtaResult out;
  out.r_mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  const double span = opts.reference.wigner_dyson - opts.reference.poisson;
  if (!(std::abs(span) > 0.0)) throw InvalidArgument("Poisson and Wigner-Dyson references coincide");
  out.eta = (out.r_mean - opts.reference.poisson) / span;
  out.n_levels = used.size();
  out.sector = std::move(sector);
  return out;
}

std::vector<double> symmetric_eigenvalues(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("symmetric eigensolver did not converge");
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> poisson_spectrum(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> e(n);
  for (auto& x : e) x = u(rng);
  std::sort(e.begin(), e.end());
  return e;
}

std::vector<double> goe_spectrum(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RealMatrix a(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = g(rng);
  return symmetric_eigenvalues(0.5 * (a + a.transpose()));
}

Calibration calibrate_references(std::size_t poisson_levels, std::size_t goe_samples, Eigen::Index goe_dim,
                                 std::uint64_t seed) {
  Calibration out;
  out.poisson_levels = poisson_levels;
  out.goe_samples = goe_samples;
  out.goe_dim = goe_dim;
  const auto p = spacing_ratios(poisson_spectrum(poisson_levels, seed));
  out.r_poisson = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < goe_samples; ++k) {
    const auto r = spacing_ratios(goe_spectrum(goe_dim, seed + 1 + k));
    sum = std::accumulate(r.begin(), r.end(), sum);
    count += r.size();
  }
  out.r_goe = count ? sum / static_cast<double>(count) : 0.0;
  return out;
}

} // namespace kspread
