#include "kspread/dynamics.hpp"

#include "kspread/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace kspread {

namespace {

constexpr Eigen::Index kTimeChunk = 256;

struct ChainSpectrum {
  RealVector energies;
  RealMatrix vectors; // columns are eigenvectors of T
};

void check_coefficients(std::span<const double> b) {
  for (double x : b)
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("Lanczos coefficients must be finite and positive");
}

ChainSpectrum diagonalize_chain(std::span<const double> b) {
  check_coefficients(b);
  const auto K = static_cast<Eigen::Index>(b.size()) + 1;
  ChainSpectrum out;
  if (K == 1) {
    out.energies = RealVector::Zero(1);
    out.vectors = RealMatrix::Identity(1, 1);
    return out;
  }
  const RealVector diag = RealVector::Zero(K);
  const RealVector off = Eigen::Map<const RealVector>(b.data(), K - 1);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw Error("tridiagonal eigensolver did not converge");
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

// Calls sink(first_column, occupation_block) for consecutive blocks of times.
template <class Sink>
void synthesize(const ChainSpectrum& spec, std::span<const double> times, Sink&& sink) {
  const Eigen::Index K = spec.energies.size();
  const RealVector u0 = spec.vectors.row(0).transpose();
  const auto nt = static_cast<Eigen::Index>(times.size());
  RealMatrix c, s, re, im;
  for (Eigen::Index start = 0; start < nt; start += kTimeChunk) {
    const Eigen::Index len = std::min(kTimeChunk, nt - start);
    c.resize(K, len);
    s.resize(K, len);
    for (Eigen::Index j = 0; j < len; ++j) {
      const double t = times[static_cast<std::size_t>(start + j)];
      if (!std::isfinite(t)) throw InvalidArgument("time grid must be finite");
      for (Eigen::Index k = 0; k < K; ++k) {
        const double phase = spec.energies(k) * t;
        c(k, j) = std::cos(phase) * u0(k);
        s(k, j) = std::sin(phase) * u0(k);
      }
    }
    re.noalias() = spec.vectors * c;
    im.noalias() = spec.vectors * s;
    sink(start, (re.array().square() + im.array().square()).matrix());
  }
}

std::vector<double> trapezoid_weights(std::span<const double> t) {
  const std::size_t n = t.size();
  std::vector<double> w(n, 0.0);
  if (n == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = 0.5 * (t[i + 1] - t[i]);
    w[i] += h;
    w[i + 1] += h;
  }
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

std::pair<double, double> weighted_moments(std::span<const double> x, std::span<const double> t) {
  const auto w = trapezoid_weights(t);
  double sw = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
  }
  const double mean = sx / sw;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += w[i] * (x[i] - mean) * (x[i] - mean);
  return {mean, std::sqrt(ss / sw)};
}

} // namespace

ChainEvolution evolve(std::span<const double> b, std::span<const double> times) {
  const ChainSpectrum spec = diagonalize_chain(b);
  ChainEvolution out;
  out.times.assign(times.begin(), times.end());
  out.occupations.resize(spec.energies.size(), static_cast<Eigen::Index>(times.size()));
  synthesize(spec, times, [&](Eigen::Index start, const RealMatrix& occ) {
    out.occupations.middleCols(start, occ.cols()) = occ;
  });
  return out;
}

std::vector<double> k_complexity(const RealMatrix& occupations) {
  const RealVector n = RealVector::LinSpaced(occupations.rows(), 0.0, static_cast<double>(occupations.rows() - 1));
  const RealVector kc = occupations.transpose() * n;
  return {kc.data(), kc.data() + kc.size()};
}

std::vector<double> k_complexity_series(std::span<const double> b, std::span<const double> times) {
  const ChainSpectrum spec = diagonalize_chain(b);
  const Eigen::Index K = spec.energies.size();
  const RealVector n = RealVector::LinSpaced(K, 0.0, static_cast<double>(K - 1));
  std::vector<double> out(times.size());
  synthesize(spec, times, [&](Eigen::Index start, const RealMatrix& occ) {
    const RealVector kc = occ.transpose() * n;
    std::copy(kc.data(), kc.data() + kc.size(), out.begin() + start);
  });
  return out;
}

SaturationStats saturation_stats(std::span<const double> kc, std::span<const double> times,
                                 const TauPolicy& policy, std::optional<double> plateau) {
  if (kc.size() != times.size()) throw DimensionMismatch("K_C series and time grid differ in length");
  const std::size_t n = kc.size();
  if (n <= kMinWindowSamples)
    throw InsufficientData("saturation window needs more than " + std::to_string(kMinWindowSamples) + " samples");

  SaturationStats out;
  std::size_t start = n / 2;
  switch (policy.kind) {
  case TauPolicy::Kind::half_grid:
    out.tau_fallback = false;
    break;
  case TauPolicy::Kind::fixed: {
    const auto it = std::upper_bound(times.begin(), times.end(), policy.fixed_tau);
    start = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    break;
  }
  case TauPolicy::Kind::plateau_band: {
    const std::size_t half = n / 2;
    const double ref = plateau ? *plateau
                               : weighted_moments(kc.subspan(half), times.subspan(half)).first;
    const double tol = policy.band * std::abs(ref);
    const std::size_t need = std::max<std::size_t>(1, policy.consecutive);
    std::size_t run = 0;
    bool found = false;
    for (std::size_t i = 0; i < n; ++i) {
      run = std::abs(kc[i] - ref) <= tol ? run + 1 : 0;
      if (run == need) {
        start = i + 1 - need;
        found = true;
        break;
      }
    }
    out.tau_fallback = !found;
    break;
  }
  }
  out.tau = times[start];

  std::size_t first = start;
  while (first < n && !(times[first] > out.tau)) ++first;
  out.window_samples = n - first;
  if (out.window_samples < kMinWindowSamples)
    throw InsufficientData("only " + std::to_string(out.window_samples) + " samples after tau = " +
                           std::to_string(out.tau) + "; extend the time grid");
  const auto [mean, sd] = weighted_moments(kc.subspan(first), times.subspan(first));
  out.kc_mean = mean;
  out.kc_std = sd;
  return out;
}

InfiniteTimeAverage infinite_time_occupations(std::span<const double> b) {
  const ChainSpectrum spec = diagonalize_chain(b);
  const Eigen::Index K = spec.energies.size();
  InfiniteTimeAverage out;
  out.occupations.assign(static_cast<std::size_t>(K), 0.0);

  const double scale = std::max(1.0, spec.energies.cwiseAbs().maxCoeff());
  const double gap_tol = 1e-10 * scale;
  RealVector amp(K);
  Eigen::Index k = 0;
  while (k < K) {
    Eigen::Index end = k + 1;
    while (end < K && spec.energies(end) - spec.energies(end - 1) <= gap_tol) ++end;
    if (end - k > 1) ++out.degenerate_groups;
    // |sum_{j in group} U_nj U_0j|^2
    amp.setZero();
    for (Eigen::Index j = k; j < end; ++j) amp += spec.vectors.col(j) * spec.vectors(0, j);
    for (Eigen::Index m = 0; m < K; ++m) out.occupations[static_cast<std::size_t>(m)] += amp(m) * amp(m);
    k = end;
  }
  if (out.degenerate_groups > 0)
    std::cerr << "warning: " << out.degenerate_groups
              << " degenerate eigenvalue group(s) in the Krylov chain; averaging within subspaces\n";
  for (Eigen::Index m = 0; m < K; ++m) out.kc += static_cast<double>(m) * out.occupations[static_cast<std::size_t>(m)];
  return out;
}

double infinite_time_average(std::span<const double> b) { return infinite_time_occupations(b).kc; }

std::vector<double> handpick(std::span<const double> b, std::span<const CoefficientEdit> edits) {
  std::vector<double> out(b.begin(), b.end());
  for (const auto& [index, value] : edits) {
    if (index < 1 || index > out.size())
      throw InvalidArgument("edit index " + std::to_string(index) + " outside [1, " + std::to_string(out.size()) + "]");
    if (!(value > 0.0) || !std::isfinite(value))
      throw InvalidArgument("replacement for b_" + std::to_string(index) + " must be positive");
    out[index - 1] = value;
  }
  return out;
}

std::vector<double> make_time_grid(std::span<const double> b, const TimeGridSpec& spec) {
  double t_max = spec.t_max_override;
  if (!(t_max > 0.0)) {
    if (b.empty()) {
      t_max = spec.horizon;
    } else {
      const double mean_b = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
      t_max = spec.horizon * static_cast<double>(b.size() + 1) / mean_b;
    }
  }
  if (!(spec.t_min > 0.0) || !(t_max > spec.t_min)) throw InvalidArgument("time grid needs 0 < t_min < t_max");

  std::vector<double> t;
  t.reserve(spec.log_points + spec.uniform_points);
  double t_switch = t_max / 10.0;
  if (t_switch > spec.t_min && spec.log_points > 0) {
    const double ratio = std::log(t_switch / spec.t_min);
    for (std::size_t i = 0; i < spec.log_points; ++i)
      t.push_back(spec.t_min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(spec.log_points)));
  } else {
    t_switch = spec.t_min;
  }
  const std::size_t m = spec.uniform_points;
  for (std::size_t j = 0; j < m; ++j)
    t.push_back(m == 1 ? t_max : t_switch + (t_max - t_switch) * static_cast<double>(j) / static_cast<double>(m - 1));
  return t;
}

ComplexityTrace complexity_trace(std::span<const double> b, const TimeGridSpec& grid, const TauPolicy& policy) {
  ComplexityTrace out;
  out.K = static_cast<Eigen::Index>(b.size()) + 1;
  out.times = make_time_grid(b, grid);
  out.kc = k_complexity_series(b, out.times);
  out.kc_infinite = infinite_time_average(b);
  out.saturation = saturation_stats(out.kc, out.times, policy, out.kc_infinite);
  return out;
}

} // namespace kspread
