#include "kspread/spin_model.hpp"

#include "kspread/error.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace kspread {

namespace {

constexpr int kMaxSites = 24;

void check_sites(int L) {
  if (L < 1 || L > kMaxSites)
    throw InvalidArgument("site count must lie in [1, " + std::to_string(kMaxSites) +
                          "], got " + std::to_string(L));
}

void check_budget(int L, bool complex, std::size_t budget) {
  const double n = std::ldexp(1.0, L);
  const double bytes = n * n * (complex ? 16.0 : 8.0);
  if (bytes > static_cast<double>(budget)) {
    std::ostringstream os;
    os << "full-space operator for L=" << L << " needs " << bytes / (1 << 20)
       << " MiB, budget is " << budget / (1 << 20) << " MiB";
    throw ResourceError(os.str());
  }
}

int bit_of_site(int site, int L) { return L - site; }

double z_sign(std::uint64_t state, int bit) {
  return ((state >> bit) & 1U) ? -1.0 : 1.0;
}

// Adds weight * sigma^axis_site to m (full space).
template <class Matrix>
void add_pauli(Matrix& m, Axis axis, int site, int L, double weight) {
  const int bit = bit_of_site(site, L);
  const std::uint64_t n = std::uint64_t{1} << L;
  for (std::uint64_t s = 0; s < n; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    switch (axis) {
    case Axis::z:
      m(col, col) += weight * z_sign(s, bit);
      break;
    case Axis::x:
      m(static_cast<Eigen::Index>(s ^ (std::uint64_t{1} << bit)), col) += weight;
      break;
    case Axis::y:
      if constexpr (std::is_same_v<typename Matrix::Scalar, Complex>) {
        // sigma^y |up> = i |down>, sigma^y |down> = -i |up>
        const Complex amp = ((s >> bit) & 1U) ? Complex(0.0, -weight) : Complex(0.0, weight);
        m(static_cast<Eigen::Index>(s ^ (std::uint64_t{1} << bit)), col) += amp;
      }
      break;
    }
  }
}

double diagonal_energy(const SpinChainParams& p, std::uint64_t s) {
  double e = 0.0;
  for (int site = 1; site <= p.L; ++site) e += p.hz * z_sign(s, bit_of_site(site, p.L));
  for (int site = 1; site < p.L; ++site)
    e -= p.J * z_sign(s, bit_of_site(site, p.L)) * z_sign(s, bit_of_site(site + 1, p.L));
  return e;
}

template <class Matrix>
Matrix project_matrix(const Matrix& op, const ParitySectorBasis& basis) {
  const Eigen::Index d = basis.dim();
  Matrix out(d, d);
  const auto& vs = basis.vectors();
  for (Eigen::Index b = 0; b < d; ++b) {
    const auto& vb = vs[static_cast<std::size_t>(b)];
    const auto sb = static_cast<Eigen::Index>(vb.state);
    const auto mb = static_cast<Eigen::Index>(vb.mirror);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto& va = vs[static_cast<std::size_t>(a)];
      const auto sa = static_cast<Eigen::Index>(va.state);
      const auto ma = static_cast<Eigen::Index>(va.mirror);
      typename Matrix::Scalar acc = va.weight * vb.weight * op(sa, sb);
      if (vb.mirror_weight != 0.0) acc += va.weight * vb.mirror_weight * op(sa, mb);
      if (va.mirror_weight != 0.0) {
        acc += va.mirror_weight * vb.weight * op(ma, sb);
        if (vb.mirror_weight != 0.0) acc += va.mirror_weight * vb.mirror_weight * op(ma, mb);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

} // namespace

void SpinChainParams::validate() const {
  if (L < 2) throw InvalidArgument("chain needs L >= 2, got " + std::to_string(L));
  if (L > kMaxSites) throw InvalidArgument("chain length " + std::to_string(L) + " too large");
  if (!std::isfinite(J) || !std::isfinite(hx) || !std::isfinite(hz))
    throw InvalidArgument("chain couplings must be finite");
}

std::string_view to_string(Sector s) { return s == Sector::even ? "even" : "odd"; }

std::string_view to_string(Axis a) {
  switch (a) {
  case Axis::x: return "x";
  case Axis::y: return "y";
  case Axis::z: return "z";
  }
  return "?";
}

Sector parse_sector(std::string_view s) {
  if (s == "even" || s == "+") return Sector::even;
  if (s == "odd" || s == "-") return Sector::odd;
  throw InvalidArgument("unknown parity sector '" + std::string(s) + "'");
}

std::uint64_t reflect(std::uint64_t state, int L) {
  std::uint64_t out = 0;
  for (int i = 0; i < L; ++i) {
    out = (out << 1) | (state & 1U);
    state >>= 1;
  }
  return out;
}

ParitySectorBasis::ParitySectorBasis(int L, Sector sector, std::vector<ParityBasisVector> vectors)
    : L_(L), sector_(sector), vectors_(std::move(vectors)),
      index_of_(std::size_t{1} << L, -1) {
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    index_of_[vectors_[i].state] = static_cast<std::int32_t>(i);
    index_of_[vectors_[i].mirror] = static_cast<std::int32_t>(i);
  }
}

ParitySectorBasis::Component ParitySectorBasis::component(std::uint64_t state) const {
  const std::int32_t idx = index_of_.at(state);
  if (idx < 0) return {-1, 0.0};
  const auto& v = vectors_[static_cast<std::size_t>(idx)];
  return {idx, state == v.state ? v.weight : v.mirror_weight};
}

RealMatrix ParitySectorBasis::to_matrix() const {
  RealMatrix b = RealMatrix::Zero(static_cast<Eigen::Index>(full_dim()), dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    const auto& v = vectors_[static_cast<std::size_t>(i)];
    b(static_cast<Eigen::Index>(v.state), i) += v.weight;
    if (v.mirror_weight != 0.0) b(static_cast<Eigen::Index>(v.mirror), i) += v.mirror_weight;
  }
  return b;
}

SectorOperator::SectorOperator(DenseOperator matrix, std::string label)
    : matrix_(std::move(matrix)), label_(std::move(label)) {
  if (!matrix_.is_hermitian(1e-12))
    throw NotHermitian("sector operator '" + label_ + "' is not Hermitian");
}

DenseOperator build_hamiltonian(const SpinChainParams& params, std::size_t memory_budget) {
  params.validate();
  check_budget(params.L, false, memory_budget);
  const int L = params.L;
  const auto n = static_cast<Eigen::Index>(std::uint64_t{1} << L);
  RealMatrix h = RealMatrix::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) h(s, s) = diagonal_energy(params, static_cast<std::uint64_t>(s));
  if (params.hx != 0.0)
    for (int site = 1; site <= L; ++site) add_pauli(h, Axis::x, site, L, params.hx);
  return DenseOperator(std::move(h));
}

Eigen::Index parity_sector_dim(int L, Sector sector) {
  check_sites(L);
  const Eigen::Index full = Eigen::Index{1} << L;
  const Eigen::Index palindromes = Eigen::Index{1} << ((L + 1) / 2);
  return sector == Sector::even ? (full + palindromes) / 2 : (full - palindromes) / 2;
}

ParitySectorBasis build_parity_basis(int L, Sector sector) {
  if (L < 2) throw InvalidArgument("parity basis needs L >= 2, got " + std::to_string(L));
  check_sites(L);
  const std::uint64_t n = std::uint64_t{1} << L;
  const double w = 1.0 / std::sqrt(2.0);
  const double sign = sector == Sector::even ? 1.0 : -1.0;
  std::vector<ParityBasisVector> vs;
  vs.reserve(static_cast<std::size_t>(parity_sector_dim(L, sector)));
  for (std::uint64_t s = 0; s < n; ++s) {
    const std::uint64_t r = reflect(s, L);
    if (r < s) continue;
    if (r == s) {
      if (sector == Sector::even) vs.push_back({s, s, 1.0, 0.0});
    } else {
      vs.push_back({s, r, w, sign * w});
    }
  }
  return ParitySectorBasis(L, sector, std::move(vs));
}

double reflection_commutator(const DenseOperator& op, int L) {
  check_sites(L);
  const auto n = static_cast<Eigen::Index>(std::uint64_t{1} << L);
  if (op.dim() != n)
    throw DimensionMismatch("operator dimension " + std::to_string(op.dim()) +
                            " does not match 2^" + std::to_string(L));
  std::vector<Eigen::Index> mirror(static_cast<std::size_t>(n));
  for (Eigen::Index s = 0; s < n; ++s)
    mirror[static_cast<std::size_t>(s)] = static_cast<Eigen::Index>(reflect(static_cast<std::uint64_t>(s), L));
  return op.visit([&](const auto& m) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index rj = mirror[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i)
        worst = std::max(worst, static_cast<double>(std::abs(m(mirror[static_cast<std::size_t>(i)], rj) - m(i, j))));
    }
    return worst;
  });
}

SectorOperator project(const DenseOperator& op, const ParitySectorBasis& basis, std::string label) {
  const double leak = reflection_commutator(op, basis.L());
  if (leak > kReflectionTolerance) {
    std::ostringstream os;
    os << "operator '" << label << "' does not commute with the reflection (max |[P,O]| = " << leak
       << "); it would leak between parity sectors";
    throw SymmetryViolation(os.str());
  }
  DenseOperator projected = op.visit([&](const auto& m) { return DenseOperator(project_matrix(m, basis)); });
  return SectorOperator(projected.simplified(), std::move(label));
}

SectorOperator sector_hamiltonian(const SpinChainParams& params, const ParitySectorBasis& basis) {
  params.validate();
  if (params.L != basis.L())
    throw DimensionMismatch("basis built for L=" + std::to_string(basis.L()) + ", chain has L=" +
                            std::to_string(params.L));
  const int L = params.L;
  const Eigen::Index d = basis.dim();
  RealMatrix h = RealMatrix::Zero(d, d);
  const auto& vs = basis.vectors();

  // H_ba = sum_{s in a} c_s [ E(s) <s|v_b> + hx sum_k <flip_k s|v_b> ]
  auto accumulate = [&](Eigen::Index a, std::uint64_t s, double cs) {
    const auto self = basis.component(s);
    if (self.index >= 0) h(self.index, a) += cs * self.coeff * diagonal_energy(params, s);
    if (params.hx == 0.0) return;
    for (int bit = 0; bit < L; ++bit) {
      const auto t = basis.component(s ^ (std::uint64_t{1} << bit));
      if (t.index >= 0) h(t.index, a) += cs * t.coeff * params.hx;
    }
  };
  for (Eigen::Index a = 0; a < d; ++a) {
    const auto& v = vs[static_cast<std::size_t>(a)];
    accumulate(a, v.state, v.weight);
    if (v.mirror_weight != 0.0) accumulate(a, v.mirror, v.mirror_weight);
  }
  std::ostringstream label;
  label << "H(L=" << L << ",J=" << params.J << ",hx=" << params.hx << ",hz=" << params.hz << ","
        << to_string(basis.sector()) << ")";
  return SectorOperator(DenseOperator(std::move(h)), label.str());
}

DenseOperator build_total_spin(Axis axis, int L, std::size_t memory_budget) {
  check_sites(L);
  std::vector<SiteTerm> terms;
  for (int site = 1; site <= L; ++site) terms.push_back({site, axis, 1.0});
  return build_site_combination(terms, L, memory_budget);
}

DenseOperator build_site_combination(std::span<const SiteTerm> terms, int L, std::size_t memory_budget) {
  check_sites(L);
  bool complex = false;
  for (const auto& t : terms) {
    if (t.site < 1 || t.site > L)
      throw InvalidArgument("site index " + std::to_string(t.site) + " outside [1, " + std::to_string(L) + "]");
    if (!std::isfinite(t.weight)) throw InvalidArgument("site weight must be finite");
    complex = complex || t.axis == Axis::y;
  }
  check_budget(L, complex, memory_budget);
  const auto n = static_cast<Eigen::Index>(std::uint64_t{1} << L);
  if (complex) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (const auto& t : terms) add_pauli(m, t.axis, t.site, L, 0.5 * t.weight);
    return DenseOperator(std::move(m));
  }
  RealMatrix m = RealMatrix::Zero(n, n);
  for (const auto& t : terms) add_pauli(m, t.axis, t.site, L, 0.5 * t.weight);
  return DenseOperator(std::move(m));
}

SectorOperator random_gaussian_traceless(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidArgument("random operator needs dim >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealMatrix a(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = normal(rng);
  RealMatrix m = 0.5 * (a + a.transpose());
  m.diagonal().array() -= m.trace() / static_cast<double>(dim);
  return SectorOperator(DenseOperator(std::move(m)), "random(seed=" + std::to_string(seed) + ")");
}

} // namespace kspread
