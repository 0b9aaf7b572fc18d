#include "kspread/error.hpp"
#include "kspread/spin_model.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace kspread;

namespace {

std::vector<double> eigs(const DenseOperator& op) {
  return oracle::sorted_eigenvalues(op.to_complex());
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < tol);
}

double max_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("hamiltonian examples") {
  check_close(eigs(build_hamiltonian({2, 0.0, 0.0, 1.0})), {-2, 0, 0, 2}, 1e-12);
  check_close(eigs(build_hamiltonian({2, 1.0, 0.0, 0.0})), {-1, -1, 1, 1}, 1e-12);
}

TEST_CASE("hamiltonian matches the Kronecker-product construction") {
  for (int L : {2, 3, 5, 6}) {
    const SpinChainParams p{L, 1.0, 1.0, 0.2};
    const DenseOperator h = build_hamiltonian(p);
    REQUIRE(h.is_real());
    CHECK(h.is_hermitian());
    const auto ref = oracle::ising(L, 1.0, 1.0, 0.2);
    CHECK(max_diff(h.to_complex(), ref) < 1e-14);
    const auto a = eigs(h);
    const auto b = oracle::sorted_eigenvalues(ref);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
  }
}

TEST_CASE("params validation and memory budget") {
  CHECK_THROWS_AS(SpinChainParams({1, 1, 1, 1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(SpinChainParams({4, std::nan(""), 1, 1}).validate(), InvalidArgument);
  CHECK_THROWS_AS(build_hamiltonian({6, 1, 1, 0.2}, 1024), ResourceError);
}

TEST_CASE("sector dimensions") {
  CHECK(build_parity_basis(2, Sector::even).dim() == 3);
  CHECK(build_parity_basis(6, Sector::even).dim() == 36);
  CHECK(build_parity_basis(7, Sector::even).dim() == 72);
  for (int L = 2; L <= 8; ++L) {
    const auto e = build_parity_basis(L, Sector::even);
    const auto o = build_parity_basis(L, Sector::odd);
    CHECK(e.dim() + o.dim() == (Eigen::Index{1} << L));
    CHECK(e.dim() == ((1 << L) + (1 << ((L + 1) / 2))) / 2);
    CHECK(parity_sector_dim(L, Sector::even) == e.dim());
    CHECK(parity_sector_dim(L, Sector::odd) == o.dim());
    // brute-force orbit count
    int fixed = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << L); ++s) fixed += reflect(s, L) == s;
    CHECK(e.dim() == fixed + ((1 << L) - fixed) / 2);
  }
  CHECK(parity_sector_dim(13, Sector::even) == 4160);
  CHECK(build_parity_basis(13, Sector::even).dim() == 4160);
}

TEST_CASE("parity basis is orthonormal and spans the reflection eigenspace") {
  for (int L : {3, 4, 6}) {
    const auto P = oracle::reflection(L);
    for (Sector s : {Sector::even, Sector::odd}) {
      const auto B = build_parity_basis(L, s).to_matrix();
      const Eigen::MatrixXd gram = B.transpose() * B;
      CHECK((gram - Eigen::MatrixXd::Identity(B.cols(), B.cols())).cwiseAbs().maxCoeff() < 1e-14);
      const double sign = s == Sector::even ? 1.0 : -1.0;
      CHECK(max_diff(P * B.cast<std::complex<double>>(), sign * B.cast<std::complex<double>>()) < 1e-14);
    }
  }
}

TEST_CASE("projected spectra merge into the full spectrum") {
  for (int L : {4, 5, 6, 7}) {
    const SpinChainParams p{L, 1.0, 1.0, 0.2};
    const DenseOperator h = build_hamiltonian(p);
    std::vector<double> merged;
    for (Sector s : {Sector::even, Sector::odd}) {
      const auto basis = build_parity_basis(L, s);
      const SectorOperator hs = project(h, basis, "H");
      CHECK(hs.dim() == basis.dim());
      CHECK(hs.matrix().is_hermitian());
      const auto e = eigs(hs.matrix());
      merged.insert(merged.end(), e.begin(), e.end());
      // direct assembly agrees with projection
      const SectorOperator direct = sector_hamiltonian(p, basis);
      CHECK((direct.matrix().real() - hs.matrix().real()).cwiseAbs().maxCoeff() < 1e-13);
    }
    std::sort(merged.begin(), merged.end());
    const auto full = oracle::sorted_eigenvalues(oracle::ising(L, 1.0, 1.0, 0.2));
    REQUIRE(merged.size() == full.size());
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(std::abs(merged[i] - full[i]) < 1e-9);
  }
}

TEST_CASE("projection examples") {
  const auto basis = build_parity_basis(2, Sector::even);
  const SectorOperator id = project(DenseOperator(RealMatrix(RealMatrix::Identity(4, 4))), basis);
  CHECK((id.matrix().real() - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  // sigma^x_1 + sigma^x_2 on {|00>, |11>, (|01>+|10>)/sqrt2}: both product
  // states couple to the symmetric state with amplitude sqrt2.
  const RealMatrix sx = 2.0 * build_total_spin(Axis::x, 2).real();
  const RealMatrix m = project(DenseOperator(sx), basis).matrix().real();
  RealMatrix expected = RealMatrix::Zero(3, 3);
  const double r2 = std::sqrt(2.0);
  auto idx = [&](std::uint64_t s) { return basis.component(s).index; };
  const Eigen::Index i00 = idx(0), i11 = idx(3), isym = idx(1);
  expected(i00, isym) = expected(isym, i00) = r2;
  expected(i11, isym) = expected(isym, i11) = r2;
  CHECK((m - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("total spin") {
  const RealMatrix z2 = build_total_spin(Axis::z, 2).real();
  RealMatrix expected = RealMatrix::Zero(4, 4);
  expected.diagonal() << 1, 0, 0, -1;
  CHECK((z2 - expected).cwiseAbs().maxCoeff() == 0.0);

  const DenseOperator x1 = build_total_spin(Axis::x, 1);
  CHECK(max_diff(x1.to_complex(), 0.5 * oracle::pauli('x')) == 0.0);

  const DenseOperator y3 = build_total_spin(Axis::y, 3);
  REQUIRE_FALSE(y3.is_real());
  CHECK(y3.is_hermitian());
  CHECK(max_diff(y3.complex(), oracle::total_spin('y', 3)) < 1e-15);
  CHECK(y3.complex().real().cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(y3.complex().trace()) < 1e-15);

  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    const char c = a == Axis::x ? 'x' : a == Axis::y ? 'y' : 'z';
    for (int L : {2, 5, 6}) {
      const DenseOperator s = build_total_spin(a, L);
      CHECK(max_diff(s.to_complex(), oracle::total_spin(c, L)) < 1e-14);
      CHECK(reflection_commutator(s, L) == 0.0);
    }
  }
}

TEST_CASE("site combinations") {
  const SiteTerm one[] = {{1, Axis::z, 1.0}};
  const DenseOperator z1 = build_site_combination(one, 2);
  CHECK(max_diff(z1.to_complex(), 0.5 * oracle::site(oracle::pauli('z'), 1, 2)) == 0.0);

  const SiteTerm mirror[] = {{3, Axis::z, 1.0}, {4, Axis::z, 1.0}};
  const DenseOperator m = build_site_combination(mirror, 6);
  CHECK(reflection_commutator(m, 6) < kReflectionTolerance);
  CHECK_NOTHROW(project(m, build_parity_basis(6, Sector::even)));

  const SiteTerm broken[] = {{3, Axis::z, 1.0}, {4, Axis::x, 1.0}};
  const DenseOperator b = build_site_combination(broken, 6);
  CHECK(reflection_commutator(b, 6) > 0.1);
  CHECK_THROWS_AS(project(b, build_parity_basis(6, Sector::even)), SymmetryViolation);

  const SiteTerm out_of_range[] = {{7, Axis::z, 1.0}};
  CHECK_THROWS_AS(build_site_combination(out_of_range, 6), InvalidArgument);
}

TEST_CASE("random traceless operator") {
  const SectorOperator a = random_gaussian_traceless(2, 5);
  CHECK(std::abs(a.matrix().real().trace()) <= 1e-14);

  const RealMatrix r1 = random_gaussian_traceless(36, 1).matrix().real();
  const RealMatrix r1b = random_gaussian_traceless(36, 1).matrix().real();
  const RealMatrix r2 = random_gaussian_traceless(36, 2).matrix().real();
  CHECK((r1 - r1b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() > 0.1);
  for (const RealMatrix* m : {&r1, &r2}) {
    CHECK((*m - m->transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(m->trace()) < 1e-12);
  }
  CHECK(random_gaussian_traceless(36, 1).label() == "random(seed=1)");
  CHECK_THROWS_AS(random_gaussian_traceless(1, 1), InvalidArgument);
}

TEST_CASE("non-Hermitian sector operators are rejected") {
  RealMatrix m = RealMatrix::Zero(3, 3);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(SectorOperator(DenseOperator(m), "bad"), NotHermitian);
}
