#include "kspread/error.hpp"
#include "kspread/krylov.hpp"
#include "kspread/operator_spec.hpp"

#include <doctest.h>

#include <random>

using namespace kspread;

namespace {

SectorOperator sector_h(int L, double hz) {
  return sector_hamiltonian({L, 1.0, 1.0, hz}, build_parity_basis(L, Sector::even));
}

SectorOperator sector_op(const char* spec, int L) {
  return build_sector_operator(parse_operator_spec(spec), build_parity_basis(L, Sector::even));
}

ComplexMatrix random_complex(Eigen::Index d, unsigned seed) {
  std::mt19937 g(seed);
  std::normal_distribution<double> n;
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = {n(g), n(g)};
  return m;
}

} // namespace

TEST_CASE("inner product") {
  const auto id = OperatorVector::flatten(DenseOperator(RealMatrix(RealMatrix::Identity(5, 5))));
  CHECK(inner_product(id, id) == Complex(5.0, 0.0));

  const auto basis = build_parity_basis(2, Sector::even);
  const auto z = OperatorVector::flatten(project(build_total_spin(Axis::z, 2), basis));
  const auto x = OperatorVector::flatten(project(build_total_spin(Axis::x, 2), basis));
  CHECK(std::abs(inner_product(z, x)) < 1e-15);

  const ComplexMatrix a = random_complex(4, 1), b = random_complex(4, 2);
  Complex direct = 0.0;
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) direct += std::conj(a(i, j)) * b(i, j);
  const Complex ip = inner_product(OperatorVector::flatten(DenseOperator(a)), OperatorVector::flatten(DenseOperator(b)));
  CHECK(std::abs(ip - direct) < 1e-12);
  CHECK(std::abs(ip - (a.adjoint() * b).trace()) < 1e-12);

  CHECK_THROWS_AS(inner_product(id, z), DimensionMismatch);
}

TEST_CASE("Liouvillian") {
  const SectorOperator h = sector_h(4, 0.2);
  const Eigen::Index d = h.dim();
  const auto id = OperatorVector::flatten(DenseOperator(RealMatrix(RealMatrix::Identity(d, d))));
  CHECK(liouvillian_apply(h, id).real().cwiseAbs().maxCoeff() == 0.0);
  CHECK(liouvillian_apply(h, OperatorVector::flatten(h)).real().cwiseAbs().maxCoeff() < 1e-14);

  for (unsigned s = 0; s < 5; ++s) {
    const auto o1 = OperatorVector::flatten(DenseOperator(random_complex(d, 10 + s)));
    const auto o2 = OperatorVector::flatten(DenseOperator(random_complex(d, 20 + s)));
    const Complex lhs = inner_product(o1, liouvillian_apply(h, o2));
    const Complex rhs = std::conj(inner_product(o2, liouvillian_apply(h, o1)));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
  }
  const auto small = OperatorVector::flatten(DenseOperator(RealMatrix(RealMatrix::Identity(3, 3))));
  CHECK_THROWS_AS(liouvillian_apply(h, small), DimensionMismatch);
}

TEST_CASE("two-level system") {
  const double e1 = 0.3, e2 = 1.7;
  RealMatrix hm = RealMatrix::Zero(2, 2);
  hm.diagonal() << e1, e2;
  const SectorOperator h(DenseOperator(hm), "H");
  RealMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  const LanczosResult r = lanczos(h, OperatorVector::flatten(DenseOperator(sx)), {1e-8, 0, true});
  CHECK(r.K == 2);
  REQUIRE(r.b.size() == 1);
  CHECK(r.b[0] == doctest::Approx(std::abs(e1 - e2)).epsilon(1e-14));
  const Tridiagonal t = reconstruct_tridiagonal(r, h);
  CHECK(t.T.rows() == 2);
  CHECK(t.T(0, 0) == 0.0);
  CHECK(t.T(0, 1) == doctest::Approx(std::abs(e1 - e2)));
  CHECK(t.T(1, 0) == doctest::Approx(std::abs(e1 - e2)));
  CHECK(t.residual < 1e-12);
}

TEST_CASE("commuting operator gives K = 1") {
  const SectorOperator h = sector_h(4, 0.2);
  const LanczosResult r = lanczos(h, OperatorVector::flatten(h), {1e-8, 0, true});
  CHECK(r.K == 1);
  CHECK(r.b.empty());
  CHECK(reconstruct_tridiagonal(r, h).T.rows() == 1);
}

TEST_CASE("L=4 and L=5 Krylov dimensions, orthonormality and reconstruction") {
  for (auto [L, K] : {std::pair{4, 91}, std::pair{5, 381}}) {
    const SectorOperator h = sector_h(L, 0.2);
    const auto o = OperatorVector::flatten(sector_op("SzT", L));
    const LanczosResult r = lanczos(h, o, {1e-8, 0, true});
    CHECK(r.K == K);
    CHECK(r.K == krylov_bound(h.dim()));
    CHECK(r.termination == Termination::natural);
    for (double x : r.b) CHECK(x > 0.0);
    CHECK(orthonormality_error(r) < 1e-10);
    CHECK(reconstruct_tridiagonal(r, h).residual < 1e-8);
  }
}

TEST_CASE("scale invariance and termination modes") {
  const SectorOperator h = sector_h(4, 0.2);
  const SectorOperator o = sector_op("SxT", 4);
  const LanczosResult a = lanczos(h, OperatorVector::flatten(o));
  const LanczosResult b = lanczos(h, OperatorVector::flatten(DenseOperator(RealMatrix(3.7 * o.matrix().real()))));
  REQUIRE(a.K == b.K);
  for (std::size_t i = 0; i < a.b.size(); ++i) CHECK(b.b[i] == doctest::Approx(a.b[i]).epsilon(1e-9));

  const LanczosResult capped = lanczos(h, OperatorVector::flatten(o), {1e-8, 10, false});
  CHECK(capped.b.size() == 10);
  CHECK(capped.termination == Termination::max_iter);
  for (std::size_t i = 0; i < 10; ++i) CHECK(capped.b[i] == doctest::Approx(a.b[i]).epsilon(1e-12));

  CHECK_THROWS_AS(lanczos(h, OperatorVector::flatten(DenseOperator(RealMatrix(RealMatrix::Zero(h.dim(), h.dim()))))),
                  InvalidArgument);
}

TEST_CASE("tolerance termination on a degenerate Hamiltonian") {
  // Three-level H with two equal gaps has Krylov dimension below the bound.
  RealMatrix hm = RealMatrix::Zero(3, 3);
  hm.diagonal() << 0.0, 1.0, 2.0;
  const SectorOperator h(DenseOperator(hm), "H");
  RealMatrix o = RealMatrix::Ones(3, 3);
  const LanczosResult r = lanczos(h, OperatorVector::flatten(DenseOperator(o)));
  CHECK(r.K < krylov_bound(3));
  CHECK(r.termination == Termination::tolerance);
}

TEST_CASE("complex path matches the real path") {
  const SectorOperator h = sector_h(4, 0.7);
  const SectorOperator o = sector_op("SzT", 4);
  const LanczosResult real = lanczos(h, OperatorVector::flatten(o));
  const SectorOperator hc(DenseOperator(h.matrix().to_complex()), "Hc");
  const LanczosResult cplx = lanczos(hc, OperatorVector::flatten(DenseOperator(o.matrix().to_complex())));
  REQUIRE(real.K == cplx.K);
  for (std::size_t i = 0; i < real.b.size(); ++i) CHECK(cplx.b[i] == doctest::Approx(real.b[i]).epsilon(1e-8));
}

TEST_CASE("S^y_T runs on the complex path") {
  const SectorOperator h = sector_h(4, 0.2);
  const SectorOperator sy = sector_op("SyT", 4);
  REQUIRE_FALSE(sy.is_real());
  const LanczosResult r = lanczos(h, OperatorVector::flatten(sy), {1e-8, 0, true});
  CHECK(r.K > 1);
  CHECK(r.K <= krylov_bound(h.dim()));
  CHECK(orthonormality_error(r) < 1e-10);
  CHECK(reconstruct_tridiagonal(r, h).residual < 1e-8);
}

TEST_CASE("log-ratio statistics") {
  const std::vector<double> constant(20, 2.5);
  CHECK(sigma_log(constant) == 0.0);
  std::vector<double> geometric;
  for (int n = 1; n <= 30; ++n) geometric.push_back(0.7 * std::pow(1.3, n));
  CHECK(sigma_log(geometric) < 1e-12);
  CHECK(log_ratio_mean(geometric) == doctest::Approx(-std::log(1.3)));

  const std::vector<double> b{1.0, 2.0, 1.0};
  // ratios log(1/2), log(2): population std = log 2
  CHECK(sigma_log(b) == doctest::Approx(std::log(2.0)));
  CHECK(log_ratios(b).size() == 2);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(sigma_log(one), InvalidArgument);
  const std::vector<double> bad{1.0, 0.0, 2.0};
  CHECK_THROWS_AS(sigma_log(bad), InvalidArgument);
}

TEST_CASE("lanczos input checks") {
  const SectorOperator h = sector_h(4, 0.2);
  const auto o = OperatorVector::flatten(DenseOperator(RealMatrix(RealMatrix::Identity(3, 3))));
  CHECK_THROWS_AS(lanczos(h, o), DimensionMismatch);
  const LanczosResult r = lanczos(h, OperatorVector::flatten(sector_op("SzT", 4)));
  CHECK_THROWS_AS(reconstruct_tridiagonal(r, h), InvalidArgument);
  CHECK_THROWS_AS(orthonormality_error(r), InvalidArgument);
}
