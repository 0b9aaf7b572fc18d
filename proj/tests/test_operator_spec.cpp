#include "kspread/error.hpp"
#include "kspread/operator_spec.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace kspread;

TEST_CASE("total spin specs") {
  for (const char* s : {"SxT", "SyT", "SzT", "  SzT "}) {
    const auto spec = parse_operator_spec(s);
    CHECK(std::holds_alternative<TotalSpinSpec>(spec.get()));
    CHECK(parse_operator_spec(spec.canonical()).canonical() == spec.canonical());
  }
  CHECK(parse_operator_spec("SzT").canonical() == "SzT");
}

TEST_CASE("random specs") {
  const auto spec = parse_operator_spec("random:42");
  REQUIRE(spec.is_random());
  CHECK(std::get<RandomSpec>(spec.get()).seed == 42);
  CHECK(spec.canonical() == "random:42");
  for (const char* bad : {"random:", "random:x", "random:-1", "random:1.5"})
    CHECK_THROWS_AS(parse_operator_spec(bad), ConfigError);
}

TEST_CASE("site specs") {
  const auto a = parse_operator_spec("sites:3z+4z");
  const auto& t = std::get<SitesSpec>(a.get()).terms;
  REQUIRE(t.size() == 2);
  CHECK(t[0].site == 3);
  CHECK(t[0].axis == Axis::z);
  CHECK(t[0].weight == 1.0);
  CHECK(t[1].site == 4);

  const auto b = parse_operator_spec("sites:1.0*3z+-0.5*4x");
  const auto& u = std::get<SitesSpec>(b.get()).terms;
  REQUIRE(u.size() == 2);
  CHECK(u[1].weight == -0.5);
  CHECK(u[1].axis == Axis::x);
  CHECK(parse_operator_spec(b.canonical()).canonical() == b.canonical());

  for (const char* bad : {"sites:", "sites:3", "sites:3q", "sites:a*3z", "sites:3z+", "Sz", "foo"})
    CHECK_THROWS_AS(parse_operator_spec(bad), ConfigError);
}

TEST_CASE("building operators in a sector") {
  const auto basis = build_parity_basis(6, Sector::even);
  const auto sz = build_sector_operator(parse_operator_spec("SzT"), basis);
  CHECK(sz.dim() == 36);
  CHECK(sz.label() == "SzT");
  CHECK(sz.is_real());

  const auto sy = build_sector_operator(parse_operator_spec("SyT"), basis);
  CHECK_FALSE(sy.is_real());
  CHECK(sy.matrix().is_hermitian());

  const auto r = build_sector_operator(parse_operator_spec("random:3"), basis);
  CHECK(r.dim() == 36);
  CHECK(std::abs(r.matrix().real().trace()) < 1e-12);

  // sites:3z+4z is S^z_3 + S^z_4 projected into the sector
  const auto local = build_sector_operator(parse_operator_spec("sites:3z+4z"), basis);
  const Eigen::MatrixXcd B = basis.to_matrix().cast<std::complex<double>>();
  const Eigen::MatrixXcd full =
      0.5 * (oracle::site(oracle::pauli('z'), 3, 6) + oracle::site(oracle::pauli('z'), 4, 6));
  const Eigen::MatrixXcd expected = B.adjoint() * full * B;
  CHECK((local.matrix().to_complex() - expected).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(build_sector_operator(parse_operator_spec("sites:3z+4x"), basis), SymmetryViolation);
  CHECK_THROWS_AS(build_sector_operator(parse_operator_spec("sites:9z"), basis), InvalidArgument);
}
