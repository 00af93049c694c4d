#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dynsymlab/opalg.hpp"
#include "test_support.hpp"

using namespace dynsymlab;
using dynsymlab::testing::random_hermitian;
using dynsymlab::testing::random_lattice_operator;

namespace {

const Complex kI{0.0, 1.0};

double op_norm_diff(const LatticeOperator& x, const DenseMatrix& expect) {
  return (DenseMatrix(x.mat) - expect).norm();
}

}  // namespace

TEST_CASE("pauli basis satisfies the defining relations") {
  const auto p = pauli_basis();
  REQUIRE(p.size() == 3);
  CHECK((p[0].entries * p[0].entries -
         DenseMatrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
  const DenseMatrix comm = p[0].entries * p[1].entries -
                           p[1].entries * p[0].entries;
  CHECK((comm - 2.0 * kI * p[2].entries).norm() == doctest::Approx(0.0));
  CHECK(std::abs(p[2].entries.trace()) == doctest::Approx(0.0));
}

TEST_CASE("gell-mann basis matches the displayed tau_3 and tau_8") {
  const auto taus = gell_mann_basis(3);
  REQUIRE(taus.size() == 8);
  DenseMatrix tau3 = DenseMatrix::Zero(3, 3);
  tau3(0, 0) = 1.0;
  tau3(1, 1) = -1.0;
  CHECK((taus[2].entries - tau3).norm() == doctest::Approx(0.0));
  DenseMatrix tau8 = DenseMatrix::Zero(3, 3);
  tau8(0, 0) = tau8(1, 1) = 1.0 / std::sqrt(3.0);
  tau8(2, 2) = -2.0 / std::sqrt(3.0);
  CHECK((taus[7].entries - tau8).norm() < 1e-14);
  CHECK(taus[2].label == "tau_3");
}

TEST_CASE("gell-mann basis is trace-orthonormal for several dimensions") {
  for (int d : {2, 3, 4, 5}) {
    const auto gens = gell_mann_basis(d);
    REQUIRE(static_cast<int>(gens.size()) == d * d - 1);
    for (size_t a = 0; a < gens.size(); ++a) {
      CHECK(std::abs(gens[a].entries.trace()) < 1e-14);
      CHECK((gens[a].entries - gens[a].entries.adjoint()).norm() < 1e-14);
      for (size_t b = 0; b < gens.size(); ++b) {
        const Complex tr = (gens[a].entries * gens[b].entries).trace();
        CHECK(std::abs(tr - (a == b ? 2.0 : 0.0)) < 1e-13);
      }
    }
  }
  CHECK(gell_mann_basis(2)[0].entries == pauli_basis()[0].entries);
  CHECK_THROWS_AS(gell_mann_basis(1), std::invalid_argument);
}

TEST_CASE("lattice spec enforces the dimension cap") {
  LatticeSpec small{4, 2, Boundary::Open};
  CHECK_NOTHROW(small.validate());
  LatticeSpec big{15, 2, Boundary::Open};
  CHECK_THROWS_AS(big.validate(), DimensionCapExceeded);
  LatticeSpec tiny{1, 2, Boundary::Open};
  CHECK_THROWS_AS(tiny.validate(), std::invalid_argument);
}

TEST_CASE("embed places a site operator with identity padding") {
  const LatticeSpec spec{2, 2, Boundary::Open};
  const auto p = pauli_basis();

  const LatticeOperator id = embed(site_identity(2), 1, spec);
  CHECK(op_norm_diff(id, DenseMatrix::Identity(4, 4)) == doctest::Approx(0.0));

  const LatticeOperator z1 = embed(p[2], 1, spec);
  DenseMatrix expect = DenseMatrix::Zero(4, 4);
  expect.diagonal() << 1, 1, -1, -1;
  CHECK(op_norm_diff(z1, expect) == doctest::Approx(0.0));

  CHECK_THROWS_AS(embed(p[0], 3, spec), std::out_of_range);
}

TEST_CASE("hs inner of an embedded sigma_x with itself at N=3 is 8") {
  const LatticeSpec spec{3, 2, Boundary::Open};
  const LatticeOperator x1 = embed(pauli_basis()[0], 1, spec);
  CHECK(std::abs(hs_inner(x1, x1) - Complex{8.0, 0.0}) < 1e-13);
}

TEST_CASE("compile handles zero, uniform, and staggered extensive operators") {
  const LatticeSpec spec{2, 2, Boundary::Open};
  const auto p = pauli_basis();

  ExtensiveOperator zero{spec,
                         {SiteOperator{DenseMatrix::Zero(2, 2), ""},
                          SiteOperator{DenseMatrix::Zero(2, 2), ""}}};
  CHECK(hs_norm(compile(zero)) == doctest::Approx(0.0));

  const LatticeOperator sz = compile(uniform_extensive(p[2], spec));
  DenseMatrix expect = DenseMatrix::Zero(4, 4);
  expect.diagonal() << 2, 0, 0, -2;
  CHECK(op_norm_diff(sz, expect) == doctest::Approx(0.0));

  ExtensiveOperator stag = uniform_extensive(p[2], spec);
  stag.per_site[1].entries *= -1.0;
  DenseMatrix expect_stag = DenseMatrix::Zero(4, 4);
  expect_stag.diagonal() << 0, 2, -2, 0;
  CHECK(op_norm_diff(compile(stag), expect_stag) == doctest::Approx(0.0));
}

TEST_CASE("compile is linear") {
  const LatticeSpec spec{3, 2, Boundary::Open};
  const auto p = pauli_basis();
  std::mt19937 rng(11);
  std::normal_distribution<double> dist(0.0, 1.0);
  const Complex alpha{dist(rng), dist(rng)};
  const Complex beta{dist(rng), dist(rng)};
  const ExtensiveOperator a = uniform_extensive(p[0], spec);
  ExtensiveOperator b = uniform_extensive(p[2], spec);
  b.per_site[2].entries = p[1].entries;

  const LatticeOperator lhs =
      compile(ext_add(ext_scale(alpha, a), ext_scale(beta, b)));
  LatticeOperator rhs =
      add(scale(alpha, compile(a)), scale(beta, compile(b)));
  rhs.mat -= lhs.mat;
  CHECK(hs_norm(rhs) < 1e-12);
}

TEST_CASE("commutator identities on extensive spin sums") {
  const LatticeSpec spec{2, 2, Boundary::Open};
  const auto p = pauli_basis();
  const LatticeOperator sx = compile(uniform_extensive(p[0], spec));
  const LatticeOperator sy = compile(uniform_extensive(p[1], spec));
  const LatticeOperator sz = compile(uniform_extensive(p[2], spec));

  CHECK(hs_norm(commutator(sx, sx)) == doctest::Approx(0.0));

  LatticeOperator diff = commutator(sx, sy);
  diff.mat -= 2.0 * kI * sz.mat;
  CHECK(hs_norm(diff) < 1e-12);

  // [B sum sigma_z, sum (sigma_x + i sigma_y)] = 2B sum (sigma_x + i sigma_y)
  const LatticeOperator ladder = add(sx, scale(kI, sy));
  LatticeOperator resid = commutator(sz, ladder);
  resid.mat -= 2.0 * ladder.mat;
  CHECK(hs_norm(resid) < 1e-12);
}

TEST_CASE("commutator is antisymmetric and satisfies the Jacobi identity") {
  const LatticeSpec spec{3, 2, Boundary::Open};
  std::mt19937 rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const LatticeOperator x = random_lattice_operator(spec, rng);
    const LatticeOperator y = random_lattice_operator(spec, rng);
    const LatticeOperator z = random_lattice_operator(spec, rng);

    LatticeOperator anti = commutator(x, y);
    anti.mat += commutator(y, x).mat;
    CHECK(hs_norm(anti) < 1e-12 * hs_norm(x) * hs_norm(y));

    LatticeOperator jac = commutator(x, commutator(y, z));
    jac.mat += commutator(y, commutator(z, x)).mat;
    jac.mat += commutator(z, commutator(x, y)).mat;
    CHECK(hs_norm(jac) < 1e-10 * hs_norm(x) * hs_norm(y) * hs_norm(z));
  }
}

TEST_CASE("hs inner is conjugate symmetric and positive definite") {
  const LatticeSpec spec{2, 2, Boundary::Open};
  std::mt19937 rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    const LatticeOperator x = random_lattice_operator(spec, rng);
    const LatticeOperator y = random_lattice_operator(spec, rng);
    CHECK(std::abs(hs_inner(x, y) - std::conj(hs_inner(y, x))) < 1e-12);
    const Complex self = hs_inner(x, x);
    CHECK(self.real() > 0.0);
    CHECK(std::abs(self.imag()) < 1e-12 * self.real());
  }
  const auto p = pauli_basis();
  const LatticeOperator x1 = embed(p[0], 1, spec);
  const LatticeOperator y1 = embed(p[1], 1, spec);
  CHECK(std::abs(hs_inner(x1, y1)) < 1e-14);
}

TEST_CASE("embedding is an isometry up to the d^{N-1} identity factor") {
  const LatticeSpec spec{3, 3, Boundary::Open};
  const auto gens = gell_mann_basis(3);
  std::mt19937 rng(17);
  DenseMatrix at = random_hermitian(3, rng);
  at -= (at.trace() / 3.0) * DenseMatrix::Identity(3, 3);
  DenseMatrix bt = random_hermitian(3, rng);
  bt -= (bt.trace() / 3.0) * DenseMatrix::Identity(3, 3);

  const SiteOperator sa{at, "a"};
  const SiteOperator sb{bt, "b"};
  const Complex inner = hs_inner(embed(sa, 2, spec), embed(sb, 2, spec));
  const Complex direct = (at.adjoint() * bt).trace() * 9.0;  // d^{N-1} = 9
  CHECK(std::abs(inner - direct) < 1e-10);
  CHECK(std::abs(hs_inner(embed(sa, 1, spec), embed(sb, 2, spec))) < 1e-12);
}

TEST_CASE("dagger and hermiticity checks") {
  const LatticeSpec spec{2, 2, Boundary::Open};
  std::mt19937 rng(19);
  const LatticeOperator x = random_lattice_operator(spec, rng);
  LatticeOperator twice = dagger(dagger(x));
  twice.mat -= x.mat;
  CHECK(hs_norm(twice) < 1e-14);

  const auto p = pauli_basis();
  CHECK_FALSE(is_hermitian(scale(kI, embed(p[2], 1, spec))));
  CHECK(is_hermitian(embed(p[2], 1, spec)));

  // Staggered diagonal site terms stay Hermitian.
  ExtensiveOperator stag = uniform_extensive(p[2], spec);
  stag.per_site[1].entries *= -1.0;
  CHECK(is_hermitian(compile(stag)));

  CHECK_THROWS_AS(is_hermitian(x, 0.0), std::invalid_argument);
}

TEST_CASE("arithmetic rejects mismatched lattices") {
  const LatticeSpec a{2, 2, Boundary::Open};
  const LatticeSpec b{3, 2, Boundary::Open};
  const auto p = pauli_basis();
  CHECK_THROWS_AS(add(embed(p[0], 1, a), embed(p[0], 1, b)),
                  DimensionMismatch);
  CHECK_THROWS_AS(hs_inner(embed(p[0], 1, a), embed(p[0], 1, b)),
                  DimensionMismatch);
}

TEST_CASE("embed_product composes disjoint site factors") {
  const LatticeSpec spec{3, 2, Boundary::Open};
  const auto p = pauli_basis();
  const LatticeOperator xy = embed_product({{1, p[0]}, {3, p[1]}}, spec);
  LatticeOperator direct = multiply(embed(p[0], 1, spec), embed(p[1], 3, spec));
  direct.mat -= xy.mat;
  CHECK(hs_norm(direct) < 1e-13);
  CHECK_THROWS_AS(embed_product({{1, p[0]}, {1, p[1]}}, spec),
                  std::invalid_argument);
}
