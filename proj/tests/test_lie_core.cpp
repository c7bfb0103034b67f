#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liebrane/lie_core.hpp"
#include "liebrane/rng.hpp"

#include <cstring>

using namespace liebrane;

namespace {

// Pauli-based generators written out by hand, independent of the library
// construction path.
Matrix pauli_generator(int a)
{
  Matrix s(2, 2);
  const cplx I(0.0, 1.0);
  switch (a) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -I, I, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return -0.5 * I * s;
}

double form(const Matrix& X, const Matrix& Y)
{
  return -2.0 * (X * Y).trace().real();
}

}  // namespace

TEST_CASE("su(2) matches the Pauli construction")
{
  auto g = LieAlgebra::build_su(2);
  REQUIRE(g.dim() == 3);
  REQUIRE(g.rep_dim() == 2);
  for (int a = 0; a < 3; ++a) {
    CHECK((g.basis(a) - pauli_generator(a)).cwiseAbs().maxCoeff() < 1e-15);
    // anti-Hermitian and traceless
    CHECK((g.basis(a) + g.basis(a).adjoint()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(g.basis(a).trace()) < 1e-15);
  }
  // [T_1, T_2] = T_3 so f_{12}^3 = 1 (0-based: f(0,1,2))
  CHECK(g.f(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.f(1, 0, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  // independent extraction straight from the commutator
  Matrix comm = pauli_generator(0) * pauli_generator(1) - pauli_generator(1) * pauli_generator(0);
  CHECK((comm - pauli_generator(2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("metric is the identity for n = 2..5")
{
  for (int n = 2; n <= 5; ++n) {
    auto g = LieAlgebra::build_su(n);
    CHECK(g.metric_is_identity(1e-12));
  }
}

TEST_CASE("structure constants are real, antisymmetric, and sparse-consistent")
{
  auto g = LieAlgebra::build_su(3);
  for (int a = 0; a < g.dim(); ++a) {
    CHECK(g.f(a, a, 0) == 0.0);
    for (int b = 0; b < g.dim(); ++b) {
      for (int c = 0; c < g.dim(); ++c) {
        CHECK(g.f(a, b, c) == -g.f(b, a, c));  // exact as stored
      }
    }
  }
  // every basis commutator reconstructs from the tensor
  for (int a = 0; a < g.dim(); ++a) {
    for (int b = 0; b < g.dim(); ++b) {
      Matrix comm = g.basis(a) * g.basis(b) - g.basis(b) * g.basis(a);
      Matrix rebuilt = Matrix::Zero(3, 3);
      for (const auto& [c, v] : g.f_row(a, b)) rebuilt += v * g.basis(c);
      CHECK((comm - rebuilt).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("Jacobi residual is tiny for n = 2, 3, 4")
{
  for (int n : {2, 3, 4}) {
    auto g = LieAlgebra::build_su(n);
    CHECK(g.jacobi_residual() < 1e-10);
  }
}

TEST_CASE("a corrupted tensor is caught by the Jacobi residual")
{
  auto g = LieAlgebra::build_su(2);
  // flip f_{12}^3 in only one of the two antisymmetric slots
  g.poke_structure_constant(0, 1, 2, -1.0);
  CHECK(g.jacobi_residual() > 0.1);
}

TEST_CASE("domain errors on out-of-range n and indices")
{
  CHECK_THROWS_AS(LieAlgebra::build_su(1), std::domain_error);
  CHECK_THROWS_AS(LieAlgebra::build_su(9), std::domain_error);
  BuildOptions opts;
  opts.max_n = 12;
  CHECK_NOTHROW(LieAlgebra::build_su(9, opts));
  auto g = LieAlgebra::build_su(2);
  CHECK_THROWS_AS(g.f(0, 1, 3), std::domain_error);
  CHECK_THROWS_AS(g.f(-1, 1, 2), std::domain_error);
}

TEST_CASE("decompose: unit coefficients, identity, and E_13")
{
  auto g = LieAlgebra::build_su(3);
  for (int a = 0; a < g.dim(); ++a) {
    auto d = g.decompose(g.basis(a));
    CHECK(std::abs(d.coeffs[a] - 1.0) < 1e-13);
    d.coeffs[a] = 0.0;
    CHECK(d.coeffs.cwiseAbs().maxCoeff() < 1e-13);
    CHECK(std::abs(d.trace_part) < 1e-13);
    CHECK(d.residual_norm < 1e-13);
  }

  auto id = g.decompose(Matrix::Identity(3, 3));
  CHECK(id.coeffs.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(id.trace_part - 3.0) < 1e-14);
  CHECK(id.residual_norm < 1e-14);

  // E_13 sits in the complexified span: E_13 = i T_s - T_a for the (1,3) pair
  Matrix E13 = Matrix::Zero(3, 3);
  E13(0, 2) = 1.0;
  auto d = g.decompose(E13);
  CHECK(d.residual_norm < 1e-12);
  CHECK(std::abs(d.trace_part) < 1e-14);
  CHECK(std::abs(d.coeffs[g.sym_index(0, 2)] - cplx(0.0, 1.0)) < 1e-13);
  CHECK(std::abs(d.coeffs[g.asym_index(0, 2)] - cplx(-1.0, 0.0)) < 1e-13);
}

TEST_CASE("decompose reconstructs random elements")
{
  auto g = LieAlgebra::build_su(4);
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    RVector c = rng.unit_vector(g.dim());
    auto d = g.decompose(g.element(c));
    CHECK((d.coeffs - c.cast<cplx>()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(d.residual_norm < 1e-12);
  }
}

TEST_CASE("invariance of the form under the bracket")
{
  auto g = LieAlgebra::build_su(3);
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    Matrix X = g.element(rng.unit_vector(g.dim()));
    Matrix Y = g.element(rng.unit_vector(g.dim()));
    Matrix Z = g.element(rng.unit_vector(g.dim()));
    Matrix XZ = X * Z - Z * X;
    Matrix YZ = Y * Z - Z * Y;
    CHECK(std::abs(form(XZ, Y) + form(X, YZ)) < 1e-12);
  }
}

TEST_CASE("root system of su(3)")
{
  auto g = LieAlgebra::build_su(3);
  auto rs = RootSystem::build(g);
  CHECK(rs.positive_roots().size() == 3);
  CHECK(rs.num_simple() == 2);

  for (const auto& r : rs.positive_roots()) {
    const Matrix& e = rs.raising(r);
    const Matrix& fl = rs.lowering(r);
    // adjoint pairing is exact
    CHECK((e.adjoint() - fl).cwiseAbs().maxCoeff() == 0.0);
    Matrix h = e * fl - fl * e;
    CHECK(std::abs(h.trace()) == 0.0);
    // h is diagonal
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        if (j != k) CHECK(std::abs(h(j, k)) == 0.0);
  }

  for (int l = 0; l < rs.num_simple(); ++l) {
    const Root& alpha = rs.simple_root(l);
    CHECK(alpha.j == l);
    CHECK(alpha.k == l + 1);
    const Matrix& e = rs.raising(alpha);
    const Matrix& h = rs.cartan(l);
    Matrix he = h * e - e * h;
    CHECK((he - 2.0 * e).cwiseAbs().maxCoeff() == 0.0);
    // h agrees with [e, f]
    Matrix ef = e * rs.lowering(alpha) - rs.lowering(alpha) * e;
    CHECK((ef - h).cwiseAbs().maxCoeff() == 0.0);
  }

  // negative root lookup swaps the ladder operators
  Root neg;
  neg.j = 1;
  neg.k = 0;
  neg.vec = Eigen::VectorXi::Zero(3);
  neg.vec[1] = 1;
  neg.vec[0] = -1;
  const Root& pos = rs.simple_root(0);
  CHECK((rs.raising(neg) - rs.lowering(pos)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("construction is deterministic bit for bit")
{
  auto g1 = LieAlgebra::build_su(4);
  auto g2 = LieAlgebra::build_su(4);
  for (int a = 0; a < g1.dim(); ++a) {
    REQUIRE(std::memcmp(g1.basis(a).data(), g2.basis(a).data(), sizeof(cplx) * 16) == 0);
  }
  REQUIRE(g1.f_entries() == g2.f_entries());
}

TEST_CASE("su(2) root data")
{
  auto g = LieAlgebra::build_su(2);
  auto rs = RootSystem::build(g);
  REQUIRE(rs.positive_roots().size() == 1);
  const Root& a = rs.simple_root(0);
  Matrix e = rs.raising(a);
  CHECK(std::abs(e(0, 1) - 1.0) == 0.0);
  CHECK(e.cwiseAbs().sum() == 1.0);
}
