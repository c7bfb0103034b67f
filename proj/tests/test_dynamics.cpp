#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "liebrane/dynamics.hpp"
#include "liebrane/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

using namespace liebrane;

namespace {

UEAElement random_element(Rng& rng, const LieAlgebra& g, int max_deg, int terms)
{
  std::vector<std::pair<Word, HPoly>> raw;
  for (int t = 0; t < terms; ++t) {
    int deg = 1 + static_cast<int>(rng.raw() % max_deg);
    Word w(deg);
    for (int& a : w) a = static_cast<int>(rng.raw() % g.dim());
    raw.emplace_back(w, HPoly(cplx(rng.symmetric(), 0.0)));
  }
  return UEAElement::from_words(g, raw, Deformation::classical);
}

CVector random_cvector(Rng& rng, int dim)
{
  CVector c(dim);
  for (int a = 0; a < dim; ++a) c[a] = cplx(rng.symmetric(), rng.symmetric());
  return c;
}

Matrix realized_at_ones(const LieAlgebra& g, const UEAElement& e)
{
  return realize(g, e).evaluate_graded(Eigen::VectorXd::Ones(g.dim()), 0)[0];
}

HamiltonianSlot make_slot(const LieAlgebra& g, const UEAElement& w, std::string label)
{
  return HamiltonianSlot{w, realized_at_ones(g, w), std::move(label)};
}

double max_entry_diff(const Matrix& a, const Matrix& b)
{
  return (a - b).cwiseAbs().maxCoeff();
}

/// exp(t * ad_H) on basis coefficients through an eigendecomposition of the
/// structure-constant matrix; independent of the flow engine.
struct AdExponential
{
  Matrix V;
  CVector lam;
  CVector w0;
  const LieAlgebra* g;

  AdExponential(const LieAlgebra& alg, int hidx, const CVector& c0) : g(&alg)
  {
    const int dim = alg.dim();
    Matrix A = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b)
      for (int a = 0; a < dim; ++a) A(b, a) = alg.f(a, hidx, b);
    Eigen::ComplexEigenSolver<Matrix> es(A);
    V = es.eigenvectors();
    lam = es.eigenvalues();
    w0 = V.partialPivLu().solve(c0);
  }

  Matrix at(double t) const
  {
    CVector ct = V * (lam.array() * t).exp().matrix().asDiagonal() * w0;
    return g->element(ct);
  }
};

}  // namespace

TEST_CASE("linear elements and slot validation")
{
  auto g = LieAlgebra::build_su(2);
  auto om = Cocycle::build(g, 3);
  auto t2 = MultibracketTensor::build(om);

  CVector c = CVector::Zero(3);
  c[0] = cplx(2.0, 0.0);
  c[2] = cplx(0.0, -1.5);
  auto e = linear_element(g, c);
  REQUIRE(e.terms().size() == 2);
  CHECK(e.degree() == 1);

  CVector bad(2);
  bad.setZero();
  CHECK_THROWS_AS(linear_element(g, bad), std::domain_error);

  auto x0 = UEAElement::generator(g, 0, Deformation::classical);
  auto x1 = UEAElement::generator(g, 1, Deformation::classical);
  CHECK_THROWS_AS(leibniz_multibracket(t2, {x0}), std::domain_error);
  CHECK_THROWS_AS(leibniz_multibracket(t2, {x0, x1, x1}), std::domain_error);
  auto q = UEAElement::generator(g, 0, Deformation::quantum);
  CHECK_THROWS_AS(leibniz_multibracket(t2, {q, x1}), std::domain_error);
}

TEST_CASE("leibniz bracket expands the square example")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));

  // {X_1 X_1, X_2} = X_1 [X_1, X_2] + [X_1, X_2] X_1 = 2 X_1 X_3 + X_2 (NF)
  auto sq = UEAElement::from_words(g, {{{0, 0}, HPoly(1.0)}}, Deformation::classical);
  auto x1 = UEAElement::generator(g, 1, Deformation::classical);
  auto r = leibniz_multibracket(t2, {sq, x1});

  auto expected = UEAElement::from_words(g, {{{0, 2}, HPoly(2.0)}, {{1}, HPoly(1.0)}}, Deformation::classical);
  CHECK(r.approx_equal(expected, 1e-13));

  // a unit slot is annihilated, a zero slot gives zero
  auto unit = UEAElement::unit(g, Deformation::classical);
  CHECK(leibniz_multibracket(t2, {unit, x1}).is_zero());
  auto zero = UEAElement::zero(g, Deformation::classical);
  CHECK(leibniz_multibracket(t2, {zero, x1}).is_zero());
}

TEST_CASE("arity-2 leibniz bracket is the enveloping commutator")
{
  Rng rng(61);
  for (int n : {2, 3}) {
    auto g = LieAlgebra::build_su(n);
    auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
    for (int trial = 0; trial < 50; ++trial) {
      auto a = random_element(rng, g, 3, 2);
      auto b = random_element(rng, g, 2, 2);
      auto lhs = leibniz_multibracket(t2, {a, b});
      auto rhs = uea_multiply(a, b) - uea_multiply(b, a);
      double tol = 1e-12 * std::max(1.0, rhs.max_abs());
      CHECK(lhs.approx_equal(rhs, tol));
    }
  }
}

TEST_CASE("realized arity-2 bracket is the pointwise matrix commutator")
{
  Rng rng(62);
  for (int n : {2, 3}) {
    auto g = LieAlgebra::build_su(n);
    auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
    for (int trial = 0; trial < 50; ++trial) {
      auto a = random_element(rng, g, 3, 2);
      auto b = random_element(rng, g, 2, 2);
      Matrix lhs = realized_at_ones(g, leibniz_multibracket(t2, {a, b}));
      Matrix ra = realized_at_ones(g, a);
      Matrix rb = realized_at_ones(g, b);
      Matrix rhs = ra * rb - rb * ra;
      CHECK(max_entry_diff(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("repeated or exchanged slots respect full antisymmetry")
{
  Rng rng(63);
  auto g = LieAlgebra::build_su(3);
  auto t4 = MultibracketTensor::build(Cocycle::build(g, 5));

  for (int trial = 0; trial < 5; ++trial) {
    auto a = random_element(rng, g, 2, 2);
    auto b = random_element(rng, g, 2, 2);
    auto c = random_element(rng, g, 1, 2);

    // repeat in two different slots
    auto rep = leibniz_multibracket(t4, {a, b, a, c});
    CHECK(rep.max_abs() < 1e-12 * std::max(1.0, a.max_abs() * b.max_abs() * c.max_abs()));

    // exchanging two slots flips the sign
    auto d = random_element(rng, g, 1, 2);
    auto pq = leibniz_multibracket(t4, {a, b, c, d});
    auto qp = leibniz_multibracket(t4, {a, c, b, d});
    double tol = 1e-12 * std::max(1.0, pq.max_abs());
    CHECK((pq + qp).max_abs() < tol);
  }
}

TEST_CASE("matrix multibracket is the realized image of the abstract bracket")
{
  Rng rng(64);
  auto g = LieAlgebra::build_su(3);
  auto t4 = MultibracketTensor::build(Cocycle::build(g, 5));

  std::vector<HamiltonianSlot> hams;
  std::vector<UEAElement> words;
  for (int i = 0; i < 3; ++i) {
    auto w = random_element(rng, g, 2, 2);
    words.push_back(w);
    hams.push_back(make_slot(g, w, "W" + std::to_string(i + 1)));
  }
  BracketOperator op = BracketOperator::build(t4, hams, 0);

  for (int trial = 0; trial < 5; ++trial) {
    CVector c = random_cvector(rng, g.dim());
    Matrix F = g.element(c);
    Matrix lhs = op.apply_classical(F);

    std::vector<UEAElement> slots = {linear_element(g, c), words[0], words[1], words[2]};
    Matrix rhs = realized_at_ones(g, leibniz_multibracket(t4, slots));
    CHECK(max_entry_diff(lhs, rhs) < 1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
  }

  // the one-shot entry point agrees with the prebuilt operator bitwise
  CVector c = random_cvector(rng, g.dim());
  Matrix F = g.element(c);
  bool warned = true;
  Matrix direct = multibracket_matrix(t4, F, hams, &warned);
  CHECK(max_entry_diff(direct, op.apply_classical(F)) == 0.0);
  CHECK_FALSE(warned);
}

TEST_CASE("arity-2 matrix bracket reduces to the plain commutator")
{
  Rng rng(65);
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));

  // linear and quadratic Hamiltonian words; the trace part of F drops out
  // on both sides, so the commutator with the realized matrix is exact
  std::vector<UEAElement> hwords = {
      UEAElement::generator(g, 2, Deformation::classical),
      UEAElement::from_words(g, {{{0, 0}, HPoly(1.0)}, {{1, 2}, HPoly(0.5)}}, Deformation::classical),
  };
  for (const auto& hw : hwords) {
    auto slot = make_slot(g, hw, "H");
    for (int trial = 0; trial < 20; ++trial) {
      Matrix F = g.element(random_cvector(rng, g.dim()));
      Matrix lhs = multibracket_matrix(t2, F, {slot});
      Matrix rhs = binary_bracket_matrix(F, slot);
      CHECK(max_entry_diff(lhs, rhs) < 1e-12);
    }
  }

  Matrix wrong = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(binary_bracket_matrix(wrong, make_slot(g, hwords[0], "H")), std::domain_error);
}

TEST_CASE("rotation flow matches the exponential oracle")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  auto slot = make_slot(g, UEAElement::generator(g, 2, Deformation::classical), "T3");

  Matrix F0 = g.basis(0);
  auto traj = evolve_classical(t2, F0, {slot}, 10.0, 1e-3);
  REQUIRE(traj.times.size() == 10001);
  REQUIRE_FALSE(traj.aborted);

  AdExponential oracle(g, 2, g.decompose(F0).coeffs);
  for (std::size_t k = 0; k < traj.times.size(); k += 1000) {
    Matrix exact = oracle.at(traj.times[k]);
    CHECK(max_entry_diff(traj.states[k][0], exact) < 1e-8);
  }
  Matrix exact_end = oracle.at(traj.times.back());
  CHECK(max_entry_diff(traj.states.back()[0], exact_end) < 1e-8);

  // binary-flow conservation monitors: trace, spectrum, slot Hamiltonian.
  // eigenvalues are matched to the nearest initial one, since the sorted
  // order can flip when real parts differ only by roundoff
  double worst_eig = 0.0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    CHECK(std::abs(traj.traces[k] - traj.traces[0]) < 1e-10);
    for (int i = 0; i < g.rep_dim(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < g.rep_dim(); ++j) {
        best = std::min(best, std::abs(traj.eigenvalues[k][i] - traj.eigenvalues[0][j]));
      }
      worst_eig = std::max(worst_eig, best);
    }
  }
  CHECK(worst_eig < 1e-6);
  CHECK(traj.max_ham_drift(0) == 0.0);
  CHECK(traj.residual_warnings == 0);
}

TEST_CASE("step halving shows fourth-order convergence")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  auto slot = make_slot(g, UEAElement::generator(g, 2, Deformation::classical), "T3");

  Matrix F0 = g.basis(0);
  AdExponential oracle(g, 2, g.decompose(F0).coeffs);
  Matrix exact = oracle.at(10.0);

  // steps large enough that truncation error dominates roundoff
  auto run = [&](double h) {
    auto traj = evolve_classical(t2, F0, {slot}, 10.0, h);
    return max_entry_diff(traj.states.back()[0], exact);
  };
  double err_h = run(0.02);
  double err_h2 = run(0.01);
  double ratio = err_h / err_h2;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("backwards integration returns to the start")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  auto slot = make_slot(
      g, UEAElement::from_words(g, {{{2}, HPoly(1.0)}, {{0, 0}, HPoly(0.4)}}, Deformation::classical), "H");
  BracketOperator op = BracketOperator::build(t2, {slot}, 0);

  Rng rng(66);
  Matrix F0 = g.element(random_cvector(rng, g.dim()));
  auto fwd = evolve_with_operator(op, {F0}, {slot}, 5.0, 1e-3);
  REQUIRE_FALSE(fwd.aborted);
  auto bwd = evolve_with_operator(op, fwd.states.back(), {slot}, 5.0, -1e-3);
  REQUIRE_FALSE(bwd.aborted);
  CHECK(max_entry_diff(bwd.states.back()[0], F0) < 1e-6);
}

TEST_CASE("trajectories are reproducible bit for bit")
{
  auto g = LieAlgebra::build_su(3);
  auto t4 = MultibracketTensor::build(Cocycle::build(g, 5));
  Rng rng(67);
  std::vector<HamiltonianSlot> hams;
  for (int i = 0; i < 3; ++i) hams.push_back(make_slot(g, random_element(rng, g, 2, 2), "W"));
  Matrix F0 = g.element(random_cvector(rng, g.dim()));

  auto t1 = evolve_classical(t4, F0, hams, 0.5, 1e-2);
  auto t2 = evolve_classical(t4, F0, hams, 0.5, 1e-2);
  REQUIRE(t1.times.size() == t2.times.size());
  for (std::size_t k = 0; k < t1.times.size(); ++k) {
    CHECK(max_entry_diff(t1.states[k][0], t2.states[k][0]) == 0.0);
    CHECK(t1.traces[k] == t2.traces[k]);
  }
}

TEST_CASE("linear Hamiltonians generate deformation-free flows")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  auto slot = make_slot(g, UEAElement::generator(g, 2, Deformation::classical), "T3");
  BracketOperator op = BracketOperator::build(t2, {slot}, 2);

  for (int a = 0; a < g.dim(); ++a) {
    CHECK(op.component(a, 1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(op.component(a, 2).cwiseAbs().maxCoeff() == 0.0);
  }

  PolyMatrix F0(2, 2, g.dim());
  Matrix F0m = g.basis(0);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) F0.at(r, c) = Polynomial::constant(g.dim(), HPoly(F0m(r, c)));

  auto q = evolve_quantum(t2, F0, {slot}, 1.0, 1e-2, 2);
  auto cl = evolve_classical(t2, F0m, {slot}, 1.0, 1e-2);
  REQUIRE(q.times.size() == cl.times.size());
  for (std::size_t k = 0; k < q.times.size(); ++k) {
    CHECK(max_entry_diff(q.states[k][0], cl.states[k][0]) == 0.0);
    CHECK(q.states[k][1].cwiseAbs().maxCoeff() == 0.0);
    CHECK(q.states[k][2].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("zeroth deformation channel reproduces the classical flow bit for bit")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  // quadratic word, so the flow has genuine deformation corrections
  auto slot = make_slot(
      g, UEAElement::from_words(g, {{{0, 0}, HPoly(1.0)}, {{1, 1}, HPoly(0.5)}}, Deformation::classical), "H2");

  Rng rng(68);
  Matrix F0m = g.element(random_cvector(rng, g.dim()));
  PolyMatrix F0(2, 2, g.dim());
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) F0.at(r, c) = Polynomial::constant(g.dim(), HPoly(F0m(r, c)));

  auto cl = evolve_classical(t2, F0m, {slot}, 0.1, 1e-2);

  auto q0 = evolve_quantum(t2, F0, {slot}, 0.1, 1e-2, 0);
  REQUIRE(q0.times.size() == cl.times.size());
  for (std::size_t k = 0; k < cl.times.size(); ++k) {
    CHECK(max_entry_diff(q0.states[k][0], cl.states[k][0]) == 0.0);
  }

  auto q1 = evolve_quantum(t2, F0, {slot}, 0.1, 1e-2, 1);
  double top = 0.0;
  for (std::size_t k = 0; k < cl.times.size(); ++k) {
    CHECK(max_entry_diff(q1.states[k][0], cl.states[k][0]) == 0.0);
    top = std::max(top, q1.states[k][1].cwiseAbs().maxCoeff());
  }
  // the first-order channel actually moves
  CHECK(top > 1e-6);
}

TEST_CASE("graded operator matches direct star products of letter matrices")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  const int K = 2;
  const int d = g.rep_dim();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.dim());

  auto hword =
      UEAElement::from_words(g, {{{0, 0}, HPoly(1.0)}, {{1, 2}, HPoly(2.0)}}, Deformation::classical);
  auto slot = make_slot(g, hword, "H");
  BracketOperator op = BracketOperator::build(t2, {slot}, K);

  // brute evaluation: expand the quadratic slot by hand and run every term
  // through entrywise star products instead of the scalar-fold shortcut
  struct Item {
    Word pre;
    int act;
    Word suf;
    double coeff;
  };
  std::vector<Item> items;
  for (const auto& [w, c] : hword.terms()) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      Word pre(w.begin(), w.begin() + i);
      Word suf(w.begin() + i + 1, w.end());
      items.push_back({pre, w[static_cast<int>(i)], suf, c.coeff(0).real()});
    }
  }

  auto star_eval = [&](const Word& letters) {
    PolyMatrix P = PolyMatrix::identity(d, g.dim());
    for (int x : letters) P = poly_matrix_multiply(P, realize_generator(g, x), ProductMode::star, &g);
    return P.evaluate_graded(ones, K);
  };

  for (int a = 0; a < g.dim(); ++a) {
    std::vector<Matrix> acc(K + 1, Matrix::Zero(d, d));
    for (const auto& it : items) {
      for (int b = 0; b < g.dim(); ++b) {
        double v = t2.entry({a, it.act}, b);
        if (v == 0.0) continue;
        Word letters = it.pre;
        letters.push_back(b);
        letters.insert(letters.end(), it.suf.begin(), it.suf.end());
        auto graded = star_eval(letters);
        for (int m = 0; m <= K; ++m) acc[m] += (it.coeff * v) * graded[m];
      }
    }
    for (int m = 0; m <= K; ++m) {
      CHECK(max_entry_diff(acc[m], op.component(a, m)) < 1e-12);
    }
  }
}

TEST_CASE("integration guards reject bad input and non-finite states")
{
  auto g = LieAlgebra::build_su(2);
  auto t2 = MultibracketTensor::build(Cocycle::build(g, 3));
  auto slot = make_slot(g, UEAElement::generator(g, 2, Deformation::classical), "T3");
  Matrix F0 = g.basis(0);

  CHECK_THROWS_AS(evolve_classical(t2, F0, {slot}, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(evolve_classical(t2, F0, {slot}, 1.0, -1e-3), std::domain_error);
  CHECK_THROWS_AS(evolve_classical(t2, F0, {slot}, 1e-4, 1e-3), std::domain_error);
  CHECK_THROWS_AS(BracketOperator::build(t2, {slot, slot}, 0), std::domain_error);
  CHECK_THROWS_AS(BracketOperator::build(t2, {slot}, -1), std::domain_error);

  BracketOperator op2 = BracketOperator::build(t2, {slot}, 1);
  CHECK_THROWS_AS(op2.apply_classical(F0), std::domain_error);
  CHECK_THROWS_AS(op2.apply({F0}), std::domain_error);

  Matrix bad = F0;
  bad(0, 0) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
  BracketOperator op = BracketOperator::build(t2, {slot}, 0);
  auto traj = evolve_with_operator(op, {bad}, {slot}, 1.0, 1e-2);
  CHECK(traj.aborted);
  CHECK(traj.abort_reason == "non-finite initial state");
  CHECK(traj.states.empty());
}
