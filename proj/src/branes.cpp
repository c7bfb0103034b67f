#include "liebrane/branes.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace liebrane {

namespace {

UEAElement ladder_word(const LieAlgebra& g, int l, bool raising, int max_degree)
{
  const int s = g.sym_index(l, l + 1);
  const int a = g.asym_index(l, l + 1);
  const double asym_sign = raising ? -1.0 : 1.0;
  return UEAElement::from_words(g,
                                {{Word{s}, HPoly(cplx(0.0, 1.0))}, {Word{a}, HPoly(asym_sign)}},
                                Deformation::classical, RewriteStrategy::leftmost, max_degree);
}

Matrix realized_matrix(const LieAlgebra& g, const UEAElement& e)
{
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.dim());
  return realize(g, e).evaluate_graded(ones, 0)[0];
}

std::string slot_label(int j, bool plus)
{
  std::ostringstream os;
  os << "H" << j << (plus ? "+" : "-");
  return os.str();
}

/// Clusters of brane indices with exactly equal position vectors, ordered by
/// first member.
std::vector<std::vector<int>> position_clusters(const BraneStack& stack)
{
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < stack.n(); ++i) {
    bool placed = false;
    for (auto& cl : clusters) {
      const Eigen::VectorXd& rep = stack.positions[cl.front()];
      if ((stack.positions[i] - rep).cwiseAbs().maxCoeff() == 0.0) {
        cl.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({i});
  }
  return clusters;
}

}  // namespace

std::vector<Matrix> BraneStack::coordinate_matrices() const
{
  std::vector<Matrix> out;
  const int d = directions();
  out.reserve(d);
  for (int t = 0; t < d; ++t) {
    Matrix x = Matrix::Zero(n(), n());
    for (int i = 0; i < n(); ++i) x(i, i) = positions[i](t);
    out.push_back(std::move(x));
  }
  return out;
}

BraneStack coincident_stack(const LieAlgebra& g, int directions)
{
  if (directions < 1) throw std::domain_error("brane stack needs at least one transverse direction");
  BraneStack s;
  s.algebra = &g;
  s.positions.assign(g.n(), Eigen::VectorXd::Zero(directions));
  return s;
}

HamiltonianFamily HamiltonianFamily::build(const LieAlgebra& g, const RootSystem& rs, int max_degree)
{
  HamiltonianFamily fam;
  fam.m_n = g.n();

  UEAElement word_plus = UEAElement::zero(g, Deformation::classical, max_degree);
  UEAElement word_minus = word_plus;
  Matrix mat_plus = Matrix::Zero(g.n(), g.n());
  Matrix mat_minus = mat_plus;

  for (int j = 1; j <= g.n() - 1; ++j) {
    const int l = j - 1;
    const UEAElement e = ladder_word(g, l, true, max_degree);
    const UEAElement f = ladder_word(g, l, false, max_degree);
    const UEAElement ef = uea_multiply(e, f);
    const UEAElement fe = uea_multiply(f, e);
    word_plus += (ef + fe).scaled(HPoly(0.5));
    word_minus += (ef - fe).scaled(HPoly(0.5));

    const Matrix& E = rs.raising(rs.simple_root(l));
    const Matrix& F = rs.lowering(rs.simple_root(l));
    mat_plus += 0.5 * (E * F + F * E);
    mat_minus += 0.5 * (E * F - F * E);

    HamiltonianSlot sp{word_plus, mat_plus, slot_label(j, true)};
    HamiltonianSlot sm{word_minus, mat_minus, slot_label(j, false)};
    if ((realized_matrix(g, sp.word) - sp.matrix).cwiseAbs().maxCoeff() > 1e-12 ||
        (realized_matrix(g, sm.word) - sm.matrix).cwiseAbs().maxCoeff() > 1e-12)
      throw std::runtime_error("Hamiltonian word and ladder matrix disagree");
    fam.m_slots.push_back(std::move(sp));
    fam.m_slots.push_back(std::move(sm));
  }
  return fam;
}

const HamiltonianSlot& HamiltonianFamily::plus(int j) const
{
  if (j < 1 || j > m_n - 1) throw std::domain_error("Hamiltonian index out of range");
  return m_slots.at(2 * (j - 1));
}

const HamiltonianSlot& HamiltonianFamily::minus(int j) const
{
  if (j < 1 || j > m_n - 1) throw std::domain_error("Hamiltonian index out of range");
  return m_slots.at(2 * (j - 1) + 1);
}

Eigen::MatrixXcd HamiltonianFamily::word_gram() const
{
  const int m = static_cast<int>(m_slots.size());
  std::map<Word, int> index;
  for (const auto& s : m_slots)
    for (const auto& [w, c] : s.word.terms())
      index.emplace(w, static_cast<int>(index.size()));

  Eigen::MatrixXcd vecs = Eigen::MatrixXcd::Zero(static_cast<int>(index.size()), m);
  for (int i = 0; i < m; ++i)
    for (const auto& [w, c] : m_slots[i].word.terms()) vecs(index.at(w), i) = c.coeff(0);
  return vecs.adjoint() * vecs;
}

int HamiltonianFamily::word_gram_rank(double tol) const
{
  const Eigen::MatrixXcd gram = word_gram();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (std::abs(ev(i)) > tol * std::max(1.0, top)) ++rank;
  return rank;
}

Eigen::MatrixXcd HamiltonianFamily::matrix_gram() const
{
  const int m = static_cast<int>(m_slots.size());
  Eigen::MatrixXcd gram(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) gram(i, j) = (m_slots[i].matrix.adjoint() * m_slots[j].matrix).trace();
  return gram;
}

double HamiltonianFamily::matrix_gram_condition() const
{
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(matrix_gram());
  const Eigen::VectorXd sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

HamiltonianFamily build_hamiltonians(const LieAlgebra& g, const RootSystem& rs, int max_degree)
{
  return HamiltonianFamily::build(g, rs, max_degree);
}

Trajectory FlowProblem::run_classical(const Matrix& F0, double T, double h) const
{
  return evolve_classical(tensor, F0, slots, T, h);
}

Trajectory FlowProblem::run_quantum(const PolyMatrix& F0, double T, double h, int hbar_order,
                                    int max_degree) const
{
  return evolve_quantum(tensor, F0, slots, T, h, hbar_order, max_degree);
}

FlowProblem orientation_flows(const LieAlgebra& g, const RootSystem& rs, Orientation orientation)
{
  const int order = 2 * g.n() - 1;
  if (order < 3 || order > 2 * g.n() - 1)
    throw std::domain_error("top cocycle order unavailable for this algebra");

  FlowProblem p;
  p.orientation = orientation;
  p.top_order = order;
  p.tensor = MultibracketTensor::build(Cocycle::build(g, order));

  const HamiltonianFamily fam = build_hamiltonians(g, rs);
  for (int j = 1; j <= g.n() - 2; ++j) {
    p.slots.push_back(fam.plus(j));
    p.slots.push_back(fam.minus(j));
  }
  const int last = g.n() - 1;
  p.slots.push_back(orientation == Orientation::plus ? fam.plus(last) : fam.minus(last));
  return p;
}

SymmetryReport analyze_stack(const BraneStack& stack)
{
  if (stack.algebra == nullptr) throw std::domain_error("brane stack has no algebra attached");
  const LieAlgebra& g = *stack.algebra;
  const RootSystem rs = RootSystem::build(g);

  SymmetryReport rep;
  rep.cartan_retained = g.n() - 1;
  for (const Root& r : rs.positive_roots()) {
    const Eigen::VectorXd d = stack.positions[r.j] - stack.positions[r.k];
    if (d.cwiseAbs().maxCoeff() == 0.0)
      rep.unbroken_roots.push_back(r);
    else
      rep.broken_roots.push_back(r);
  }

  const auto clusters = position_clusters(stack);
  for (const auto& cl : clusters)
    if (cl.size() >= 2) rep.su_factors.push_back(static_cast<int>(cl.size()));
  rep.u1_count = static_cast<int>(clusters.size()) - 1;
  rep.unbroken_dimension = 2 * static_cast<int>(rep.unbroken_roots.size()) + rep.cartan_retained;
  rep.centre_note = "the global u(1) centre of u(n) is not counted";

  // Cross-check: null space of the stacked ad-action of the coordinate
  // matrices on the complexified algebra.
  const int dim = g.dim();
  const auto coords = stack.coordinate_matrices();
  Eigen::MatrixXcd stacked(static_cast<int>(coords.size()) * dim, dim);
  for (int t = 0; t < static_cast<int>(coords.size()); ++t)
    for (int a = 0; a < dim; ++a) {
      const Matrix comm = coords[t] * g.basis(a) - g.basis(a) * coords[t];
      stacked.block(t * dim, a, dim, 1) = g.decompose(comm).coeffs;
    }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked);
  const Eigen::VectorXd sv = svd.singularValues();
  int nullity = dim - static_cast<int>(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < 1e-10 * std::max(1.0, sv(0))) ++nullity;
  rep.centralizer_dimension = nullity;
  return rep;
}

SeparationResult separate_brane(const BraneStack& stack, int k, const Eigen::VectorXd& displacement)
{
  if (k < 1 || k > stack.n()) throw std::domain_error("brane index out of range");
  if (displacement.size() != stack.directions())
    throw std::domain_error("displacement dimension does not match the stack");
  if (displacement.cwiseAbs().maxCoeff() == 0.0)
    throw std::domain_error("separation needs a nonzero displacement");

  SeparationResult res;
  res.stack = stack;
  res.stack.positions[k - 1] += displacement;
  res.report = analyze_stack(res.stack);
  return res;
}

std::vector<StringRecord> string_spectrum(const BraneStack& stack, bool include_negative)
{
  if (stack.algebra == nullptr) throw std::domain_error("brane stack has no algebra attached");
  const RootSystem rs = RootSystem::build(*stack.algebra);

  std::vector<StringRecord> out;
  for (const Root& r : rs.positive_roots()) {
    StringRecord rec;
    rec.root = r;
    rec.j = r.j;
    rec.k = r.k;
    rec.length = (stack.positions[r.j] - stack.positions[r.k]).norm();
    rec.stretched = rec.length > 0.0;
    out.push_back(rec);
  }
  if (include_negative) {
    const int m = static_cast<int>(out.size());
    for (int i = 0; i < m; ++i) {
      StringRecord rev = out[i];
      std::swap(rev.j, rev.k);
      rev.root.j = rev.j;
      rev.root.k = rev.k;
      rev.root.vec = -rev.root.vec;
      out.push_back(rev);
    }
  }
  return out;
}

double transverse_lagrangian(const std::vector<Matrix>& A, const std::vector<std::vector<Matrix>>& X,
                             double grid_spacing)
{
  const int points = static_cast<int>(X.size());
  if (points < 1) throw std::domain_error("transverse Lagrangian needs at least one grid point");
  if (static_cast<int>(A.size()) != points)
    throw std::domain_error("gauge field and coordinate grids differ in length");
  if (!(grid_spacing > 0.0)) throw std::domain_error("grid spacing must be positive");

  const int nt = static_cast<int>(X.front().size());
  const Eigen::Index d = A.front().rows();
  for (const auto& ax : A)
    if (ax.rows() != d || ax.cols() != d) throw std::domain_error("gauge field shape mismatch");
  for (const auto& xs : X) {
    if (static_cast<int>(xs.size()) != nt)
      throw std::domain_error("transverse direction count varies across the grid");
    for (const auto& x : xs)
      if (x.rows() != d || x.cols() != d) throw std::domain_error("coordinate matrix shape mismatch");
  }

  const cplx iu(0.0, 1.0);
  double total = 0.0;
  for (int p = 0; p < points; ++p) {
    const int prev = (p + points - 1) % points;
    const int next = (p + 1) % points;
    for (int t = 0; t < nt; ++t) {
      const Matrix deriv = (X[next][t] - X[prev][t]) / (2.0 * grid_spacing);
      const Matrix cov = deriv + iu * (A[p] * X[p][t] - X[p][t] * A[p]);
      total += (cov * cov).trace().real();
    }
    for (int t = 0; t < nt; ++t)
      for (int u = 0; u < nt; ++u) {
        if (t == u) continue;
        const Matrix comm = X[p][t] * X[p][u] - X[p][u] * X[p][t];
        total += 0.5 * (comm.adjoint() * comm).trace().real();
      }
  }
  return total * grid_spacing;
}

}  // namespace liebrane
