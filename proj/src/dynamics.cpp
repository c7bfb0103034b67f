#include "liebrane/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace liebrane {

namespace {

struct ExpansionItem
{
  Word prefix;
  int active = 0;
  Word suffix;
  HPoly coeff;
};

using ItemList = std::vector<ExpansionItem>;

/// One item per (word term, letter position). Unit words drop out: a
/// derivation annihilates constants.
ItemList expand_slot(const UEAElement& e)
{
  ItemList items;
  for (const auto& [w, c] : e.terms()) {
    const int len = static_cast<int>(w.size());
    for (int i = 0; i < len; ++i) {
      ExpansionItem it;
      it.prefix.assign(w.begin(), w.begin() + i);
      it.active = w[i];
      it.suffix.assign(w.begin() + i + 1, w.end());
      it.coeff = c;
      items.push_back(std::move(it));
    }
  }
  return items;
}

/// Antisymmetrised Leibniz expansion. The plain recursive expansion is a
/// derivation in every slot but not antisymmetric under slot exchange once
/// the arity exceeds two, so it is averaged over all slot orders with signs.
/// Each term is one choice of active letter per slot: the base tensor eats
/// the active letters, prefixes multiply on the left in slot order, suffixes
/// on the right in reverse slot order. visit(L, b, R, coeff) receives the
/// assembled word pieces with the permutation sign, the 1/p! weight and the
/// tensor value folded into coeff.
template <typename Visit>
void for_each_bracket_term(const MultibracketTensor& t, const std::vector<ItemList>& slots, Visit&& visit)
{
  const int p = static_cast<int>(slots.size());
  for (const auto& list : slots) {
    if (list.empty()) return;
  }
  double pfact = 1.0;
  for (int i = 2; i <= p; ++i) pfact *= i;

  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> pick(p);
  std::vector<int> lower(p);
  std::vector<std::pair<int, double>> col;
  Word L, R;
  do {
    int inv = 0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (perm[i] > perm[j]) ++inv;
    const double psign = (inv % 2 == 0 ? 1.0 : -1.0) / pfact;

    std::fill(pick.begin(), pick.end(), 0);
    while (true) {
      HPoly coeff(cplx(psign, 0.0));
      for (int s = 0; s < p; ++s) {
        const ExpansionItem& it = slots[perm[s]][pick[s]];
        lower[s] = it.active;
        coeff = coeff * it.coeff;
      }
      t.column(lower, col);
      if (!col.empty()) {
        L.clear();
        R.clear();
        for (int s = 0; s < p; ++s) {
          const Word& pre = slots[perm[s]][pick[s]].prefix;
          L.insert(L.end(), pre.begin(), pre.end());
        }
        for (int s = p - 1; s >= 0; --s) {
          const Word& suf = slots[perm[s]][pick[s]].suffix;
          R.insert(R.end(), suf.begin(), suf.end());
        }
        for (const auto& [b, v] : col) visit(L, b, R, coeff.scaled(cplx(v, 0.0)));
      }
      int s = p - 1;
      while (s >= 0 && ++pick[s] == static_cast<int>(slots[perm[s]].size())) {
        pick[s] = 0;
        --s;
      }
      if (s < 0) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

bool graded_finite(const std::vector<Matrix>& S)
{
  for (const auto& M : S) {
    for (int r = 0; r < M.rows(); ++r) {
      for (int c = 0; c < M.cols(); ++c) {
        const cplx v = M(r, c);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
      }
    }
  }
  return true;
}

std::vector<Matrix> graded_axpy(const std::vector<Matrix>& S, double h, const std::vector<Matrix>& D)
{
  std::vector<Matrix> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) out[i] = S[i] + h * D[i];
  return out;
}

std::vector<Matrix> rk4_step(const BracketOperator& op, const std::vector<Matrix>& S, double h, int* warn)
{
  const auto k1 = op.apply(S, warn);
  const auto k2 = op.apply(graded_axpy(S, 0.5 * h, k1), warn);
  const auto k3 = op.apply(graded_axpy(S, 0.5 * h, k2), warn);
  const auto k4 = op.apply(graded_axpy(S, h, k3), warn);
  std::vector<Matrix> out(S.size());
  for (std::size_t i = 0; i < S.size(); ++i)
    out[i] = S[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

UEAElement linear_element(const LieAlgebra& g, const CVector& c, int max_degree)
{
  if (c.size() != g.dim()) throw std::domain_error("coefficient vector has wrong dimension");
  std::vector<std::pair<Word, HPoly>> raw;
  for (int a = 0; a < g.dim(); ++a) {
    if (c[a] != cplx(0.0, 0.0)) raw.push_back({Word{a}, HPoly(c[a])});
  }
  return UEAElement::from_words(g, raw, Deformation::classical, RewriteStrategy::leftmost, max_degree);
}

UEAElement leibniz_multibracket(const MultibracketTensor& t, const std::vector<UEAElement>& slots)
{
  if (static_cast<int>(slots.size()) != t.arity())
    throw std::domain_error("slot count does not match the bracket arity");
  const LieAlgebra& g = slots.front().algebra();
  if (g.dim() != t.algebra_dim()) throw std::domain_error("slots and bracket live on different algebras");
  int cap = slots.front().max_degree_cap();
  for (const auto& s : slots) {
    if (s.flag() != Deformation::classical) throw std::domain_error("leibniz_multibracket takes classical slots");
    cap = std::max(cap, s.max_degree_cap());
  }

  std::vector<ItemList> items;
  items.reserve(slots.size());
  for (const auto& s : slots) items.push_back(expand_slot(s));

  std::vector<std::pair<Word, HPoly>> raw;
  for_each_bracket_term(t, items, [&](const Word& L, int b, const Word& R, const HPoly& c) {
    Word w = L;
    w.push_back(b);
    w.insert(w.end(), R.begin(), R.end());
    raw.emplace_back(std::move(w), c);
  });
  return UEAElement::from_words(g, raw, Deformation::classical, RewriteStrategy::leftmost, cap);
}

Matrix binary_bracket_matrix(const Matrix& F, const HamiltonianSlot& H)
{
  if (F.rows() != F.cols() || H.matrix.rows() != H.matrix.cols() || F.rows() != H.matrix.rows())
    throw std::domain_error("binary bracket needs square matrices of matching size");
  return F * H.matrix - H.matrix * F;
}

BracketOperator BracketOperator::build(const MultibracketTensor& t, const std::vector<HamiltonianSlot>& hams,
                                       int hbar_order, int max_degree)
{
  if (hams.empty()) throw std::domain_error("flow needs Hamiltonian slots");
  if (static_cast<int>(hams.size()) != t.arity() - 1)
    throw std::domain_error("flow needs arity-1 Hamiltonian slots");
  if (hbar_order < 0) throw std::domain_error("truncation order must be >= 0");
  const LieAlgebra& g = hams.front().word.algebra();
  if (g.dim() != t.algebra_dim()) throw std::domain_error("Hamiltonians and bracket live on different algebras");

  const int d = g.rep_dim();
  const int dim = g.dim();

  std::vector<ItemList> slots(t.arity());
  for (std::size_t i = 0; i < hams.size(); ++i) {
    const UEAElement& w = hams[i].word;
    if (w.flag() != Deformation::classical)
      throw std::domain_error("Hamiltonian words must be classical normal forms");
    for (const auto& [word, c] : w.terms()) {
      (void)word;
      if (c.degree() > 0)
        throw std::domain_error("Hamiltonian coefficients must be constant in the deformation symbol");
    }
    slots[i + 1] = expand_slot(w);
  }

  BracketOperator op;
  op.m_g = &g;
  op.m_K = hbar_order;
  op.m_Q.assign(dim, std::vector<Matrix>(hbar_order + 1, Matrix::Zero(d, d)));

  // The star product of single-letter matrices x^a T_a splits into the plain
  // matrix product of the T factors times a scalar star polynomial in the
  // coordinates, so the grading of a whole term is carried by one cached
  // scalar: the ordered-word quantum normal form, unsymmetrised, at x = 1.
  std::map<Word, HPoly> fold;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(dim);

  for (int a = 0; a < dim; ++a) {
    ExpansionItem fa;
    fa.active = a;
    fa.coeff = HPoly(1.0);
    slots[0] = ItemList{fa};
    for_each_bracket_term(t, slots, [&](const Word& L, int b, const Word& R, const HPoly& c) {
      Word w = L;
      w.push_back(b);
      w.insert(w.end(), R.begin(), R.end());
      auto it = fold.find(w);
      if (it == fold.end()) {
        UEAElement q = UEAElement::from_words(g, {{w, HPoly(1.0)}}, Deformation::quantum,
                                              RewriteStrategy::leftmost, max_degree);
        it = fold.emplace(std::move(w), unsymmetrize(q).evaluate(ones)).first;
      }
      const HPoly& s = it->second;
      Matrix M = Matrix::Identity(d, d);
      for (int x : L) M = M * g.basis(x);
      M = M * g.basis(b);
      for (int x : R) M = M * g.basis(x);
      const cplx c0 = c.coeff(0);
      for (int m = 0; m <= hbar_order; ++m) {
        const cplx sm = s.coeff(m);
        if (sm != cplx(0.0, 0.0)) op.m_Q[a][m] += (c0 * sm) * M;
      }
    });
  }
  return op;
}

std::vector<Matrix> BracketOperator::apply(const std::vector<Matrix>& graded, int* residual_warnings) const
{
  if (static_cast<int>(graded.size()) != m_K + 1)
    throw std::domain_error("graded state has wrong number of orders");
  const int dim = m_g->dim();
  const int d = m_g->rep_dim();
  std::vector<CVector> c(m_K + 1);
  for (int k = 0; k <= m_K; ++k) {
    Decomposition dec = m_g->decompose(graded[k]);
    if (dec.residual_norm > 1e-8 && residual_warnings != nullptr) ++*residual_warnings;
    c[k] = std::move(dec.coeffs);
  }
  std::vector<Matrix> out(m_K + 1, Matrix::Zero(d, d));
  for (int k = 0; k <= m_K; ++k) {
    for (int m = 0; m <= k; ++m) {
      for (int a = 0; a < dim; ++a) {
        const cplx w = c[k - m][a];
        if (w != cplx(0.0, 0.0)) out[k] += w * m_Q[a][m];
      }
    }
  }
  return out;
}

Matrix BracketOperator::apply_classical(const Matrix& F, int* residual_warnings) const
{
  if (m_K != 0) throw std::domain_error("classical application needs a K = 0 operator");
  return apply(std::vector<Matrix>{F}, residual_warnings)[0];
}

BracketOperator BracketOperator::negated() const
{
  BracketOperator op(*this);
  for (auto& row : op.m_Q) {
    for (auto& Q : row) Q = -Q;
  }
  return op;
}

Matrix multibracket_matrix(const MultibracketTensor& t, const Matrix& F,
                           const std::vector<HamiltonianSlot>& hams, bool* residual_warning)
{
  BracketOperator op = BracketOperator::build(t, hams, 0);
  int warn = 0;
  Matrix out = op.apply_classical(F, &warn);
  if (residual_warning != nullptr) *residual_warning = warn > 0;
  return out;
}

double Trajectory::max_ham_drift(int i) const
{
  double worst = 0.0;
  for (const auto& row : ham_drifts) worst = std::max(worst, row.at(i));
  return worst;
}

Trajectory evolve_with_operator(const BracketOperator& op, const std::vector<Matrix>& graded0,
                                const std::vector<HamiltonianSlot>& hams, double T, double h)
{
  if (h == 0.0 || !std::isfinite(h)) throw std::domain_error("step size must be nonzero and finite");
  if (!(T >= std::abs(h))) throw std::domain_error("duration must cover at least one step");
  const int K = op.hbar_order();
  if (static_cast<int>(graded0.size()) != K + 1)
    throw std::domain_error("initial state has wrong number of orders");

  const long long nsteps = std::llround(T / std::abs(h));
  const int d = op.algebra().rep_dim();

  Trajectory traj;
  traj.hbar_order = K;
  for (const auto& hm : hams) traj.ham_labels.push_back(hm.label);

  std::vector<Matrix> F = graded0;
  if (!graded_finite(F)) {
    traj.aborted = true;
    traj.abort_time = 0.0;
    traj.abort_reason = "non-finite initial state";
    return traj;
  }
  std::vector<std::vector<Matrix>> H(hams.size());
  for (std::size_t i = 0; i < hams.size(); ++i) {
    H[i].assign(K + 1, Matrix::Zero(d, d));
    H[i][0] = hams[i].matrix;
  }

  auto record = [&](double tnow) {
    traj.times.push_back(tnow);
    traj.states.push_back(F);
    traj.traces.push_back(F[0].trace());
    traj.norms.push_back(F[0].norm());
    Eigen::ComplexEigenSolver<Matrix> es(F[0], false);
    std::vector<cplx> eig(es.eigenvalues().data(), es.eigenvalues().data() + d);
    std::sort(eig.begin(), eig.end(), [](const cplx& x, const cplx& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    });
    traj.eigenvalues.push_back(std::move(eig));
    std::vector<cplx> ov(hams.size());
    std::vector<double> dr(hams.size());
    for (std::size_t i = 0; i < hams.size(); ++i) {
      ov[i] = (hams[i].matrix.adjoint() * F[0]).trace();
      double worst = 0.0;
      for (int k = 0; k <= K; ++k) {
        if (k == 0) {
          worst = std::max(worst, (H[i][0] - hams[i].matrix).cwiseAbs().maxCoeff());
        } else {
          worst = std::max(worst, H[i][k].cwiseAbs().maxCoeff());
        }
      }
      dr[i] = worst;
    }
    traj.overlaps.push_back(std::move(ov));
    traj.ham_drifts.push_back(std::move(dr));
  };

  record(0.0);
  for (long long s = 1; s <= nsteps; ++s) {
    std::vector<Matrix> Fn = rk4_step(op, F, h, &traj.residual_warnings);
    bool ok = graded_finite(Fn);
    std::vector<std::vector<Matrix>> Hn(H.size());
    for (std::size_t i = 0; i < H.size() && ok; ++i) {
      Hn[i] = rk4_step(op, H[i], h, nullptr);
      ok = graded_finite(Hn[i]);
    }
    if (!ok) {
      traj.aborted = true;
      traj.abort_time = static_cast<double>(s) * h;
      traj.abort_reason = "non-finite state during integration";
      break;
    }
    F = std::move(Fn);
    for (std::size_t i = 0; i < H.size(); ++i) H[i] = std::move(Hn[i]);
    record(static_cast<double>(s) * h);
  }
  return traj;
}

Trajectory evolve_classical(const MultibracketTensor& t, const Matrix& F0,
                            const std::vector<HamiltonianSlot>& hams, double T, double h)
{
  if (!(h > 0.0)) throw std::domain_error("step size must be positive");
  if (!(T >= h)) throw std::domain_error("duration must cover at least one step");
  BracketOperator op = BracketOperator::build(t, hams, 0);
  return evolve_with_operator(op, std::vector<Matrix>{F0}, hams, T, h);
}

Trajectory evolve_quantum(const MultibracketTensor& t, const PolyMatrix& F0,
                          const std::vector<HamiltonianSlot>& hams, double T, double h, int hbar_order,
                          int max_degree)
{
  if (!(h > 0.0)) throw std::domain_error("step size must be positive");
  if (!(T >= h)) throw std::domain_error("duration must cover at least one step");
  if (hbar_order < 0) throw std::domain_error("truncation order must be >= 0");
  BracketOperator op = BracketOperator::build(t, hams, hbar_order, max_degree);
  const LieAlgebra& g = op.algebra();
  if (F0.vars() != g.dim()) throw std::domain_error("initial matrix has the wrong number of coordinates");
  if (F0.rows() != g.rep_dim() || F0.cols() != g.rep_dim())
    throw std::domain_error("initial matrix has the wrong shape");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.dim());
  return evolve_with_operator(op, F0.evaluate_graded(ones, hbar_order), hams, T, h);
}

}  // namespace liebrane
