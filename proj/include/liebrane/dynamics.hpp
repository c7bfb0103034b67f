#pragma once

#include "liebrane/cocycle.hpp"
#include "liebrane/enveloping.hpp"
#include "liebrane/lie_core.hpp"

#include <string>
#include <vector>

namespace liebrane {

/// A named bracket-slot Hamiltonian: the generator word that enters the
/// Leibniz expansion and its numeric realisation in the representation.
struct HamiltonianSlot
{
  UEAElement word;
  Matrix matrix;
  std::string label;
};

/// Sum of single generators with the given coefficients.
UEAElement linear_element(const LieAlgebra& g, const CVector& c, int max_degree = 12);

/// Leibniz extension of the multibracket to enveloping-algebra slots: every
/// slot word is expanded letter by letter (prefix * bracket * suffix), the
/// all-letters base case is the cocycle tensor, and the whole expansion is
/// antisymmetrised over the slot order, which makes a repeated slot vanish.
UEAElement leibniz_multibracket(const MultibracketTensor& t, const std::vector<UEAElement>& slots);

/// Matrix commutator F H - H F. The arity-2 Leibniz bracket coincides with
/// the commutator on every ordered word (both satisfy {XW, Z} = X{W, Z} +
/// {X, Z}W with the same degree-1 base case), so this is the exact
/// representation-level image of leibniz_multibracket at arity 2.
Matrix binary_bracket_matrix(const Matrix& F, const HamiltonianSlot& H);

/// Precomputed linear action F -> {F, H_1, ..., H_{2j-1}} at the
/// representation level, graded by powers of the deformation symbol up to a
/// truncation order K. The observable slot is decomposed onto the basis
/// (trace part drops out, residuals are counted), and each basis generator's
/// bracket is assembled once: the star product of single-variable letter
/// matrices factorises into a plain matrix product times a scalar
/// star-polynomial, evaluated at unit coordinates per grade. K = 0 is the
/// classical flow; the classical entry point runs this very code.
class BracketOperator
{
public:
  static BracketOperator build(const MultibracketTensor& t, const std::vector<HamiltonianSlot>& hams,
                               int hbar_order, int max_degree = 12);

  int hbar_order() const { return m_K; }
  const LieAlgebra& algebra() const { return *m_g; }

  /// Derivative of a graded state (size K+1); counts decompositions whose
  /// residual exceeds 1e-8 if a counter is supplied.
  std::vector<Matrix> apply(const std::vector<Matrix>& graded, int* residual_warnings = nullptr) const;
  Matrix apply_classical(const Matrix& F, int* residual_warnings = nullptr) const;

  /// Same flow run backwards.
  BracketOperator negated() const;

  /// Q_a at one grade; test hook.
  const Matrix& component(int a, int m) const { return m_Q[a][m]; }

private:
  const LieAlgebra* m_g = nullptr;
  int m_K = 0;
  std::vector<std::vector<Matrix>> m_Q;
};

/// One-shot bracket evaluation; assembles a fresh classical operator.
Matrix multibracket_matrix(const MultibracketTensor& t, const Matrix& F,
                           const std::vector<HamiltonianSlot>& hams, bool* residual_warning = nullptr);

/// Recorded flow: graded states plus monitor series, one row per step
/// including the initial state. Slot Hamiltonians are co-evolved through the
/// same operator and their drift from t = 0 is recorded.
struct Trajectory
{
  int hbar_order = 0;
  std::vector<double> times;
  std::vector<std::vector<Matrix>> states;
  std::vector<std::string> ham_labels;
  std::vector<std::vector<double>> ham_drifts;
  std::vector<cplx> traces;
  std::vector<double> norms;
  std::vector<std::vector<cplx>> eigenvalues;
  std::vector<std::vector<cplx>> overlaps;
  int residual_warnings = 0;
  bool aborted = false;
  double abort_time = 0.0;
  std::string abort_reason;

  double max_ham_drift(int i) const;
};

/// Fixed-step RK4 under a prebuilt operator; h may be negative to integrate
/// backwards. Aborts on the first non-finite state, keeping the last good row.
Trajectory evolve_with_operator(const BracketOperator& op, const std::vector<Matrix>& graded0,
                                const std::vector<HamiltonianSlot>& hams, double T, double h);

/// RK4 on dF/dt = {F, H...} at the representation level.
Trajectory evolve_classical(const MultibracketTensor& t, const Matrix& F0,
                            const std::vector<HamiltonianSlot>& hams, double T, double h);

/// Deformation-graded flow truncated at order K; the zeroth channel runs the
/// identical arithmetic as the classical flow.
Trajectory evolve_quantum(const MultibracketTensor& t, const PolyMatrix& F0,
                          const std::vector<HamiltonianSlot>& hams, double T, double h, int hbar_order,
                          int max_degree = 12);

}  // namespace liebrane
