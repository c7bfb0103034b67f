#pragma once

#include "liebrane/dynamics.hpp"
#include "liebrane/lie_core.hpp"

#include <string>
#include <vector>

namespace liebrane {

/// A stack of n parallel branes with per-brane transverse displacement
/// vectors; coincident branes carry the full su(n) symmetry.
struct BraneStack
{
  const LieAlgebra* algebra = nullptr;
  std::vector<Eigen::VectorXd> positions;

  int n() const { return static_cast<int>(positions.size()); }
  int directions() const { return positions.empty() ? 0 : static_cast<int>(positions.front().size()); }
  /// Induced diagonal coordinate matrices X_t = diag(x_{t,1}, ..., x_{t,n}).
  std::vector<Matrix> coordinate_matrices() const;
};

BraneStack coincident_stack(const LieAlgebra& g, int directions);

/// The Hamiltonian pair family H_j^(+-) = 1/2 sum_{l<=j} (e_l f_l +- f_l e_l)
/// over simple-root ladder operators, j = 1..n-1. Each member is stored both
/// as the enveloping-algebra word and as its fundamental matrix. The family
/// is linearly independent at the word level; the fundamental matrices are
/// all diagonal and become dependent for n >= 3, so the word Gram carries the
/// independence statement while the matrix Gram is reported as a diagnostic.
class HamiltonianFamily
{
public:
  static HamiltonianFamily build(const LieAlgebra& g, const RootSystem& rs, int max_degree = 12);

  int n() const { return m_n; }
  /// Interleaved H_1^+, H_1^-, ..., H_{n-1}^+, H_{n-1}^-.
  const std::vector<HamiltonianSlot>& slots() const { return m_slots; }
  /// j is 1-based to match the labels.
  const HamiltonianSlot& plus(int j) const;
  const HamiltonianSlot& minus(int j) const;

  /// Gram matrix of normal-form word coefficients (conjugate-linear in the
  /// first slot); full rank for every n.
  Eigen::MatrixXcd word_gram() const;
  int word_gram_rank(double tol = 1e-9) const;
  /// Gram of the fundamental matrices under <A,B> = tr(A^dag B).
  Eigen::MatrixXcd matrix_gram() const;
  /// Condition number of the matrix Gram (largest/smallest singular value).
  double matrix_gram_condition() const;

private:
  int m_n = 0;
  std::vector<HamiltonianSlot> m_slots;
};

HamiltonianFamily build_hamiltonians(const LieAlgebra& g, const RootSystem& rs, int max_degree = 12);

enum class Orientation { plus, minus };

/// Slot list and bracket for one orientation of the top-cocycle flow:
/// (H_1^+, H_1^-, ..., H_{n-1}^(orientation)) filling arity 2n-2 beside F.
struct FlowProblem
{
  Orientation orientation = Orientation::plus;
  int top_order = 0;
  MultibracketTensor tensor;
  std::vector<HamiltonianSlot> slots;

  Trajectory run_classical(const Matrix& F0, double T, double h) const;
  Trajectory run_quantum(const PolyMatrix& F0, double T, double h, int hbar_order,
                         int max_degree = 12) const;
};

FlowProblem orientation_flows(const LieAlgebra& g, const RootSystem& rs, Orientation orientation);

/// Which gauge symmetry survives a brane configuration: roots between
/// coincident branes stay unbroken, the Cartan torus always survives, and
/// the coincidence clusters fix the su(m) factor decomposition.
struct SymmetryReport
{
  std::vector<Root> unbroken_roots;
  std::vector<Root> broken_roots;
  int cartan_retained = 0;
  std::vector<int> su_factors;
  int u1_count = 0;
  int unbroken_dimension = 0;
  /// Null-space dimension of the stacked coordinate ad-maps; must equal
  /// unbroken_dimension.
  int centralizer_dimension = 0;
  std::string centre_note;
};

SymmetryReport analyze_stack(const BraneStack& stack);

struct SeparationResult
{
  BraneStack stack;
  SymmetryReport report;
};

/// Displace brane k (1-based) and report the surviving symmetry.
SeparationResult separate_brane(const BraneStack& stack, int k, const Eigen::VectorXd& displacement);

/// One record per positive root: the string between branes j and k.
struct StringRecord
{
  Root root;
  int j = 0;
  int k = 0;
  double length = 0.0;
  bool stretched = false;
};

std::vector<StringRecord> string_spectrum(const BraneStack& stack, bool include_negative = false);

/// Discretised transverse energy density on a periodic 1-d longitudinal
/// grid: sum over points of tr((D X_t)^2) plus the positive-semidefinite
/// commutator potential, times the grid spacing. D X = central difference
/// + i[A, X].
double transverse_lagrangian(const std::vector<Matrix>& A, const std::vector<std::vector<Matrix>>& X,
                             double grid_spacing);

}  // namespace liebrane
