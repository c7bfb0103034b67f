#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

namespace liebrane {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

struct BuildOptions {
  int max_n = 8;
};

/// Result of projecting a d x d complex matrix onto span(basis) + span(I).
/// The basis span is taken over the complex numbers, so for the fundamental
/// representation the residual vanishes identically; it is kept (and its norm
/// reported) for representations where the projection is lossy.
struct Decomposition {
  CVector coeffs;
  cplx trace_part;
  Matrix residual;
  double residual_norm = 0.0;
};

/// Compact su(n) in the fundamental representation.
///
/// Generators are anti-Hermitian, T_a = -(i/2) * lambda_a with lambda_a the
/// generalised Gell-Mann family, scaled so that the invariant metric
/// kappa_{ab} = -2 tr(T_a T_b) is the identity. Structure constants
/// [T_a, T_b] = sum_c f_{ab}^c T_c are real, antisymmetric in (a, b).
class LieAlgebra
{
public:
  static LieAlgebra build_su(int n, const BuildOptions& opts = {});

  int n() const { return m_n; }
  int dim() const { return m_dim; }
  /// Dimension of the representation space (= n for the fundamental).
  int rep_dim() const { return m_n; }

  const Matrix& basis(int a) const { return m_basis.at(a); }
  const std::vector<Matrix>& basis() const { return m_basis; }

  /// Structure constant f_{ab}^c. Indices are 0-based; out of range throws.
  double f(int a, int b, int c) const;

  /// Nonzero structure constants with a < b, as (a, b, c, value).
  const std::vector<std::tuple<int, int, int, double>>& f_entries() const { return m_f_sparse; }

  /// For each ordered pair (a, b), the nonzero (c, f_{ab}^c) list.
  const std::vector<std::pair<int, double>>& f_row(int a, int b) const;

  const Eigen::MatrixXd& metric() const { return m_metric; }
  bool metric_is_identity(double tol = 1e-12) const;

  /// Max-norm of the Jacobi cyclic sum over all index quadruples.
  double jacobi_residual() const;

  /// Sum_a coeffs[a] * T_a.
  Matrix element(const CVector& coeffs) const;
  Matrix element(const RVector& coeffs) const;

  /// Orthogonal projection of M under <X,Y> = 2 tr(X^dag Y), normalised so
  /// decompose(T_a) puts a unit coefficient on slot a.
  Decomposition decompose(const Matrix& M) const;

  /// Index of the symmetric / antisymmetric pair generator for rows j < k,
  /// and of the l-th diagonal generator (l = 1..n-1), all 0-based outputs.
  int sym_index(int j, int k) const;
  int asym_index(int j, int k) const;
  int diag_index(int l) const;

  /// Overwrite a single stored f_{ab}^c entry. This deliberately does not
  /// touch the mirrored (b, a) slot; it exists so validation paths can be
  /// exercised against a tensor that is wrong in a controlled way.
  void poke_structure_constant(int a, int b, int c, double value);

private:
  LieAlgebra() = default;
  void compute_structure_constants();
  void check_index(int a) const;

  int m_n = 0;
  int m_dim = 0;
  std::vector<Matrix> m_basis;
  std::vector<double> m_f;  // dense dim^3, index (a*dim+b)*dim+c
  std::vector<std::tuple<int, int, int, double>> m_f_sparse;
  std::vector<std::vector<std::pair<int, double>>> m_f_rows;  // per (a*dim+b)
  Eigen::MatrixXd m_metric;
  std::vector<std::vector<int>> m_sym_idx;   // [j][k]
  std::vector<std::vector<int>> m_asym_idx;  // [j][k]
  std::vector<int> m_diag_idx;               // [l-1]
};

/// One root e_j - e_k (j != k) of su(n) with its ladder matrix E_{jk}.
struct Root {
  int j = 0;
  int k = 0;
  Eigen::VectorXi vec;
};

/// Root data for su(n): simple roots alpha_l = e_l - e_{l+1}, positive roots
/// e_j - e_k for j < k, ladder operators E_{jk} in the complexified algebra,
/// and Cartan elements h_alpha = [e_alpha, e_{-alpha}].
class RootSystem
{
public:
  static RootSystem build(const LieAlgebra& g);

  int n() const { return m_n; }
  int num_simple() const { return m_n - 1; }
  const std::vector<Root>& positive_roots() const { return m_positive; }
  /// l = 0..n-2 selects alpha_{l+1} = e_{l+1} - e_{l+2}.
  const Root& simple_root(int l) const { return m_positive.at(m_simple.at(l)); }

  const Matrix& raising(const Root& r) const;
  const Matrix& lowering(const Root& r) const;
  /// Cartan element of the l-th simple root, h = E_{ll} - E_{l+1,l+1}.
  const Matrix& cartan(int l) const { return m_cartan.at(l); }

private:
  int m_n = 0;
  std::vector<Root> m_positive;
  std::vector<int> m_simple;       // positions of simple roots in m_positive
  std::vector<Matrix> m_raising;   // parallel to m_positive
  std::vector<Matrix> m_lowering;  // parallel to m_positive
  std::vector<Matrix> m_cartan;    // per simple root
  int find(const Root& r) const;
};

}  // namespace liebrane
