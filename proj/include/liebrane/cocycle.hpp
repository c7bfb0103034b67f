#pragma once

#include "liebrane/lie_core.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace liebrane {

/// Number of worker threads to use: hardware concurrency, capped by the
/// LIEBRANE_THREADS environment variable when it is set.
int thread_cap();

/// Odd cocycle omega_{2j+1} of su(n), built from antisymmetrised traces of
/// products of 2j+1 generators in the fundamental representation. Stored on
/// strictly increasing index tuples; lookups with permuted or repeated
/// indices resolve through the antisymmetry.
class Cocycle
{
public:
  static Cocycle build(const LieAlgebra& g, int order);

  int order() const { return m_order; }
  int algebra_dim() const { return m_dim; }
  int algebra_n() const { return m_n; }
  /// Overall scale N applied to the raw permutation sums.
  double normalisation() const { return m_norm; }

  /// Entries on strictly increasing tuples, lexicographic order.
  const std::vector<std::pair<std::vector<int>, double>>& entries() const { return m_entries; }

  /// Value for an arbitrary index tuple (repeats give 0, permutations the sign).
  double value(std::vector<int> idx) const;

  /// Multilinear evaluation on coefficient vectors.
  cplx eval(const std::vector<CVector>& args) const;

  /// Max-norm of the Chevalley-Eilenberg differential of this cocycle over
  /// random tuples of algebra elements; a closure diagnostic.
  double ce_residual(const LieAlgebra& g, int trials, uint64_t seed) const;

private:
  int m_order = 0;
  int m_dim = 0;
  int m_n = 0;
  double m_norm = 1.0;
  std::vector<std::pair<std::vector<int>, double>> m_entries;
};

/// The 2j-fold bracket tensor C_{a_1...a_{2j}}^b obtained by raising the last
/// cocycle index with the (identity) metric.
class MultibracketTensor
{
public:
  static MultibracketTensor build(const Cocycle& c);

  int arity() const { return m_arity; }
  int algebra_dim() const { return m_dim; }

  /// Entry with arbitrary lower tuple (sign on lookup, repeats give 0).
  double entry(std::vector<int> lower, int upper) const;

  /// All (upper, value) pairs for an arbitrary lower tuple, lookup sign
  /// applied; out is cleared first and stays empty when nothing matches.
  void column(std::vector<int> lower, std::vector<std::pair<int, double>>& out) const;

  /// result^b = C_{a_1...a_{2j}}^b X_1^{a_1} ... X_{2j}^{a_{2j}}.
  CVector apply(const std::vector<CVector>& args) const;

  /// Max-norm of the generalised Jacobi identity shuffle sum on random
  /// unit-norm elements; maximum over trials.
  double gji_residual(int trials, uint64_t seed) const;

  /// Same residual from the full S_{4j-1} antisymmetrisation, divided by
  /// (2j)!(2j-1)!. Small arities only; agrees with the shuffle form.
  double gji_residual_full(int trials, uint64_t seed) const;

  /// Zero out the first stored entry; validation hook for corruption tests.
  void zero_first_entry();

  /// Grouped storage: sorted lower tuple with its (upper, value) list.
  const std::vector<std::pair<std::vector<int>, std::vector<std::pair<int, double>>>>& groups() const
  {
    return m_groups;
  }

private:
  int m_arity = 0;
  int m_dim = 0;
  std::vector<std::pair<std::vector<int>, std::vector<std::pair<int, double>>>> m_groups;
};

}  // namespace liebrane
