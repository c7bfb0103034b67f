#pragma once

#include "liebrane/lie_core.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace liebrane {

/// Polynomial in the formal deformation symbol, complex coefficients indexed
/// by power. Trailing zero coefficients are trimmed, so the zero polynomial
/// is the empty vector.
class HPoly
{
public:
  HPoly() = default;
  HPoly(cplx c);
  HPoly(double c) : HPoly(cplx(c, 0.0)) {}

  /// c * hbar^k.
  static HPoly hbar(int k, cplx c = cplx(1.0, 0.0));

  bool is_zero() const { return m_c.empty(); }
  /// Highest stored power, -1 for zero.
  int degree() const { return static_cast<int>(m_c.size()) - 1; }
  cplx coeff(int k) const;

  HPoly& operator+=(const HPoly& o);
  HPoly& operator-=(const HPoly& o);
  friend HPoly operator+(HPoly a, const HPoly& b) { return a += b; }
  friend HPoly operator-(HPoly a, const HPoly& b) { return a -= b; }
  friend HPoly operator*(const HPoly& a, const HPoly& b);
  HPoly scaled(cplx s) const;
  /// Drop powers above K.
  HPoly truncated(int K) const;

  double max_abs() const;
  bool approx_equal(const HPoly& o, double tol) const;

private:
  void trim();
  std::vector<cplx> m_c;
};

enum class Deformation { classical, quantum };
enum class RewriteStrategy { leftmost, rightmost };

/// Generator-index word; the normal form keeps indices non-decreasing.
using Word = std::vector<int>;

/// Element of the enveloping algebra in the ordered-word normal form, with
/// deformation-polynomial coefficients. The classical flag rewrites with the
/// plain structure constants, the quantum flag scales the relation by i*hbar.
class UEAElement
{
public:
  static UEAElement zero(const LieAlgebra& g, Deformation flag, int max_degree = 12);
  static UEAElement unit(const LieAlgebra& g, Deformation flag, int max_degree = 12);
  static UEAElement generator(const LieAlgebra& g, int a, Deformation flag, int max_degree = 12);
  /// Normal-forms an arbitrary word list. The strategy picks which descending
  /// pair is rewritten first; all strategies agree up to roundoff.
  static UEAElement from_words(const LieAlgebra& g, const std::vector<std::pair<Word, HPoly>>& raw,
                               Deformation flag, RewriteStrategy strategy = RewriteStrategy::leftmost,
                               int max_degree = 12);

  const LieAlgebra& algebra() const { return *m_g; }
  Deformation flag() const { return m_flag; }
  int max_degree_cap() const { return m_cap; }
  const std::map<Word, HPoly>& terms() const { return m_terms; }
  bool is_zero() const { return m_terms.empty(); }
  /// Longest stored word, -1 for zero.
  int degree() const;

  UEAElement& operator+=(const UEAElement& o);
  UEAElement& operator-=(const UEAElement& o);
  friend UEAElement operator+(UEAElement a, const UEAElement& b) { return a += b; }
  friend UEAElement operator-(UEAElement a, const UEAElement& b) { return a -= b; }
  UEAElement scaled(const HPoly& s) const;

  double max_abs() const;
  bool approx_equal(const UEAElement& o, double tol) const;

private:
  friend UEAElement uea_multiply(const UEAElement&, const UEAElement&, RewriteStrategy);
  void insert_normalised(const Word& w, const HPoly& c, RewriteStrategy strategy);

  const LieAlgebra* m_g = nullptr;
  Deformation m_flag = Deformation::classical;
  int m_cap = 12;
  std::map<Word, HPoly> m_terms;
};

/// Distributive product of normal forms; associative, unit-neutral.
UEAElement uea_multiply(const UEAElement& a, const UEAElement& b,
                        RewriteStrategy strategy = RewriteStrategy::leftmost);

/// Commutative polynomial in dim-many coordinates with HPoly coefficients,
/// stored as exponent vector -> coefficient.
class Polynomial
{
public:
  explicit Polynomial(int vars, int max_degree = 12);
  static Polynomial constant(int vars, const HPoly& c, int max_degree = 12);
  /// The coordinate monomial for one variable (0-based index).
  static Polynomial variable(int vars, int index, int max_degree = 12);

  int vars() const { return m_vars; }
  int max_degree_cap() const { return m_cap; }
  const std::map<std::vector<int>, HPoly>& terms() const { return m_terms; }
  bool is_zero() const { return m_terms.empty(); }
  /// Max total degree, -1 for zero.
  int degree() const;

  void add_term(const std::vector<int>& exps, const HPoly& c);
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const HPoly& s) const;

  Polynomial derivative(int var) const;
  /// Coefficient polynomial of one power of the deformation symbol.
  Polynomial hbar_slice(int k) const;
  Polynomial truncate_hbar(int K) const;
  /// Substitute numeric coordinates, leaving the deformation symbol formal.
  HPoly evaluate(const Eigen::VectorXd& x) const;

  double max_abs() const;
  bool approx_equal(const Polynomial& o, double tol) const;

  /// Canonical text form `(re,im) * hbar^k * x1^e1 ...`, exact round-trip.
  std::string to_text() const;
  static Polynomial from_text(const std::string& text, int vars, int max_degree = 12);

private:
  int m_vars;
  int m_cap;
  std::map<std::vector<int>, HPoly> m_terms;
};

/// PBW symmetrisation of a coordinate polynomial into ordered words. The
/// image of a monomial is the matching sorted word with unit coefficient
/// plus strictly lower-degree corrections.
UEAElement symmetrize(const LieAlgebra& g, const Polynomial& p, Deformation flag);

/// Inverse of symmetrize, by back-substitution from the top degree down.
Polynomial unsymmetrize(const UEAElement& e);

/// Star product through the symmetrisation: unsymmetrize(sym(f) * sym(g))
/// with the quantum relation. Associative; the zeroth power is f*g.
Polynomial gutt_star(const LieAlgebra& g, const Polynomial& f, const Polynomial& h);

/// Linear Poisson bracket on coordinate polynomials.
Polynomial kirillov_bracket(const LieAlgebra& g, const Polynomial& f, const Polynomial& h);

/// Constant-coefficient star product; the series terminates on polynomials.
Polynomial moyal_star(const Polynomial& f, const Polynomial& h, const Eigen::MatrixXd& omega);

enum class ProductMode { pointwise, star };

/// Matrix with polynomial entries.
class PolyMatrix
{
public:
  PolyMatrix(int rows, int cols, int vars, int max_degree = 12);
  static PolyMatrix identity(int d, int vars, int max_degree = 12);

  int rows() const { return m_rows; }
  int cols() const { return m_cols; }
  int vars() const { return m_vars; }
  int max_degree_cap() const { return m_cap; }
  Polynomial& at(int r, int c);
  const Polynomial& at(int r, int c) const;

  PolyMatrix& operator+=(const PolyMatrix& o);
  friend PolyMatrix operator+(PolyMatrix a, const PolyMatrix& b) { return a += b; }
  PolyMatrix scaled(const HPoly& s) const;
  PolyMatrix truncate_hbar(int K) const;

  /// Numeric matrices per deformation power 0..max_hbar at the given
  /// coordinates; higher powers are discarded.
  std::vector<Matrix> evaluate_graded(const Eigen::VectorXd& x, int max_hbar) const;

  double max_abs() const;
  bool approx_equal(const PolyMatrix& o, double tol) const;

private:
  int m_rows, m_cols, m_vars, m_cap;
  std::vector<Polynomial> m_cells;
};

/// Entrywise-summed matrix product; star mode runs every entry product
/// through gutt_star and needs the algebra.
PolyMatrix poly_matrix_multiply(const PolyMatrix& F, const PolyMatrix& G, ProductMode mode,
                                const LieAlgebra* g = nullptr);

/// Degree-1 matrix of one generator: entries x^a (T_a)_{jm}.
PolyMatrix realize_generator(const LieAlgebra& g, int a, int max_degree = 12);

/// Representation of a classical element as a polynomial-entry matrix; words
/// map through pointwise products, the unit word to the identity.
PolyMatrix realize(const LieAlgebra& g, const UEAElement& e);

}  // namespace liebrane
