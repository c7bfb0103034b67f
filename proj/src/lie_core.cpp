#include "liebrane/lie_core.hpp"

#include <cmath>
#include <string>

namespace liebrane {

namespace {

Matrix unit_entry(int n, int j, int k)
{
  Matrix E = Matrix::Zero(n, n);
  E(j, k) = 1.0;
  return E;
}

}  // namespace

LieAlgebra LieAlgebra::build_su(int n, const BuildOptions& opts)
{
  if (n < 2 || n > opts.max_n) {
    throw std::domain_error("build_su: n must lie in [2, " + std::to_string(opts.max_n) + "], got " + std::to_string(n));
  }

  LieAlgebra g;
  g.m_n = n;
  g.m_dim = n * n - 1;
  g.m_basis.reserve(g.m_dim);
  g.m_sym_idx.assign(n, std::vector<int>(n, -1));
  g.m_asym_idx.assign(n, std::vector<int>(n, -1));
  g.m_diag_idx.assign(n - 1, -1);

  const cplx I(0.0, 1.0);
  // Generalised Gell-Mann family in the conventional order: for each k the
  // off-diagonal pairs (j, k), j < k, followed by the (k-1)-th diagonal one.
  for (int k = 1; k < n; ++k) {
    for (int j = 0; j < k; ++j) {
      Matrix S = unit_entry(n, j, k) + unit_entry(n, k, j);
      Matrix A = -I * (unit_entry(n, j, k) - unit_entry(n, k, j));
      g.m_sym_idx[j][k] = static_cast<int>(g.m_basis.size());
      g.m_basis.push_back(-0.5 * I * S);
      g.m_asym_idx[j][k] = static_cast<int>(g.m_basis.size());
      g.m_basis.push_back(-0.5 * I * A);
    }
    Matrix D = Matrix::Zero(n, n);
    for (int j = 0; j <= k - 1; ++j) D(j, j) = 1.0;
    D(k, k) = -static_cast<double>(k);
    D *= std::sqrt(2.0 / (static_cast<double>(k) * (k + 1)));
    g.m_diag_idx[k - 1] = static_cast<int>(g.m_basis.size());
    g.m_basis.push_back(-0.5 * I * D);
  }

  g.compute_structure_constants();
  return g;
}

void LieAlgebra::compute_structure_constants()
{
  const int dim = m_dim;
  m_f.assign(static_cast<size_t>(dim) * dim * dim, 0.0);
  m_f_sparse.clear();
  m_metric.resize(dim, dim);

  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      m_metric(a, b) = -2.0 * (m_basis[a] * m_basis[b]).trace().real();
    }
  }

  // f_{ab}^c = -2 tr([T_a, T_b] T_c) when kappa is the identity; computed for
  // a < b and mirrored so antisymmetry in (a, b) holds exactly as stored.
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      Matrix comm = m_basis[a] * m_basis[b] - m_basis[b] * m_basis[a];
      for (int c = 0; c < dim; ++c) {
        cplx val = -2.0 * (comm * m_basis[c]).trace();
        double re = val.real();
        if (std::abs(re) < 1e-13) re = 0.0;
        m_f[(static_cast<size_t>(a) * dim + b) * dim + c] = re;
        m_f[(static_cast<size_t>(b) * dim + a) * dim + c] = -re;
        if (re != 0.0) m_f_sparse.emplace_back(a, b, c, re);
      }
    }
  }

  m_f_rows.assign(static_cast<size_t>(dim) * dim, {});
  for (const auto& [a, b, c, v] : m_f_sparse) {
    m_f_rows[static_cast<size_t>(a) * dim + b].emplace_back(c, v);
    m_f_rows[static_cast<size_t>(b) * dim + a].emplace_back(c, -v);
  }
}

void LieAlgebra::check_index(int a) const
{
  if (a < 0 || a >= m_dim) {
    throw std::domain_error("basis index " + std::to_string(a) + " outside [0, " + std::to_string(m_dim - 1) + "]");
  }
}

double LieAlgebra::f(int a, int b, int c) const
{
  check_index(a);
  check_index(b);
  check_index(c);
  return m_f[(static_cast<size_t>(a) * m_dim + b) * m_dim + c];
}

const std::vector<std::pair<int, double>>& LieAlgebra::f_row(int a, int b) const
{
  check_index(a);
  check_index(b);
  return m_f_rows[static_cast<size_t>(a) * m_dim + b];
}

bool LieAlgebra::metric_is_identity(double tol) const
{
  return (m_metric - Eigen::MatrixXd::Identity(m_dim, m_dim)).cwiseAbs().maxCoeff() < tol;
}

double LieAlgebra::jacobi_residual() const
{
  const int dim = m_dim;
  double worst = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int c = 0; c < dim; ++c) {
        for (int e = 0; e < dim; ++e) {
          double s = 0.0;
          for (const auto& [d1, v1] : f_row(a, b)) s += v1 * m_f[(static_cast<size_t>(d1) * dim + c) * dim + e];
          for (const auto& [d2, v2] : f_row(b, c)) s += v2 * m_f[(static_cast<size_t>(d2) * dim + a) * dim + e];
          for (const auto& [d3, v3] : f_row(c, a)) s += v3 * m_f[(static_cast<size_t>(d3) * dim + b) * dim + e];
          worst = std::max(worst, std::abs(s));
        }
      }
    }
  }
  return worst;
}

Matrix LieAlgebra::element(const CVector& coeffs) const
{
  if (coeffs.size() != m_dim) throw std::domain_error("element: coefficient vector has wrong length");
  Matrix M = Matrix::Zero(m_n, m_n);
  for (int a = 0; a < m_dim; ++a) M += coeffs[a] * m_basis[a];
  return M;
}

Matrix LieAlgebra::element(const RVector& coeffs) const
{
  return element(CVector(coeffs.cast<cplx>()));
}

Decomposition LieAlgebra::decompose(const Matrix& M) const
{
  if (M.rows() != m_n || M.cols() != m_n) throw std::domain_error("decompose: matrix must be n x n");
  Decomposition out;
  out.coeffs.resize(m_dim);
  for (int a = 0; a < m_dim; ++a) {
    out.coeffs[a] = 2.0 * (m_basis[a].adjoint() * M).trace();
  }
  out.trace_part = M.trace();
  Matrix recon = element(out.coeffs);
  recon += (out.trace_part / static_cast<double>(m_n)) * Matrix::Identity(m_n, m_n);
  out.residual = M - recon;
  out.residual_norm = out.residual.norm();
  return out;
}

int LieAlgebra::sym_index(int j, int k) const
{
  if (j < 0 || k <= j || k >= m_n) throw std::domain_error("sym_index: need 0 <= j < k < n");
  return m_sym_idx[j][k];
}

int LieAlgebra::asym_index(int j, int k) const
{
  if (j < 0 || k <= j || k >= m_n) throw std::domain_error("asym_index: need 0 <= j < k < n");
  return m_asym_idx[j][k];
}

int LieAlgebra::diag_index(int l) const
{
  if (l < 1 || l >= m_n) throw std::domain_error("diag_index: need 1 <= l <= n-1");
  return m_diag_idx[l - 1];
}

void LieAlgebra::poke_structure_constant(int a, int b, int c, double value)
{
  check_index(a);
  check_index(b);
  check_index(c);
  m_f[(static_cast<size_t>(a) * m_dim + b) * m_dim + c] = value;
  // Rebuild the sparse views so every accessor sees the poked tensor.
  m_f_sparse.clear();
  for (int x = 0; x < m_dim; ++x) {
    for (int y = x + 1; y < m_dim; ++y) {
      for (int z = 0; z < m_dim; ++z) {
        double v = m_f[(static_cast<size_t>(x) * m_dim + y) * m_dim + z];
        if (v != 0.0) m_f_sparse.emplace_back(x, y, z, v);
      }
    }
  }
  m_f_rows.assign(static_cast<size_t>(m_dim) * m_dim, {});
  for (int x = 0; x < m_dim; ++x) {
    for (int y = 0; y < m_dim; ++y) {
      for (int z = 0; z < m_dim; ++z) {
        double v = m_f[(static_cast<size_t>(x) * m_dim + y) * m_dim + z];
        if (v != 0.0) m_f_rows[static_cast<size_t>(x) * m_dim + y].emplace_back(z, v);
      }
    }
  }
}

RootSystem RootSystem::build(const LieAlgebra& g)
{
  RootSystem rs;
  const int n = g.n();
  rs.m_n = n;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Root r;
      r.j = j;
      r.k = k;
      r.vec = Eigen::VectorXi::Zero(n);
      r.vec[j] = 1;
      r.vec[k] = -1;
      rs.m_positive.push_back(r);
      rs.m_raising.push_back(unit_entry(n, j, k));
      rs.m_lowering.push_back(unit_entry(n, k, j));
      if (k == j + 1) rs.m_simple.push_back(static_cast<int>(rs.m_positive.size()) - 1);
    }
  }
  for (int l = 0; l < n - 1; ++l) {
    Matrix h = Matrix::Zero(n, n);
    h(l, l) = 1.0;
    h(l + 1, l + 1) = -1.0;
    rs.m_cartan.push_back(h);
  }
  return rs;
}

int RootSystem::find(const Root& r) const
{
  for (size_t i = 0; i < m_positive.size(); ++i) {
    if (m_positive[i].j == r.j && m_positive[i].k == r.k) return static_cast<int>(i);
    if (m_positive[i].j == r.k && m_positive[i].k == r.j) return static_cast<int>(i);
  }
  throw std::domain_error("root (" + std::to_string(r.j) + "," + std::to_string(r.k) + ") not in system");
}

const Matrix& RootSystem::raising(const Root& r) const
{
  int idx = find(r);
  // A request for e_j - e_k with j > k is the negative root; its raising
  // operator is the stored lowering one.
  bool flipped = !(m_positive[idx].j == r.j && m_positive[idx].k == r.k);
  return flipped ? m_lowering[idx] : m_raising[idx];
}

const Matrix& RootSystem::lowering(const Root& r) const
{
  int idx = find(r);
  bool flipped = !(m_positive[idx].j == r.j && m_positive[idx].k == r.k);
  return flipped ? m_raising[idx] : m_lowering[idx];
}

}  // namespace liebrane
