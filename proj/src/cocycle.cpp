#include "liebrane/cocycle.hpp"

#include "liebrane/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <thread>

namespace liebrane {

int thread_cap()
{
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("LIEBRANE_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = std::min(hw, static_cast<int>(v));
  }
  return hw;
}

namespace {

// Sorts idx in place, returning the permutation sign, or 0 for repeats.
int sort_sign(std::vector<int>& idx)
{
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i) {
    size_t j = i;
    while (j > 0 && idx[j - 1] > idx[j]) {
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
      --j;
    }
  }
  for (size_t i = 1; i < idx.size(); ++i) {
    if (idx[i - 1] == idx[i]) return 0;
  }
  return sign;
}

bool next_combination(std::vector<int>& c, int limit)
{
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < limit - (k - i)) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

// Antisymmetrised trace over all (order)! arrangements of the tuple. Uses the
// cyclic invariance of the trace: fix the last tuple element as the first
// factor, antisymmetrise the remaining order-1 factors, scale by order.
cplx antisym_trace(const LieAlgebra& g, const std::vector<int>& tuple)
{
  const int order = static_cast<int>(tuple.size());
  const int rest = order - 1;
  std::vector<char> used(rest, 0);
  std::vector<Matrix> prod(order);
  prod[0] = g.basis(tuple[rest]);
  cplx total(0.0, 0.0);

  // iterative DFS over permutations of tuple[0..rest-1]
  std::vector<int> choice(rest, -1);
  int depth = 0;
  int parity = 0;
  std::vector<int> parity_at(rest + 1, 0);
  while (depth >= 0) {
    if (depth == rest) {
      total += (parity % 2 == 0 ? 1.0 : -1.0) * prod[rest].trace();
      --depth;
      continue;
    }
    int next = choice[depth] + 1;
    // undo the previous pick at this depth
    if (choice[depth] >= 0) used[choice[depth]] = 0;
    // skip used slots
    while (next < rest && used[next]) ++next;
    if (next >= rest) {
      choice[depth] = -1;
      --depth;
      continue;
    }
    // parity contribution: number of unused elements before `next`
    int before = 0;
    for (int i = 0; i < next; ++i)
      if (!used[i]) ++before;
    used[next] = 1;
    choice[depth] = next;
    parity = parity_at[depth] + before;
    parity_at[depth + 1] = parity;
    prod[depth + 1] = prod[depth] * g.basis(tuple[next]);
    ++depth;
  }
  return static_cast<double>(order) * total;
}

double factorial(int k)
{
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

cplx small_det(const Eigen::MatrixXcd& M)
{
  switch (M.rows()) {
    case 1: return M(0, 0);
    case 2: return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    case 3:
      return M(0, 0) * (M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1)) -
             M(0, 1) * (M(1, 0) * M(2, 2) - M(1, 2) * M(2, 0)) +
             M(0, 2) * (M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0));
    case 4: {
      cplx d = 0.0;
      Eigen::MatrixXcd minor(3, 3);
      for (int c = 0; c < 4; ++c) {
        int mc = 0;
        for (int cc = 0; cc < 4; ++cc) {
          if (cc == c) continue;
          for (int r = 1; r < 4; ++r) minor(r - 1, mc) = M(r, cc);
          ++mc;
        }
        d += ((c % 2 == 0) ? 1.0 : -1.0) * M(0, c) * small_det(minor);
      }
      return d;
    }
    default: return M.determinant();
  }
}

}  // namespace

Cocycle Cocycle::build(const LieAlgebra& g, int order)
{
  const int n = g.n();
  const int top = 2 * n - 1;
  if (order % 2 == 0 || order < 3 || order > top) {
    std::string range = "{3";
    for (int o = 5; o <= top; o += 2) range += ", " + std::to_string(o);
    range += "}";
    throw std::domain_error("cocycle order " + std::to_string(order) + " invalid for su(" + std::to_string(n) +
                            "); valid orders are " + range);
  }

  const int dim = g.dim();

  // Work estimate: tuples * permutation-tree nodes * cost of a d x d product.
  double tuples = 1.0;
  for (int i = 0; i < order; ++i) tuples = tuples * (dim - i) / (i + 1);
  double nodes = 0.0, acc = 1.0;
  for (int k = 1; k < order; ++k) {
    acc *= (order - k);
    nodes += acc;
  }
  double est = tuples * nodes * n * n * n * 8.0;
  if (est > 4e10) {
    throw std::runtime_error("cocycle build for su(" + std::to_string(n) + ") order " + std::to_string(order) +
                             " exceeds the built-in work budget; this construction is only practical up to"
                             " roughly order 7 on dim <= 15");
  }

  std::vector<std::vector<int>> tuple_list;
  std::vector<int> t(order);
  for (int i = 0; i < order; ++i) t[i] = i;
  if (order <= dim) {
    do {
      tuple_list.push_back(t);
    } while (next_combination(t, dim));
  }

  std::vector<cplx> raw_c(tuple_list.size(), cplx(0.0, 0.0));
  int workers = std::min<int>(thread_cap(), static_cast<int>(tuple_list.size()) > 0 ? static_cast<int>(tuple_list.size()) : 1);
  if (workers > 1) {
    std::vector<std::thread> pool;
    std::size_t chunk = (tuple_list.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(tuple_list.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi]() {
        for (std::size_t i = lo; i < hi; ++i) raw_c[i] = antisym_trace(g, tuple_list[i]);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < tuple_list.size(); ++i) raw_c[i] = antisym_trace(g, tuple_list[i]);
  }

  // The antisymmetrised trace of anti-Hermitian factors is purely real when
  // order = 3 (mod 4) and purely imaginary when order = 1 (mod 4); take the
  // live component and insist the other one is numerical noise.
  const bool real_part = (order % 4 == 3);
  std::vector<double> raw(tuple_list.size(), 0.0);
  double max_abs = 0.0, max_dead = 0.0;
  for (std::size_t i = 0; i < tuple_list.size(); ++i) {
    raw[i] = real_part ? raw_c[i].real() : raw_c[i].imag();
    max_abs = std::max(max_abs, std::abs(raw[i]));
    max_dead = std::max(max_dead, real_part ? std::abs(raw_c[i].imag()) : std::abs(raw_c[i].real()));
  }
  if (max_abs < 1e-8) {
    throw std::domain_error("cocycle of order " + std::to_string(order) + " on su(" + std::to_string(n) +
                            ") evaluated to zero; no nonzero antisymmetrised trace found");
  }
  if (max_dead > 1e-10 * max_abs) {
    throw std::runtime_error("cocycle build lost reality: stray component " + std::to_string(max_dead));
  }

  Cocycle c;
  c.m_order = order;
  c.m_dim = dim;
  c.m_n = n;

  double norm = 1.0;
  if (order == 3) {
    // pin to the structure-constant form by least squares, then verify
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < tuple_list.size(); ++i) {
      double target = g.f(tuple_list[i][0], tuple_list[i][1], tuple_list[i][2]);
      num += raw[i] * target;
      den += raw[i] * raw[i];
    }
    norm = num / den;
    for (std::size_t i = 0; i < tuple_list.size(); ++i) {
      double target = g.f(tuple_list[i][0], tuple_list[i][1], tuple_list[i][2]);
      if (std::abs(norm * raw[i] - target) > 1e-12) {
        throw std::runtime_error("order-3 cocycle does not match the structure constants");
      }
    }
  } else {
    // scale the lexicographically first entry of largest magnitude to 1
    for (std::size_t i = 0; i < tuple_list.size(); ++i) {
      if (std::abs(raw[i]) >= max_abs * (1.0 - 1e-9)) {
        norm = 1.0 / raw[i];
        break;
      }
    }
  }
  c.m_norm = norm;

  for (std::size_t i = 0; i < tuple_list.size(); ++i) {
    if (std::abs(raw[i]) < 1e-12 * max_abs) continue;
    c.m_entries.emplace_back(tuple_list[i], norm * raw[i]);
  }
  return c;
}

double Cocycle::value(std::vector<int> idx) const
{
  if (static_cast<int>(idx.size()) != m_order) throw std::domain_error("cocycle lookup with wrong tuple length");
  for (int a : idx) {
    if (a < 0 || a >= m_dim) throw std::domain_error("cocycle lookup index out of range");
  }
  int sign = sort_sign(idx);
  if (sign == 0) return 0.0;
  auto it = std::lower_bound(m_entries.begin(), m_entries.end(), idx,
                             [](const auto& e, const std::vector<int>& k) { return e.first < k; });
  if (it == m_entries.end() || it->first != idx) return 0.0;
  return sign * it->second;
}

cplx Cocycle::eval(const std::vector<CVector>& args) const
{
  if (static_cast<int>(args.size()) != m_order) throw std::domain_error("cocycle eval needs order-many arguments");
  for (const auto& a : args) {
    if (a.size() != m_dim) throw std::domain_error("cocycle eval argument has wrong dimension");
  }
  Eigen::MatrixXcd M(m_order, m_order);
  cplx total(0.0, 0.0);
  for (const auto& [tuple, v] : m_entries) {
    for (int r = 0; r < m_order; ++r)
      for (int col = 0; col < m_order; ++col) M(r, col) = args[r][tuple[col]];
    total += v * small_det(M);
  }
  return total;
}

double Cocycle::ce_residual(const LieAlgebra& g, int trials, uint64_t seed) const
{
  if (g.dim() != m_dim) throw std::domain_error("cocycle/algebra mismatch");
  Rng rng(seed);
  const int p = m_order + 1;  // the differential takes p arguments
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<CVector> X(p);
    for (auto& x : X) x = rng.unit_vector(m_dim).cast<cplx>();
    cplx total(0.0, 0.0);
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) {
        CVector br = CVector::Zero(m_dim);
        for (const auto& [x, y, c, v] : g.f_entries()) {
          cplx coeff = v * (X[a][x] * X[b][y] - X[a][y] * X[b][x]);
          br[c] += coeff;
        }
        std::vector<CVector> rest;
        rest.push_back(br);
        for (int i = 0; i < p; ++i) {
          if (i != a && i != b) rest.push_back(X[i]);
        }
        double sign = ((a + b) % 2 == 1) ? 1.0 : -1.0;  // (-1)^{a+b+1} for 0-based a < b
        total += sign * eval(rest);
      }
    }
    worst = std::max(worst, std::abs(total));
  }
  return worst;
}

MultibracketTensor MultibracketTensor::build(const Cocycle& c)
{
  MultibracketTensor t;
  t.m_arity = c.order() - 1;
  t.m_dim = c.algebra_dim();
  std::map<std::vector<int>, std::vector<std::pair<int, double>>> grouped;
  const int order = c.order();
  for (const auto& [tuple, v] : c.entries()) {
    for (int i = 0; i < order; ++i) {
      std::vector<int> lower;
      lower.reserve(order - 1);
      for (int j = 0; j < order; ++j) {
        if (j != i) lower.push_back(tuple[j]);
      }
      // moving index i to the last slot passes order-1-i entries
      double sign = ((order - 1 - i) % 2 == 0) ? 1.0 : -1.0;
      grouped[lower].emplace_back(tuple[i], sign * v);
    }
  }
  t.m_groups.assign(grouped.begin(), grouped.end());
  return t;
}

double MultibracketTensor::entry(std::vector<int> lower, int upper) const
{
  if (static_cast<int>(lower.size()) != m_arity) throw std::domain_error("multibracket lookup with wrong tuple length");
  int sign = sort_sign(lower);
  if (sign == 0) return 0.0;
  auto it = std::lower_bound(m_groups.begin(), m_groups.end(), lower,
                             [](const auto& e, const std::vector<int>& k) { return e.first < k; });
  if (it == m_groups.end() || it->first != lower) return 0.0;
  for (const auto& [b, v] : it->second) {
    if (b == upper) return sign * v;
  }
  return 0.0;
}

void MultibracketTensor::column(std::vector<int> lower, std::vector<std::pair<int, double>>& out) const
{
  out.clear();
  if (static_cast<int>(lower.size()) != m_arity) throw std::domain_error("multibracket lookup with wrong tuple length");
  int sign = sort_sign(lower);
  if (sign == 0) return;
  auto it = std::lower_bound(m_groups.begin(), m_groups.end(), lower,
                             [](const auto& e, const std::vector<int>& k) { return e.first < k; });
  if (it == m_groups.end() || it->first != lower) return;
  out.reserve(it->second.size());
  for (const auto& [b, v] : it->second) out.emplace_back(b, sign * v);
}

CVector MultibracketTensor::apply(const std::vector<CVector>& args) const
{
  if (static_cast<int>(args.size()) != m_arity) throw std::domain_error("multibracket needs arity-many arguments");
  for (const auto& a : args) {
    if (a.size() != m_dim) throw std::domain_error("multibracket argument has wrong dimension; algebra mismatch");
  }
  CVector out = CVector::Zero(m_dim);
  Eigen::MatrixXcd M(m_arity, m_arity);
  for (const auto& [lower, ups] : m_groups) {
    for (int r = 0; r < m_arity; ++r)
      for (int col = 0; col < m_arity; ++col) M(r, col) = args[r][lower[col]];
    cplx det = small_det(M);
    for (const auto& [b, v] : ups) out[b] += v * det;
  }
  return out;
}

double MultibracketTensor::gji_residual(int trials, uint64_t seed) const
{
  if (trials < 1) throw std::domain_error("gji_residual needs trials >= 1");
  const int j2 = m_arity;          // 2j
  const int total = 2 * j2 - 1;    // 4j - 1
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<CVector> X(total);
    for (auto& x : X) x = rng.unit_vector(m_dim).cast<cplx>();

    CVector sum = CVector::Zero(m_dim);
    std::vector<int> sel(j2);
    for (int i = 0; i < j2; ++i) sel[i] = i;
    do {
      // sign of the shuffle (sel ascending, complement ascending)
      int inv = 0;
      for (int i = 0; i < j2; ++i) inv += sel[i] - i;
      double sign = (inv % 2 == 0) ? 1.0 : -1.0;

      std::vector<CVector> inner;
      inner.reserve(j2);
      for (int i : sel) inner.push_back(X[i]);
      CVector inner_val = apply(inner);

      std::vector<CVector> outer;
      outer.reserve(j2);
      outer.push_back(inner_val);
      std::vector<char> used(total, 0);
      for (int i : sel) used[i] = 1;
      for (int i = 0; i < total; ++i) {
        if (!used[i]) outer.push_back(X[i]);
      }
      sum += sign * apply(outer);
    } while (next_combination(sel, total));
    worst = std::max(worst, sum.cwiseAbs().maxCoeff());
  }
  return worst;
}

double MultibracketTensor::gji_residual_full(int trials, uint64_t seed) const
{
  const int j2 = m_arity;
  const int total = 2 * j2 - 1;
  Rng rng(seed);
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<CVector> X(total);
    for (auto& x : X) x = rng.unit_vector(m_dim).cast<cplx>();

    CVector sum = CVector::Zero(m_dim);
    std::vector<int> perm(total);
    for (int i = 0; i < total; ++i) perm[i] = i;
    do {
      int inv = 0;
      for (int i = 0; i < total; ++i)
        for (int j = i + 1; j < total; ++j)
          if (perm[i] > perm[j]) ++inv;
      double sign = (inv % 2 == 0) ? 1.0 : -1.0;
      std::vector<CVector> inner;
      inner.reserve(j2);
      for (int i = 0; i < j2; ++i) inner.push_back(X[perm[i]]);
      std::vector<CVector> outer;
      outer.reserve(j2);
      outer.push_back(apply(inner));
      for (int i = j2; i < total; ++i) outer.push_back(X[perm[i]]);
      sum += sign * apply(outer);
    } while (std::next_permutation(perm.begin(), perm.end()));
    sum /= factorial(j2) * factorial(j2 - 1);
    worst = std::max(worst, sum.cwiseAbs().maxCoeff());
  }
  return worst;
}

void MultibracketTensor::zero_first_entry()
{
  if (!m_groups.empty() && !m_groups.front().second.empty()) {
    m_groups.front().second.front().second = 0.0;
  }
}

}  // namespace liebrane
