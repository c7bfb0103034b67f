#include "liebrane/enveloping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace liebrane {

HPoly::HPoly(cplx c)
{
  if (c != cplx(0.0, 0.0)) m_c = {c};
}

HPoly HPoly::hbar(int k, cplx c)
{
  HPoly p;
  if (c != cplx(0.0, 0.0)) {
    p.m_c.assign(k + 1, cplx(0.0, 0.0));
    p.m_c[k] = c;
  }
  return p;
}

cplx HPoly::coeff(int k) const
{
  if (k < 0 || k >= static_cast<int>(m_c.size())) return cplx(0.0, 0.0);
  return m_c[k];
}

void HPoly::trim()
{
  while (!m_c.empty() && m_c.back() == cplx(0.0, 0.0)) m_c.pop_back();
}

HPoly& HPoly::operator+=(const HPoly& o)
{
  if (o.m_c.size() > m_c.size()) m_c.resize(o.m_c.size(), cplx(0.0, 0.0));
  for (size_t i = 0; i < o.m_c.size(); ++i) m_c[i] += o.m_c[i];
  trim();
  return *this;
}

HPoly& HPoly::operator-=(const HPoly& o)
{
  if (o.m_c.size() > m_c.size()) m_c.resize(o.m_c.size(), cplx(0.0, 0.0));
  for (size_t i = 0; i < o.m_c.size(); ++i) m_c[i] -= o.m_c[i];
  trim();
  return *this;
}

HPoly operator*(const HPoly& a, const HPoly& b)
{
  HPoly out;
  if (a.m_c.empty() || b.m_c.empty()) return out;
  out.m_c.assign(a.m_c.size() + b.m_c.size() - 1, cplx(0.0, 0.0));
  for (size_t i = 0; i < a.m_c.size(); ++i)
    for (size_t j = 0; j < b.m_c.size(); ++j) out.m_c[i + j] += a.m_c[i] * b.m_c[j];
  out.trim();
  return out;
}

HPoly HPoly::scaled(cplx s) const
{
  HPoly out;
  if (s == cplx(0.0, 0.0)) return out;
  out.m_c = m_c;
  for (auto& c : out.m_c) c *= s;
  out.trim();
  return out;
}

HPoly HPoly::truncated(int K) const
{
  HPoly out;
  if (K < 0) return out;
  size_t keep = std::min(m_c.size(), static_cast<size_t>(K) + 1);
  out.m_c.assign(m_c.begin(), m_c.begin() + keep);
  out.trim();
  return out;
}

double HPoly::max_abs() const
{
  double m = 0.0;
  for (const auto& c : m_c) m = std::max(m, std::abs(c));
  return m;
}

bool HPoly::approx_equal(const HPoly& o, double tol) const
{
  HPoly d = *this;
  d -= o;
  return d.max_abs() <= tol;
}

UEAElement UEAElement::zero(const LieAlgebra& g, Deformation flag, int max_degree)
{
  UEAElement e;
  e.m_g = &g;
  e.m_flag = flag;
  e.m_cap = max_degree;
  return e;
}

UEAElement UEAElement::unit(const LieAlgebra& g, Deformation flag, int max_degree)
{
  UEAElement e = zero(g, flag, max_degree);
  e.m_terms[Word{}] = HPoly(1.0);
  return e;
}

UEAElement UEAElement::generator(const LieAlgebra& g, int a, Deformation flag, int max_degree)
{
  if (a < 0 || a >= g.dim()) throw std::domain_error("generator index out of range");
  UEAElement e = zero(g, flag, max_degree);
  e.m_terms[Word{a}] = HPoly(1.0);
  return e;
}

UEAElement UEAElement::from_words(const LieAlgebra& g, const std::vector<std::pair<Word, HPoly>>& raw,
                                  Deformation flag, RewriteStrategy strategy, int max_degree)
{
  UEAElement e = zero(g, flag, max_degree);
  for (const auto& [w, c] : raw) {
    for (int a : w) {
      if (a < 0 || a >= g.dim()) throw std::domain_error("word letter out of range");
    }
    e.insert_normalised(w, c, strategy);
  }
  return e;
}

void UEAElement::insert_normalised(const Word& w0, const HPoly& c0, RewriteStrategy strategy)
{
  if (static_cast<int>(w0.size()) > m_cap) {
    throw std::runtime_error("word degree " + std::to_string(w0.size()) + " exceeds the cap " +
                             std::to_string(m_cap));
  }
  std::vector<std::pair<Word, HPoly>> pending;
  pending.emplace_back(w0, c0);
  const bool quantum = (m_flag == Deformation::quantum);
  while (!pending.empty()) {
    Word w = std::move(pending.back().first);
    HPoly c = std::move(pending.back().second);
    pending.pop_back();
    if (c.is_zero()) continue;
    int pos = -1;
    const int len = static_cast<int>(w.size());
    if (strategy == RewriteStrategy::leftmost) {
      for (int i = 0; i + 1 < len; ++i) {
        if (w[i] > w[i + 1]) {
          pos = i;
          break;
        }
      }
    } else {
      for (int i = len - 2; i >= 0; --i) {
        if (w[i] > w[i + 1]) {
          pos = i;
          break;
        }
      }
    }
    if (pos < 0) {
      auto& slot = m_terms[w];
      slot += c;
      if (slot.is_zero()) m_terms.erase(w);
      continue;
    }
    const int b = w[pos], a = w[pos + 1];
    for (const auto& [e, v] : m_g->f_row(b, a)) {
      Word rw;
      rw.reserve(w.size() - 1);
      rw.insert(rw.end(), w.begin(), w.begin() + pos);
      rw.push_back(e);
      rw.insert(rw.end(), w.begin() + pos + 2, w.end());
      HPoly rc = quantum ? HPoly::hbar(1, cplx(0.0, v)) * c : c.scaled(v);
      pending.emplace_back(std::move(rw), std::move(rc));
    }
    std::swap(w[pos], w[pos + 1]);
    pending.emplace_back(std::move(w), std::move(c));
  }
}

int UEAElement::degree() const
{
  int d = -1;
  for (const auto& [w, c] : m_terms) d = std::max(d, static_cast<int>(w.size()));
  return d;
}

UEAElement& UEAElement::operator+=(const UEAElement& o)
{
  if (m_flag != o.m_flag) throw std::domain_error("deformation flag mismatch in sum");
  if (m_g->dim() != o.m_g->dim()) throw std::domain_error("algebra mismatch in sum");
  m_cap = std::max(m_cap, o.m_cap);
  for (const auto& [w, c] : o.m_terms) {
    auto& slot = m_terms[w];
    slot += c;
    if (slot.is_zero()) m_terms.erase(w);
  }
  return *this;
}

UEAElement& UEAElement::operator-=(const UEAElement& o)
{
  return *this += o.scaled(HPoly(-1.0));
}

UEAElement UEAElement::scaled(const HPoly& s) const
{
  UEAElement out = zero(*m_g, m_flag, m_cap);
  if (s.is_zero()) return out;
  for (const auto& [w, c] : m_terms) {
    HPoly p = c * s;
    if (!p.is_zero()) out.m_terms[w] = std::move(p);
  }
  return out;
}

double UEAElement::max_abs() const
{
  double m = 0.0;
  for (const auto& [w, c] : m_terms) m = std::max(m, c.max_abs());
  return m;
}

bool UEAElement::approx_equal(const UEAElement& o, double tol) const
{
  UEAElement d = *this;
  d -= o;
  return d.max_abs() <= tol;
}

UEAElement uea_multiply(const UEAElement& a, const UEAElement& b, RewriteStrategy strategy)
{
  if (a.m_flag != b.m_flag) throw std::domain_error("deformation flag mismatch in product");
  if (a.m_g->dim() != b.m_g->dim()) throw std::domain_error("algebra mismatch in product");
  UEAElement out = UEAElement::zero(*a.m_g, a.m_flag, std::max(a.m_cap, b.m_cap));
  for (const auto& [wa, ca] : a.m_terms) {
    for (const auto& [wb, cb] : b.m_terms) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.insert_normalised(w, ca * cb, strategy);
    }
  }
  return out;
}

Polynomial::Polynomial(int vars, int max_degree) : m_vars(vars), m_cap(max_degree)
{
  if (vars < 1) throw std::domain_error("polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int vars, const HPoly& c, int max_degree)
{
  Polynomial p(vars, max_degree);
  if (!c.is_zero()) p.m_terms[std::vector<int>(vars, 0)] = c;
  return p;
}

Polynomial Polynomial::variable(int vars, int index, int max_degree)
{
  Polynomial p(vars, max_degree);
  if (index < 0 || index >= vars) throw std::domain_error("variable index out of range");
  std::vector<int> e(vars, 0);
  e[index] = 1;
  p.m_terms[e] = HPoly(1.0);
  return p;
}

int Polynomial::degree() const
{
  int d = -1;
  for (const auto& [e, c] : m_terms) {
    int t = 0;
    for (int x : e) t += x;
    d = std::max(d, t);
  }
  return d;
}

void Polynomial::add_term(const std::vector<int>& exps, const HPoly& c)
{
  if (static_cast<int>(exps.size()) != m_vars) throw std::domain_error("exponent vector has wrong length");
  int t = 0;
  for (int x : exps) {
    if (x < 0) throw std::domain_error("negative exponent");
    t += x;
  }
  if (t > m_cap) {
    throw std::runtime_error("polynomial degree " + std::to_string(t) + " exceeds the cap " +
                             std::to_string(m_cap));
  }
  if (c.is_zero()) return;
  auto& slot = m_terms[exps];
  slot += c;
  if (slot.is_zero()) m_terms.erase(exps);
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
  if (m_vars != o.m_vars) throw std::domain_error("variable-count mismatch in sum");
  m_cap = std::max(m_cap, o.m_cap);
  for (const auto& [e, c] : o.m_terms) {
    auto& slot = m_terms[e];
    slot += c;
    if (slot.is_zero()) m_terms.erase(e);
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
  return *this += o.scaled(HPoly(-1.0));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b)
{
  if (a.m_vars != b.m_vars) throw std::domain_error("variable-count mismatch in product");
  Polynomial out(a.m_vars, std::max(a.m_cap, b.m_cap));
  std::vector<int> e(a.m_vars);
  for (const auto& [ea, ca] : a.m_terms) {
    for (const auto& [eb, cb] : b.m_terms) {
      int t = 0;
      for (int i = 0; i < a.m_vars; ++i) {
        e[i] = ea[i] + eb[i];
        t += e[i];
      }
      if (t > out.m_cap) {
        throw std::runtime_error("polynomial degree " + std::to_string(t) + " exceeds the cap " +
                                 std::to_string(out.m_cap));
      }
      auto& slot = out.m_terms[e];
      slot += ca * cb;
      if (slot.is_zero()) out.m_terms.erase(e);
    }
  }
  return out;
}

Polynomial Polynomial::scaled(const HPoly& s) const
{
  Polynomial out(m_vars, m_cap);
  if (s.is_zero()) return out;
  for (const auto& [e, c] : m_terms) {
    HPoly p = c * s;
    if (!p.is_zero()) out.m_terms[e] = std::move(p);
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const
{
  if (var < 0 || var >= m_vars) throw std::domain_error("variable index out of range");
  Polynomial out(m_vars, m_cap);
  for (const auto& [e, c] : m_terms) {
    if (e[var] == 0) continue;
    std::vector<int> d = e;
    d[var] -= 1;
    out.m_terms[d] = c.scaled(cplx(static_cast<double>(e[var]), 0.0));
  }
  return out;
}

Polynomial Polynomial::hbar_slice(int k) const
{
  Polynomial out(m_vars, m_cap);
  for (const auto& [e, c] : m_terms) {
    cplx v = c.coeff(k);
    if (v != cplx(0.0, 0.0)) out.m_terms[e] = HPoly(v);
  }
  return out;
}

Polynomial Polynomial::truncate_hbar(int K) const
{
  Polynomial out(m_vars, m_cap);
  for (const auto& [e, c] : m_terms) {
    HPoly t = c.truncated(K);
    if (!t.is_zero()) out.m_terms[e] = std::move(t);
  }
  return out;
}

HPoly Polynomial::evaluate(const Eigen::VectorXd& x) const
{
  if (static_cast<int>(x.size()) != m_vars) throw std::domain_error("evaluation point has wrong dimension");
  HPoly out;
  for (const auto& [e, c] : m_terms) {
    double mono = 1.0;
    for (int i = 0; i < m_vars; ++i) {
      for (int k = 0; k < e[i]; ++k) mono *= x[i];
    }
    out += c.scaled(cplx(mono, 0.0));
  }
  return out;
}

double Polynomial::max_abs() const
{
  double m = 0.0;
  for (const auto& [e, c] : m_terms) m = std::max(m, c.max_abs());
  return m;
}

bool Polynomial::approx_equal(const Polynomial& o, double tol) const
{
  Polynomial d = *this;
  d -= o;
  return d.max_abs() <= tol;
}

std::string Polynomial::to_text() const
{
  if (m_terms.empty()) return "0";
  std::string out;
  char buf[160];
  for (const auto& [exps, c] : m_terms) {
    for (int k = 0; k <= c.degree(); ++k) {
      cplx v = c.coeff(k);
      if (v == cplx(0.0, 0.0)) continue;
      if (!out.empty()) out += " + ";
      std::snprintf(buf, sizeof buf, "(%.17g,%.17g) * hbar^%d", v.real(), v.imag(), k);
      out += buf;
      for (int i = 0; i < m_vars; ++i) {
        if (exps[i] > 0) {
          std::snprintf(buf, sizeof buf, " * x%d^%d", i + 1, exps[i]);
          out += buf;
        }
      }
    }
  }
  return out;
}

Polynomial Polynomial::from_text(const std::string& text, int vars, int max_degree)
{
  Polynomial out(vars, max_degree);
  if (text.empty() || text == "0") return out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find(" + ", pos);
    std::string term = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    pos = (end == std::string::npos) ? text.size() : end + 3;

    std::vector<std::string> toks;
    size_t tp = 0;
    while (tp < term.size()) {
      size_t te = term.find(" * ", tp);
      toks.push_back(term.substr(tp, te == std::string::npos ? std::string::npos : te - tp));
      tp = (te == std::string::npos) ? term.size() : te + 3;
    }
    if (toks.size() < 2) throw std::runtime_error("unparsable polynomial term: " + term);
    double re = 0.0, im = 0.0;
    if (std::sscanf(toks[0].c_str(), "(%lf,%lf)", &re, &im) != 2) {
      throw std::runtime_error("unparsable coefficient: " + toks[0]);
    }
    int k = -1;
    if (std::sscanf(toks[1].c_str(), "hbar^%d", &k) != 1 || k < 0) {
      throw std::runtime_error("unparsable deformation power: " + toks[1]);
    }
    std::vector<int> exps(vars, 0);
    for (size_t i = 2; i < toks.size(); ++i) {
      int xi = 0, e = 0;
      if (std::sscanf(toks[i].c_str(), "x%d^%d", &xi, &e) != 2 || xi < 1 || xi > vars || e < 1) {
        throw std::runtime_error("unparsable monomial factor: " + toks[i]);
      }
      exps[xi - 1] += e;
    }
    out.add_term(exps, HPoly::hbar(k, cplx(re, im)));
  }
  return out;
}

namespace {

// sym(w) = (1/k) sum over distinct letters a of multiplicity m_a:
// (m_a) X_a sym(w minus one a); the leading sorted word is then pinned to
// coefficient one exactly so back-substitution cancels without residue.
UEAElement sym_word(const LieAlgebra& g, Deformation flag, int cap, const Word& w,
                    std::map<Word, UEAElement>& cache)
{
  if (w.empty()) return UEAElement::unit(g, flag, cap);
  if (w.size() == 1) return UEAElement::generator(g, w[0], flag, cap);
  auto it = cache.find(w);
  if (it != cache.end()) return it->second;

  const int k = static_cast<int>(w.size());
  UEAElement acc = UEAElement::zero(g, flag, cap);
  size_t i = 0;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    const int mult = static_cast<int>(j - i);
    Word rest = w;
    rest.erase(rest.begin() + i);
    UEAElement sub = sym_word(g, flag, cap, rest, cache);
    UEAElement left = uea_multiply(UEAElement::generator(g, w[i], flag, cap), sub);
    acc += left.scaled(HPoly(cplx(static_cast<double>(mult) / k, 0.0)));
    i = j;
  }

  std::vector<std::pair<Word, HPoly>> fixed;
  for (const auto& [word, c] : acc.terms()) {
    if (word != w) fixed.emplace_back(word, c);
  }
  fixed.emplace_back(w, HPoly(1.0));
  UEAElement snapped = UEAElement::from_words(g, fixed, flag, RewriteStrategy::leftmost, cap);
  cache.emplace(w, snapped);
  return snapped;
}

Word monomial_word(const std::vector<int>& exps)
{
  Word w;
  for (size_t i = 0; i < exps.size(); ++i) {
    for (int k = 0; k < exps[i]; ++k) w.push_back(static_cast<int>(i));
  }
  return w;
}

}  // namespace

UEAElement symmetrize(const LieAlgebra& g, const Polynomial& p, Deformation flag)
{
  if (p.vars() != g.dim()) throw std::domain_error("symmetrisation needs dim-many variables");
  const int cap = p.max_degree_cap();
  std::map<Word, UEAElement> cache;
  UEAElement out = UEAElement::zero(g, flag, cap);
  for (const auto& [exps, c] : p.terms()) {
    out += sym_word(g, flag, cap, monomial_word(exps), cache).scaled(c);
  }
  return out;
}

Polynomial unsymmetrize(const UEAElement& e)
{
  const LieAlgebra& g = e.algebra();
  const int vars = g.dim();
  const int cap = e.max_degree_cap();
  Polynomial out(vars, cap);
  std::map<Word, HPoly> work = e.terms();
  std::map<Word, UEAElement> cache;
  while (!work.empty()) {
    int d = -1;
    for (const auto& [w, c] : work) d = std::max(d, static_cast<int>(w.size()));
    std::vector<std::pair<Word, HPoly>> top;
    for (const auto& [w, c] : work) {
      if (static_cast<int>(w.size()) == d) top.emplace_back(w, c);
    }
    for (const auto& [w, c] : top) {
      std::vector<int> exps(vars, 0);
      for (int a : w) exps[a] += 1;
      out.add_term(exps, c);
      work.erase(w);
      if (d < 2) continue;
      UEAElement s = sym_word(g, e.flag(), cap, w, cache);
      for (const auto& [w2, c2] : s.terms()) {
        if (w2 == w) continue;  // cancels exactly against the pinned leading term
        auto& slot = work[w2];
        slot -= c * c2;
        if (slot.is_zero()) work.erase(w2);
      }
    }
  }
  return out;
}

Polynomial gutt_star(const LieAlgebra& g, const Polynomial& f, const Polynomial& h)
{
  if (f.vars() != h.vars()) throw std::domain_error("variable-count mismatch in star product");
  if (f.vars() != g.dim()) throw std::domain_error("star product needs dim-many variables");
  UEAElement a = symmetrize(g, f, Deformation::quantum);
  UEAElement b = symmetrize(g, h, Deformation::quantum);
  return unsymmetrize(uea_multiply(a, b));
}

Polynomial kirillov_bracket(const LieAlgebra& g, const Polynomial& f, const Polynomial& h)
{
  if (f.vars() != h.vars()) throw std::domain_error("variable-count mismatch in bracket");
  if (f.vars() != g.dim()) throw std::domain_error("bracket needs dim-many variables");
  const int vars = f.vars();
  const int cap = std::max(f.max_degree_cap(), h.max_degree_cap());
  Polynomial out(vars, cap);
  for (const auto& [a, b, c, val] : g.f_entries()) {
    Polynomial t = f.derivative(a) * h.derivative(b) - f.derivative(b) * h.derivative(a);
    if (t.is_zero()) continue;
    out += (Polynomial::variable(vars, c, cap) * t).scaled(HPoly(val));
  }
  return out;
}

Polynomial moyal_star(const Polynomial& f, const Polynomial& h, const Eigen::MatrixXd& omega)
{
  if (f.vars() != h.vars()) throw std::domain_error("variable-count mismatch in star product");
  const int v = f.vars();
  if (omega.rows() != v || omega.cols() != v) throw std::domain_error("structure matrix has wrong size");
  if ((omega + omega.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::domain_error("structure matrix must be antisymmetric");
  }

  static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  Polynomial out = f * h;
  std::vector<std::pair<Polynomial, Polynomial>> layer;
  layer.emplace_back(f, h);
  double kfact = 1.0;
  for (int k = 1; !layer.empty(); ++k) {
    std::vector<std::pair<Polynomial, Polynomial>> next;
    for (const auto& [F, H] : layer) {
      for (int j = 0; j < v; ++j) {
        Polynomial Fd = F.derivative(j);
        if (Fd.is_zero()) continue;
        for (int m = 0; m < v; ++m) {
          if (omega(j, m) == 0.0) continue;
          Polynomial Hd = H.derivative(m);
          if (Hd.is_zero()) continue;
          next.emplace_back(Fd.scaled(HPoly(omega(j, m))), Hd);
        }
      }
    }
    layer = std::move(next);
    kfact *= k;
    HPoly w = HPoly::hbar(k, ipow[k % 4] / kfact);
    for (const auto& [F, H] : layer) out += (F * H).scaled(w);
  }
  return out;
}

PolyMatrix::PolyMatrix(int rows, int cols, int vars, int max_degree)
    : m_rows(rows), m_cols(cols), m_vars(vars), m_cap(max_degree),
      m_cells(static_cast<size_t>(rows) * cols, Polynomial(vars, max_degree))
{
  if (rows < 1 || cols < 1) throw std::domain_error("matrix shape must be positive");
}

PolyMatrix PolyMatrix::identity(int d, int vars, int max_degree)
{
  PolyMatrix m(d, d, vars, max_degree);
  for (int i = 0; i < d; ++i) m.at(i, i) = Polynomial::constant(vars, HPoly(1.0), max_degree);
  return m;
}

Polynomial& PolyMatrix::at(int r, int c)
{
  if (r < 0 || r >= m_rows || c < 0 || c >= m_cols) throw std::domain_error("matrix index out of range");
  return m_cells[static_cast<size_t>(r) * m_cols + c];
}

const Polynomial& PolyMatrix::at(int r, int c) const
{
  if (r < 0 || r >= m_rows || c < 0 || c >= m_cols) throw std::domain_error("matrix index out of range");
  return m_cells[static_cast<size_t>(r) * m_cols + c];
}

PolyMatrix& PolyMatrix::operator+=(const PolyMatrix& o)
{
  if (m_rows != o.m_rows || m_cols != o.m_cols) throw std::domain_error("shape mismatch in matrix sum");
  if (m_vars != o.m_vars) throw std::domain_error("variable-count mismatch in matrix sum");
  m_cap = std::max(m_cap, o.m_cap);
  for (size_t i = 0; i < m_cells.size(); ++i) m_cells[i] += o.m_cells[i];
  return *this;
}

PolyMatrix PolyMatrix::scaled(const HPoly& s) const
{
  PolyMatrix out(m_rows, m_cols, m_vars, m_cap);
  for (size_t i = 0; i < m_cells.size(); ++i) out.m_cells[i] = m_cells[i].scaled(s);
  return out;
}

PolyMatrix PolyMatrix::truncate_hbar(int K) const
{
  PolyMatrix out(m_rows, m_cols, m_vars, m_cap);
  for (size_t i = 0; i < m_cells.size(); ++i) out.m_cells[i] = m_cells[i].truncate_hbar(K);
  return out;
}

std::vector<Matrix> PolyMatrix::evaluate_graded(const Eigen::VectorXd& x, int max_hbar) const
{
  if (max_hbar < 0) throw std::domain_error("negative truncation order");
  std::vector<Matrix> out(max_hbar + 1, Matrix::Zero(m_rows, m_cols));
  for (int r = 0; r < m_rows; ++r) {
    for (int c = 0; c < m_cols; ++c) {
      HPoly v = at(r, c).evaluate(x);
      for (int k = 0; k <= std::min(max_hbar, v.degree()); ++k) out[k](r, c) = v.coeff(k);
    }
  }
  return out;
}

double PolyMatrix::max_abs() const
{
  double m = 0.0;
  for (const auto& c : m_cells) m = std::max(m, c.max_abs());
  return m;
}

bool PolyMatrix::approx_equal(const PolyMatrix& o, double tol) const
{
  if (m_rows != o.m_rows || m_cols != o.m_cols || m_vars != o.m_vars) return false;
  for (size_t i = 0; i < m_cells.size(); ++i) {
    if (!m_cells[i].approx_equal(o.m_cells[i], tol)) return false;
  }
  return true;
}

PolyMatrix poly_matrix_multiply(const PolyMatrix& F, const PolyMatrix& G, ProductMode mode,
                                const LieAlgebra* g)
{
  if (F.cols() != G.rows()) throw std::domain_error("shape mismatch in matrix product");
  if (F.vars() != G.vars()) throw std::domain_error("variable-count mismatch in matrix product");
  if (mode == ProductMode::star) {
    if (g == nullptr) throw std::domain_error("star mode needs the algebra");
    if (g->dim() != F.vars()) throw std::domain_error("star mode variable count must equal the algebra dimension");
  }
  const int cap = std::max(F.max_degree_cap(), G.max_degree_cap());
  PolyMatrix out(F.rows(), G.cols(), F.vars(), cap);
  for (int r = 0; r < F.rows(); ++r) {
    for (int c = 0; c < G.cols(); ++c) {
      Polynomial acc(F.vars(), cap);
      for (int m = 0; m < F.cols(); ++m) {
        const Polynomial& A = F.at(r, m);
        const Polynomial& B = G.at(m, c);
        if (A.is_zero() || B.is_zero()) continue;
        acc += (mode == ProductMode::pointwise) ? A * B : gutt_star(*g, A, B);
      }
      out.at(r, c) = std::move(acc);
    }
  }
  return out;
}

PolyMatrix realize_generator(const LieAlgebra& g, int a, int max_degree)
{
  if (a < 0 || a >= g.dim()) throw std::domain_error("generator index out of range");
  const int d = g.rep_dim();
  PolyMatrix out(d, d, g.dim(), max_degree);
  const Matrix& T = g.basis(a);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (T(r, c) != cplx(0.0, 0.0)) {
        out.at(r, c) = Polynomial::variable(g.dim(), a, max_degree).scaled(HPoly(T(r, c)));
      }
    }
  }
  return out;
}

PolyMatrix realize(const LieAlgebra& g, const UEAElement& e)
{
  if (e.flag() != Deformation::classical) {
    throw std::domain_error("realisation takes classical elements; quantum ones go through the star product");
  }
  if (e.algebra().dim() != g.dim()) throw std::domain_error("algebra mismatch in realisation");
  const int d = g.rep_dim();
  const int cap = e.max_degree_cap();
  PolyMatrix out(d, d, g.dim(), cap);
  for (const auto& [w, c] : e.terms()) {
    PolyMatrix m = PolyMatrix::identity(d, g.dim(), cap);
    for (int a : w) m = poly_matrix_multiply(m, realize_generator(g, a, cap), ProductMode::pointwise);
    out += m.scaled(c);
  }
  return out;
}

}  // namespace liebrane
