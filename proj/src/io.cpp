#include "liebrane/io.hpp"

#include "liebrane/rng.hpp"

#include "json.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace liebrane {

namespace {

using nlohmann::json;

void append_complex(std::string& out, const cplx& z)
{
  out += '[';
  out += format_double(z.real());
  out += ',';
  out += format_double(z.imag());
  out += ']';
}

std::string csv_safe(const std::string& name)
{
  std::string out = name;
  for (char& c : out)
    if (c == ',' || c == ' ') c = '_';
  return out;
}

Eigen::VectorXd parse_vector(const json& arr)
{
  Eigen::VectorXd v(arr.size());
  for (size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr.at(i).get<double>();
  return v;
}

Matrix parse_matrix(const json& rows)
{
  const int r = static_cast<int>(rows.size());
  if (r == 0) throw std::domain_error("scenario F0 matrix is empty");
  const int c = static_cast<int>(rows.at(0).size());
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    const json& row = rows.at(i);
    if (static_cast<int>(row.size()) != c) throw std::domain_error("scenario F0 matrix is ragged");
    for (int j = 0; j < c; ++j) {
      const json& cell = row.at(j);
      if (cell.is_number()) {
        m(i, j) = cplx(cell.get<double>(), 0.0);
      } else {
        if (cell.size() != 2) throw std::domain_error("scenario F0 entries need [re, im] pairs");
        m(i, j) = cplx(cell.at(0).get<double>(), cell.at(1).get<double>());
      }
    }
  }
  return m;
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& content)
{
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + std::strerror(errno));
  }
}

std::string format_double(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string algebra_json(const LieAlgebra& g)
{
  std::string out = "{\n  \"n\": " + std::to_string(g.n()) + ",\n  \"dim\": " + std::to_string(g.dim());
  out += ",\n  \"basis\": [";
  for (int a = 0; a < g.dim(); ++a) {
    if (a) out += ',';
    out += "\n    [";
    const Matrix& T = g.basis(a);
    for (int r = 0; r < T.rows(); ++r)
      for (int c = 0; c < T.cols(); ++c) {
        if (r || c) out += ',';
        append_complex(out, T(r, c));
      }
    out += ']';
  }
  out += "\n  ],\n  \"f\": [";
  bool first = true;
  for (const auto& [a, b, c, v] : g.f_entries()) {
    if (!first) out += ',';
    first = false;
    out += "\n    [" + std::to_string(a) + ',' + std::to_string(b) + ',' + std::to_string(c) + ',' +
           format_double(v) + ']';
  }
  out += "\n  ],\n  \"metric\": \"identity\"\n}\n";
  return out;
}

std::string cocycle_json(const Cocycle& c)
{
  std::string out = "{\n  \"order\": " + std::to_string(c.order()) + ",\n  \"entries\": [";
  bool first = true;
  for (const auto& [idx, v] : c.entries()) {
    if (!first) out += ',';
    first = false;
    out += "\n    [[";
    for (size_t i = 0; i < idx.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(idx[i]);
    }
    out += "]," + format_double(v) + ']';
  }
  out += "\n  ]\n}\n";
  return out;
}

Scenario parse_scenario(const std::string& json_text)
{
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::domain_error(std::string("scenario is not valid JSON: ") + e.what());
  }

  Scenario s;
  if (!root.contains("n")) throw std::domain_error("scenario needs an \"n\" field");
  s.n = root.at("n").get<int>();

  if (root.contains("positions")) {
    for (const json& row : root.at("positions")) s.positions.push_back(parse_vector(row));
    if (static_cast<int>(s.positions.size()) != s.n)
      throw std::domain_error("scenario positions must list one vector per brane");
    for (const auto& p : s.positions)
      if (p.size() != s.positions.front().size())
        throw std::domain_error("scenario position vectors differ in length");
  }

  if (root.contains("flow")) {
    const json& f = root.at("flow");
    if (f.contains("orientation")) {
      const std::string o = f.at("orientation").get<std::string>();
      if (o == "plus")
        s.orientation = Orientation::plus;
      else if (o == "minus")
        s.orientation = Orientation::minus;
      else
        throw std::domain_error("scenario orientation must be \"plus\" or \"minus\"");
    }
    if (f.contains("T")) s.T = f.at("T").get<double>();
    if (f.contains("h")) s.h = f.at("h").get<double>();
    if (f.contains("hbar_truncation")) s.hbar_truncation = f.at("hbar_truncation").get<int>();
  }

  if (root.contains("F0")) {
    const json& f0 = root.at("F0");
    if (f0.is_string()) {
      const std::string text = f0.get<std::string>();
      const std::string prefix = "random-seed:";
      if (text.rfind(prefix, 0) != 0)
        throw std::domain_error("scenario F0 string must look like \"random-seed:<int>\"");
      s.f0_seed = std::stoull(text.substr(prefix.size()));
      s.f0_seeded = true;
    } else {
      s.F0 = parse_matrix(f0);
    }
  } else {
    s.f0_seeded = true;
    s.f0_seed = 42;
  }
  return s;
}

Matrix seeded_initial_state(const LieAlgebra& g, uint64_t seed)
{
  Rng rng(seed);
  Matrix m = Matrix::Zero(g.n(), g.n());
  for (int a = 0; a < g.dim(); ++a) m += cplx(rng.symmetric(), 0.0) * g.basis(a);
  return m;
}

PolyMatrix polymatrix_from_matrix(const LieAlgebra& g, const Matrix& m, int max_degree)
{
  Decomposition dec = g.decompose(m);
  PolyMatrix out = PolyMatrix::identity(g.n(), g.dim(), max_degree).scaled(HPoly(dec.trace_part));
  for (int a = 0; a < g.dim(); ++a) {
    if (dec.coeffs[a] == cplx(0.0, 0.0)) continue;
    out = out + realize_generator(g, a, max_degree).scaled(HPoly(dec.coeffs[a]));
  }
  return out;
}

std::string trajectory_csv(const Trajectory& tr)
{
  std::string out = "t";
  const int grades = tr.hbar_order + 1;
  const Eigen::Index d = tr.states.empty() ? 0 : tr.states.front()[0].rows();

  for (int m = 0; m < grades; ++m) {
    const std::string prefix = m == 0 ? std::string("F") : "hbar" + std::to_string(m) + "_F";
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        const std::string cell = prefix + std::to_string(r) + std::to_string(c);
        out += ',' + cell + "_re," + cell + "_im";
      }
  }
  out += ",trace_re,trace_im,norm";
  for (Eigen::Index i = 0; i < d; ++i)
    out += ",eig" + std::to_string(i) + "_re,eig" + std::to_string(i) + "_im";
  for (const std::string& label : tr.ham_labels) {
    out += ",overlap_" + csv_safe(label) + "_re,overlap_" + csv_safe(label) + "_im";
    out += ",drift_" + csv_safe(label);
  }
  out += '\n';

  for (size_t s = 0; s < tr.times.size(); ++s) {
    out += format_double(tr.times[s]);
    for (int m = 0; m < grades; ++m) {
      const Matrix& F = tr.states[s][m];
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c) {
          out += ',' + format_double(F(r, c).real());
          out += ',' + format_double(F(r, c).imag());
        }
    }
    out += ',' + format_double(tr.traces[s].real());
    out += ',' + format_double(tr.traces[s].imag());
    out += ',' + format_double(tr.norms[s]);
    for (Eigen::Index i = 0; i < d; ++i) {
      out += ',' + format_double(tr.eigenvalues[s][i].real());
      out += ',' + format_double(tr.eigenvalues[s][i].imag());
    }
    for (size_t i = 0; i < tr.ham_labels.size(); ++i) {
      out += ',' + format_double(tr.overlaps[s][i].real());
      out += ',' + format_double(tr.overlaps[s][i].imag());
      out += ',' + format_double(tr.ham_drifts[s][i]);
    }
    out += '\n';
  }
  return out;
}

std::string summary_json(const Trajectory& tr, std::optional<double> order_check)
{
  std::string out = "{\n  \"conservation\": {";
  for (size_t i = 0; i < tr.ham_labels.size(); ++i) {
    if (i) out += ',';
    out += "\n    \"" + tr.ham_labels[i] + "\": " + format_double(tr.max_ham_drift(static_cast<int>(i)));
  }
  out += "\n  },\n  \"order_check\": ";
  out += order_check ? format_double(*order_check) : std::string("null");
  out += ",\n  \"residual_warnings\": " + std::to_string(tr.residual_warnings);
  if (tr.aborted) {
    out += ",\n  \"aborted\": true,\n  \"abort_time\": " + format_double(tr.abort_time);
    out += ",\n  \"abort_reason\": \"" + tr.abort_reason + "\"";
  }
  out += "\n}\n";
  return out;
}

std::string symmetry_json(const SymmetryReport& rep, const std::vector<StringRecord>& strings)
{
  auto root_list = [](const std::vector<Root>& roots) {
    std::string out = "[";
    for (size_t i = 0; i < roots.size(); ++i) {
      if (i) out += ',';
      out += "\n    {\"j\": " + std::to_string(roots[i].j) + ", \"k\": " + std::to_string(roots[i].k) + '}';
    }
    return out + (roots.empty() ? "]" : "\n  ]");
  };

  std::string out = "{\n  \"unbroken_roots\": " + root_list(rep.unbroken_roots);
  out += ",\n  \"broken_roots\": " + root_list(rep.broken_roots);
  out += ",\n  \"cartan_retained\": " + std::to_string(rep.cartan_retained);
  out += ",\n  \"su_factors\": [";
  for (size_t i = 0; i < rep.su_factors.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(rep.su_factors[i]);
  }
  out += "],\n  \"u1_count\": " + std::to_string(rep.u1_count);
  out += ",\n  \"unbroken_dimension\": " + std::to_string(rep.unbroken_dimension);
  out += ",\n  \"centralizer_dimension\": " + std::to_string(rep.centralizer_dimension);
  out += ",\n  \"centre_note\": \"" + rep.centre_note + "\"";
  out += ",\n  \"strings\": [";
  for (size_t i = 0; i < strings.size(); ++i) {
    if (i) out += ',';
    out += "\n    {\"j\": " + std::to_string(strings[i].j) + ", \"k\": " + std::to_string(strings[i].k);
    out += ", \"length\": " + format_double(strings[i].length);
    out += ", \"stretched\": " + std::string(strings[i].stretched ? "true" : "false") + '}';
  }
  out += strings.empty() ? "]" : "\n  ]";
  out += "\n}\n";
  return out;
}

}  // namespace liebrane
