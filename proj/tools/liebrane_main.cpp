#include "liebrane/branes.hpp"
#include "liebrane/cocycle.hpp"
#include "liebrane/dynamics.hpp"
#include "liebrane/io.hpp"
#include "liebrane/lie_core.hpp"
#include "liebrane/rng.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace liebrane;

constexpr int kExitSuccess = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumericalAbort = 3;

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::domain_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

UEAElement random_word_element(Rng& rng, const LieAlgebra& g, int max_deg, int terms)
{
  std::vector<std::pair<Word, HPoly>> raw;
  for (int t = 0; t < terms; ++t) {
    int deg = 1 + static_cast<int>(rng.raw() % max_deg);
    Word w(deg);
    for (int& a : w) a = static_cast<int>(rng.raw() % g.dim());
    raw.emplace_back(w, HPoly(cplx(rng.symmetric(), 0.0)));
  }
  return UEAElement::from_words(g, raw, Deformation::classical);
}

Polynomial random_polynomial(Rng& rng, int vars, int max_deg, int terms, int cap)
{
  Polynomial p(vars, cap);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> exps(vars, 0);
    int deg = static_cast<int>(rng.raw() % (max_deg + 1));
    for (int d = 0; d < deg; ++d) exps[rng.raw() % vars] += 1;
    p.add_term(exps, HPoly(cplx(rng.symmetric(), 0.0)));
  }
  return p;
}

double max_coeff_diff(const UEAElement& a, const UEAElement& b)
{
  UEAElement d = a - b;
  return d.max_abs();
}

double scale_of(const UEAElement& a)
{
  return std::max(1.0, a.max_abs());
}

struct CheckResult
{
  std::string what;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

CheckResult run_check(const std::string& what, int n, uint64_t seed, std::optional<double> tol_override,
                      bool corrupt_tensor)
{
  CheckResult res;
  res.what = what;

  LieAlgebra g = LieAlgebra::build_su(n);

  if (what == "jacobi") {
    res.tolerance = tol_override.value_or(1e-10);
    res.residual = g.jacobi_residual();
  } else if (what == "gji") {
    res.tolerance = tol_override.value_or(1e-8);
    const int order = 2 * g.n() - 1 <= 5 ? 2 * g.n() - 1 : 5;
    MultibracketTensor t = MultibracketTensor::build(Cocycle::build(g, order));
    if (corrupt_tensor) t.zero_first_entry();
    res.residual = t.gji_residual(20, seed);
  } else if (what == "pbw") {
    res.tolerance = tol_override.value_or(1e-12);
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::pair<Word, HPoly>> raw;
      for (int t = 0; t < 3; ++t) {
        int deg = 1 + static_cast<int>(rng.raw() % 5);
        Word w(deg);
        for (int& a : w) a = static_cast<int>(rng.raw() % g.dim());
        raw.emplace_back(w, HPoly(cplx(rng.symmetric(), rng.symmetric())));
      }
      UEAElement left = UEAElement::from_words(g, raw, Deformation::quantum, RewriteStrategy::leftmost);
      UEAElement right = UEAElement::from_words(g, raw, Deformation::quantum, RewriteStrategy::rightmost);
      worst = std::max(worst, max_coeff_diff(left, right) / scale_of(left));
    }
    res.residual = worst;
  } else if (what == "star-assoc") {
    res.tolerance = tol_override.value_or(1e-12);
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      Polynomial f = random_polynomial(rng, g.dim(), 3, 2, 12);
      Polynomial p = random_polynomial(rng, g.dim(), 3, 2, 12);
      Polynomial q = random_polynomial(rng, g.dim(), 3, 2, 12);
      Polynomial inner_left = gutt_star(g, f, p);
      Polynomial inner_right = gutt_star(g, p, q);
      Polynomial left = gutt_star(g, inner_left, q);
      Polynomial right = gutt_star(g, f, inner_right);
      Polynomial diff = left - right;
      // roundoff accrues on the ordered-word coefficients inside the star
      // pipeline, which can sit orders of magnitude above the final
      // polynomial after cancellation; they set the scale of "equal"
      auto sym_q = symmetrize(g, q, Deformation::quantum);
      auto sym_f = symmetrize(g, f, Deformation::quantum);
      double grown =
          std::max(uea_multiply(symmetrize(g, inner_left, Deformation::quantum), sym_q).max_abs(),
                   uea_multiply(sym_f, symmetrize(g, inner_right, Deformation::quantum)).max_abs());
      double scale = std::max({1.0, left.max_abs(), grown});
      worst = std::max(worst, diff.max_abs() / scale);
    }
    res.residual = worst;
  } else if (what == "correspondence") {
    res.tolerance = tol_override.value_or(1e-10);
    Rng rng(seed);
    MultibracketTensor t = MultibracketTensor::build(Cocycle::build(g, 3));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(g.dim());
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      UEAElement a = random_word_element(rng, g, 3, 2);
      UEAElement b = random_word_element(rng, g, 3, 2);
      UEAElement br = leibniz_multibracket(t, {a, b});
      Matrix lhs = realize(g, br).evaluate_graded(ones, 0)[0];
      Matrix ma = realize(g, a).evaluate_graded(ones, 0)[0];
      Matrix mb = realize(g, b).evaluate_graded(ones, 0)[0];
      Matrix rhs = ma * mb - mb * ma;
      double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / scale);
    }
    res.residual = worst;
  } else {
    throw std::domain_error("unknown check \"" + what + "\"");
  }

  res.pass = res.residual < res.tolerance;
  return res;
}

std::string check_json(const CheckResult& res, int n, uint64_t seed)
{
  std::string out = "{\n  \"check\": \"" + res.what + "\",\n  \"n\": " + std::to_string(n);
  out += ",\n  \"seed\": " + std::to_string(seed);
  out += ",\n  \"residual\": " + format_double(res.residual);
  out += ",\n  \"tolerance\": " + format_double(res.tolerance);
  out += ",\n  \"pass\": " + std::string(res.pass ? "true" : "false") + "\n}\n";
  return out;
}

/// Grade-0 end-state error against an h/4 reference, at h and h/2; their
/// ratio sits near 16 in the fourth-order window.
std::optional<double> order_check_ratio(const FlowProblem& flow, const Matrix& F0, double T, double h)
{
  if (!(T > 0.0) || !(h > 0.0) || T / h > 40000.0) return std::nullopt;
  Trajectory full = flow.run_classical(F0, T, h);
  Trajectory half = flow.run_classical(F0, T, h / 2.0);
  Trajectory quarter = flow.run_classical(F0, T, h / 4.0);
  if (full.aborted || half.aborted || quarter.aborted) return std::nullopt;
  const Matrix& ref = quarter.states.back()[0];
  double err_full = (full.states.back()[0] - ref).cwiseAbs().maxCoeff();
  double err_half = (half.states.back()[0] - ref).cwiseAbs().maxCoeff();
  // below the roundoff floor the quotient is noise, not an order estimate
  if (err_half < 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff())) return std::nullopt;
  return err_full / err_half;
}

int cmd_algebra(int n, const std::string& out_path)
{
  LieAlgebra g = LieAlgebra::build_su(n);
  atomic_write_file(out_path, algebra_json(g));
  std::printf("algebra su(%d): dim %d written to %s\n", n, g.dim(), out_path.c_str());
  return kExitSuccess;
}

int cmd_cocycle(int n, int order, const std::string& out_path)
{
  LieAlgebra g = LieAlgebra::build_su(n);
  Cocycle c = Cocycle::build(g, order);
  atomic_write_file(out_path, cocycle_json(c));
  std::printf("cocycle order %d on su(%d): %zu entries written to %s\n", order, n, c.entries().size(),
              out_path.c_str());
  return kExitSuccess;
}

int cmd_check(const std::string& what, int n, uint64_t seed, std::optional<double> tol,
              const std::string& out_path, bool corrupt_tensor)
{
  CheckResult res = run_check(what, n, seed, tol, corrupt_tensor);
  const std::string report = check_json(res, n, seed);
  if (!out_path.empty()) atomic_write_file(out_path, report);
  std::fputs(report.c_str(), stdout);
  return res.pass ? kExitSuccess : kExitPropertyFailure;
}

int cmd_evolve(const std::string& scenario_path, std::string out_prefix, int max_degree)
{
  Scenario sc = parse_scenario(read_file(scenario_path));
  LieAlgebra g = LieAlgebra::build_su(sc.n);
  RootSystem rs = RootSystem::build(g);
  FlowProblem flow = orientation_flows(g, rs, sc.orientation);

  Matrix F0 = sc.f0_seeded ? seeded_initial_state(g, sc.f0_seed) : sc.F0;
  if (F0.rows() != g.n() || F0.cols() != g.n())
    throw std::domain_error("scenario F0 must be " + std::to_string(g.n()) + "x" + std::to_string(g.n()));

  if (out_prefix.empty())
    out_prefix = "evolve_" + std::string(sc.orientation == Orientation::plus ? "plus" : "minus");

  Trajectory tr;
  if (sc.hbar_truncation == 0) {
    tr = flow.run_classical(F0, sc.T, sc.h);
  } else {
    tr = flow.run_quantum(polymatrix_from_matrix(g, F0, max_degree), sc.T, sc.h, sc.hbar_truncation,
                          max_degree);
  }

  // run the ratio at a coarse step so truncation error stays above the
  // roundoff floor; at the run's own h the quotient can be pure noise
  std::optional<double> ratio = order_check_ratio(flow, F0, sc.T, std::max(sc.h, sc.T / 128.0));
  atomic_write_file(out_prefix + "_trajectory.csv", trajectory_csv(tr));
  atomic_write_file(out_prefix + "_summary.json", summary_json(tr, ratio));

  if (tr.aborted) {
    std::fprintf(stderr, "flow aborted at t = %s: %s (last good state written)\n",
                 format_double(tr.abort_time).c_str(), tr.abort_reason.c_str());
    return kExitNumericalAbort;
  }
  std::printf("evolved %zu steps to t = %s; outputs %s_trajectory.csv, %s_summary.json\n",
              tr.times.size() - 1, format_double(tr.times.back()).c_str(), out_prefix.c_str(),
              out_prefix.c_str());
  return kExitSuccess;
}

int cmd_branes(const std::string& scenario_path, const std::string& out_path)
{
  Scenario sc = parse_scenario(read_file(scenario_path));
  LieAlgebra g = LieAlgebra::build_su(sc.n);

  BraneStack stack;
  if (sc.positions.empty()) {
    stack = coincident_stack(g, 1);
  } else {
    stack.algebra = &g;
    stack.positions = sc.positions;
  }

  SymmetryReport rep = analyze_stack(stack);
  std::vector<StringRecord> strings = string_spectrum(stack);
  atomic_write_file(out_path, symmetry_json(rep, strings));

  std::string factors;
  for (int m : rep.su_factors) factors += "su(" + std::to_string(m) + ") + ";
  std::printf("unbroken symmetry: %su(1)^%d, dimension %d; report written to %s\n", factors.c_str(),
              rep.u1_count, rep.unbroken_dimension, out_path.c_str());
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"su(n) higher-bracket toolkit: algebras, cocycles, flows, brane scenarios"};
  app.require_subcommand(1);

  int n = 2;
  int order = 3;
  uint64_t seed = 42;
  int max_degree = 12;
  std::string what;
  std::string out_path;
  std::string scenario_path;
  double tol = -1.0;
  bool corrupt_tensor = false;

  CLI::App* algebra = app.add_subcommand("algebra", "dump generators and structure constants as JSON");
  algebra->add_option("--n", n, "rank parameter of su(n)")->required();
  algebra->add_option("--out", out_path, "output path (default algebra_su<n>.json)");

  CLI::App* cocycle = app.add_subcommand("cocycle", "emit an odd cocycle as sparse JSON");
  cocycle->add_option("--n", n, "rank parameter of su(n)")->required();
  cocycle->add_option("--order", order, "cocycle order (odd, 3..2n-1)")->required();
  cocycle->add_option("--out", out_path, "output path (default cocycle_su<n>_w<order>.json)");

  CLI::App* check = app.add_subcommand("check", "run a property check and report the residual");
  check->add_option("--n", n, "rank parameter of su(n)")->required();
  check->add_option("--what", what, "jacobi | gji | pbw | star-assoc | correspondence")->required();
  check->add_option("--seed", seed, "random seed (default 42)");
  check->add_option("--tol", tol, "tolerance override");
  check->add_option("--out", out_path, "also write the report JSON here");
  check->add_flag("--corrupt-tensor", corrupt_tensor, "corrupt the bracket tensor first (gji only)");

  CLI::App* evolve = app.add_subcommand("evolve", "integrate an orientation flow from a scenario file");
  evolve->add_option("--scenario", scenario_path, "scenario JSON path")->required();
  evolve->add_option("--out", out_path, "output prefix (default evolve_<orientation>)");
  evolve->add_option("--max-degree", max_degree, "word-degree cap for quantum runs");

  CLI::App* branes = app.add_subcommand("branes", "report surviving symmetry and string spectrum");
  branes->add_option("--scenario", scenario_path, "scenario JSON path")->required();
  branes->add_option("--out", out_path, "output path (default branes_report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (algebra->parsed()) {
      if (out_path.empty()) out_path = "algebra_su" + std::to_string(n) + ".json";
      return cmd_algebra(n, out_path);
    }
    if (cocycle->parsed()) {
      if (out_path.empty())
        out_path = "cocycle_su" + std::to_string(n) + "_w" + std::to_string(order) + ".json";
      return cmd_cocycle(n, order, out_path);
    }
    if (check->parsed()) {
      std::optional<double> tol_opt;
      if (tol > 0.0) tol_opt = tol;
      return cmd_check(what, n, seed, tol_opt, out_path, corrupt_tensor);
    }
    if (evolve->parsed()) return cmd_evolve(scenario_path, out_path, max_degree);
    if (branes->parsed()) {
      if (out_path.empty()) out_path = "branes_report.json";
      return cmd_branes(scenario_path, out_path);
    }
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
