#pragma once

#include "liebrane/branes.hpp"
#include "liebrane/cocycle.hpp"
#include "liebrane/dynamics.hpp"
#include "liebrane/lie_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace liebrane {

/// Writes through a sibling temp file and renames, so readers never see a
/// partial file.
void atomic_write_file(const std::string& path, const std::string& content);

/// Shortest-round-trip decimal for a double; byte-stable across runs.
std::string format_double(double v);

std::string algebra_json(const LieAlgebra& g);
std::string cocycle_json(const Cocycle& c);

/// Flow request parsed from a scenario file.
struct Scenario
{
  int n = 0;
  std::vector<Eigen::VectorXd> positions;
  Orientation orientation = Orientation::plus;
  double T = 1.0;
  double h = 1e-2;
  int hbar_truncation = 0;
  Matrix F0;            // empty when seeded
  uint64_t f0_seed = 0; // used when F0 is empty
  bool f0_seeded = false;
};

Scenario parse_scenario(const std::string& json_text);

/// Random anti-Hermitian initial observable from the scenario seed.
Matrix seeded_initial_state(const LieAlgebra& g, uint64_t seed);

/// Linear matrix observable lifted back to a polynomial matrix through its
/// basis decomposition, so quantum runs can start from a plain matrix.
PolyMatrix polymatrix_from_matrix(const LieAlgebra& g, const Matrix& m, int max_degree = 12);

/// One row per recorded step: t, Re/Im of every graded state entry, then the
/// monitor columns; the header names everything.
std::string trajectory_csv(const Trajectory& tr);

/// { "conservation": {label: drift}, "order_check": ratio,
///   "residual_warnings": count } plus abort diagnostics when present.
std::string summary_json(const Trajectory& tr, std::optional<double> order_check);

std::string symmetry_json(const SymmetryReport& rep, const std::vector<StringRecord>& strings);

}  // namespace liebrane
