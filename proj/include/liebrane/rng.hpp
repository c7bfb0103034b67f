#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace liebrane {

/// Seeded generator with a fixed bit-level mapping to doubles, so runs with
/// the same seed reproduce byte-identical numbers on any standard library.
class Rng
{
public:
  explicit Rng(uint64_t seed) : m_eng(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(m_eng() >> 11) * 0x1.0p-53; }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  uint64_t raw() { return m_eng(); }

  /// Random element coordinates with unit Euclidean norm.
  Eigen::VectorXd unit_vector(int dim)
  {
    Eigen::VectorXd v(dim);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = symmetric();
      norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
  }

private:
  std::mt19937_64 m_eng;
};

}  // namespace liebrane
