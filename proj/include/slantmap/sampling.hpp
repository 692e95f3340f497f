#pragma once

// Deterministic sampling. Only the raw 64-bit output of std::mt19937_64 is
// used (its sequence is fixed by the standard); the conversions to doubles
// are done here so reports do not depend on the standard library's
// distribution implementations.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "slantmap/metric_linalg.hpp"

namespace slantmap {

struct Box {
  std::vector<std::array<double, 2>> bounds;

  static Box cube(int dim, double lo = -1.0, double hi = 1.0);
  int dim() const { return static_cast<int>(bounds.size()); }
  bool contains(const Eigen::VectorXd& p) const;
};

/// Stateless mixing of a seed with stream identifiers (splitmix64).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Eigen::VectorXd point_in(const Box& box);
  /// Random vector with unit norm under ip.
  Eigen::VectorXd unit_vector(const InnerProduct& ip);
  /// Random unit vector (under the basis metric) inside span(basis).
  Eigen::VectorXd unit_vector_in(const SubspaceBasis& basis);

 private:
  std::mt19937_64 engine_;
};

std::vector<Eigen::VectorXd> sample_points(const Box& box, int count, std::uint64_t seed);

}  // namespace slantmap
