#include "slantmap/sampling.hpp"

#include <stdexcept>

namespace slantmap {

Box Box::cube(int dim, double lo, double hi) {
  Box b;
  b.bounds.assign(static_cast<std::size_t>(dim), {lo, hi});
  return b;
}

bool Box::contains(const Eigen::VectorXd& p) const {
  if (p.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i)
    if (p[i] < bounds[i][0] || p[i] > bounds[i][1]) return false;
  return true;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

double Sampler::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Eigen::VectorXd Sampler::point_in(const Box& box) {
  Eigen::VectorXd p(box.dim());
  for (int i = 0; i < box.dim(); ++i) p[i] = uniform(box.bounds[i][0], box.bounds[i][1]);
  return p;
}

Eigen::VectorXd Sampler::unit_vector(const InnerProduct& ip) {
  for (;;) {
    Eigen::VectorXd v(ip.dim());
    for (int i = 0; i < ip.dim(); ++i) v[i] = uniform(-1.0, 1.0);
    const double r = ip.norm(v);
    if (r > 1e-3) return v / r;
  }
}

Eigen::VectorXd Sampler::unit_vector_in(const SubspaceBasis& basis) {
  if (basis.size() == 0) throw std::invalid_argument("unit_vector_in: empty basis");
  for (;;) {
    Eigen::VectorXd c(basis.size());
    for (int i = 0; i < basis.size(); ++i) c[i] = uniform(-1.0, 1.0);
    const double r = c.norm();
    if (r > 1e-3) return basis.columns * (c / r);
  }
}

std::vector<Eigen::VectorXd> sample_points(const Box& box, int count, std::uint64_t seed) {
  Sampler s(mix_seed(seed, 0x706f696e74ULL));
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) pts.push_back(s.point_in(box));
  return pts;
}

}  // namespace slantmap
