#include "pglab/rng.hpp"

namespace pglab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t component : path) {
    h = mix64(h ^ mix64(component + 0x632be59bd9b4e019ULL));
  }
  return h;
}

Eigen::VectorXd RandomStream::gaussian(const Eigen::VectorXd& std_per_dim) {
  Eigen::VectorXd out(std_per_dim.size());
  for (Eigen::Index i = 0; i < std_per_dim.size(); ++i) {
    out[i] = std_per_dim[i] * normal();
  }
  return out;
}

Eigen::VectorXd RandomStream::gaussian(int dim, double std) {
  Eigen::VectorXd out(dim);
  for (int i = 0; i < dim; ++i) {
    out[i] = std * normal();
  }
  return out;
}

Eigen::VectorXd RandomStream::unit_sphere(int dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) {
      v[i] = normal();
    }
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

}  // namespace pglab
