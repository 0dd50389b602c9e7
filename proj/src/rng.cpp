#include "hlevy/rng.hpp"

#include <array>
#include <cmath>

namespace hlevy {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return mix64(mix64(master_seed) ^ mix64(path_index + 0x632be59bd9b4e019ULL));
}

Rng make_rng(std::uint64_t master_seed, std::uint64_t path_index, Stream stream) {
  const std::uint64_t base = path_seed(master_seed, path_index);
  const std::uint64_t s = mix64(base ^ mix64(static_cast<std::uint64_t>(stream)));
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                    static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
  return Rng(seq);
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

double uniform01(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng);
}

Eigen::VectorXcd uniform_sphere_vector(Eigen::Index d, Rng& rng) {
  Eigen::VectorXcd u(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = standard_normal(rng);
      const double im = standard_normal(rng);
      u[i] = {re, im};
    }
    const double n = u.norm();
    if (n > 0.0) return u / n;
  }
}

}  // namespace hlevy
