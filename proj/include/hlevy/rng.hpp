#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace hlevy {

using Rng = std::mt19937_64;

/// Independent sub-streams of one path.
enum class Stream : std::uint64_t {
  kJumps = 1,
  kGaussian = 2,
  kCompensator = 3,
  kAuxiliary = 4,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Generator for (master_seed, path_index, stream). Seeds are derived by
/// hashing the triple, so any path can be regenerated without replaying the
/// ones before it.
Rng make_rng(std::uint64_t master_seed, std::uint64_t path_index, Stream stream);

/// Seed recorded in run manifests for a path.
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index);

double standard_normal(Rng& rng);
double uniform01(Rng& rng);

/// Uniform unit vector in C^d (normalized standard complex Gaussian).
Eigen::VectorXcd uniform_sphere_vector(Eigen::Index d, Rng& rng);

}  // namespace hlevy
