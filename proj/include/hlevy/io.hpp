#pragma once

#include <string>
#include <vector>

#include "hlevy/path_synthesis.hpp"
#include "hlevy/spectral_tracking.hpp"

namespace hlevy {

/// Shortest form is not required; 17 significant digits always round-trip.
std::string format_double(double v);

/// Header line carrying the config echo.
std::string config_header(const std::string& echo);

/// `t,c0..c{d²-1},is_jump`; at a jump time the pre-jump row (is_jump=0)
/// precedes the post-jump row (is_jump=1).
std::string path_csv(const SamplePath& path, const std::string& echo);

/// `t,lambda_1..lambda_d,min_gap,is_jump,is_pre`.
std::string eigen_csv(const EigenPath& eigen, const SamplePath& path, const std::string& echo);

struct PathFile {
  std::string echo;
  SamplePath path;  // states, points and jumps; Gaussian increments are not stored
};

/// Parses a path file written by path_csv. Grid indices are recovered from
/// t_max/steps. Throws ValidationError on malformed content.
PathFile read_path_csv(const std::string& text, double t_max, int steps);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

}  // namespace hlevy
