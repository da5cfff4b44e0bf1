#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "qpgm/encoding.hpp"
#include "qpgm/pgm.hpp"

namespace qpgm::test {

inline Vector random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  Vector v(static_cast<Eigen::Index>(dim));
  do {
    for (auto& x : v) x = g(rng);
  } while (v.norm() < 1e-6);
  return v / v.norm();
}

/// m states of dimension d spread over l classes, every class non-empty.
inline LabeledStateSet random_ensemble(std::mt19937_64& rng, std::size_t l, std::size_t d, std::size_t m) {
  std::vector<PureState> states;
  std::vector<ClassId> labels;
  for (std::size_t j = 0; j < m; ++j) {
    states.emplace_back(random_unit(rng, d));
    labels.push_back(j < l ? j : static_cast<ClassId>(rng() % l));
  }
  return LabeledStateSet(std::move(states), std::move(labels), l);
}

struct Blobs {
  std::vector<FeatureVector> rows;
  std::vector<ClassId> labels;
};

/// Isotropic unit-variance Gaussian blobs. Centers sit on a regular polygon in
/// the first two coordinates, adjacent centers `separation` apart (all pairs for
/// three classes or fewer). Requires dim >= 2.
inline Blobs gaussian_blobs(std::uint64_t seed, std::size_t per_class, std::size_t classes, double separation,
                            std::size_t dim = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const double pi = std::acos(-1.0);
  const double radius = separation / (2.0 * std::sin(pi / static_cast<double>(classes)));
  std::vector<Vector> centers;
  for (std::size_t c = 0; c < classes; ++c) {
    const double angle = 2.0 * pi * static_cast<double>(c) / static_cast<double>(classes);
    Vector e = Vector::Zero(static_cast<Eigen::Index>(dim));
    e[0] = radius * std::cos(angle);
    e[1] = radius * std::sin(angle);
    centers.push_back(e);
  }
  Blobs out;
  for (std::size_t i = 0; i < per_class * classes; ++i) {
    const std::size_t c = i % classes;
    Vector x(static_cast<Eigen::Index>(dim));
    for (auto& v : x) v = g(rng);
    out.rows.push_back(centers[c] + x);
    out.labels.push_back(c);
  }
  return out;
}

class TempDir {
public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("qpgm-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

}  // namespace qpgm::test
