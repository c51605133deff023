#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "coopinit/errors.hpp"
#include "coopinit/rng.hpp"

namespace coopinit {

enum class DatasetKind { kGaussianRing, kGaussianGrid, kGaussianLine1d };

// Parametric equal-weight Gaussian mixture with known mode centers and an
// exact density. Ring and grid are 2D; the line is 1D.
struct DatasetSpec {
  DatasetKind kind = DatasetKind::kGaussianRing;
  int modes = 8;        // ring / line component count
  double radius = 2.0;  // ring radius
  int rows = 0;         // grid rows
  int cols = 0;         // grid cols
  double spacing = 0.0; // grid / line spacing between adjacent centers
  double sigma = 0.05;
  std::uint64_t seed = 0;

  int dim() const {
    return kind == DatasetKind::kGaussianLine1d ? 1 : 2;
  }
  int mode_count() const {
    return kind == DatasetKind::kGaussianGrid ? rows * cols : modes;
  }
  void validate() const;

  static DatasetSpec ring(int k, double radius, double sigma,
                          std::uint64_t seed = 0);
  static DatasetSpec grid(int rows, int cols, double spacing, double sigma,
                          std::uint64_t seed = 0);
  static DatasetSpec line_1d(int k, double spacing, double sigma,
                             std::uint64_t seed = 0);
  // The flagship 2D target: 8 Gaussians on a radius-2 ring, sigma 0.05.
  static DatasetSpec canonical_ring(std::uint64_t seed = 0) {
    return ring(8, 2.0, 0.05, seed);
  }
};

// Ordered list of component centers, one row per mode.
Eigen::MatrixXd mode_centers(const DatasetSpec& spec);

// n i.i.d. mixture draws; deterministic given the rng state.
Eigen::MatrixXd sample_batch(const DatasetSpec& spec, int n, Rng& rng);

// Exact log mixture density at x.
double log_density(const DatasetSpec& spec, const Eigen::VectorXd& x);

}  // namespace coopinit
