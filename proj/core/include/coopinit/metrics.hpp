#pragma once

#include <vector>

#include <Eigen/Core>

namespace coopinit {

// Mode-coverage summary: a sample is high quality when it falls within
// threshold_k * sigma of its nearest center; a mode counts as covered
// when it attracts at least min_count high-quality samples.
struct CoverageReport {
  int modes_total = 0;
  int modes_covered = 0;
  double high_quality_fraction = 0.0;
  std::vector<int> per_mode_counts;
};

int default_min_count(int n_samples, int modes_total);

// min_count == 0 selects the default max(1, n / (10 * modes)).
CoverageReport mode_coverage(const Eigen::MatrixXd& samples,
                             const Eigen::MatrixXd& centers, double sigma,
                             double threshold_k = 3.0, int min_count = 0);

// Energy distance between two empirical distributions, computed with the
// exact all-pairs V-statistic:
//   2 E||X - Y|| - E||X - X'|| - E||Y - Y'||.
struct EnergyDistanceReport {
  double value = 0.0;
  int n_x = 0;
  int n_y = 0;
};

EnergyDistanceReport energy_distance(const Eigen::MatrixXd& x_samples,
                                     const Eigen::MatrixXd& y_samples);

}  // namespace coopinit
