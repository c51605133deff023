#include "coopinit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "coopinit/errors.hpp"

namespace coopinit {

int default_min_count(int n_samples, int modes_total) {
  return std::max(1, n_samples / (10 * std::max(1, modes_total)));
}

CoverageReport mode_coverage(const Eigen::MatrixXd& samples,
                             const Eigen::MatrixXd& centers, double sigma,
                             double threshold_k, int min_count) {
  if (samples.rows() == 0) {
    throw ContractError("mode_coverage: samples must be non-empty");
  }
  if (samples.cols() != centers.cols()) {
    throw ShapeError("mode_coverage: samples and centers dimensions differ");
  }
  const int n = static_cast<int>(samples.rows());
  const int k = static_cast<int>(centers.rows());
  if (min_count <= 0) min_count = default_min_count(n, k);
  const double radius = threshold_k * sigma;
  const double radius_sq = radius * radius;

  CoverageReport report;
  report.modes_total = k;
  report.per_mode_counts.assign(k, 0);
  int hq = 0;
  for (int i = 0; i < n; ++i) {
    int nearest = 0;
    double best = (samples.row(i) - centers.row(0)).squaredNorm();
    for (int j = 1; j < k; ++j) {
      const double d2 = (samples.row(i) - centers.row(j)).squaredNorm();
      if (d2 < best) {
        best = d2;
        nearest = j;
      }
    }
    if (best <= radius_sq) {
      ++hq;
      ++report.per_mode_counts[nearest];
    }
  }
  report.high_quality_fraction = double(hq) / double(n);
  for (int j = 0; j < k; ++j) {
    if (report.per_mode_counts[j] >= min_count) ++report.modes_covered;
  }
  return report;
}

namespace {

// Mean pairwise distance over all ordered pairs of rows of a and b.
double mean_cross_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index na = a.rows(), nb = b.rows(), d = a.cols();
  double acc = 0.0;
  if (d == 1) {
    for (Eigen::Index i = 0; i < na; ++i) {
      const double ai = a(i, 0);
      for (Eigen::Index j = 0; j < nb; ++j) {
        acc += std::abs(ai - b(j, 0));
      }
    }
  } else if (d == 2) {
    for (Eigen::Index i = 0; i < na; ++i) {
      const double x0 = a(i, 0), x1 = a(i, 1);
      for (Eigen::Index j = 0; j < nb; ++j) {
        const double d0 = x0 - b(j, 0), d1 = x1 - b(j, 1);
        acc += std::sqrt(d0 * d0 + d1 * d1);
      }
    }
  } else {
    for (Eigen::Index i = 0; i < na; ++i) {
      for (Eigen::Index j = 0; j < nb; ++j) {
        acc += (a.row(i) - b.row(j)).norm();
      }
    }
  }
  return acc / double(na) / double(nb);
}

}  // namespace

EnergyDistanceReport energy_distance(const Eigen::MatrixXd& x_samples,
                                     const Eigen::MatrixXd& y_samples) {
  if (x_samples.rows() == 0 || y_samples.rows() == 0) {
    throw ContractError("energy_distance: both sample sets must be non-empty");
  }
  if (x_samples.cols() != y_samples.cols()) {
    throw ShapeError("energy_distance: sample dimensions differ");
  }
  EnergyDistanceReport report;
  report.n_x = static_cast<int>(x_samples.rows());
  report.n_y = static_cast<int>(y_samples.rows());
  report.value = 2.0 * mean_cross_distance(x_samples, y_samples) -
                 mean_cross_distance(x_samples, x_samples) -
                 mean_cross_distance(y_samples, y_samples);
  return report;
}

}  // namespace coopinit
