#include "coopinit/datasets.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace coopinit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void DatasetSpec::validate() const {
  if (sigma <= 0.0) throw ContractError("DatasetSpec: sigma must be > 0");
  switch (kind) {
    case DatasetKind::kGaussianRing:
      if (modes < 1) throw ContractError("DatasetSpec: ring needs k >= 1");
      if (radius <= 0.0) throw ContractError("DatasetSpec: radius must be > 0");
      break;
    case DatasetKind::kGaussianGrid:
      if (rows < 1 || cols < 1) {
        throw ContractError("DatasetSpec: grid needs rows, cols >= 1");
      }
      if (spacing <= 0.0) {
        throw ContractError("DatasetSpec: spacing must be > 0");
      }
      break;
    case DatasetKind::kGaussianLine1d:
      if (modes < 1) throw ContractError("DatasetSpec: line needs k >= 1");
      if (spacing <= 0.0) {
        throw ContractError("DatasetSpec: spacing must be > 0");
      }
      break;
  }
}

DatasetSpec DatasetSpec::ring(int k, double radius, double sigma,
                              std::uint64_t seed) {
  DatasetSpec s;
  s.kind = DatasetKind::kGaussianRing;
  s.modes = k;
  s.radius = radius;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

DatasetSpec DatasetSpec::grid(int rows, int cols, double spacing, double sigma,
                              std::uint64_t seed) {
  DatasetSpec s;
  s.kind = DatasetKind::kGaussianGrid;
  s.modes = rows * cols;
  s.rows = rows;
  s.cols = cols;
  s.spacing = spacing;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

DatasetSpec DatasetSpec::line_1d(int k, double spacing, double sigma,
                                 std::uint64_t seed) {
  DatasetSpec s;
  s.kind = DatasetKind::kGaussianLine1d;
  s.modes = k;
  s.spacing = spacing;
  s.sigma = sigma;
  s.seed = seed;
  s.validate();
  return s;
}

Eigen::MatrixXd mode_centers(const DatasetSpec& spec) {
  spec.validate();
  Eigen::MatrixXd centers(spec.mode_count(), spec.dim());
  switch (spec.kind) {
    case DatasetKind::kGaussianRing:
      for (int j = 0; j < spec.modes; ++j) {
        const double angle = kTwoPi * j / spec.modes;
        centers(j, 0) = spec.radius * std::cos(angle);
        centers(j, 1) = spec.radius * std::sin(angle);
      }
      break;
    case DatasetKind::kGaussianGrid: {
      int idx = 0;
      for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
          centers(idx, 0) = (c - 0.5 * (spec.cols - 1)) * spec.spacing;
          centers(idx, 1) = (r - 0.5 * (spec.rows - 1)) * spec.spacing;
          ++idx;
        }
      }
      break;
    }
    case DatasetKind::kGaussianLine1d:
      for (int j = 0; j < spec.modes; ++j) {
        centers(j, 0) = (j - 0.5 * (spec.modes - 1)) * spec.spacing;
      }
      break;
  }
  return centers;
}

Eigen::MatrixXd sample_batch(const DatasetSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < 1) throw ContractError("sample_batch: n must be >= 1");
  const Eigen::MatrixXd centers = mode_centers(spec);
  const int k = static_cast<int>(centers.rows());
  const int d = spec.dim();
  Eigen::MatrixXd out(n, d);
  for (int i = 0; i < n; ++i) {
    const int mode = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    for (int j = 0; j < d; ++j) {
      out(i, j) = centers(mode, j) + spec.sigma * rng.normal();
    }
  }
  return out;
}

double log_density(const DatasetSpec& spec, const Eigen::VectorXd& x) {
  spec.validate();
  if (!x.allFinite()) throw NumericError("log_density: non-finite point");
  if (x.size() != spec.dim()) {
    throw ShapeError("log_density: point has dimension " +
                     std::to_string(x.size()) + ", expected " +
                     std::to_string(spec.dim()));
  }
  const Eigen::MatrixXd centers = mode_centers(spec);
  const int k = static_cast<int>(centers.rows());
  const double inv_two_var = 1.0 / (2.0 * spec.sigma * spec.sigma);

  double max_exponent = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd exponents(k);
  for (int j = 0; j < k; ++j) {
    const double sq = (x.transpose() - centers.row(j)).squaredNorm();
    exponents[j] = -sq * inv_two_var;
    max_exponent = std::max(max_exponent, exponents[j]);
  }
  double acc = 0.0;
  for (int j = 0; j < k; ++j) acc += std::exp(exponents[j] - max_exponent);
  const double log_norm =
      -0.5 * spec.dim() * std::log(kTwoPi * spec.sigma * spec.sigma);
  return max_exponent + std::log(acc) - std::log(double(k)) + log_norm;
}

}  // namespace coopinit
