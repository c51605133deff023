#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace coopinit {

// Dependency-free 2D scatter snapshot: real points in gray, generated
// points in blue, mode centers as black crosses, plus a caption line.
// 1D inputs are drawn along the x axis.
void write_scatter_svg(std::ostream& os, const Eigen::MatrixXd& real,
                       const Eigen::MatrixXd& generated,
                       const Eigen::MatrixXd& centers,
                       const std::string& caption);

}  // namespace coopinit
