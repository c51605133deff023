#include "coopinit/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace coopinit {

namespace {

struct Bounds {
  double lo_x, hi_x, lo_y, hi_y;
};

void grow(Bounds& b, double x, double y) {
  b.lo_x = std::min(b.lo_x, x);
  b.hi_x = std::max(b.hi_x, x);
  b.lo_y = std::min(b.lo_y, y);
  b.hi_y = std::max(b.hi_y, y);
}

double col_or_zero(const Eigen::MatrixXd& m, Eigen::Index i, Eigen::Index j) {
  return j < m.cols() ? m(i, j) : 0.0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_scatter_svg(std::ostream& os, const Eigen::MatrixXd& real,
                       const Eigen::MatrixXd& generated,
                       const Eigen::MatrixXd& centers,
                       const std::string& caption) {
  Bounds b{-1.0, 1.0, -1.0, 1.0};
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    grow(b, col_or_zero(centers, i, 0), col_or_zero(centers, i, 1));
  }
  // Frame the mode structure with a margin; stray points are clipped by
  // the viewBox rather than rescaling every frame.
  const double margin = 0.3 * std::max(b.hi_x - b.lo_x, b.hi_y - b.lo_y) + 0.5;
  b.lo_x -= margin;
  b.hi_x += margin;
  b.lo_y -= margin;
  b.hi_y += margin;

  const int size = 480;
  const double span = std::max(b.hi_x - b.lo_x, b.hi_y - b.lo_y);
  const double scale = (size - 40) / span;
  const auto px = [&](double x) { return 20.0 + (x - b.lo_x) * scale; };
  const auto py = [&](double y) { return size - 20.0 - (y - b.lo_y) * scale; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
     << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << " " << size
     << "\">\n";
  os << "<rect width=\"" << size << "\" height=\"" << size
     << "\" fill=\"white\"/>\n";

  for (Eigen::Index i = 0; i < real.rows(); ++i) {
    os << "<circle cx=\"" << fmt(px(col_or_zero(real, i, 0))) << "\" cy=\""
       << fmt(py(col_or_zero(real, i, 1)))
       << "\" r=\"1.5\" fill=\"#b5b5b5\"/>\n";
  }
  for (Eigen::Index i = 0; i < generated.rows(); ++i) {
    os << "<circle cx=\"" << fmt(px(col_or_zero(generated, i, 0)))
       << "\" cy=\"" << fmt(py(col_or_zero(generated, i, 1)))
       << "\" r=\"1.5\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  for (Eigen::Index i = 0; i < centers.rows(); ++i) {
    const double cx = px(col_or_zero(centers, i, 0));
    const double cy = py(col_or_zero(centers, i, 1));
    os << "<path d=\"M " << fmt(cx - 5) << " " << fmt(cy) << " L "
       << fmt(cx + 5) << " " << fmt(cy) << " M " << fmt(cx) << " "
       << fmt(cy - 5) << " L " << fmt(cx) << " " << fmt(cy + 5)
       << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  os << "<text x=\"10\" y=\"16\" font-family=\"monospace\" font-size=\"12\">"
     << caption << "</text>\n";
  os << "</svg>\n";
}

}  // namespace coopinit
