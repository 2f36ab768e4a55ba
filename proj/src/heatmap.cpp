#include "threatgraph/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "threatgraph/errors.hpp"

namespace threatgraph {

int gray_level(double value, ValueRange range, Shading shading) {
  const double span = range.hi - range.lo;
  double t = shading == Shading::direct ? (value - range.lo) / span : (range.hi - value) / span;
  t = std::clamp(t, 0.0, 1.0);
  return static_cast<int>(std::lround(255.0 * t));
}

void render_heatmap(const Eigen::MatrixXd& matrix, ValueRange range, std::ostream& out, Shading shading) {
  if (matrix.size() == 0) throw Error(Errc::InvalidArgument, "heatmap needs a non-empty matrix");
  if (!matrix.allFinite()) throw Error(Errc::InvalidArgument, "heatmap values must be finite");
  if (!(range.hi > range.lo)) throw Error(Errc::InvalidArgument, "heatmap range must satisfy hi > lo");
  out << "P2\n" << matrix.cols() << ' ' << matrix.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j) out << ' ';
      out << gray_level(matrix(i, j), range, shading);
    }
    out << '\n';
  }
}

void render_heatmap(const Eigen::MatrixXd& matrix, ValueRange range, const std::filesystem::path& path,
                    Shading shading) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoFailure, "cannot write heatmap " + path.string());
  render_heatmap(matrix, range, out, shading);
  if (!out) throw Error(Errc::IoFailure, "write failed for " + path.string());
}

}  // namespace threatgraph
