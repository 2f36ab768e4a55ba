#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

namespace threatgraph {

struct ValueRange {
  double lo = 0.0;
  double hi = 1.0;
};

enum class Shading {
  /// Higher values render brighter.
  direct,
  /// Lower values render brighter (distance maps: closer is warmer).
  inverted,
};

/// Gray level for one value: round(255 * (x - lo) / (hi - lo)), clamped to
/// [0, 255]; mirrored for Shading::inverted.
int gray_level(double value, ValueRange range, Shading shading = Shading::direct);

/// Writes an ASCII (P2) portable graymap with one pixel per matrix entry,
/// row-major. Throws InvalidArgument for an empty matrix, non-finite values
/// or an empty range; IoFailure when the file cannot be written.
void render_heatmap(const Eigen::MatrixXd& matrix, ValueRange range, std::ostream& out,
                    Shading shading = Shading::direct);
void render_heatmap(const Eigen::MatrixXd& matrix, ValueRange range, const std::filesystem::path& path,
                    Shading shading = Shading::direct);

}  // namespace threatgraph
