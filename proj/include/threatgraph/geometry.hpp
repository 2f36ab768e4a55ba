#pragma once

// Camera-to-floor transform, standing locations and floor distances.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "threatgraph/box.hpp"
#include "threatgraph/types.hpp"

namespace threatgraph {

enum class TransformMode {
  /// 2x2 least-squares map M = R' R^T (R R^T)^-1 on raw pixel coordinates.
  paper_linear,
  /// Exact 4-point homography in homogeneous coordinates.
  projective,
};

std::string_view to_string(TransformMode mode);
std::optional<TransformMode> parse_transform_mode(std::string_view token);

inline constexpr double kMinDeterminant = 1e-12;
inline constexpr double kMaxFitResidual = 1e-6;   // meters
inline constexpr double kHorizonTolerance = 1e-12;

/// Immutable fitted transform. In paper_linear mode only the upper-left 2x2
/// block of matrix() is meaningful and the rest is the identity.
class FloorCalibration {
 public:
  /// Wraps an existing matrix; throws SingularSystem if it is not invertible.
  static FloorCalibration from_matrix(const Eigen::Matrix3d& matrix, TransformMode mode);

  TransformMode mode() const noexcept { return mode_; }
  const Eigen::Matrix3d& matrix() const noexcept { return matrix_; }
  Eigen::Matrix2d linear_part() const { return matrix_.topLeftCorner<2, 2>(); }

  const std::array<Point2, 4>& image_points() const noexcept { return image_; }
  const std::array<Point2, 4>& floor_points() const noexcept { return floor_; }

  /// Image -> floor. Throws AtInfinity when the point lies on the horizon line.
  Point2 to_floor(Point2 image) const;
  /// Floor -> image through the inverse transform.
  Point2 to_image(Point2 floor) const;

 private:
  FloorCalibration(const Eigen::Matrix3d& matrix, TransformMode mode);
  friend FloorCalibration fit_transform(const std::array<Point2, 4>&, const std::array<Point2, 4>&,
                                        TransformMode);

  Eigen::Matrix3d matrix_;
  Eigen::Matrix3d inverse_;
  TransformMode mode_;
  std::array<Point2, 4> image_{};
  std::array<Point2, 4> floor_{};
};

/// Throws SingularSystem when R R^T (linear) or the DLT system (projective)
/// is rank deficient, or when the projective fit misses a correspondence by
/// more than kMaxFitResidual.
FloorCalibration fit_transform(const std::array<Point2, 4>& image_points,
                               const std::array<Point2, 4>& floor_points,
                               TransformMode mode = TransformMode::projective);

struct FloorPoint {
  double x = 0.0;
  double y = 0.0;
  PersonId person_id = 0;
  FrameIndex frame = 0;

  Point2 point() const noexcept { return {x, y}; }
  friend bool operator==(const FloorPoint&, const FloorPoint&) = default;
};

/// Bottom-center of the box: (u, v + h/2).
Point2 standing_location(const Box& box) noexcept;

Point2 project_to_floor(const FloorCalibration& calib, Point2 image_point);
FloorPoint project_to_floor(const FloorCalibration& calib, Point2 image_point, PersonId id, FrameIndex frame);

struct DistanceMatrix {
  std::vector<PersonId> ids;
  Eigen::MatrixXd d;

  std::size_t size() const noexcept { return ids.size(); }
};

DistanceMatrix distance_matrix(const std::vector<FloorPoint>& points);

}  // namespace threatgraph
