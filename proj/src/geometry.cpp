#include "threatgraph/geometry.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "threatgraph/errors.hpp"

namespace threatgraph {

std::string_view to_string(TransformMode mode) {
  return mode == TransformMode::paper_linear ? "paper_linear" : "projective";
}

std::optional<TransformMode> parse_transform_mode(std::string_view token) {
  if (token == "paper_linear") return TransformMode::paper_linear;
  if (token == "projective") return TransformMode::projective;
  return std::nullopt;
}

FloorCalibration::FloorCalibration(const Eigen::Matrix3d& matrix, TransformMode mode)
    : matrix_(matrix), mode_(mode) {
  if (!matrix_.allFinite()) throw Error(Errc::SingularSystem, "transform has non-finite entries");
  if (mode_ == TransformMode::paper_linear) {
    matrix_.row(2) << 0.0, 0.0, 1.0;
    matrix_.col(2).head<2>().setZero();
  }
  if (std::abs(matrix_.determinant()) <= kMinDeterminant)
    throw Error(Errc::SingularSystem, "transform matrix is not invertible");
  inverse_ = matrix_.inverse();
}

FloorCalibration FloorCalibration::from_matrix(const Eigen::Matrix3d& matrix, TransformMode mode) {
  return FloorCalibration(matrix, mode);
}

Point2 FloorCalibration::to_floor(Point2 p) const {
  const Eigen::Vector3d q = matrix_ * Eigen::Vector3d(p.x, p.y, 1.0);
  if (mode_ == TransformMode::paper_linear) return {q.x(), q.y()};
  if (std::abs(q.z()) < kHorizonTolerance) throw Error(Errc::AtInfinity, "image point lies on the horizon line");
  return {q.x() / q.z(), q.y() / q.z()};
}

Point2 FloorCalibration::to_image(Point2 p) const {
  const Eigen::Vector3d q = inverse_ * Eigen::Vector3d(p.x, p.y, 1.0);
  if (mode_ == TransformMode::paper_linear) return {q.x(), q.y()};
  if (std::abs(q.z()) < kHorizonTolerance) throw Error(Errc::AtInfinity, "floor point maps to infinity");
  return {q.x() / q.z(), q.y() / q.z()};
}

namespace {

// Similarity taking the points to zero centroid and mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::array<Point2, 4>& pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= 4.0;
  cy /= 4.0;
  double mean_dist = 0.0;
  for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
  mean_dist /= 4.0;
  if (!(mean_dist > 0.0)) throw Error(Errc::SingularSystem, "calibration points coincide");
  const double s = std::sqrt(2.0) / mean_dist;
  Eigen::Matrix3d t;
  t << s, 0.0, -s * cx,
       0.0, s, -s * cy,
       0.0, 0.0, 1.0;
  return t;
}

Eigen::Matrix3d fit_linear(const std::array<Point2, 4>& image, const std::array<Point2, 4>& floor) {
  Eigen::Matrix<double, 2, 4> r, r_prime;
  for (int i = 0; i < 4; ++i) {
    r.col(i) << image[i].x, image[i].y;
    r_prime.col(i) << floor[i].x, floor[i].y;
  }
  const Eigen::Matrix2d rrt = r * r.transpose();
  const double scale = rrt.trace();
  if (!(scale > 0.0) || std::abs(rrt.determinant()) <= 1e-12 * scale * scale)
    throw Error(Errc::SingularSystem, "R R^T is rank deficient");
  const Eigen::Matrix2d m = r_prime * r.transpose() * rrt.inverse();
  Eigen::Matrix3d out = Eigen::Matrix3d::Identity();
  out.topLeftCorner<2, 2>() = m;
  return out;
}

Eigen::Matrix3d fit_projective(const std::array<Point2, 4>& image, const std::array<Point2, 4>& floor) {
  const Eigen::Matrix3d t_img = normalizing_transform(image);
  const Eigen::Matrix3d t_floor = normalizing_transform(floor);

  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d p = t_img * Eigen::Vector3d(image[i].x, image[i].y, 1.0);
    const Eigen::Vector3d q = t_floor * Eigen::Vector3d(floor[i].x, floor[i].y, 1.0);
    const double x = p.x(), y = p.y(), xp = q.x(), yp = q.y();
    a.row(2 * i) << -x, -y, -1.0, 0.0, 0.0, 0.0, xp * x, xp * y, xp;
    a.row(2 * i + 1) << 0.0, 0.0, 0.0, -x, -y, -1.0, yp * x, yp * y, yp;
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(7) > 1e-10 * sv(0))) throw Error(Errc::SingularSystem, "DLT system is rank deficient");

  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d h_norm;
  h_norm << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d out = t_floor.inverse() * h_norm * t_img;
  // H(3,3) is zero when the image origin lies on the horizon line; fall back
  // to unit norm with the first non-negligible entry (row-major) positive.
  const double norm = out.norm();
  if (std::abs(out(2, 2)) > 1e-9 * norm) return out / out(2, 2);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      if (std::abs(out(r, c)) > 1e-9 * norm) return (out(r, c) < 0.0 ? -1.0 : 1.0) * out / norm;
  return out;
}

}  // namespace

FloorCalibration fit_transform(const std::array<Point2, 4>& image_points, const std::array<Point2, 4>& floor_points,
                               TransformMode mode) {
  const Eigen::Matrix3d m =
      mode == TransformMode::paper_linear ? fit_linear(image_points, floor_points) : fit_projective(image_points, floor_points);
  FloorCalibration calib(m, mode);
  calib.image_ = image_points;
  calib.floor_ = floor_points;
  if (mode == TransformMode::projective) {
    for (int i = 0; i < 4; ++i) {
      const Point2 q = calib.to_floor(image_points[i]);
      if (!(std::hypot(q.x - floor_points[i].x, q.y - floor_points[i].y) < kMaxFitResidual))
        throw Error(Errc::SingularSystem, "projective fit misses correspondence " + std::to_string(i));
    }
  }
  return calib;
}

Point2 standing_location(const Box& box) noexcept { return {box.u, box.v + 0.5 * box.h}; }

Point2 project_to_floor(const FloorCalibration& calib, Point2 image_point) { return calib.to_floor(image_point); }

FloorPoint project_to_floor(const FloorCalibration& calib, Point2 image_point, PersonId id, FrameIndex frame) {
  const Point2 p = calib.to_floor(image_point);
  return {p.x, p.y, id, frame};
}

DistanceMatrix distance_matrix(const std::vector<FloorPoint>& points) {
  DistanceMatrix out;
  const auto n = static_cast<Eigen::Index>(points.size());
  out.ids.reserve(points.size());
  for (const auto& p : points) out.ids.push_back(p.person_id);
  out.d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
      out.d(i, j) = dist;
      out.d(j, i) = dist;
    }
  }
  return out;
}

}  // namespace threatgraph
