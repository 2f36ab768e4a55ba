#pragma once

#include "threatgraph/types.hpp"

namespace threatgraph {

/// Center-format bounding box as produced by the detectors: (u, v) is the box
/// center in pixels, r = width / height, h the height in pixels.
struct Box {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double h = 0.0;
  double conf = 0.0;

  double width() const noexcept { return r * h; }
  double left() const noexcept { return u - 0.5 * width(); }
  double right() const noexcept { return u + 0.5 * width(); }
  double top() const noexcept { return v - 0.5 * h; }
  double bottom() const noexcept { return v + 0.5 * h; }
  double area() const noexcept { return width() * h; }

  friend bool operator==(const Box&, const Box&) = default;
};

double intersection_area(const Box& a, const Box& b) noexcept;
double iou(const Box& a, const Box& b) noexcept;
bool contains(const Box& box, Point2 p) noexcept;

}  // namespace threatgraph
