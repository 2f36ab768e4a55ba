#include "threatgraph/box.hpp"

#include <algorithm>

namespace threatgraph {

double intersection_area(const Box& a, const Box& b) noexcept {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box& a, const Box& b) noexcept {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

bool contains(const Box& box, Point2 p) noexcept {
  return p.x >= box.left() && p.x <= box.right() && p.y >= box.top() && p.y <= box.bottom();
}

}  // namespace threatgraph
