#pragma once

#include <array>
#include <functional>

namespace heisenbound::detail {

using Point2 = std::array<double, 2>;

struct MinimizeResult {
  Point2 x{};
  double value = 0.0;
  int evaluations = 0;
};

// Nelder-Mead on two parameters. Constraints are the caller's business: the
// objective should clamp or wrap its arguments.
MinimizeResult nelder_mead(const std::function<double(const Point2&)>& f, Point2 start,
                           Point2 step, double ftol = 1e-13, int max_evaluations = 400);

}  // namespace heisenbound::detail
