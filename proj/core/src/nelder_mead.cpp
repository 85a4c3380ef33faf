#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>

namespace heisenbound::detail {

namespace {

Point2 lerp(const Point2& a, const Point2& b, double t) {
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

MinimizeResult nelder_mead(const std::function<double(const Point2&)>& f, Point2 start,
                           Point2 step, double ftol, int max_evaluations) {
  std::array<Point2, 3> x{start, Point2{start[0] + step[0], start[1]},
                          Point2{start[0], start[1] + step[1]}};
  std::array<double, 3> fx{};
  int evals = 0;
  auto eval = [&](const Point2& p) {
    ++evals;
    return f(p);
  };
  for (int i = 0; i < 3; ++i) fx[i] = eval(x[i]);

  while (evals < max_evaluations) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0];
    const int mid = order[1];
    const int worst = order[2];
    if (std::abs(fx[worst] - fx[best]) <= ftol * (std::abs(fx[best]) + 1e-300) &&
        std::max(std::abs(x[worst][0] - x[best][0]), std::abs(x[worst][1] - x[best][1])) < 1e-10) {
      break;
    }
    if (fx[worst] == fx[best] &&
        std::max(std::abs(x[worst][0] - x[best][0]), std::abs(x[worst][1] - x[best][1])) < 1e-14) {
      break;
    }

    const Point2 centroid = lerp(x[best], x[mid], 0.5);
    const Point2 reflected = lerp(x[worst], centroid, 2.0);
    const double fr = eval(reflected);
    if (fr < fx[best]) {
      const Point2 expanded = lerp(x[worst], centroid, 3.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        x[worst] = expanded;
        fx[worst] = fe;
      } else {
        x[worst] = reflected;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[mid]) {
      x[worst] = reflected;
      fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Point2 contracted = outside ? lerp(x[worst], centroid, 1.5) : lerp(x[worst], centroid, 0.5);
    const double fc = eval(contracted);
    if (fc < std::min(fr, fx[worst])) {
      x[worst] = contracted;
      fx[worst] = fc;
      continue;
    }
    for (const int i : {mid, worst}) {
      x[i] = lerp(x[best], x[i], 0.5);
      fx[i] = eval(x[i]);
    }
  }

  const auto it = std::min_element(fx.begin(), fx.end());
  const auto i = static_cast<std::size_t>(it - fx.begin());
  return {x[i], fx[i], evals};
}

}  // namespace heisenbound::detail
