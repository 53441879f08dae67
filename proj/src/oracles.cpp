#include "refinery/oracles.hpp"

namespace refinery {

GridResult1D grid_maximize(const std::function<double(double)>& f, double lo, double hi,
                           std::size_t resolution) {
  require(resolution >= 101, Errc::bad_argument, "grid resolution must be >= 101");
  require(lo < hi, Errc::bad_argument, "grid box must be nonempty");
  GridResult1D best;
  best.step = (hi - lo) / static_cast<double>(resolution - 1);
  best.x = lo;
  best.value = f(lo);
  for (std::size_t i = 1; i < resolution; ++i) {
    const double x = lo + best.step * static_cast<double>(i);
    const double v = f(x);
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

GridResult2D grid_maximize_2d(const std::function<double(double, double)>& f, double x_lo,
                              double x_hi, double y_lo, double y_hi,
                              std::size_t resolution) {
  require(resolution >= 101, Errc::bad_argument, "grid resolution must be >= 101");
  require(x_lo < x_hi && y_lo < y_hi, Errc::bad_argument, "grid box must be nonempty");
  GridResult2D best;
  best.step_x = (x_hi - x_lo) / static_cast<double>(resolution - 1);
  best.step_y = (y_hi - y_lo) / static_cast<double>(resolution - 1);
  best.x = x_lo;
  best.y = y_lo;
  best.value = f(x_lo, y_lo);
  for (std::size_t i = 0; i < resolution; ++i) {
    const double x = x_lo + best.step_x * static_cast<double>(i);
    for (std::size_t j = 0; j < resolution; ++j) {
      const double y = y_lo + best.step_y * static_cast<double>(j);
      const double v = f(x, y);
      if (v > best.value) {
        best.value = v;
        best.x = x;
        best.y = y;
      }
    }
  }
  return best;
}

}  // namespace refinery
