#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

namespace mcc {

using Point = std::array<double, 2>;

// Uniform 1-D axis with trapezoid weights.
struct Axis {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t n_points = 3;

  double spacing() const { return (upper - lower) / static_cast<double>(n_points - 1); }
  double node(std::size_t i) const {
    return i + 1 == n_points ? upper : lower + static_cast<double>(i) * spacing();
  }
  double weight(std::size_t i) const {
    return (i == 0 || i + 1 == n_points) ? 0.5 * spacing() : spacing();
  }
  std::size_t nearest(double x) const;
  bool operator==(const Axis&) const = default;
};

void validate_axis(const Axis& a);

// 1-D grid or product of two axes. 2-D nodes are stored row-major with the first
// coordinate varying slowest.
class Grid {
 public:
  explicit Grid(Axis axis);
  Grid(Axis first, Axis second);

  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  const Axis& axis(int k = 0) const { return axes_[static_cast<std::size_t>(k)]; }

  Point point(std::size_t i) const;
  double coordinate(std::size_t i) const { return axes_[0].node(i); }
  double weight(std::size_t i) const { return (*weights_)[i]; }
  const std::vector<double>& weights() const { return *weights_; }

  std::size_t index(std::size_t i1, std::size_t i2) const { return i1 * axes_[1].n_points + i2; }
  std::size_t first(std::size_t i) const { return dim_ == 1 ? i : i / axes_[1].n_points; }
  std::size_t second(std::size_t i) const { return dim_ == 1 ? 0 : i % axes_[1].n_points; }
  std::size_t nearest(const Point& p) const;

  bool operator==(const Grid& o) const { return dim_ == o.dim_ && axes_ == o.axes_; }

 private:
  int dim_;
  std::array<Axis, 2> axes_;
  std::size_t size_;
  std::shared_ptr<const std::vector<double>> weights_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace mcc
