#include "mcc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcc/error.hpp"

namespace mcc {

std::size_t Axis::nearest(double x) const {
  if (x <= lower) return 0;
  if (x >= upper) return n_points - 1;
  auto i = static_cast<std::size_t>(std::llround((x - lower) / spacing()));
  return std::min(i, n_points - 1);
}

void validate_axis(const Axis& a) {
  if (!std::isfinite(a.lower) || !std::isfinite(a.upper))
    throw InvalidInput("grid bounds must be finite");
  if (!(a.lower < a.upper)) throw InvalidInput("grid requires lower < upper");
  if (a.n_points < 3) throw InvalidInput("grid requires n_points >= 3");
  if (!(a.spacing() > 0.0)) throw InvalidInput("grid spacing must be positive");
}

Grid::Grid(Axis axis) : dim_(1), axes_{axis, Axis{}}, size_(axis.n_points) {
  validate_axis(axis);
  auto w = std::make_shared<std::vector<double>>(size_);
  for (std::size_t i = 0; i < size_; ++i) (*w)[i] = axis.weight(i);
  weights_ = std::move(w);
}

Grid::Grid(Axis first, Axis second)
    : dim_(2), axes_{first, second}, size_(first.n_points * second.n_points) {
  validate_axis(first);
  validate_axis(second);
  auto w = std::make_shared<std::vector<double>>(size_);
  for (std::size_t i = 0; i < first.n_points; ++i)
    for (std::size_t j = 0; j < second.n_points; ++j)
      (*w)[index(i, j)] = first.weight(i) * second.weight(j);
  weights_ = std::move(w);
}

Point Grid::point(std::size_t i) const {
  if (dim_ == 1) return {axes_[0].node(i), 0.0};
  return {axes_[0].node(first(i)), axes_[1].node(second(i))};
}

std::size_t Grid::nearest(const Point& p) const {
  if (dim_ == 1) return axes_[0].nearest(p[0]);
  return index(axes_[0].nearest(p[0]), axes_[1].nearest(p[1]));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidInput(std::string(what) + ": grid mismatch");
}

}  // namespace mcc
