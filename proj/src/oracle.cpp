#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcc/derivative.hpp"
#include "mcc/error.hpp"

namespace mcc {

FdResult fd_extrapolate(const std::function<double(double)>& F, double scale, const FdOptions& opt) {
  const auto& t = opt.steps;
  for (std::size_t k = 1; k < 3; ++k)
    if (std::abs(t[k] * 2.0 - t[k - 1]) > 1e-15 * t[k - 1] || !(t[k] > 0.0))
      throw InvalidInput("finite-difference steps must halve: t, t/2, t/4");
  FdResult r;
  const double f0 = F(0.0);
  for (std::size_t k = 0; k < 3; ++k) r.quotients[k] = (F(t[k]) - f0) / t[k];
  r.first_order[0] = 2.0 * r.quotients[1] - r.quotients[0];
  r.first_order[1] = 2.0 * r.quotients[2] - r.quotients[1];
  r.value = (4.0 * r.first_order[1] - r.first_order[0]) / 3.0;
  r.scale = std::max(std::abs(r.value), scale);
  const double spread = std::abs(r.first_order[1] - r.first_order[0]);
  if (!std::isfinite(r.value) || spread > opt.tolerance * r.scale) {
    std::ostringstream os;
    os << "finite-difference extrapolation did not converge: successive estimates " << r.first_order[0] << ", "
       << r.first_order[1] << " differ by " << spread << " > " << opt.tolerance << " * " << r.scale;
    throw OracleFailure(os.str());
  }
  return r;
}

FdResult fd_directional_derivative(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                   const Start& start, const GridFunction& f, const FdOptions& opt,
                                   std::size_t steps) {
  require_same_grid(mu.grid(), nu.grid(), "fd oracle");
  require_same_grid(mu.grid(), f.grid, "fd oracle function");
  const ContaminationCurve curve(mu, nu);
  auto F = [&](double t) {
    const auto k = make_kernel(family, curve.at(t));
    return iterate_kernel(*k, start, f.values, steps);
  };
  const double scale = f.sup_abs() * v_norm_measure(difference(nu, mu), GridFunction::constant(mu.grid(), 1.0));
  return fd_extrapolate(F, scale, opt);
}

GridDensity triangle_density(const Grid& g, std::size_t x, std::size_t half_width) {
  if (g.dim() != 1) throw InvalidInput("triangle_density: 1-D grids only");
  if (x >= g.size()) throw RangeError("triangle_density: node outside grid");
  if (half_width == 0) return GridDensity::spike(g, x);
  std::vector<double> v(g.size(), 0.0);
  const double hw = static_cast<double>(half_width);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::abs(static_cast<double>(i) - static_cast<double>(x));
    if (d < hw) v[i] = 1.0 - d / hw;
  }
  return GridDensity::normalized(g, std::move(v), "triangle");
}

std::vector<double> fd_triangle_refinement(const KernelFamily& family, const GridDensity& mu,
                                           const GridDensity& nu, std::size_t x, const GridFunction& f,
                                           const std::vector<std::size_t>& half_widths) {
  std::vector<double> out;
  for (std::size_t hw : half_widths) {
    const auto rho = triangle_density(mu.grid(), x, hw);
    out.push_back(fd_directional_derivative(family, mu, nu, Start::density(rho), f).value);
  }
  return out;
}

}  // namespace mcc
