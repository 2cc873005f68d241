#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcc/grid.hpp"

namespace mcc {

// Densities flagged positive are clipped at this floor before forming ratios.
inline constexpr double kPositivityFloor = 1e-300;

// Real values on grid nodes. Also used for signed measures given by a density,
// where mass() is the trapezoid integral.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v);
  static GridFunction constant(const Grid& g, double c);
  static GridFunction evaluate(const Grid& g, const std::function<double(const Point&)>& fn);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double mass() const;
  double sup_abs() const;
};

using SignedGridFunction = GridFunction;

class GridDensity {
 public:
  // Normalizes to unit trapezoid mass.
  static GridDensity normalized(Grid g, std::vector<double> values, std::string description = {});
  static GridDensity from_pdf(Grid g, const std::function<double(const Point&)>& pdf,
                              std::string description = {});
  // Node masses m_i (probabilities) to the density m_i / w_i.
  static GridDensity from_masses(Grid g, std::span<const double> masses, std::string description = {});
  // Unit mass at one node; integrates like a point mass under the trapezoid rule.
  static GridDensity spike(Grid g, std::size_t node);
  // Stored as given. The caller guarantees nonnegativity and unit mass up to rounding.
  static GridDensity unchecked(Grid g, std::vector<double> values, std::string description = {});

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double floored(std::size_t i) const { return values_[i] > kPositivityFloor ? values_[i] : kPositivityFloor; }
  std::size_t size() const { return values_.size(); }
  const std::string& description() const { return description_; }
  bool positive() const;
  double mass() const;
  std::vector<double> masses() const;
  GridFunction as_function() const { return GridFunction(grid_, values_); }

  // Marginal densities of a 2-D density, on the first resp. second axis.
  GridDensity marginal(int k) const;

 private:
  GridDensity(Grid g, std::vector<double> v, std::string d)
      : grid_(std::move(g)), values_(std::move(v)), description_(std::move(d)) {}
  Grid grid_;
  std::vector<double> values_;
  std::string description_;
};

SignedGridFunction difference(const GridDensity& a, const GridDensity& b);

class WeightFunction {
 public:
  WeightFunction(std::string tag, std::function<double(const Point&)> fn,
                 std::optional<double> gamma = std::nullopt);
  static WeightFunction constant();
  static WeightFunction one_plus_square();
  static WeightFunction exp_abs(double gamma);
  // V^alpha for alpha in (0, 1].
  WeightFunction power(double alpha) const;

  double operator()(const Point& p) const { return fn_(p); }
  // Evaluates on every node and checks V >= 1.
  GridFunction on(const Grid& g) const;
  const std::string& tag() const { return tag_; }
  std::optional<double> gamma() const { return gamma_; }

 private:
  std::string tag_;
  std::function<double(const Point&)> fn_;
  std::optional<double> gamma_;
};

class ContaminationCurve {
 public:
  ContaminationCurve(GridDensity mu, GridDensity nu);
  GridDensity at(double t) const;
  const GridDensity& mu() const { return mu_; }
  const GridDensity& nu() const { return nu_; }

 private:
  GridDensity mu_;
  GridDensity nu_;
};

GridDensity curve_at(const ContaminationCurve& c, double t);

double v_norm_function(const GridFunction& f, const WeightFunction& V);
double v_norm_function(const GridFunction& f, const GridFunction& V);
double v_norm_measure(const SignedGridFunction& chi, const WeightFunction& V);
double v_norm_measure(const SignedGridFunction& chi, const GridFunction& V);
// Sum of V |m| over node masses (measures with atoms, e.g. one-step distributions).
double v_norm_masses(std::span<const double> masses, std::span<const double> V);

double integrate(const GridFunction& f, const GridDensity& rho);
double integrate(std::span<const double> f, const GridDensity& rho);
double integrate_signed(std::span<const double> f, const SignedGridFunction& chi);

}  // namespace mcc
