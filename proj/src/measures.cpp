#include "mcc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcc/error.hpp"

namespace mcc {

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidInput("grid function size does not match grid");
}

GridFunction GridFunction::constant(const Grid& g, double c) {
  return GridFunction(g, std::vector<double>(g.size(), c));
}

GridFunction GridFunction::evaluate(const Grid& g, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g.point(i));
  return GridFunction(g, std::move(v));
}

double GridFunction::mass() const {
  const auto& w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
  return s;
}

double GridFunction::sup_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

GridDensity GridDensity::normalized(Grid g, std::vector<double> values, std::string description) {
  if (values.size() != g.size()) throw InvalidInput("density size does not match grid");
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw InvalidInput("density has a non-finite value at node " + std::to_string(i));
    if (values[i] < 0.0) throw InvalidInput("density is negative at node " + std::to_string(i));
    s += g.weight(i) * values[i];
  }
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("density has zero or non-finite mass");
  for (double& v : values) v /= s;
  return GridDensity(std::move(g), std::move(values), std::move(description));
}

GridDensity GridDensity::from_pdf(Grid g, const std::function<double(const Point&)>& pdf,
                                  std::string description) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = pdf(g.point(i));
  return normalized(std::move(g), std::move(v), std::move(description));
}

GridDensity GridDensity::from_masses(Grid g, std::span<const double> masses, std::string description) {
  if (masses.size() != g.size()) throw InvalidInput("mass vector size does not match grid");
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(masses[i], 0.0) / g.weight(i);
  return normalized(std::move(g), std::move(v), std::move(description));
}

GridDensity GridDensity::spike(Grid g, std::size_t node) {
  if (node >= g.size()) throw RangeError("spike node outside grid");
  std::vector<double> v(g.size(), 0.0);
  v[node] = 1.0 / g.weight(node);
  return GridDensity(std::move(g), std::move(v), "spike");
}

GridDensity GridDensity::unchecked(Grid g, std::vector<double> values, std::string description) {
  if (values.size() != g.size()) throw InvalidInput("density size does not match grid");
  return GridDensity(std::move(g), std::move(values), std::move(description));
}

bool GridDensity::positive() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

double GridDensity::mass() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) s += grid_.weight(i) * values_[i];
  return s;
}

std::vector<double> GridDensity::masses() const {
  std::vector<double> m(values_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = grid_.weight(i) * values_[i];
  return m;
}

GridDensity GridDensity::marginal(int k) const {
  if (grid_.dim() != 2) throw InvalidInput("marginal requires a 2-D density");
  const Axis& a0 = grid_.axis(0);
  const Axis& a1 = grid_.axis(1);
  if (k == 0) {
    std::vector<double> m(a0.n_points, 0.0);
    for (std::size_t i = 0; i < a0.n_points; ++i)
      for (std::size_t j = 0; j < a1.n_points; ++j) m[i] += a1.weight(j) * values_[grid_.index(i, j)];
    return GridDensity(Grid(a0), std::move(m), description_ + ":marginal1");
  }
  std::vector<double> m(a1.n_points, 0.0);
  for (std::size_t i = 0; i < a0.n_points; ++i)
    for (std::size_t j = 0; j < a1.n_points; ++j) m[j] += a0.weight(i) * values_[grid_.index(i, j)];
  return GridDensity(Grid(a1), std::move(m), description_ + ":marginal2");
}

SignedGridFunction difference(const GridDensity& a, const GridDensity& b) {
  require_same_grid(a.grid(), b.grid(), "difference");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return SignedGridFunction(a.grid(), std::move(v));
}

WeightFunction::WeightFunction(std::string tag, std::function<double(const Point&)> fn,
                               std::optional<double> gamma)
    : tag_(std::move(tag)), fn_(std::move(fn)), gamma_(gamma) {}

WeightFunction WeightFunction::constant() {
  return WeightFunction("const-1", [](const Point&) { return 1.0; });
}

WeightFunction WeightFunction::one_plus_square() {
  return WeightFunction("one-plus-square", [](const Point& p) { return 1.0 + p[0] * p[0] + p[1] * p[1]; });
}

WeightFunction WeightFunction::exp_abs(double gamma) {
  if (!(gamma > 0.0)) throw InvalidInput("exp-gamma-abs requires gamma > 0");
  return WeightFunction(
      "exp-gamma-abs", [gamma](const Point& p) { return std::exp(gamma * std::hypot(p[0], p[1])); }, gamma);
}

WeightFunction WeightFunction::power(double alpha) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw RangeError("weight exponent must lie in (0,1]");
  auto fn = fn_;
  return WeightFunction(tag_ + "^" + std::to_string(alpha),
                        [fn, alpha](const Point& p) { return std::pow(fn(p), alpha); },
                        gamma_ ? std::optional<double>(*gamma_ * alpha) : std::nullopt);
}

GridFunction WeightFunction::on(const Grid& g) const {
  GridFunction v = GridFunction::evaluate(g, fn_);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 1.0) || !std::isfinite(v[i]))
      throw InvalidInput("weight function " + tag_ + " is below 1 or non-finite at node " + std::to_string(i));
  return v;
}

ContaminationCurve::ContaminationCurve(GridDensity mu, GridDensity nu) : mu_(std::move(mu)), nu_(std::move(nu)) {
  require_same_grid(mu_.grid(), nu_.grid(), "contamination curve");
}

GridDensity ContaminationCurve::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("curve parameter t must lie in [0,1]");
  if (t == 0.0) return mu_;
  if (t == 1.0) return nu_;
  std::vector<double> v(mu_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = mu_[i] + t * (nu_[i] - mu_[i]);
  return GridDensity::unchecked(mu_.grid(), std::move(v), "mu_t");
}

GridDensity curve_at(const ContaminationCurve& c, double t) { return c.at(t); }

double v_norm_function(const GridFunction& f, const GridFunction& V) {
  require_same_grid(f.grid, V.grid, "v_norm_function");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw InvalidInput("v_norm_function: non-finite value at node " + std::to_string(i));
    m = std::max(m, std::abs(f[i]) / V[i]);
  }
  return m;
}

double v_norm_function(const GridFunction& f, const WeightFunction& V) { return v_norm_function(f, V.on(f.grid)); }

double v_norm_measure(const SignedGridFunction& chi, const GridFunction& V) {
  require_same_grid(chi.grid, V.grid, "v_norm_measure");
  const auto& w = chi.grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) s += w[i] * V[i] * std::abs(chi[i]);
  return s;
}

double v_norm_measure(const SignedGridFunction& chi, const WeightFunction& V) {
  return v_norm_measure(chi, V.on(chi.grid));
}

double v_norm_masses(std::span<const double> masses, std::span<const double> V) {
  if (masses.size() != V.size()) throw InvalidInput("v_norm_masses: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) s += V[i] * std::abs(masses[i]);
  return s;
}

double integrate(std::span<const double> f, const GridDensity& rho) {
  if (f.size() != rho.size()) throw InvalidInput("integrate: size mismatch");
  const auto& w = rho.grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * rho[i] * f[i];
  if (std::isnan(s)) throw InvalidInput("integrate: NaN encountered");
  return s;
}

double integrate(const GridFunction& f, const GridDensity& rho) {
  require_same_grid(f.grid, rho.grid(), "integrate");
  return integrate(std::span<const double>(f.values), rho);
}

double integrate_signed(std::span<const double> f, const SignedGridFunction& chi) {
  if (f.size() != chi.size()) throw InvalidInput("integrate_signed: size mismatch");
  const auto& w = chi.grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * chi[i] * f[i];
  if (std::isnan(s)) throw InvalidInput("integrate_signed: NaN encountered");
  return s;
}

}  // namespace mcc
