#pragma once

#include <cmath>
#include <limits>

#include "mcc/analytic.hpp"
#include "mcc/derivative.hpp"
#include "mcc/kernels.hpp"
#include "mcc/measures.hpp"

namespace fx {

using namespace mcc;

inline Grid line(std::size_t n = 201, double lo = -8.0, double hi = 8.0) { return Grid(Axis{lo, hi, n}); }
inline Grid plane(std::size_t n = 41, double lo = -6.0, double hi = 6.0) {
  return Grid(Axis{lo, hi, n}, Axis{lo, hi, n});
}

inline GridDensity density(const Grid& g, const AnalyticDensity& a) {
  return GridDensity::from_pdf(g, [a](const Point& p) { return a(p); }, a.describe());
}

inline GridDensity mu1(const Grid& g) {
  return density(g, AnalyticDensity::mixture({0.4, 0.6}, {-1.0, 1.2}, {0.9, 1.1}));
}
inline GridDensity nu1(const Grid& g) { return density(g, AnalyticDensity::normal(0.5, 1.3)); }
inline GridDensity rho1(const Grid& g) { return density(g, AnalyticDensity::normal(0.2, 0.8)); }

inline GridDensity mu2(const Grid& g) { return density(g, AnalyticDensity::bivariate_normal(0, 0, 1, 1, 0.5)); }
inline GridDensity nu2(const Grid& g) {
  return density(g, AnalyticDensity::bivariate_normal(0.4, -0.3, 1.2, 0.9, 0.2));
}
inline GridDensity rho2(const Grid& g) {
  return density(g, AnalyticDensity::bivariate_normal(0.2, 0.1, 0.8, 0.8, 0.0));
}

inline GridFunction fn(const Grid& g, const char* tag) { return GridFunction::evaluate(g, named_test_function(tag)); }

inline HastingsFamily barker_rw(const Grid& g, double sigma = 1.0) {
  return HastingsFamily(ProposalKernel::random_walk(g, sigma), BalancingFunction::barker());
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace fx
