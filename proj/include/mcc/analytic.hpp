#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcc/grid.hpp"

namespace mcc {

double normal_pdf(double x, double mean, double sd);
double normal_cdf(double x);

// Named analytic families used as targets, starts and perturbations.
struct AnalyticDensity {
  enum class Kind { normal, mixture, student_t, bivariate_normal };
  Kind kind = Kind::normal;
  std::vector<double> means{0.0};   // mixture components; bivariate uses means[0..1]
  std::vector<double> sds{1.0};     // bivariate uses sds[0..1]
  std::vector<double> weights{1.0};
  double dof = 1.0;                 // student_t
  double correlation = 0.0;         // bivariate_normal

  static AnalyticDensity normal(double mean, double sd);
  static AnalyticDensity mixture(std::vector<double> weights, std::vector<double> means, std::vector<double> sds);
  static AnalyticDensity student_t(double location, double scale, double dof);
  static AnalyticDensity bivariate_normal(double m1, double m2, double s1, double s2, double rho);

  int dim() const { return kind == Kind::bivariate_normal ? 2 : 1; }
  double operator()(const Point& p) const;
  std::string describe() const;
};

// Smooth bounded test functions indexed by a tag.
std::function<double(const Point&)> named_test_function(const std::string& tag);

}  // namespace mcc
