#include "mcc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc {

double normal_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

AnalyticDensity AnalyticDensity::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw InvalidInput("normal sd must be positive");
  AnalyticDensity d;
  d.kind = Kind::normal;
  d.means = {mean};
  d.sds = {sd};
  d.weights = {1.0};
  return d;
}

AnalyticDensity AnalyticDensity::mixture(std::vector<double> weights, std::vector<double> means,
                                         std::vector<double> sds) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != sds.size())
    throw InvalidInput("mixture requires equal-length nonempty weights, means, sds");
  for (double s : sds)
    if (!(s > 0.0)) throw InvalidInput("mixture sd must be positive");
  for (double w : weights)
    if (!(w >= 0.0)) throw InvalidInput("mixture weights must be nonnegative");
  AnalyticDensity d;
  d.kind = Kind::mixture;
  d.weights = std::move(weights);
  d.means = std::move(means);
  d.sds = std::move(sds);
  return d;
}

AnalyticDensity AnalyticDensity::student_t(double location, double scale, double dof) {
  if (!(scale > 0.0) || !(dof > 0.0)) throw InvalidInput("student_t requires scale > 0 and dof > 0");
  AnalyticDensity d;
  d.kind = Kind::student_t;
  d.means = {location};
  d.sds = {scale};
  d.dof = dof;
  return d;
}

AnalyticDensity AnalyticDensity::bivariate_normal(double m1, double m2, double s1, double s2, double rho) {
  if (!(s1 > 0.0) || !(s2 > 0.0) || !(std::abs(rho) < 1.0))
    throw InvalidInput("bivariate normal requires positive sds and |correlation| < 1");
  AnalyticDensity d;
  d.kind = Kind::bivariate_normal;
  d.means = {m1, m2};
  d.sds = {s1, s2};
  d.correlation = rho;
  return d;
}

double AnalyticDensity::operator()(const Point& p) const {
  switch (kind) {
    case Kind::normal:
      return normal_pdf(p[0], means[0], sds[0]);
    case Kind::mixture: {
      double s = 0.0;
      for (std::size_t k = 0; k < weights.size(); ++k) s += weights[k] * normal_pdf(p[0], means[k], sds[k]);
      return s;
    }
    case Kind::student_t: {
      const double z = (p[0] - means[0]) / sds[0];
      return std::pow(1.0 + z * z / dof, -0.5 * (dof + 1.0));
    }
    case Kind::bivariate_normal: {
      const double z1 = (p[0] - means[0]) / sds[0];
      const double z2 = (p[1] - means[1]) / sds[1];
      const double r = correlation;
      const double q = (z1 * z1 - 2.0 * r * z1 * z2 + z2 * z2) / (1.0 - r * r);
      return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * sds[0] * sds[1] * std::sqrt(1.0 - r * r));
    }
  }
  return 0.0;
}

std::string AnalyticDensity::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::normal:
      os << "normal(" << means[0] << "," << sds[0] << ")";
      break;
    case Kind::mixture:
      os << "mixture(" << weights.size() << ")";
      break;
    case Kind::student_t:
      os << "student_t(" << means[0] << "," << sds[0] << "," << dof << ")";
      break;
    case Kind::bivariate_normal:
      os << "bivariate_normal(" << means[0] << "," << means[1] << "," << sds[0] << "," << sds[1] << ","
         << correlation << ")";
      break;
  }
  return os.str();
}

std::function<double(const Point&)> named_test_function(const std::string& tag) {
  if (tag == "identity") return [](const Point& p) { return p[0]; };
  if (tag == "clip") return [](const Point& p) { return std::clamp(p[0], -1.0, 1.0); };
  if (tag == "square") return [](const Point& p) { return p[0] * p[0]; };
  if (tag == "sin") return [](const Point& p) { return std::sin(p[0]); };
  if (tag == "tanh") return [](const Point& p) { return std::tanh(p[0]); };
  if (tag == "one") return [](const Point&) { return 1.0; };
  if (tag == "first") return [](const Point& p) { return p[0]; };
  if (tag == "second") return [](const Point& p) { return p[1]; };
  if (tag == "product") return [](const Point& p) { return std::tanh(p[0] * p[1]); };
  if (tag == "mixed") return [](const Point& p) { return std::sin(p[0]) + 0.5 * std::cos(p[1]); };
  throw InvalidInput("unknown test function tag '" + tag + "'");
}

}  // namespace mcc
