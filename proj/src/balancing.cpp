#include "mcc/balancing.hpp"

#include <algorithm>
#include <cmath>

#include "mcc/error.hpp"

namespace mcc {

namespace {

double gj_value(int j, double x) {
  if (x <= 1.0) {
    double inner = 0.0;  // 1 + x + ... + x^{j-1}
    for (int k = 0; k < j; ++k) inner = inner * x + 1.0;
    const double num = x * inner;
    return num / (num + 1.0);
  }
  const double u = 1.0 / x;
  double num = 0.0;  // sum_{k<j} u^k
  for (int k = 0; k < j; ++k) num = num * u + 1.0;
  const double den = num * u + 1.0;  // sum_{k<=j} u^k
  return num / den;
}

double gj_derivative(int j, double x) {
  if (x <= 1.0) {
    double dn = 0.0;  // sum_{k=1}^j k x^{k-1}
    for (int k = j; k >= 1; --k) dn = dn * x + static_cast<double>(k);
    double den = 0.0;
    for (int k = 0; k <= j; ++k) den = den * x + 1.0;
    return dn / (den * den);
  }
  const double u = 1.0 / x;
  // sum_{k=1}^j k u^{2j-k+1} = u^{j+1} sum_{k=1}^j k u^{j-k}
  double s = 0.0;
  for (int k = 1; k <= j; ++k) s = s * u + static_cast<double>(k);
  const double num = std::pow(u, j + 1) * s;
  double den = 0.0;
  for (int k = 0; k <= j; ++k) den = den * u + 1.0;
  return num / (den * den);
}

}  // namespace

BalancingFunction BalancingFunction::barker() {
  BalancingFunction b;
  b.kind_ = Kind::barker;
  b.name_ = "barker";
  return b;
}

BalancingFunction BalancingFunction::min_one() {
  BalancingFunction b;
  b.kind_ = Kind::min_one;
  b.name_ = "min-one";
  return b;
}

BalancingFunction BalancingFunction::gj(int j) {
  if (j < 1) throw InvalidInput("g_j requires j >= 1");
  BalancingFunction b;
  b.kind_ = Kind::gj;
  b.j_ = j;
  b.name_ = "gj";
  return b;
}

BalancingFunction BalancingFunction::custom(std::string name, std::function<double(double)> g,
                                            std::optional<std::function<double(double)>> g_prime) {
  BalancingFunction b;
  b.kind_ = Kind::custom;
  b.name_ = std::move(name);
  b.g_ = std::move(g);
  b.g_prime_ = std::move(g_prime);
  return b;
}

double BalancingFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::barker:
      return std::isinf(x) ? 1.0 : x / (1.0 + x);
    case Kind::min_one:
      return std::min(1.0, x);
    case Kind::gj:
      return gj_value(j_, x);
    case Kind::custom:
      return g_(x);
  }
  return 0.0;
}

bool BalancingFunction::differentiable() const {
  return kind_ == Kind::barker || kind_ == Kind::gj || (kind_ == Kind::custom && g_prime_.has_value());
}

double BalancingFunction::derivative(double x) const {
  switch (kind_) {
    case Kind::barker:
      return 1.0 / ((1.0 + x) * (1.0 + x));
    case Kind::gj:
      return gj_derivative(j_, x);
    case Kind::custom:
      if (g_prime_) return (*g_prime_)(x);
      break;
    case Kind::min_one:
      break;
  }
  throw PreconditionError("balancing function '" + tag() + "' is not differentiable");
}

double BalancingFunction::derivative_or_indicator(double x) const {
  if (kind_ == Kind::min_one) return x <= 1.0 ? 1.0 : 0.0;
  return derivative(x);
}

std::string BalancingFunction::tag() const {
  if (kind_ == Kind::gj) return "gj(" + std::to_string(j_) + ")";
  return name_;
}

}  // namespace mcc
