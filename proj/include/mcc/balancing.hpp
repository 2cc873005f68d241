#pragma once

#include <functional>
#include <optional>
#include <string>

namespace mcc {

// g with g(x) = x g(1/x), 0 <= g <= 1.
class BalancingFunction {
 public:
  enum class Kind { barker, min_one, gj, custom };

  static BalancingFunction barker();
  static BalancingFunction min_one();
  // (x + ... + x^j) / (1 + x + ... + x^j); j = 1 is Barker.
  static BalancingFunction gj(int j);
  static BalancingFunction custom(std::string name, std::function<double(double)> g,
                                  std::optional<std::function<double(double)>> g_prime = std::nullopt);

  double operator()(double x) const;
  bool differentiable() const;
  // Throws PreconditionError when g has no derivative (min-one).
  double derivative(double x) const;
  // |g'| bound used by Metropolis-Hastings constants: g' where available,
  // the a.e. derivative 1{x <= 1} for min-one.
  double derivative_or_indicator(double x) const;

  Kind kind() const { return kind_; }
  int j() const { return j_; }
  std::string tag() const;

 private:
  Kind kind_ = Kind::barker;
  int j_ = 1;
  std::string name_;
  std::function<double(double)> g_;
  std::optional<std::function<double(double)>> g_prime_;
};

}  // namespace mcc
