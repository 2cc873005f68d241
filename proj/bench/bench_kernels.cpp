// Parallel kernels against the serial reference: wall time and max deviation.
#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>

#include "mcc/analytic.hpp"
#include "mcc/derivative.hpp"
#include "mcc/reference.hpp"

using namespace mcc;

namespace {

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 801;
  const Grid g(Axis{-8.0, 8.0, n});
  const auto target = AnalyticDensity::mixture({0.3, 0.7}, {-1.5, 1.0}, {0.8, 1.2});
  const auto mu = GridDensity::from_pdf(g, [&](const Point& p) { return target(p); });
  const auto rho = GridDensity::from_pdf(g, [](const Point& p) { return normal_pdf(p[0], 0.3, 0.7); });
  const auto q = ProposalKernel::random_walk(g, 1.0);
  const auto bal = BalancingFunction::barker();
  const auto f = GridFunction::evaluate(g, named_test_function("tanh"));
  std::printf("grid %zu nodes, %d threads\n", n, omp_get_max_threads());
  std::printf("%-22s %12s %12s %12s\n", "operation", "parallel s", "serial s", "max diff");

  std::optional<HastingsKernel> k;
  const double t_build = seconds([&] { k.emplace(mu, q, bal); });
  std::vector<double> a, b;
  const double t_apply = seconds([&] { a = k->apply(f.values); });
  const double r_apply = seconds([&] { b = reference::hastings_apply(mu, q, bal, f.values); });
  std::printf("%-22s %12.4f %12.4f %12.3e\n", "apply (incl. build)", t_build + t_apply, r_apply, max_diff(a, b));

  const auto m = rho.masses();
  const double t_push = seconds([&] { a = k->push(m); });
  const double r_push = seconds([&] { b = reference::hastings_push(mu, q, bal, m); });
  std::printf("%-22s %12.4f %12.4f %12.3e\n", "push", t_push, r_push, max_diff(a, b));

  const double t_der = seconds([&] { a = hastings_derivative(*k, rho, f, {std::numeric_limits<double>::infinity()}).density_part.values; });
  const double r_der = seconds([&] { b = reference::hastings_derivative_density(mu, q, bal, rho, f.values); });
  std::printf("%-22s %12.4f %12.4f %12.3e\n", "derivative density", t_der, r_der, max_diff(a, b));
  return 0;
}
