#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcc/derivative.hpp"
#include "mcc/error.hpp"

namespace mcc {

double IteratedDerivative::action(const SignedGridFunction& chi) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.action(chi);
  return s;
}

IteratedDerivative iterated_derivative(const KernelFamily& family, std::size_t k_steps, const GridDensity& mu,
                                       const Start& start, const GridFunction& f, const DerivativeOptions& opt) {
  if (k_steps < 1) throw InvalidInput("iterated_derivative requires k >= 1");
  const auto k = make_kernel(family, mu);
  const Grid& g = mu.grid();
  std::vector<std::vector<double>> starts(k_steps);
  starts[0] = start.masses(g);
  for (std::size_t m = 1; m < k_steps; ++m) starts[m] = k->push(starts[m - 1]);
  std::vector<std::vector<double>> fs(k_steps);
  fs[0] = f.values;
  for (std::size_t j = 1; j < k_steps; ++j) fs[j] = k->apply(fs[j - 1]);

  IteratedDerivative out;
  std::vector<std::size_t> failing;
  std::string first_message;
  for (std::size_t j = 0; j < k_steps; ++j) {
    const std::size_t m = k_steps - j - 1;
    const Start sj = (m == 0) ? start : Start::density(GridDensity::from_masses(g, starts[m], "shifted start"));
    try {
      out.terms.push_back(kernel_derivative(*k, sj, GridFunction(g, fs[j]), opt));
    } catch (const PreconditionError& e) {
      failing.push_back(j);
      if (first_message.empty()) first_message = e.what();
    }
  }
  if (!failing.empty()) {
    std::ostringstream os;
    os << "iterated derivative precondition fails for j =";
    for (std::size_t j : failing) os << ' ' << j;
    os << " (" << first_message << ")";
    throw PreconditionError(os.str());
  }
  return out;
}

LimitCheckReport iterated_derivative_limit_check(const KernelFamily& family, const GridDensity& mu,
                                                 const GridDensity& nu, const Start& start, const GridFunction& f,
                                                 std::size_t k_max, double tol, const DerivativeOptions& opt) {
  if (k_max < 1) throw InvalidInput("limit check requires k_max >= 1");
  const auto chi = difference(nu, mu);
  LimitCheckReport rep;
  rep.tolerance = tol;
  rep.limit = integrate_signed(f.values, chi);
  const auto k = make_kernel(family, mu);
  const Grid& g = mu.grid();
  std::vector<std::vector<double>> starts{start.masses(g)};
  std::vector<std::vector<double>> fs{f.values};
  // term(m, j): derivative with start P^m and function P^j f, acting on chi.
  std::vector<std::vector<double>> term(k_max, std::vector<double>(k_max, std::nan("")));
  for (std::size_t kk = 1; kk <= k_max; ++kk) {
    while (starts.size() < kk) starts.push_back(k->push(starts.back()));
    while (fs.size() < kk) fs.push_back(k->apply(fs.back()));
    double a = 0.0;
    for (std::size_t j = 0; j < kk; ++j) {
      const std::size_t m = kk - j - 1;
      if (std::isnan(term[m][j])) {
        const Start sj = (m == 0) ? start : Start::density(GridDensity::from_masses(g, starts[m]));
        term[m][j] = kernel_derivative(*k, sj, GridFunction(g, fs[j]), opt).action(chi);
      }
      a += term[m][j];
    }
    rep.actions.push_back(a);
    rep.gaps.push_back(std::abs(a - rep.limit));
  }
  const double floor = 1e-13 * std::max(1.0, std::abs(rep.limit));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < rep.gaps.size(); ++i)
    if (rep.gaps[i] > floor) pts.emplace_back(static_cast<double>(i + 1), std::log(rep.gaps[i]));
  const double final_gap = rep.gaps.back();
  if (pts.size() < 3) {
    rep.geometric = true;
    rep.rate = 0.0;
  } else {
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    const double slope = sxy / sxx;
    rep.rate = std::exp(slope);
    rep.geometric = slope < 0.0;
  }
  const double first = rep.gaps.front();
  if (final_gap > 10.0 * std::max(first, floor)) {
    rep.geometric = false;
    rep.diagnostic = "gap grows with k (non-monotone blow-up)";
  } else if (!rep.geometric) {
    rep.diagnostic = "gap does not decay geometrically";
  }
  rep.pass = rep.geometric && final_gap < tol;
  if (rep.pass) rep.diagnostic = "ok";
  else if (rep.diagnostic.empty()) rep.diagnostic = "final gap above tolerance";
  return rep;
}

}  // namespace mcc
