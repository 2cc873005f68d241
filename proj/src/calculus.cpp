#include "mcc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc {

std::vector<double> simpson_nodes(std::size_t n) {
  if (n < 3 || n % 2 == 0) throw InvalidInput("Simpson rule needs an odd node count >= 3");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

double simpson(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 3 || n % 2 == 0) throw InvalidInput("Simpson rule needs an odd node count >= 3");
  double s = v[0] + v[n - 1];
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
  return s / (3.0 * static_cast<double>(n - 1));
}

namespace {

std::string t_label(double t) {
  std::ostringstream os;
  os.precision(6);
  os << t;
  return os.str();
}

KernelDerivative derivative_at_t(const KernelFamily& family, const GridDensity& mt, double t, const Start& start,
                                 const GridFunction& f, const DerivativeOptions& opt) {
  try {
    return kernel_derivative(family, mt, start, f, opt);
  } catch (const PreconditionError& e) {
    throw PreconditionError("derivative precondition fails at t = " + t_label(t) + ": " + e.what());
  }
}

}  // namespace

FtcReport verify_ftc(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu, const Start& start,
                     const GridFunction& f, std::size_t t_nodes, double tol, const DerivativeOptions& opt) {
  if (t_nodes < 5) throw InvalidInput("verify_ftc needs at least 5 t nodes");
  require_same_grid(mu.grid(), nu.grid(), "verify_ftc");
  FtcReport rep;
  rep.tolerance = tol;
  rep.t_nodes = simpson_nodes(t_nodes);
  const auto k_mu = make_kernel(family, mu);
  const auto k_nu = make_kernel(family, nu);
  rep.lhs = transition_expectation(*k_mu, start, f.values) - transition_expectation(*k_nu, start, f.values);
  const ContaminationCurve curve(mu, nu);
  const auto chi = difference(mu, nu);
  for (double t : rep.t_nodes) {
    const auto d = derivative_at_t(family, curve.at(t), t, start, f, opt);
    rep.actions.push_back(d.action(chi));
  }
  rep.rhs = simpson(rep.actions);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.pass = rep.residual <= tol;
  return rep;
}

FtcRefinement ftc_refinement(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                             const Start& start, const GridFunction& f, const std::vector<std::size_t>& t_nodes,
                             const DerivativeOptions& opt) {
  if (t_nodes.size() < 2) throw InvalidInput("ftc_refinement needs at least two levels");
  FtcRefinement out;
  out.t_nodes = t_nodes;
  double scale = 0.0;
  for (std::size_t n : t_nodes) {
    const auto r = verify_ftc(family, mu, nu, start, f, n, std::numeric_limits<double>::infinity(), opt);
    out.residuals.push_back(r.residual);
    scale = std::max(scale, std::abs(r.lhs));
  }
  const double floor = 1e-12 * std::max(1.0, scale);
  std::size_t i = 0;
  while (i < out.residuals.size() && out.residuals[i] <= floor) ++i;
  if (i == out.residuals.size()) {
    out.factor = std::numeric_limits<double>::infinity();
    out.shrinks = true;
  } else if (i + 1 == out.residuals.size()) {
    out.factor = 0.0;
    out.shrinks = false;
  } else {
    out.factor = out.residuals[i] / std::max(out.residuals[i + 1], 1e-3 * floor);
    out.shrinks = out.factor >= 2.0;
  }
  return out;
}

namespace {

double derivative_numeric(const Pushforward& T, double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (T(x + h) - T(x - h)) / (2.0 * h);
}

double inverse(const Pushforward& T, double y, double span) {
  double lo = y - span;
  double hi = y + span;
  for (int i = 0; i < 200 && !(T(lo) <= y); ++i) lo -= span;
  for (int i = 0; i < 200 && !(T(hi) >= y); ++i) hi += span;
  if (!(T(lo) <= y && T(hi) >= y)) throw PreconditionError("pushforward map does not cover the grid");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(y)); ++i) {
    const double m = 0.5 * (lo + hi);
    if (T(m) < y) lo = m;
    else hi = m;
  }
  return 0.5 * (lo + hi);
}

void require_monotone(const Grid& g, const Pushforward& T) {
  const Axis& a = g.axis(0);
  const std::size_t m = 4 * (a.n_points - 1);
  double prev = T(a.lower);
  for (std::size_t i = 1; i <= m; ++i) {
    const double x = a.lower + (a.upper - a.lower) * static_cast<double>(i) / static_cast<double>(m);
    const double v = T(x);
    if (!(v > prev)) {
      std::ostringstream os;
      os << "pushforward map is not strictly increasing near x = " << x;
      throw PreconditionError(os.str());
    }
    prev = v;
  }
}

}  // namespace

std::vector<double> pushforward_values(const Grid& g, const std::function<double(double)>& mu_pdf,
                                       const Pushforward& T) {
  if (g.dim() != 1) throw InvalidInput("pushforward densities are one-dimensional");
  require_monotone(g, T);
  const Axis& a = g.axis(0);
  const double span = a.upper - a.lower;
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = inverse(T, a.node(i), span);
    v[i] = mu_pdf(x) / derivative_numeric(T, x);
  }
  return v;
}

GridDensity pushforward_density(const Grid& g, const std::function<double(double)>& mu_pdf, const Pushforward& T) {
  return GridDensity::normalized(g, pushforward_values(g, mu_pdf, T), "pushforward");
}

FtcReport verify_ftc_intrinsic(const KernelFamily& family, const Grid& g, const std::function<double(double)>& mu_pdf,
                               const Pushforward& T, const GridDensity& rho, const GridFunction& f,
                               std::size_t t_nodes, std::size_t s_nodes, double tol, const DerivativeOptions& opt) {
  if (g.dim() != 1) throw PreconditionError("intrinsic FTC needs a one-dimensional state space");
  require_monotone(g, T);
  const Axis& a = g.axis(0);
  const std::size_t n = g.size();
  const double h = a.spacing();
  const GridDensity mu = GridDensity::from_pdf(g, [&](const Point& p) { return mu_pdf(p[0]); }, "mu");
  const auto& w = g.weights();
  std::vector<double> shift(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a.node(i);
    const double tx = T(x);
    shift[i] = tx - x;
    if (w[i] * mu[i] > 1e-14 && (tx < a.lower - 1e-12 || tx > a.upper + 1e-12)) {
      std::ostringstream os;
      os << "pushforward maps mass-carrying node x = " << x << " outside the grid";
      throw PreconditionError(os.str());
    }
  }
  const GridDensity nu = pushforward_density(g, mu_pdf, T);
  FtcReport rep;
  rep.tolerance = tol;
  rep.t_nodes = simpson_nodes(t_nodes);
  const auto s = simpson_nodes(s_nodes);
  const Start start = Start::density(rho);
  rep.lhs = transition_expectation(*make_kernel(family, mu), start, f.values) -
            transition_expectation(*make_kernel(family, nu), start, f.values);
  const ContaminationCurve curve(mu, nu);
  for (double t : rep.t_nodes) {
    const auto d = derivative_at_t(family, curve.at(t), t, start, f, opt);
    const auto& D = d.density_part.values;
    std::vector<double> dD(n);
    dD[0] = (D[1] - D[0]) / h;
    dD[n - 1] = (D[n - 1] - D[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) dD[i] = (D[i + 1] - D[i - 1]) / (2.0 * h);
    const auto interp = [&](double z) {
      double u = (z - a.lower) / h;
      u = std::clamp(u, 0.0, static_cast<double>(n - 1));
      const std::size_t j = std::min(static_cast<std::size_t>(u), n - 2);
      const double r = u - static_cast<double>(j);
      return (1.0 - r) * dD[j] + r * dD[j + 1];
    };
    double action = 0.0;
    std::vector<double> vals(s.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (shift[i] == 0.0 || mu[i] == 0.0) continue;
      const double x = a.node(i);
      for (std::size_t k = 0; k < s.size(); ++k) vals[k] = interp(x + s[k] * shift[i]);
      action += w[i] * mu[i] * shift[i] * simpson(vals);
    }
    // action approximates the derivative acting on nu - mu
    rep.actions.push_back(-action);
  }
  rep.rhs = simpson(rep.actions);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.pass = rep.residual <= tol;
  return rep;
}

}  // namespace mcc
