#include "mcc/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc {

double KernelDerivative::action(const SignedGridFunction& chi) const {
  require_same_grid(chi.grid, density_part.grid, "derivative action");
  double s = integrate_signed(density_part.values, chi);
  if (singular == Singular::point) {
    s += chi[point] * (*singular_part)[point];
  } else if (singular == Singular::slice) {
    const Grid& g = chi.grid;
    const std::size_t x2 = g.second(point);
    const Axis& a1 = g.axis(0);
    for (std::size_t y1 = 0; y1 < a1.n_points; ++y1)
      s += a1.weight(y1) * chi[g.index(y1, x2)] * (*singular_part)[y1];
  }
  return s;
}

double KernelDerivative::centering_residual() const {
  return std::abs(action(SignedGridFunction(at.grid(), at.values())));
}

double KernelDerivative::density_centering() const { return std::abs(integrate(density_part, at)); }

namespace {

void check_hastings_warm_start(const HastingsKernel& k, const GridDensity& rho, double ceiling) {
  const GridDensity& mu = k.target();
  double worst = 0.0;
  std::size_t node = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu.floored(i);
    const double r = rho[i] / (m * m);
    if (!(r <= worst)) {
      worst = r;
      node = i;
    }
  }
  if (!(worst <= ceiling)) {
    std::ostringstream os;
    os << "warm-start violation: max rho/mu^2 = " << worst << " at node " << node << " (x = "
       << mu.grid().coordinate(node) << ") exceeds ceiling " << ceiling;
    throw PreconditionError(os.str());
  }
}

void require_differentiable(const HastingsKernel& k) {
  if (!k.balancing().differentiable())
    throw PreconditionError("balancing function '" + k.balancing().tag() +
                            "' has no derivative; the Hastings derivative requires differentiable g");
}

// L(y) = -(1/mu(y)^2) sum_w w_w (f(w) - f(y)) q(w,y) g'(r(y,w)) mu(w)
std::vector<double> hastings_loss_factor(const HastingsKernel& k, std::span<const double> f) {
  const GridDensity& mu = k.target();
  const ProposalKernel& q = k.proposal();
  const BalancingFunction& g = k.balancing();
  const auto& w = mu.grid().weights();
  const std::size_t n = mu.size();
  std::vector<double> L(n);
#pragma omp parallel for schedule(static)
  for (std::size_t y = 0; y < n; ++y) {
    const double my = mu.floored(y);
    double s = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      if (z == y) continue;
      const double df = f[z] - f[y];
      if (df == 0.0) continue;
      s += w[z] * df * q.density(z, y) * g.derivative(k.ratio(y, z)) * mu.floored(z);
    }
    L[y] = -s / (my * my);
  }
  return L;
}

}  // namespace

KernelDerivative hastings_derivative(const HastingsKernel& k, const GridDensity& rho, const GridFunction& f,
                                     const DerivativeOptions& opt) {
  require_differentiable(k);
  require_same_grid(k.grid(), rho.grid(), "hastings_derivative start");
  require_same_grid(k.grid(), f.grid, "hastings_derivative function");
  check_hastings_warm_start(k, rho, opt.warm_start_ceiling);
  const GridDensity& mu = k.target();
  const ProposalKernel& q = k.proposal();
  const BalancingFunction& g = k.balancing();
  const auto& w = mu.grid().weights();
  const std::size_t n = mu.size();
  const auto L = hastings_loss_factor(k, f.values);
  std::vector<double> D(n);
#pragma omp parallel for schedule(static)
  for (std::size_t y = 0; y < n; ++y) {
    double gain = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == y || rho[u] == 0.0) continue;
      const double df = f[y] - f[u];
      if (df == 0.0) continue;
      gain += w[u] * df * rho[u] / mu.floored(u) * g.derivative(k.ratio(u, y)) * q.density(y, u);
    }
    D[y] = gain + rho[y] * L[y];
  }
  return KernelDerivative{GridFunction(mu.grid(), std::move(D)), std::nullopt, KernelDerivative::Singular::none,
                          0, mu, Start::density(rho), f};
}

KernelDerivative hastings_derivative_at_point(const HastingsKernel& k, std::size_t x, const GridFunction& f) {
  require_differentiable(k);
  require_same_grid(k.grid(), f.grid, "hastings_derivative_at_point function");
  const GridDensity& mu = k.target();
  if (x >= mu.size()) throw RangeError("point start outside grid");
  const ProposalKernel& q = k.proposal();
  const BalancingFunction& g = k.balancing();
  const std::size_t n = mu.size();
  const double mx = mu.floored(x);
  std::vector<double> D(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t y = 0; y < n; ++y) {
    if (y == x) continue;
    D[y] = (f[y] - f[x]) * g.derivative(k.ratio(x, y)) * q.density(y, x) / mx;
  }
  auto S = hastings_loss_factor(k, f.values);
  return KernelDerivative{GridFunction(mu.grid(), std::move(D)),
                          GridFunction(mu.grid(), std::move(S)),
                          KernelDerivative::Singular::point,
                          x,
                          mu,
                          Start::point(x),
                          f};
}

KernelDerivative gibbs_derivative(const GibbsKernel& k, const GridDensity& rho, const GridFunction& f,
                                  const DerivativeOptions& opt) {
  require_same_grid(k.grid(), rho.grid(), "gibbs_derivative start");
  require_same_grid(k.grid(), f.grid, "gibbs_derivative function");
  const Grid& g = k.grid();
  const std::size_t n1 = k.n1();
  const std::size_t n2 = k.n2();
  const Axis& a1 = g.axis(0);
  const Axis& a2 = g.axis(1);
  const auto& mu1 = k.marginal1();
  const auto& mu2 = k.marginal2();
  std::vector<double> rho2(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) rho2[j] += a1.weight(i) * rho[g.index(i, j)];
  double worst = 0.0;
  std::size_t worst_node = 0;
  for (std::size_t j = 0; j < n2; ++j) {
    const double r = rho2[j] / mu2[j];
    if (!(r <= worst)) {
      worst = r;
      worst_node = j;
    }
  }
  if (!(worst <= opt.warm_start_ceiling)) {
    std::ostringstream os;
    os << "warm-start violation: max rho_2/mu_2 = " << worst << " at second-coordinate node " << worst_node
       << " exceeds ceiling " << opt.warm_start_ceiling;
    throw PreconditionError(os.str());
  }
  const auto h = k.conditional_mean(f.values);
  const auto pf = k.second_stage(h);
  std::vector<double> m(n1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t y1 = 0; y1 < n1; ++y1) {
    double s = 0.0;
    for (std::size_t u2 = 0; u2 < n2; ++u2) s += a2.weight(u2) * rho2[u2] * k.cond12(u2, y1);
    m[y1] = s;
  }
  std::vector<double> D(n1 * n2);
#pragma omp parallel for schedule(static)
  for (std::size_t y1 = 0; y1 < n1; ++y1)
    for (std::size_t y2 = 0; y2 < n2; ++y2) {
      const std::size_t i = g.index(y1, y2);
      D[i] = rho2[y2] / mu2[y2] * (h[y1] - pf[y2]) + (f[i] - h[y1]) * m[y1] / mu1[y1];
    }
  return KernelDerivative{GridFunction(g, std::move(D)), std::nullopt, KernelDerivative::Singular::none,
                          0, k.target(), Start::density(rho), f};
}

KernelDerivative gibbs_derivative_at_point(const GibbsKernel& k, std::size_t x, const GridFunction& f) {
  require_same_grid(k.grid(), f.grid, "gibbs_derivative_at_point function");
  const Grid& g = k.grid();
  if (x >= g.size()) throw RangeError("point start outside grid");
  const std::size_t n1 = k.n1();
  const std::size_t n2 = k.n2();
  const std::size_t x2 = g.second(x);
  const auto& mu1 = k.marginal1();
  const auto& mu2 = k.marginal2();
  const auto h = k.conditional_mean(f.values);
  const auto pf = k.second_stage(h);
  std::vector<double> D(n1 * n2);
#pragma omp parallel for schedule(static)
  for (std::size_t y1 = 0; y1 < n1; ++y1) {
    const double c = k.cond12(x2, y1) / mu1[y1];
    for (std::size_t y2 = 0; y2 < n2; ++y2) {
      const std::size_t i = g.index(y1, y2);
      D[i] = (f[i] - h[y1]) * c;
    }
  }
  std::vector<double> s(n1);
  for (std::size_t y1 = 0; y1 < n1; ++y1) s[y1] = (h[y1] - pf[x2]) / mu2[x2];
  return KernelDerivative{GridFunction(g, std::move(D)),
                          GridFunction(Grid(g.axis(0)), std::move(s)),
                          KernelDerivative::Singular::slice,
                          x,
                          k.target(),
                          Start::point(x),
                          f};
}

KernelDerivative kernel_derivative(const MarkovKernel& k, const Start& start, const GridFunction& f,
                                   const DerivativeOptions& opt) {
  if (const auto* h = dynamic_cast<const HastingsKernel*>(&k)) {
    if (start.is_point()) return hastings_derivative_at_point(*h, start.node(), f);
    return hastings_derivative(*h, start.rho(), f, opt);
  }
  if (const auto* gk = dynamic_cast<const GibbsKernel*>(&k)) {
    if (start.is_point()) return gibbs_derivative_at_point(*gk, start.node(), f);
    return gibbs_derivative(*gk, start.rho(), f, opt);
  }
  throw InvalidInput("kernel_derivative: unsupported kernel type");
}

KernelDerivative kernel_derivative(const KernelFamily& family, const GridDensity& mu, const Start& start,
                                   const GridFunction& f, const DerivativeOptions& opt) {
  const auto k = make_kernel(family, mu);
  return kernel_derivative(*k, start, f, opt);
}

DriftDerivativeReport drift_via_derivative(const MarkovKernel& k, const GridFunction& f,
                                           const std::vector<bool>& in_C, double b) {
  require_same_grid(k.grid(), f.grid, "drift_via_derivative");
  if (in_C.size() != f.size()) throw InvalidInput("drift_via_derivative: set mask size mismatch");
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!(f[i] >= 0.0) || !std::isfinite(f[i]))
      throw InvalidInput("drift_via_derivative: f must be finite and nonnegative");
  DriftDerivativeReport rep;
  const auto pf = k.apply(f.values);
  std::vector<double> gen(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) gen[i] = f[i] - pf[i];
  std::vector<double> D = gen;
  bool use_derivative = true;
  if (const auto* h = dynamic_cast<const HastingsKernel*>(&k)) use_derivative = h->balancing().differentiable();
  if (use_derivative) {
    DerivativeOptions opt;
    opt.warm_start_ceiling = std::numeric_limits<double>::infinity();
    const auto d = kernel_derivative(k, Start::density(k.target()), f, opt);
    D = d.density_part.values;
    rep.via_generator_identity = true;
    for (std::size_t i = 0; i < D.size(); ++i) rep.identity_gap = std::max(rep.identity_gap, std::abs(D[i] - gen[i]));
  }
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double v = (1.0 - (in_C[i] ? b : 0.0)) - D[i];
    if (v > rep.worst_violation) {
      rep.worst_violation = v;
      rep.worst_node = i;
    }
  }
  rep.holds = rep.worst_violation <= 1e-12;
  return rep;
}

double interchange_margin(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                          const Start& start, const GridFunction& f) {
  const ContaminationCurve curve(mu, nu);
  const auto chi = difference(nu, mu);
  double best = 0.0;
  for (double t : {0.0, 0.5, 1.0}) {
    const GridDensity mt = curve.at(t);
    const auto k = make_kernel(family, mt);
    const auto rho_m = start.masses(mt.grid());
    double total = 0.0;
    if (const auto* h = dynamic_cast<const HastingsKernel*>(k.get())) {
      const auto& w = mt.grid().weights();
      const std::size_t n = mt.size();
      const auto& q = h->proposal();
      const auto& g = h->balancing();
#pragma omp parallel for schedule(static) reduction(+ : total)
      for (std::size_t u = 0; u < n; ++u) {
        if (rho_m[u] == 0.0) continue;
        const double mu_u = mt.floored(u);
        double s = 0.0;
        for (std::size_t z = 0; z < n; ++z) {
          if (z == u) continue;
          const double gp = g.derivative_or_indicator(h->ratio(u, z));
          s += w[z] * std::abs(f[z] - f[u]) * q.density(z, u) * gp *
               (std::abs(chi[z]) / mu_u + mt.floored(z) * std::abs(chi[u]) / (mu_u * mu_u));
        }
        total += rho_m[u] * s;
      }
    } else {
      const auto& gk = static_cast<const GibbsKernel&>(*k);
      const Grid& g = mt.grid();
      const std::size_t n1 = gk.n1();
      const std::size_t n2 = gk.n2();
      const Axis& a1 = g.axis(0);
      const Axis& a2 = g.axis(1);
      std::vector<double> r2(n2, 0.0);
      for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j) r2[j] += rho_m[g.index(i, j)];
      std::vector<double> absf(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) absf[i] = std::abs(f[i]);
      const auto H = gk.conditional_mean(absf);
      const auto PH = gk.second_stage(H);
      for (std::size_t x2 = 0; x2 < n2; ++x2) {
        if (r2[x2] == 0.0) continue;
        double s = 0.0;
        for (std::size_t w1 = 0; w1 < n1; ++w1) {
          double inner = 0.0;
          for (std::size_t w2 = 0; w2 < n2; ++w2) {
            const std::size_t i = g.index(w1, w2);
            inner += a2.weight(w2) * std::abs(chi[i]) * (absf[i] + H[w1]);
          }
          const std::size_t j = g.index(w1, x2);
          s += a1.weight(w1) * (std::abs(chi[j]) * (H[w1] + PH[x2]) / gk.marginal2()[x2] +
                                gk.cond12(x2, w1) * inner / gk.marginal1()[w1]);
        }
        total += r2[x2] * s;
      }
    }
    best = std::max(best, total);
  }
  return best;
}

}  // namespace mcc
