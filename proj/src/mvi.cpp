#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mcc/calculus.hpp"
#include "mcc/error.hpp"
#include "mcc/rng.hpp"

namespace mcc {

namespace {

enum class HastingsMode { differentiable, metropolis };

std::string t_text(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

MviConstants hastings_constants(const HastingsFamily& family, const GridDensity& mu, const GridDensity& nu,
                                const Start& start, const WeightFunction& V, const MviOptions& opt,
                                HastingsMode mode) {
  require_same_grid(mu.grid(), nu.grid(), "mvi constants");
  if (mode == HastingsMode::differentiable && !family.balancing().differentiable())
    throw PreconditionError("hastings_mvi_constants needs a differentiable balancing function; use the "
                            "Metropolis-Hastings constants for min-one");
  const Grid& g = mu.grid();
  const auto Vg = V.on(g);
  const auto& w = g.weights();
  const std::size_t n = g.size();
  const auto& q = family.proposal();
  const auto ts = simpson_nodes(opt.t_nodes);
  const ContaminationCurve curve(mu, nu);
  std::vector<double> main(ts.size(), 0.0), perp(ts.size(), 0.0);
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const HastingsKernel k = family.at(curve.at(ts[ti]));
    const GridDensity& mt = k.target();
    const auto& bal = k.balancing();
    const auto gp = [&](double r) {
      return mode == HastingsMode::metropolis ? 1.0 : std::abs(bal.derivative(r));
    };
    if (!start.is_point()) {
      const GridDensity& rho = start.rho();
      for (std::size_t i = 0; i < n; ++i) {
        const double m = mt.floored(i);
        if (!(rho[i] / (m * m) <= opt.derivative.warm_start_ceiling)) {
          std::ostringstream os;
          os << "warm-start violation at t = " << t_text(ts[ti]) << ": rho/mu_t^2 exceeds ceiling "
             << opt.derivative.warm_start_ceiling << " at node " << i;
          throw PreconditionError(os.str());
        }
      }
      double total = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : total)
      for (std::size_t z = 0; z < n; ++z) {
        const double mz = mt.floored(z);
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
          if (y == z) continue;
          const double vv = (Vg[y] + Vg[z]) / Vg[y];
          if (rho[z] != 0.0) s1 = std::max(s1, vv * rho[z] / mz * q.density(y, z) * gp(k.ratio(z, y)));
          if (rho[y] != 0.0) {
            const double my = mt.floored(y);
            s2 = std::max(s2, vv * mz * q.density(z, y) * gp(k.ratio(y, z)) * rho[y] / (my * my));
          }
        }
        total += w[z] * (s1 + s2);
      }
      main[ti] = total;
    } else {
      const std::size_t x = start.node();
      const double mx = mt.floored(x);
      double sup = 0.0, integral = 0.0;
      for (std::size_t y = 0; y < n; ++y) {
        if (y == x) continue;
        sup = std::max(sup, (Vg[x] + Vg[y]) * gp(k.ratio(x, y)) * q.density(y, x) / mx / Vg[y]);
        const double r = k.ratio(x, y);
        const double gz = mode == HastingsMode::metropolis ? (r <= 1.0 ? 1.0 : 0.0) : std::abs(bal.derivative(r));
        integral += w[y] * (Vg[x] + Vg[y]) * mt.floored(y) / (mx * mx) * q.density(y, x) * gz;
      }
      main[ti] = sup;
      perp[ti] = integral;
    }
  }
  MviConstants c;
  c.m_rho = simpson(main);
  c.m_perp = start.is_point() ? simpson(perp) : 0.0;
  c.v_tag = V.tag();
  c.formula = mode == HastingsMode::metropolis ? "metropolis-hastings" : "hastings";
  c.t_nodes = opt.t_nodes;
  c.point_start = start.is_point();
  return c;
}

}  // namespace

MviConstants hastings_mvi_constants(const HastingsFamily& family, const GridDensity& mu, const GridDensity& nu,
                                    const Start& start, const WeightFunction& V, const MviOptions& opt) {
  return hastings_constants(family, mu, nu, start, V, opt, HastingsMode::differentiable);
}

MviConstants mh_mvi_constants(const HastingsFamily& family, const GridDensity& mu, const GridDensity& nu,
                              const Start& start, const WeightFunction& V, const MviOptions& opt) {
  return hastings_constants(family, mu, nu, start, V, opt, HastingsMode::metropolis);
}

MviConstants gibbs_mvi_constants(const GridDensity& mu, const GridDensity& nu, const Start& start,
                                 const WeightFunction& V, const MviOptions& opt) {
  require_same_grid(mu.grid(), nu.grid(), "mvi constants");
  const Grid& g = mu.grid();
  if (g.dim() != 2) throw InvalidInput("Gibbs constants need a two-dimensional grid");
  const auto Vg = V.on(g);
  const Axis& a1 = g.axis(0);
  const Axis& a2 = g.axis(1);
  const std::size_t n1 = a1.n_points, n2 = a2.n_points;
  const auto ts = simpson_nodes(opt.t_nodes);
  const ContaminationCurve curve(mu, nu);
  std::vector<double> main(ts.size(), 0.0), perp(ts.size(), 0.0);
  std::vector<double> rho2(n2, 0.0);
  if (!start.is_point())
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) rho2[j] += a1.weight(i) * start.rho()[g.index(i, j)];
  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const GibbsKernel k(curve.at(ts[ti]));
    const auto& mu1 = k.marginal1();
    const auto& mu2 = k.marginal2();
    std::vector<double> H(n1, 0.0), PV(n2, 0.0);
    for (std::size_t y1 = 0; y1 < n1; ++y1)
      for (std::size_t w2 = 0; w2 < n2; ++w2) H[y1] += a2.weight(w2) * Vg[g.index(y1, w2)] * k.cond21(y1, w2);
    for (std::size_t y2 = 0; y2 < n2; ++y2)
      for (std::size_t w1 = 0; w1 < n1; ++w1) PV[y2] += a1.weight(w1) * k.cond12(y2, w1) * H[w1];
    for (double v : H)
      if (!std::isfinite(v)) throw PreconditionError("unbounded conditional at t = " + t_text(ts[ti]));
    if (!start.is_point()) {
      for (std::size_t j = 0; j < n2; ++j)
        if (!(rho2[j] / mu2[j] <= opt.derivative.warm_start_ceiling))
          throw PreconditionError("warm-start violation at t = " + t_text(ts[ti]) +
                                  ": rho_2/mu_2 exceeds ceiling at second-coordinate node " + std::to_string(j));
      std::vector<double> m(n1, 0.0);
      for (std::size_t y1 = 0; y1 < n1; ++y1)
        for (std::size_t u2 = 0; u2 < n2; ++u2) m[y1] += a2.weight(u2) * rho2[u2] * k.cond12(u2, y1);
      double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
      for (std::size_t y1 = 0; y1 < n1; ++y1) {
        t3 = std::max(t3, m[y1] / mu1[y1]);
        for (std::size_t y2 = 0; y2 < n2; ++y2) {
          const double v = Vg[g.index(y1, y2)];
          const double r = rho2[y2] / mu2[y2];
          t1 = std::max(t1, H[y1] * r / v);
          t2 = std::max(t2, PV[y2] * r / v);
          t4 = std::max(t4, H[y1] * m[y1] / mu1[y1] / v);
        }
      }
      main[ti] = t1 + t2 + t3 + t4;
    } else {
      const std::size_t x2 = g.second(start.node());
      double sup = 0.0, sp = 0.0;
      for (std::size_t y1 = 0; y1 < n1; ++y1) {
        const double c = k.cond12(x2, y1) / mu1[y1];
        for (std::size_t y2 = 0; y2 < n2; ++y2) {
          const double v = Vg[g.index(y1, y2)];
          sup = std::max(sup, (v + H[y1]) * c / v);
        }
        sp = std::max(sp, (H[y1] + PV[x2]) / mu2[x2]);
      }
      main[ti] = sup;
      perp[ti] = sp;
    }
  }
  MviConstants c;
  c.m_rho = simpson(main);
  c.m_perp = start.is_point() ? (opt.perp_at_t0 ? perp.front() : simpson(perp)) : 0.0;
  c.v_tag = V.tag();
  c.formula = "gibbs";
  c.t_nodes = opt.t_nodes;
  c.point_start = start.is_point();
  return c;
}

MviConstants mvi_constants(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                           const Start& start, const WeightFunction& V, const MviOptions& opt) {
  if (const auto* h = std::get_if<HastingsFamily>(&family)) {
    if (h->balancing().differentiable()) return hastings_mvi_constants(*h, mu, nu, start, V, opt);
    return mh_mvi_constants(*h, mu, nu, start, V, opt);
  }
  return gibbs_mvi_constants(mu, nu, start, V, opt);
}

double perp_distance(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu, const Start& start) {
  const Grid& g = mu.grid();
  if (!start.is_point()) {
    const auto& w = g.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * start.rho()[i] * std::abs(mu[i] - nu[i]);
    return s;
  }
  const std::size_t x = start.node();
  if (std::holds_alternative<HastingsFamily>(family)) return std::abs(mu[x] - nu[x]);
  const std::size_t x2 = g.second(x);
  const Axis& a1 = g.axis(0);
  double s = 0.0;
  for (std::size_t y1 = 0; y1 < a1.n_points; ++y1) {
    const std::size_t i = g.index(y1, x2);
    s += a1.weight(y1) * std::abs(mu[i] - nu[i]);
  }
  return s;
}

GridFunction random_bv_function(const Grid& g, const GridFunction& V, std::uint64_t seed, std::uint64_t index) {
  RngStream rng(seed, 0x6276, index);
  constexpr int K = 4;
  double c[K], om1[K], om2[K], ph[K], norm = 0.0;
  for (int k = 0; k < K; ++k) {
    c[k] = 2.0 * rng.uniform() - 1.0;
    om1[k] = 0.2 + 2.8 * rng.uniform();
    om2[k] = 0.2 + 2.8 * rng.uniform();
    ph[k] = 2.0 * std::numbers::pi * rng.uniform();
    norm += std::abs(c[k]);
  }
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += c[k] * std::sin(om1[k] * p[0] + (g.dim() == 2 ? om2[k] * p[1] : 0.0) + ph[k]);
    v[i] = V[i] * s / norm;
  }
  return GridFunction(g, std::move(v));
}

MviCheckReport check_mean_value_inequality(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                           const Start& start, const WeightFunction& V, std::size_t trials,
                                           std::uint64_t seed, const MviOptions& opt) {
  MviCheckReport rep;
  rep.constants = mvi_constants(family, mu, nu, start, V, opt);
  const Grid& g = mu.grid();
  const auto Vg = V.on(g);
  rep.v_distance = v_norm_measure(difference(nu, mu), Vg);
  rep.perp_distance = perp_distance(family, mu, nu, start);
  rep.bound = rep.constants.m_rho * rep.v_distance + rep.constants.m_perp * rep.perp_distance;
  rep.metric_bound = std::max(rep.constants.m_rho, rep.constants.m_perp) * (rep.v_distance + rep.perp_distance);
  const auto k_mu = make_kernel(family, mu);
  const auto k_nu = make_kernel(family, nu);
  const auto m0 = start.masses(g);
  const auto p_mu = k_mu->push(m0);
  const auto p_nu = k_nu->push(m0);
  std::vector<double> diff(p_mu.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p_mu[i] - p_nu[i];
  rep.exact_lhs = v_norm_masses(diff, Vg.values);
  rep.trials = trials;
  const double slack = 1e-9 * rep.bound + 1e-14;
  std::size_t violations = 0;
  double emax = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : violations) reduction(max : emax)
  for (std::size_t i = 0; i < trials; ++i) {
    const auto f = random_bv_function(g, Vg, seed, i);
    double s = 0.0;
    for (std::size_t j = 0; j < diff.size(); ++j) s += diff[j] * f[j];
    const double a = std::abs(s);
    emax = std::max(emax, a);
    if (a > rep.bound + slack) ++violations;
  }
  if (rep.exact_lhs > rep.bound + slack) ++violations;
  rep.violations = violations;
  rep.empirical_max = emax;
  rep.empirical_max_ratio = rep.bound > 0.0 ? emax / rep.bound : 0.0;
  rep.pass = violations == 0 && rep.exact_lhs <= rep.metric_bound + slack;
  return rep;
}

UniformBoundednessReport uniform_boundedness_scan(const KernelFamily& family, const GridDensity& mu,
                                                  const GridDensity& nu, const WeightFunction& V,
                                                  const std::vector<std::size_t>& x_nodes, const MviOptions& opt) {
  UniformBoundednessReport rep;
  rep.nodes = x_nodes;
  rep.finite = true;
  for (std::size_t x : x_nodes) {
    const auto c = mvi_constants(family, mu, nu, Start::point(x), V, opt);
    rep.m_x.push_back(c.m_rho);
    rep.m_perp.push_back(c.m_perp);
    rep.max_m_x = std::max(rep.max_m_x, c.m_rho);
    rep.max_m_perp = std::max(rep.max_m_perp, c.m_perp);
    rep.finite = rep.finite && std::isfinite(c.m_rho) && std::isfinite(c.m_perp);
  }
  if (x_nodes.size() >= 3) {
    const auto it = std::min_element(rep.m_x.begin(), rep.m_x.end());
    const std::size_t c = static_cast<std::size_t>(it - rep.m_x.begin());
    bool mono = true;
    for (std::size_t i = c + 1; i < rep.m_x.size(); ++i) mono = mono && rep.m_x[i] >= rep.m_x[i - 1];
    for (std::size_t i = c; i > 0; --i) mono = mono && rep.m_x[i - 1] >= rep.m_x[i];
    rep.grows_toward_boundary = mono && (rep.m_x.front() > *it || rep.m_x.back() > *it);
  }
  return rep;
}

}  // namespace mcc
