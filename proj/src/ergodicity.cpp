#include "mcc/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcc/error.hpp"

namespace mcc {

double drift_floor(double drift_rate, double b) { return b / (2.0 * (1.0 - drift_rate)) - 1.0; }

std::vector<bool> level_set(const Grid& g, const WeightFunction& V, double d) {
  const auto v = V.on(g);
  std::vector<bool> in(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) in[i] = v[i] <= d;
  return in;
}

namespace {

void require_kernels(const std::vector<const MarkovKernel*>& kernels) {
  if (kernels.empty()) throw InvalidInput("kernel list is empty");
  for (const auto* k : kernels) require_same_grid(kernels.front()->grid(), k->grid(), "kernel list");
}

}  // namespace

DriftCertificate check_drift(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                             double drift_rate, double b, double d) {
  require_kernels(kernels);
  if (!(drift_rate > 0.0 && drift_rate < 1.0)) throw InvalidInput("drift_rate must lie in (0,1)");
  if (!(b >= 0.0)) throw InvalidInput("b must be nonnegative");
  if (d < drift_floor(drift_rate, b)) {
    std::ostringstream os;
    os << "level d = " << d << " is below the floor b/(2(1-drift_rate)) - 1 = " << drift_floor(drift_rate, b);
    throw PreconditionError(os.str());
  }
  const Grid& g = kernels.front()->grid();
  const auto v = V.on(g);
  DriftCertificate c;
  c.v_tag = V.tag();
  c.drift_rate = drift_rate;
  c.b = b;
  c.d = d;
  c.worst_violation = -std::numeric_limits<double>::infinity();
  double vmax = 0.0;
  for (double x : v.values) vmax = std::max(vmax, x);
  for (std::size_t n = 0; n < kernels.size(); ++n) {
    const auto pv = kernels[n]->apply(v.values);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double viol = pv[i] - drift_rate * v[i] - (v[i] <= d ? b : 0.0);
      if (viol > c.worst_violation) {
        c.worst_violation = viol;
        c.worst_kernel = n;
        c.worst_node = i;
      }
    }
  }
  c.pass = c.worst_violation <= 1e-12 * vmax;
  if (c.pass) {
    c.diagnostic = "ok";
  } else {
    std::ostringstream os;
    os << "drift fails for kernel " << c.worst_kernel << " at x = " << g.coordinate(c.worst_node) << " by "
       << c.worst_violation;
    c.diagnostic = os.str();
  }
  return c;
}

DriftCertificate scan_drift(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                            const std::vector<double>& d_levels) {
  require_kernels(kernels);
  if (d_levels.empty()) throw InvalidInput("scan_drift needs at least one level");
  const Grid& g = kernels.front()->grid();
  const auto v = V.on(g);
  std::vector<std::vector<double>> pv;
  for (const auto* k : kernels) pv.push_back(k->apply(v.values));
  DriftCertificate last;
  last.v_tag = V.tag();
  last.diagnostic = "no level produced a certificate";
  for (double d : d_levels) {
    double lam_out = 1e-3;
    for (const auto& p : pv)
      for (std::size_t i = 0; i < g.size(); ++i)
        if (v[i] > d) lam_out = std::max(lam_out, p[i] / v[i]);
    if (!(lam_out < 1.0)) {
      last.d = d;
      last.drift_rate = lam_out;
      last.pass = false;
      std::ostringstream os;
      os << "P V / V reaches " << lam_out << " outside {V <= " << d << "}";
      last.diagnostic = os.str();
      continue;
    }
    for (int s = 0; s < 20; ++s) {
      const double lam = lam_out + (1.0 - lam_out) * s / 20.0;
      double b = 0.0;
      for (const auto& p : pv)
        for (std::size_t i = 0; i < g.size(); ++i)
          if (v[i] <= d) b = std::max(b, p[i] - lam * v[i]);
      // leave room for rounding in the grid check
      b *= 1.0 + 1e-12;
      if (d < drift_floor(lam, b)) continue;
      auto c = check_drift(kernels, V, lam, b, d);
      if (c.pass) return c;
      last = c;
    }
    if (!last.pass && last.d != d) {
      last.d = d;
      last.diagnostic = "floor d >= b/(2(1-drift_rate)) - 1 fails for every drift rate at this level";
    }
  }
  return last;
}

MinorizationReport check_minorization(const std::vector<const MarkovKernel*>& kernels, const std::vector<bool>& in_C,
                                      int j, double kappa_floor) {
  require_kernels(kernels);
  if (j != 1 && j != 2) throw InvalidInput("minorization iterate j must be 1 or 2");
  const Grid& g = kernels.front()->grid();
  if (in_C.size() != g.size()) throw InvalidInput("set mask size mismatch");
  std::vector<std::size_t> C;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (in_C[i]) C.push_back(i);
  if (C.empty()) throw PreconditionError("small set C is empty on the grid");
  const auto& w = g.weights();
  MinorizationReport rep;
  rep.j = j;
  rep.inf_kappa = std::numeric_limits<double>::infinity();
  for (const auto* k : kernels) {
    const GridDensity& mu = k->target();
    double massC = 0.0;
    for (std::size_t i : C) massC += w[i] * mu[i];
    std::vector<double> kap(C.size(), std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(static)
    for (std::size_t a = 0; a < C.size(); ++a) {
      std::vector<double> m(g.size(), 0.0);
      m[C[a]] = 1.0;
      auto p = k->push(m);
      if (j == 2) p = k->push(p);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t y : C) {
        const double ups = w[y] * mu[y] / massC;
        if (ups > 0.0) best = std::min(best, p[y] / ups);
      }
      kap[a] = best;
    }
    const double kappa = *std::min_element(kap.begin(), kap.end());
    rep.kappa.push_back(kappa);
    rep.inf_kappa = std::min(rep.inf_kappa, kappa);
    double analytic = std::nan("");
    if (const auto* h = dynamic_cast<const HastingsKernel*>(k);
        h && h->proposal().kind() == ProposalKernel::Kind::random_walk && j == 1) {
      double eps = std::numeric_limits<double>::infinity(), bn = 0.0;
      for (std::size_t x : C) {
        bn = std::max(bn, mu[x]);
        for (std::size_t y : C) eps = std::min(eps, h->proposal().density(x, y));
      }
      analytic = h->balancing()(1.0) * eps * massC / bn;
    }
    rep.rw_analytic.push_back(analytic);
  }
  rep.pass = rep.inf_kappa >= kappa_floor && rep.inf_kappa > 0.0;
  return rep;
}

LogConcaveReport check_log_concave_tails(const std::vector<GridDensity>& densities, double gamma, double z) {
  LogConcaveReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < densities.size(); ++n) {
    const GridDensity& d = densities[n];
    const Grid& g = d.grid();
    if (g.dim() != 1) throw InvalidInput("log-concave tail check is one-dimensional");
    if (!d.positive()) throw PreconditionError("log-concave tail check needs positive densities");
    const std::size_t m = g.size();
    std::vector<double> lg(m);
    for (std::size_t i = 0; i < m; ++i) lg[i] = std::log(d[i]);
    for (std::size_t i = 0; i < m; ++i) {
      const double x = g.coordinate(i);
      for (std::size_t k = 0; k < m; ++k) {
        const double y = g.coordinate(k);
        const bool right = x >= z && y >= x;
        const bool left = x <= -z && y <= x;
        if (!(right || left) || k == i) continue;
        const double slack = lg[i] - lg[k] - gamma * std::abs(y - x);
        if (slack < rep.worst_slack) {
          rep.worst_slack = slack;
          rep.worst_density = n;
          rep.worst_x = x;
          rep.worst_y = y;
        }
      }
    }
  }
  rep.pass = rep.worst_slack >= -1e-9;
  return rep;
}

std::vector<double> stationary_masses(const MarkovKernel& k) { return k.target().masses(); }

GeometricRateReport estimate_geometric_rate(const MarkovKernel& k, const std::vector<std::size_t>& x0,
                                            std::size_t k_max, const WeightFunction& V, std::size_t k_burn) {
  if (x0.empty()) throw InvalidInput("estimate_geometric_rate needs starting nodes");
  if (k_max < k_burn + 2) throw InvalidInput("k_max too small for the rate fit");
  const Grid& g = k.grid();
  const auto v = V.on(g);
  const auto pi = stationary_masses(k);
  GeometricRateReport rep;
  rep.k_burn = k_burn;
  rep.a.assign(k_max, 0.0);
  for (std::size_t x : x0) {
    std::vector<double> m(g.size(), 0.0);
    m[x] = 1.0;
    for (std::size_t s = 0; s < k_max; ++s) {
      m = k.push(m);
      double a = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) a += v[i] * std::abs(m[i] - pi[i]);
      rep.a[s] = std::max(rep.a[s], a / v[x]);
    }
  }
  const double floor = 1e-13 * std::max(1.0, rep.a.front());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t s = k_burn; s <= k_max; ++s)
    if (rep.a[s - 1] > floor) pts.emplace_back(static_cast<double>(s), std::log(rep.a[s - 1]));
  if (pts.size() < 3) {
    // a_k reaches rounding level right away (e.g. an iid chain)
    rep.beta = 0.0;
    rep.c_fit = rep.a.front();
    rep.c_bound = std::max(1.0, rep.a.front());
    rep.r_squared = 1.0;
    rep.L = std::max(rep.c_bound, 1.0);
    rep.pass = true;
    rep.diagnostic = "a_k vanishes";
    return rep;
  }
  double mx = 0, my = 0;
  for (auto [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (auto [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
  }
  const double slope = sxy / sxx;
  const double icpt = my - slope * mx;
  rep.beta = std::exp(slope);
  rep.c_fit = std::exp(icpt);
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  if (!(rep.beta < 1.0)) {
    rep.pass = false;
    rep.diagnostic = "a_k does not decay";
    rep.L = std::numeric_limits<double>::infinity();
    rep.c_bound = std::numeric_limits<double>::infinity();
    return rep;
  }
  for (std::size_t s = 1; s <= k_max; ++s)
    rep.c_bound = std::max(rep.c_bound, rep.a[s - 1] / std::pow(rep.beta, static_cast<double>(s)));
  rep.c_bound = std::max(rep.c_bound, 1.0);
  rep.L = std::max(rep.c_bound, 1.0 / (1.0 - rep.beta));
  rep.pass = true;
  rep.diagnostic = "ok";
  return rep;
}

MomentGrowthReport check_v_moment_growth(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                                         int j_power, const DriftCertificate& cert) {
  require_kernels(kernels);
  if (j_power < 1) throw InvalidInput("moment power must be >= 1");
  const Grid& g = kernels.front()->grid();
  const auto v = V.on(g);
  MomentGrowthReport rep;
  rep.finite = true;
  std::vector<double> vj(g.size()), vt(g.size());
  const double jd = static_cast<double>(j_power);
  for (std::size_t i = 0; i < g.size(); ++i) {
    vj[i] = std::pow(v[i], jd);
    vt[i] = std::pow(v[i], 1.0 / jd);
  }
  const double lam = std::pow(cert.drift_rate, 1.0 / jd);
  const double bj = std::pow(cert.b, 1.0 / jd);
  rep.jensen_worst = -std::numeric_limits<double>::infinity();
  for (const auto* k : kernels) {
    const double m = integrate(vj, k->target());
    rep.moments.push_back(m);
    rep.sup_moment = std::max(rep.sup_moment, m);
    rep.finite = rep.finite && std::isfinite(m);
    const auto pv = k->apply(vt);
    for (std::size_t i = 0; i < g.size(); ++i)
      rep.jensen_worst = std::max(rep.jensen_worst, pv[i] - lam * vt[i] - (v[i] <= cert.d ? bj : 0.0));
  }
  double vmax = 1.0;
  for (double x : vt) vmax = std::max(vmax, x);
  rep.jensen_drift_holds = rep.jensen_worst <= 1e-12 * vmax;
  return rep;
}

DriftSimulationReport simulate_drift_bound(const MarkovKernel& k, const WeightFunction& V,
                                           const DriftCertificate& cert, std::size_t x0, std::size_t steps,
                                           std::size_t reps, std::uint64_t seed) {
  if (reps < 2) throw InvalidInput("simulate_drift_bound needs at least two replications");
  const auto v = V.on(k.grid());
  std::vector<std::vector<double>> vals(reps, std::vector<double>(steps + 1));
#pragma omp parallel for schedule(static)
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream rng(seed, 0x6472, r);
    std::size_t x = x0;
    vals[r][0] = v[x];
    for (std::size_t s = 1; s <= steps; ++s) {
      x = k.step(x, rng);
      vals[r][s] = v[x];
    }
  }
  DriftSimulationReport rep;
  rep.pass = true;
  double geo = 0.0;
  for (std::size_t s = 0; s <= steps; ++s) {
    double m = 0.0, q = 0.0;
    for (std::size_t r = 0; r < reps; ++r) m += vals[r][s];
    m /= static_cast<double>(reps);
    for (std::size_t r = 0; r < reps; ++r) q += (vals[r][s] - m) * (vals[r][s] - m);
    const double se = std::sqrt(q / static_cast<double>(reps - 1) / static_cast<double>(reps));
    const double bound = std::pow(cert.drift_rate, static_cast<double>(s)) * v[x0] + cert.b * geo;
    geo = geo * cert.drift_rate + 1.0;
    rep.mean.push_back(m);
    rep.std_error.push_back(se);
    rep.bound.push_back(bound);
    if (m > bound + 3.0 * se + 1e-12 * bound) rep.pass = false;
  }
  return rep;
}

}  // namespace mcc
