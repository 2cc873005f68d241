#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcc/ergodicity.hpp"
#include "mcc/error.hpp"

namespace mcc {

namespace {

double sup_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double dot(const std::vector<double>& a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

ResolventTable poisson_resolvent(const MarkovKernel& k, const GridFunction& f, double tol, std::size_t k_max) {
  require_same_grid(k.grid(), f.grid, "poisson_resolvent");
  for (double v : f.values) require_finite(v, "poisson_resolvent f");
  const auto pi = stationary_masses(k);
  const double mean = dot(pi, f.values);
  std::vector<double> term(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) term[i] = f[i] - mean;
  std::vector<double> R = term;
  const double scale = std::max(1.0, sup_abs(term));
  std::size_t K = 0;
  double tail = 0.0;
  double prev = sup_abs(term);
  while (true) {
    // term = P^{K+1} f - upsilon(f)
    term = k.apply(term);
    const double s = sup_abs(term);
    if (s <= 1e-300 * scale) {
      tail = s;
      break;
    }
    const double ratio = prev > 0.0 ? s / prev : 0.0;
    if (K > 50 && ratio >= 1.0) throw ConsistencyError("Poisson series does not converge (terms stop decaying)");
    tail = ratio < 1.0 ? s / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    if (s <= tol * scale && tail <= tol * scale) break;
    if (K + 1 >= k_max) {
      std::ostringstream os;
      os << "Poisson series not converged after " << k_max << " terms (last term " << s << ")";
      throw ConsistencyError(os.str());
    }
    for (std::size_t i = 0; i < R.size(); ++i) R[i] += term[i];
    ++K;
    prev = s;
  }
  ResolventTable t{GridFunction(f.grid, R), K, tail, mean, 0.0, 0.0};
  const auto PR = k.apply(R);
  for (std::size_t i = 0; i < R.size(); ++i)
    t.poisson_residual = std::max(t.poisson_residual, std::abs(PR[i] - R[i] - (mean - f[i])));
  t.centering = std::abs(dot(pi, R));
  return t;
}

AsymptoticVariance asymptotic_variance(const MarkovKernel& k, const GridFunction& f, double tol) {
  const auto table = poisson_resolvent(k, f, tol);
  const auto pi = stationary_masses(k);
  const auto& R = table.values.values;
  AsymptoticVariance out;
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double fb = f[i] - table.mean;
    a += pi[i] * fb * R[i];
    b += pi[i] * fb * fb;
  }
  out.sigma2 = 2.0 * a - b;
  std::vector<double> R2(R.size());
  for (std::size_t i = 0; i < R.size(); ++i) R2[i] = R[i] * R[i];
  const auto PR2 = k.apply(R2);
  const auto PR = k.apply(R);
  double c = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) c += pi[i] * (PR2[i] - PR[i] * PR[i]);
  out.sigma2_generator = c;
  return out;
}

double check_resolvent_identity(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                const GridFunction& f, double tol) {
  const auto k_mu = make_kernel(family, mu);
  const auto k_nu = make_kernel(family, nu);
  const auto r_nu = poisson_resolvent(*k_nu, f, tol);
  const auto r_mu = poisson_resolvent(*k_mu, f, tol);
  const auto& a = r_nu.values.values;
  const auto pa_nu = k_nu->apply(a);
  const auto pa_mu = k_mu->apply(a);
  std::vector<double> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) g[i] = pa_nu[i] - pa_mu[i];
  const auto r_g = poisson_resolvent(*k_mu, GridFunction(f.grid, g), tol);
  const double mu_a = dot(stationary_masses(*k_mu), a);
  double res = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    res = std::max(res, std::abs(a[i] - r_mu.values[i] - r_g.values[i] - mu_a));
  return res;
}

}  // namespace mcc
