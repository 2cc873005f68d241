#include "mcc/reference.hpp"

#include "mcc/error.hpp"

namespace mcc::reference {

namespace {

double ratio(const GridDensity& mu, const ProposalKernel& q, std::size_t i, std::size_t j) {
  const double den = mu.floored(i) * q.density(i, j);
  if (i == j || !(den > 0.0)) return 1.0;
  return mu.floored(j) * q.density(j, i) / den;
}

double mu_marginal1(const GridDensity& m, std::size_t y1) {
  const Grid& g = m.grid();
  const Axis& a2 = g.axis(1);
  double s = 0.0;
  for (std::size_t j = 0; j < a2.n_points; ++j) s += a2.weight(j) * m[g.index(y1, j)];
  return s;
}

double mu_marginal2(const GridDensity& m, std::size_t y2) {
  const Grid& g = m.grid();
  const Axis& a1 = g.axis(0);
  double s = 0.0;
  for (std::size_t i = 0; i < a1.n_points; ++i) s += a1.weight(i) * m[g.index(i, y2)];
  return s;
}

// P((x1,x2), {(y1,y2)}) / (w1 w2): mu_{1|2}(x2, y1) mu_{2|1}(y1, y2)
double gibbs_density(const GridDensity& m, std::size_t x, std::size_t y) {
  const Grid& g = m.grid();
  const std::size_t x2 = g.second(x);
  const std::size_t y1 = y / g.axis(1).n_points;
  return m[g.index(y1, x2)] / mu_marginal2(m, x2) * m[y] / mu_marginal1(m, y1);
}

}  // namespace

double hastings_transition(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                           std::size_t i, std::size_t j) {
  const auto& w = mu.grid().weights();
  if (i != j) return w[j] * q.density(i, j) * g(ratio(mu, q, i, j));
  double off = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (k != i) off += w[k] * q.density(i, k) * g(ratio(mu, q, i, k));
  return 1.0 - off;
}

std::vector<double> hastings_apply(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                                   std::span<const double> f) {
  const std::size_t n = mu.size();
  if (f.size() != n) throw InvalidInput("reference apply: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += hastings_transition(mu, q, g, i, j) * f[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> hastings_push(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                                  std::span<const double> m) {
  const std::size_t n = mu.size();
  if (m.size() != n) throw InvalidInput("reference push: size mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += m[i] * hastings_transition(mu, q, g, i, j);
  return out;
}

std::vector<double> hastings_derivative_density(const GridDensity& mu, const ProposalKernel& q,
                                                const BalancingFunction& g, const GridDensity& rho,
                                                std::span<const double> f) {
  const std::size_t n = mu.size();
  const auto& w = mu.grid().weights();
  std::vector<double> D(n, 0.0);
  for (std::size_t y = 0; y < n; ++y) {
    double gain = 0.0, loss = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (u == y) continue;
      gain += w[u] * (f[y] - f[u]) * rho[u] / mu.floored(u) * g.derivative(ratio(mu, q, u, y)) * q.density(y, u);
      loss += w[u] * (f[u] - f[y]) * q.density(u, y) * g.derivative(ratio(mu, q, y, u)) * mu.floored(u);
    }
    D[y] = gain - rho[y] * loss / (mu.floored(y) * mu.floored(y));
  }
  return D;
}

std::vector<double> hastings_derivative_point(const GridDensity& mu, const ProposalKernel& q,
                                              const BalancingFunction& g, std::size_t x, std::span<const double> f,
                                              std::vector<double>* singular) {
  const std::size_t n = mu.size();
  const auto& w = mu.grid().weights();
  std::vector<double> D(n, 0.0);
  for (std::size_t y = 0; y < n; ++y)
    if (y != x) D[y] = (f[y] - f[x]) * g.derivative(ratio(mu, q, x, y)) * q.density(y, x) / mu.floored(x);
  if (singular) {
    singular->assign(n, 0.0);
    for (std::size_t y = 0; y < n; ++y) {
      double s = 0.0;
      for (std::size_t u = 0; u < n; ++u)
        if (u != y) s += w[u] * (f[u] - f[y]) * q.density(u, y) * g.derivative(ratio(mu, q, y, u)) * mu.floored(u);
      (*singular)[y] = -s / (mu.floored(y) * mu.floored(y));
    }
  }
  return D;
}

std::vector<double> gibbs_apply(const GridDensity& joint, std::span<const double> f) {
  const Grid& g = joint.grid();
  const std::size_t n = g.size();
  if (f.size() != n) throw InvalidInput("reference apply: size mismatch");
  const auto& w = g.weights();
  std::vector<double> out(n);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += w[y] * gibbs_density(joint, x, y) * f[y];
    out[x] = s;
  }
  return out;
}

std::vector<double> gibbs_push(const GridDensity& joint, std::span<const double> m) {
  const Grid& g = joint.grid();
  const std::size_t n = g.size();
  if (m.size() != n) throw InvalidInput("reference push: size mismatch");
  const auto& w = g.weights();
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    if (m[x] != 0.0)
      for (std::size_t y = 0; y < n; ++y) out[y] += m[x] * w[y] * gibbs_density(joint, x, y);
  return out;
}

// Directional form: D(y) = sum_x rho(x) d/dmu K(x, y) collected per y, written out from
// P_mu(rho, f) = sum_{x,y} W_x rho(x) W_y mu(y1,x2)/mu2(x2) mu(y)/mu1(y1) f(y).
std::vector<double> gibbs_derivative_density(const GridDensity& joint, const GridDensity& rho,
                                             std::span<const double> f) {
  const Grid& g = joint.grid();
  const Axis& a1 = g.axis(0);
  const Axis& a2 = g.axis(1);
  const std::size_t n1 = a1.n_points, n2 = a2.n_points;
  std::vector<double> m1(n1), m2(n2), rho2(n2, 0.0), h(n1, 0.0), pf(n2, 0.0), m(n1, 0.0);
  for (std::size_t i = 0; i < n1; ++i) m1[i] = mu_marginal1(joint, i);
  for (std::size_t j = 0; j < n2; ++j) m2[j] = mu_marginal2(joint, j);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) rho2[j] += a1.weight(i) * rho[g.index(i, j)];
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) h[i] += a2.weight(j) * joint[g.index(i, j)] / m1[i] * f[g.index(i, j)];
  for (std::size_t j = 0; j < n2; ++j)
    for (std::size_t i = 0; i < n1; ++i) pf[j] += a1.weight(i) * joint[g.index(i, j)] / m2[j] * h[i];
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) m[i] += a2.weight(j) * rho2[j] * joint[g.index(i, j)] / m2[j];
  std::vector<double> D(g.size());
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t y = g.index(i, j);
      D[y] = rho2[j] / m2[j] * (h[i] - pf[j]) + (f[y] - h[i]) * m[i] / m1[i];
    }
  return D;
}

}  // namespace mcc::reference
