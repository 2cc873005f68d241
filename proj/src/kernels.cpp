#include <cmath>
#include <sstream>

#include "mcc/error.hpp"
#include "mcc/kernels.hpp"

namespace mcc {

std::vector<double> Start::masses(const Grid& g) const {
  if (is_point()) {
    if (node_ >= g.size()) throw RangeError("start node outside grid");
    std::vector<double> m(g.size(), 0.0);
    m[node_] = 1.0;
    return m;
  }
  require_same_grid(g, rho_->grid(), "start density");
  return rho_->masses();
}

std::string Start::describe() const {
  if (is_point()) return "point(" + std::to_string(node_) + ")";
  return "density(" + rho_->description() + ")";
}

std::unique_ptr<MarkovKernel> make_kernel(const KernelFamily& family, const GridDensity& mu) {
  if (const auto* h = std::get_if<HastingsFamily>(&family)) return std::make_unique<HastingsKernel>(h->at(mu));
  return std::make_unique<GibbsKernel>(mu);
}

std::string family_tag(const KernelFamily& family) {
  if (const auto* h = std::get_if<HastingsFamily>(&family))
    return "hastings[" + h->balancing().tag() + "," + h->proposal().tag() + "]";
  return "gibbs";
}

double hastings_ratio(const HastingsKernel& k, std::size_t x, std::size_t y) { return k.ratio(x, y); }

double apply_hastings(const HastingsKernel& k, std::size_t x, const GridFunction& f) {
  require_same_grid(k.grid(), f.grid, "apply_hastings");
  if (x >= k.grid().size()) throw RangeError("apply_hastings: node outside grid");
  return k.apply_at(x, f.values);
}

double apply_hastings_to_density(const HastingsKernel& k, const GridDensity& rho, const GridFunction& f) {
  return transition_expectation(k, Start::density(rho), f.values);
}

double apply_gibbs(const GibbsKernel& k, std::size_t x, const GridFunction& f) {
  require_same_grid(k.grid(), f.grid, "apply_gibbs");
  if (x >= k.grid().size()) throw RangeError("apply_gibbs: node outside grid");
  return k.apply_at(x, f.values);
}

double transition_expectation(const MarkovKernel& k, const Start& start, std::span<const double> f) {
  if (f.size() != k.grid().size()) throw InvalidInput("transition_expectation: function size mismatch");
  if (start.is_point()) {
    if (start.node() >= k.grid().size()) throw RangeError("start node outside grid");
    return k.apply_at(start.node(), f);
  }
  const auto pf = k.apply(f);
  return integrate(pf, start.rho());
}

std::vector<double> iterate_function(const MarkovKernel& k, std::span<const double> f, std::size_t steps) {
  const double work = static_cast<double>(steps) * static_cast<double>(k.grid().size());
  if (work * static_cast<double>(k.grid().size()) > 1e13)
    throw ResourceError("iterate_kernel: " + std::to_string(steps) + " steps exceed the work budget");
  std::vector<double> cur(f.begin(), f.end());
  for (std::size_t s = 0; s < steps; ++s) cur = k.apply(cur);
  return cur;
}

double iterate_kernel(const MarkovKernel& k, const Start& start, std::span<const double> f, std::size_t steps) {
  const auto pf = iterate_function(k, f, steps);
  if (start.is_point()) {
    if (start.node() >= k.grid().size()) throw RangeError("start node outside grid");
    return pf[start.node()];
  }
  return integrate(pf, start.rho());
}

std::vector<double> iterate_masses(const MarkovKernel& k, std::vector<double> masses, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) masses = k.push(masses);
  return masses;
}

std::size_t sample_step(const MarkovKernel& k, std::size_t x, RngStream& rng, StepInfo* info) {
  if (x >= k.grid().size()) throw RangeError("sample_step: state outside grid");
  return k.step(x, rng, info);
}

InvarianceReport check_invariance(const MarkovKernel& k, double tol) {
  const auto pi = k.target().masses();
  const auto out = k.push(pi);
  double r = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) r += std::abs(out[i] - pi[i]);
  return {r, tol, r <= tol};
}

}  // namespace mcc
