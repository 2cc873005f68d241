#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mcc/balancing.hpp"
#include "mcc/grid.hpp"
#include "mcc/measures.hpp"
#include "mcc/proposal.hpp"
#include "mcc/rng.hpp"

namespace mcc {

// Initial distribution: a grid density or a point mass at a node.
class Start {
 public:
  static Start point(std::size_t node) { return Start(node); }
  static Start density(GridDensity rho) { return Start(std::move(rho)); }

  bool is_point() const { return !rho_.has_value(); }
  std::size_t node() const { return node_; }
  const GridDensity& rho() const { return *rho_; }
  // Node masses of the start on g.
  std::vector<double> masses(const Grid& g) const;
  std::string describe() const;

 private:
  explicit Start(std::size_t node) : node_(node) {}
  explicit Start(GridDensity rho) : rho_(std::move(rho)) {}
  std::size_t node_ = 0;
  std::optional<GridDensity> rho_;
};

struct StepInfo {
  bool accepted = false;
  bool truncated = false;
};

class MarkovKernel {
 public:
  virtual ~MarkovKernel() = default;
  virtual const Grid& grid() const = 0;
  virtual const GridDensity& target() const = 0;
  // (P f)(x_i)
  virtual double apply_at(std::size_t i, std::span<const double> f) const = 0;
  // P f on every node.
  virtual std::vector<double> apply(std::span<const double> f) const = 0;
  // Node masses m to m P.
  virtual std::vector<double> push(std::span<const double> masses) const = 0;
  virtual std::size_t step(std::size_t i, RngStream& rng, StepInfo* info = nullptr) const = 0;
  virtual std::string descriptor() const = 0;
};

// Hastings kernel on grid nodes: K_ij = w_j q_ij g(r_ij) for j != i, the
// remaining mass stays at i.
class HastingsKernel final : public MarkovKernel {
 public:
  HastingsKernel(GridDensity target, ProposalKernel proposal, BalancingFunction balancing);
  // Ratios are formed with ratio_target; the reported target stays `target`.
  HastingsKernel(GridDensity target, ProposalKernel proposal, BalancingFunction balancing,
                 GridDensity ratio_target);

  const Grid& grid() const override { return d_->target.grid(); }
  const GridDensity& target() const override { return d_->target; }
  const ProposalKernel& proposal() const { return d_->proposal; }
  const BalancingFunction& balancing() const { return d_->balancing; }

  double ratio(std::size_t i, std::size_t j) const;
  double transition(std::size_t i, std::size_t j) const { return d_->K[i * d_->n + j]; }
  double rejection(std::size_t i) const { return d_->rejection[i]; }

  double apply_at(std::size_t i, std::span<const double> f) const override;
  std::vector<double> apply(std::span<const double> f) const override;
  std::vector<double> push(std::span<const double> masses) const override;
  std::size_t step(std::size_t i, RngStream& rng, StepInfo* info = nullptr) const override;
  std::string descriptor() const override;

  // Expected acceptance rate at stationarity, sum_i pi_i sum_j w_j q_ij g(r_ij).
  double stationary_acceptance() const;

 private:
  struct Data {
    GridDensity target;
    GridDensity ratio_target;
    ProposalKernel proposal;
    BalancingFunction balancing;
    std::size_t n = 0;
    std::vector<double> K;
    std::vector<double> rejection;
  };
  std::shared_ptr<const Data> d_;
};

// One Hastings move with an arbitrary unnormalized target evaluated at nodes.
// Draw order: proposal uniform, then acceptance uniform.
template <class TargetAt>
std::size_t hastings_move(const ProposalKernel& q, const BalancingFunction& g, TargetAt&& target_at,
                          std::size_t i, RngStream& rng, StepInfo* info) {
  const auto draw = q.draw(i, rng.uniform());
  const double u = rng.uniform();
  const std::size_t j = draw.index;
  double r = 1.0;
  if (j != i) {
    const double den = target_at(i) * q.density(i, j);
    if (den > 0.0) r = target_at(j) * q.density(j, i) / den;
  }
  const bool accept = u < g(r);
  if (info) {
    info->accepted = accept;
    info->truncated = draw.truncated;
  }
  return accept ? j : i;
}

// Two-stage Gibbs: draw y1 from mu_{1|2}(x2, .) then y2 from mu_{2|1}(y1, .).
class GibbsKernel final : public MarkovKernel {
 public:
  explicit GibbsKernel(GridDensity joint);

  const Grid& grid() const override { return d_->joint.grid(); }
  const GridDensity& target() const override { return d_->joint; }
  std::size_t n1() const { return d_->n1; }
  std::size_t n2() const { return d_->n2; }
  const std::vector<double>& marginal1() const { return d_->m1; }
  const std::vector<double>& marginal2() const { return d_->m2; }
  double cond12(std::size_t x2, std::size_t w1) const;
  double cond21(std::size_t w1, std::size_t w2) const;

  // h(w1) = E[f(w1, W2) | w1].
  std::vector<double> conditional_mean(std::span<const double> f) const;
  // (P f)(x2) as a function of the second coordinate.
  std::vector<double> second_stage(std::span<const double> h) const;

  double apply_at(std::size_t i, std::span<const double> f) const override;
  std::vector<double> apply(std::span<const double> f) const override;
  std::vector<double> push(std::span<const double> masses) const override;
  std::size_t step(std::size_t i, RngStream& rng, StepInfo* info = nullptr) const override;
  std::string descriptor() const override;

 private:
  struct Data {
    GridDensity joint;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::vector<double> m1;
    std::vector<double> m2;
    std::vector<double> cdf12;  // n2 rows over w1
    std::vector<double> cdf21;  // n1 rows over w2
  };
  std::shared_ptr<const Data> d_;
};

// Builds kernels at arbitrary targets; the index set of a Markov family.
class HastingsFamily {
 public:
  HastingsFamily(ProposalKernel proposal, BalancingFunction balancing)
      : proposal_(std::move(proposal)), balancing_(std::move(balancing)) {}
  HastingsKernel at(const GridDensity& mu) const { return HastingsKernel(mu, proposal_, balancing_); }
  const ProposalKernel& proposal() const { return proposal_; }
  const BalancingFunction& balancing() const { return balancing_; }
  HastingsFamily with_balancing(BalancingFunction b) const { return HastingsFamily(proposal_, std::move(b)); }

 private:
  ProposalKernel proposal_;
  BalancingFunction balancing_;
};

class GibbsFamily {
 public:
  GibbsKernel at(const GridDensity& mu) const { return GibbsKernel(mu); }
};

using KernelFamily = std::variant<HastingsFamily, GibbsFamily>;

std::unique_ptr<MarkovKernel> make_kernel(const KernelFamily& family, const GridDensity& mu);
std::string family_tag(const KernelFamily& family);

double hastings_ratio(const HastingsKernel& k, std::size_t x, std::size_t y);
double apply_hastings(const HastingsKernel& k, std::size_t x, const GridFunction& f);
double apply_hastings_to_density(const HastingsKernel& k, const GridDensity& rho, const GridFunction& f);
double apply_gibbs(const GibbsKernel& k, std::size_t x, const GridFunction& f);

// P_mu(start, f).
double transition_expectation(const MarkovKernel& k, const Start& start, std::span<const double> f);
// P^steps(start, f), propagating f backwards.
double iterate_kernel(const MarkovKernel& k, const Start& start, std::span<const double> f, std::size_t steps);
// P^steps f on every node.
std::vector<double> iterate_function(const MarkovKernel& k, std::span<const double> f, std::size_t steps);
// start P^steps as node masses.
std::vector<double> iterate_masses(const MarkovKernel& k, std::vector<double> masses, std::size_t steps);

std::size_t sample_step(const MarkovKernel& k, std::size_t x, RngStream& rng, StepInfo* info = nullptr);

struct InvarianceReport {
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};
// Total variation of mu P - mu.
InvarianceReport check_invariance(const MarkovKernel& k, double tol);

}  // namespace mcc
