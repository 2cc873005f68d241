#include <algorithm>
#include <cmath>
#include <sstream>

#include "mcc/error.hpp"
#include "mcc/kernels.hpp"

namespace mcc {

namespace {

constexpr std::size_t kPushBlock = 256;

}  // namespace

HastingsKernel::HastingsKernel(GridDensity target, ProposalKernel proposal, BalancingFunction balancing)
    : HastingsKernel(target, std::move(proposal), std::move(balancing), target) {}

HastingsKernel::HastingsKernel(GridDensity target, ProposalKernel proposal, BalancingFunction balancing,
                               GridDensity ratio_target) {
  if (target.grid().dim() != 1) throw InvalidInput("Hastings kernels require a 1-D target");
  require_same_grid(target.grid(), proposal.grid(), "Hastings kernel proposal");
  require_same_grid(target.grid(), ratio_target.grid(), "Hastings kernel ratio target");
  if (!target.positive()) throw InvalidInput("Hastings target must be strictly positive on the grid");
  auto d = std::make_shared<Data>(Data{std::move(target), std::move(ratio_target), std::move(proposal),
                                       std::move(balancing), 0, {}, {}});
  const std::size_t n = d->target.size();
  d->n = n;
  d->K.assign(n * n, 0.0);
  d->rejection.assign(n, 0.0);
  const auto& w = d->target.grid().weights();
  const GridDensity& mu = d->ratio_target;
  const ProposalKernel& q = d->proposal;
  const BalancingFunction& g = d->balancing;
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(min : worst)
  for (std::size_t i = 0; i < n; ++i) {
    double* Ki = d->K.data() + i * n;
    const double mi = mu.floored(i);
    double accepted = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double qij = q.density(i, j);
      double r = 1.0;
      const double den = mi * qij;
      if (j != i && den > 0.0) r = mu.floored(j) * q.density(j, i) / den;
      const double a = w[j] * qij * g(r);
      accepted += a;
      if (j != i) Ki[j] = a;
    }
    const double rej = 1.0 - accepted;
    worst = std::min(worst, rej);
    d->rejection[i] = rej;
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += Ki[j];
    Ki[i] = 1.0 - off;
  }
  if (worst < -1e-9)
    throw ConsistencyError("Hastings rejection mass is negative (" + std::to_string(worst) + ")");
  d_ = std::move(d);
}

double HastingsKernel::ratio(std::size_t i, std::size_t j) const {
  const GridDensity& mu = d_->ratio_target;
  const double den = mu.floored(i) * d_->proposal.density(i, j);
  if (!(den > 0.0)) return 1.0;
  return mu.floored(j) * d_->proposal.density(j, i) / den;
}

double HastingsKernel::apply_at(std::size_t i, std::span<const double> f) const {
  const std::size_t n = d_->n;
  const double* Ki = d_->K.data() + i * n;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += Ki[j] * f[j];
  return s;
}

std::vector<double> HastingsKernel::apply(std::span<const double> f) const {
  const std::size_t n = d_->n;
  if (f.size() != n) throw InvalidInput("apply: function size does not match grid");
  std::vector<double> out(n);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) out[i] = apply_at(i, f);
  return out;
}

std::vector<double> HastingsKernel::push(std::span<const double> m) const {
  const std::size_t n = d_->n;
  if (m.size() != n) throw InvalidInput("push: mass vector size does not match grid");
  std::vector<double> out(n, 0.0);
  const std::size_t blocks = (n + kPushBlock - 1) / kPushBlock;
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t j0 = b * kPushBlock;
    const std::size_t j1 = std::min(n, j0 + kPushBlock);
    for (std::size_t i = 0; i < n; ++i) {
      const double mi = m[i];
      if (mi == 0.0) continue;
      const double* Ki = d_->K.data() + i * n;
      for (std::size_t j = j0; j < j1; ++j) out[j] += mi * Ki[j];
    }
  }
  return out;
}

std::size_t HastingsKernel::step(std::size_t i, RngStream& rng, StepInfo* info) const {
  const GridDensity& mu = d_->ratio_target;
  return hastings_move(d_->proposal, d_->balancing, [&mu](std::size_t k) { return mu.floored(k); }, i, rng,
                       info);
}

std::string HastingsKernel::descriptor() const {
  std::ostringstream os;
  os << "hastings[" << d_->balancing.tag() << "," << d_->proposal.tag() << "," << d_->target.description() << "]";
  return os.str();
}

double HastingsKernel::stationary_acceptance() const {
  const std::size_t n = d_->n;
  const auto& w = grid().weights();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a = 0.0;
    for (std::size_t j = 0; j < n; ++j) a += w[j] * d_->proposal.density(i, j) * d_->balancing(ratio(i, j));
    s += w[i] * d_->target[i] * a;
  }
  return s;
}

}  // namespace mcc
