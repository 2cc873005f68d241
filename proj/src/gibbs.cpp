#include <algorithm>
#include <cmath>

#include "mcc/error.hpp"
#include "mcc/kernels.hpp"

namespace mcc {

GibbsKernel::GibbsKernel(GridDensity joint) {
  if (joint.grid().dim() != 2) throw InvalidInput("Gibbs kernels require a 2-D joint density");
  auto d = std::make_shared<Data>(Data{std::move(joint), 0, 0, {}, {}, {}, {}});
  const Grid& g = d->joint.grid();
  const Axis& a1 = g.axis(0);
  const Axis& a2 = g.axis(1);
  const std::size_t n1 = a1.n_points;
  const std::size_t n2 = a2.n_points;
  d->n1 = n1;
  d->n2 = n2;
  d->m1.assign(n1, 0.0);
  d->m2.assign(n2, 0.0);
  const auto& v = d->joint.values();
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      d->m1[i] += a2.weight(j) * v[g.index(i, j)];
      d->m2[j] += a1.weight(i) * v[g.index(i, j)];
    }
  for (std::size_t i = 0; i < n1; ++i)
    if (!(d->m1[i] > 0.0))
      throw InvalidInput("Gibbs conditional mu_{2|1} cannot be normalized at first-coordinate node " +
                         std::to_string(i));
  for (std::size_t j = 0; j < n2; ++j)
    if (!(d->m2[j] > 0.0))
      throw InvalidInput("Gibbs conditional mu_{1|2} cannot be normalized at second-coordinate node " +
                         std::to_string(j));
  d->cdf12.assign(n2 * n1, 0.0);
  d->cdf21.assign(n1 * n2, 0.0);
  for (std::size_t x2 = 0; x2 < n2; ++x2) {
    double c = 0.0;
    for (std::size_t w1 = 0; w1 < n1; ++w1) {
      c += a1.weight(w1) * v[g.index(w1, x2)] / d->m2[x2];
      d->cdf12[x2 * n1 + w1] = c;
    }
    if (std::abs(c - 1.0) > 1e-6) throw ConsistencyError("conditional mu_{1|2} does not integrate to 1");
  }
  for (std::size_t w1 = 0; w1 < n1; ++w1) {
    double c = 0.0;
    for (std::size_t w2 = 0; w2 < n2; ++w2) {
      c += a2.weight(w2) * v[g.index(w1, w2)] / d->m1[w1];
      d->cdf21[w1 * n2 + w2] = c;
    }
    if (std::abs(c - 1.0) > 1e-6) throw ConsistencyError("conditional mu_{2|1} does not integrate to 1");
  }
  d_ = std::move(d);
}

double GibbsKernel::cond12(std::size_t x2, std::size_t w1) const {
  return d_->joint[grid().index(w1, x2)] / d_->m2[x2];
}

double GibbsKernel::cond21(std::size_t w1, std::size_t w2) const {
  return d_->joint[grid().index(w1, w2)] / d_->m1[w1];
}

std::vector<double> GibbsKernel::conditional_mean(std::span<const double> f) const {
  const std::size_t n1 = d_->n1;
  const std::size_t n2 = d_->n2;
  if (f.size() != n1 * n2) throw InvalidInput("Gibbs: function size does not match grid");
  const Axis& a2 = grid().axis(1);
  const auto& v = d_->joint.values();
  std::vector<double> h(n1);
#pragma omp parallel for schedule(static)
  for (std::size_t w1 = 0; w1 < n1; ++w1) {
    double s = 0.0;
    for (std::size_t w2 = 0; w2 < n2; ++w2) s += a2.weight(w2) * v[w1 * n2 + w2] * f[w1 * n2 + w2];
    h[w1] = s / d_->m1[w1];
  }
  return h;
}

std::vector<double> GibbsKernel::second_stage(std::span<const double> h) const {
  const std::size_t n1 = d_->n1;
  const std::size_t n2 = d_->n2;
  const Axis& a1 = grid().axis(0);
  const auto& v = d_->joint.values();
  std::vector<double> out(n2);
#pragma omp parallel for schedule(static)
  for (std::size_t x2 = 0; x2 < n2; ++x2) {
    double s = 0.0;
    for (std::size_t w1 = 0; w1 < n1; ++w1) s += a1.weight(w1) * v[w1 * n2 + x2] * h[w1];
    out[x2] = s / d_->m2[x2];
  }
  return out;
}

double GibbsKernel::apply_at(std::size_t i, std::span<const double> f) const {
  const std::size_t x2 = grid().second(i);
  const std::size_t n1 = d_->n1;
  const std::size_t n2 = d_->n2;
  const Axis& a1 = grid().axis(0);
  const Axis& a2 = grid().axis(1);
  const auto& v = d_->joint.values();
  double s = 0.0;
  for (std::size_t w1 = 0; w1 < n1; ++w1) {
    double h = 0.0;
    for (std::size_t w2 = 0; w2 < n2; ++w2) h += a2.weight(w2) * v[w1 * n2 + w2] * f[w1 * n2 + w2];
    s += a1.weight(w1) * v[w1 * n2 + x2] * (h / d_->m1[w1]);
  }
  return s / d_->m2[x2];
}

std::vector<double> GibbsKernel::apply(std::span<const double> f) const {
  const auto pf = second_stage(conditional_mean(f));
  std::vector<double> out(f.size());
  const std::size_t n2 = d_->n2;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pf[i % n2];
  return out;
}

std::vector<double> GibbsKernel::push(std::span<const double> m) const {
  const std::size_t n1 = d_->n1;
  const std::size_t n2 = d_->n2;
  if (m.size() != n1 * n2) throw InvalidInput("Gibbs push: mass vector size does not match grid");
  const Axis& a1 = grid().axis(0);
  const Axis& a2 = grid().axis(1);
  const auto& v = d_->joint.values();
  std::vector<double> start2(n2, 0.0);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) start2[j] += m[i * n2 + j];
  std::vector<double> first(n1, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t w1 = 0; w1 < n1; ++w1) {
    double s = 0.0;
    for (std::size_t x2 = 0; x2 < n2; ++x2) s += start2[x2] * v[w1 * n2 + x2] / d_->m2[x2];
    first[w1] = a1.weight(w1) * s;
  }
  std::vector<double> out(n1 * n2);
#pragma omp parallel for schedule(static)
  for (std::size_t w1 = 0; w1 < n1; ++w1)
    for (std::size_t w2 = 0; w2 < n2; ++w2)
      out[w1 * n2 + w2] = first[w1] * a2.weight(w2) * v[w1 * n2 + w2] / d_->m1[w1];
  return out;
}

std::size_t GibbsKernel::step(std::size_t i, RngStream& rng, StepInfo* info) const {
  const std::size_t n1 = d_->n1;
  const std::size_t n2 = d_->n2;
  const std::size_t x2 = grid().second(i);
  auto pick = [](const double* c, std::size_t n, double u) {
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(c, c + n, u) - c);
    return std::min(k, n - 1);
  };
  const std::size_t y1 = pick(d_->cdf12.data() + x2 * n1, n1, rng.uniform());
  const std::size_t y2 = pick(d_->cdf21.data() + y1 * n2, n2, rng.uniform());
  if (info) {
    info->accepted = true;
    info->truncated = false;
  }
  return grid().index(y1, y2);
}

std::string GibbsKernel::descriptor() const { return "gibbs[" + d_->joint.description() + "]"; }

}  // namespace mcc
