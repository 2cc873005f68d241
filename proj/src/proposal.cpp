#include "mcc/proposal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcc/analytic.hpp"
#include "mcc/error.hpp"

namespace mcc {

namespace {

void require_1d(const Grid& g) {
  if (g.dim() != 1) throw InvalidInput("Hastings proposals live on 1-D grids");
}

}  // namespace

std::shared_ptr<const ProposalKernel::Data> ProposalKernel::finish(std::shared_ptr<Data> d) {
  const std::size_t n = d->n;
  const auto& w = d->grid.weights();
  d->cdf.assign(n * n, 0.0);
  double qmin = std::numeric_limits<double>::infinity();
  double qmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double q = d->q[i * n + j];
      if (!std::isfinite(q) || q < 0.0) throw InvalidInput("proposal density must be finite and nonnegative");
      qmin = std::min(qmin, q);
      qmax = std::max(qmax, q);
      c += w[j] * q;
      d->cdf[i * n + j] = c;
    }
    if (std::abs(c - 1.0) > 1e-6)
      throw InvalidInput("proposal row " + std::to_string(i) + " integrates to " + std::to_string(c) +
                         " (must be 1 within 1e-6)");
  }
  d->q_min = qmin;
  d->q_max = qmax;
  return d;
}

ProposalKernel ProposalKernel::random_walk(const Grid& g, double sigma) {
  require_1d(g);
  if (!(sigma > 0.0)) throw InvalidInput("random-walk sigma must be positive");
  auto d = std::make_shared<Data>(g);
  const std::size_t n = g.size();
  const Axis& a = g.axis(0);
  const double len = a.upper - a.lower;
  d->n = n;
  d->kind = Kind::random_walk;
  d->symmetric = true;
  d->sigma = sigma;
  d->name = "random-walk";
  d->q.assign(n * n, 0.0);
  d->direct.assign(n * n, 0.0);
  const int kmax = 2 + static_cast<int>(std::ceil(8.0 * sigma / len));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = a.node(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double y = a.node(j);
      double s = 0.0;
      double direct = 0.0;
      for (int k = -kmax; k <= kmax; ++k) {
        const double shift = 2.0 * k * len;
        const double straight = normal_pdf(y - x + shift, 0.0, sigma);
        const double mirrored = normal_pdf(y + x - 2.0 * a.lower + shift, 0.0, sigma);
        if (k == 0) direct = straight;
        s += straight + mirrored;
      }
      d->q[i * n + j] = s;
      d->direct[i * n + j] = direct;
    }
  }
  return ProposalKernel(finish(std::move(d)));
}

ProposalKernel ProposalKernel::independence(const GridDensity& base) {
  require_1d(base.grid());
  auto d = std::make_shared<Data>(base.grid());
  const std::size_t n = base.size();
  d->n = n;
  d->kind = Kind::independence;
  d->name = "independence(" + base.description() + ")";
  d->q.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d->q[i * n + j] = base[j];
  return ProposalKernel(finish(std::move(d)));
}

ProposalKernel ProposalKernel::custom(const Grid& g, std::function<double(double, double)> q, std::string name) {
  require_1d(g);
  auto d = std::make_shared<Data>(g);
  const std::size_t n = g.size();
  d->n = n;
  d->kind = Kind::custom;
  d->name = std::move(name);
  d->q.resize(n * n);
  bool sym = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d->q[i * n + j] = q(g.coordinate(i), g.coordinate(j));
  for (std::size_t i = 0; i < n && sym; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (d->q[i * n + j] != d->q[j * n + i]) {
        sym = false;
        break;
      }
  d->symmetric = sym;
  return ProposalKernel(finish(std::move(d)));
}

double ProposalKernel::row_mass(std::size_t i) const { return data_->cdf[i * data_->n + data_->n - 1]; }

ProposalKernel::Draw ProposalKernel::draw(std::size_t i, double u) const {
  const std::size_t n = data_->n;
  const double* c = data_->cdf.data() + i * n;
  if (u >= c[n - 1]) return {i, false};
  const std::size_t j = static_cast<std::size_t>(std::upper_bound(c, c + n, u) - c);
  bool truncated = false;
  if (data_->kind == Kind::random_walk) {
    const double before = j == 0 ? 0.0 : c[j - 1];
    truncated = (u - before) >= data_->grid.weight(j) * data_->direct[i * n + j];
  }
  return {j, truncated};
}

std::string ProposalKernel::tag() const {
  if (data_->kind == Kind::random_walk) {
    std::ostringstream os;
    os << "random-walk(" << data_->sigma << ")";
    return os.str();
  }
  return data_->name;
}

}  // namespace mcc
