#include "mcc/feynman_kac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mcc/analytic.hpp"
#include "mcc/error.hpp"
#include "mcc/io.hpp"
#include "mcc/rng.hpp"

namespace mcc {

MutationKernel::MutationKernel(Grid g, std::vector<double> m, std::string tag)
    : grid_(std::move(g)), n_(grid_.size()), m_(std::move(m)), tag_(std::move(tag)) {
  for (double v : m_) max_ = std::max(max_, v);
}

MutationKernel MutationKernel::from_density(const Grid& g, const std::function<double(double, double)>& m,
                                            std::string tag) {
  if (g.dim() != 1) throw InvalidInput("mutation kernels live on a one-dimensional grid");
  const std::size_t n = g.size();
  const auto& w = g.weights();
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double x = m(g.coordinate(i), g.coordinate(j));
      if (!(x >= 0.0) || !std::isfinite(x)) fail_invalid("mutation density must be finite and nonnegative");
      v[i * n + j] = x;
      mass += w[j] * x;
    }
    if (!(mass > 0.0)) fail_invalid("mutation density has zero mass on the grid");
    if (std::abs(mass - 1.0) > 1e-6) {
      std::ostringstream os;
      os << "mutation density row " << i << " integrates to " << mass << " on the grid";
      fail_invalid(os.str());
    }
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] /= mass;
  }
  return MutationKernel(g, std::move(v), std::move(tag));
}

MutationKernel MutationKernel::identity(const Grid& g) {
  const std::size_t n = g.size();
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0 / g.weight(i);
  return MutationKernel(g, std::move(v), "identity");
}

std::vector<double> MutationKernel::apply(std::span<const double> f) const {
  const auto& w = grid_.weights();
  std::vector<double> out(n_);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n_; ++i) {
    const double* r = row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += w[j] * r[j] * f[j];
    out[i] = s;
  }
  return out;
}

const GridFunction& FeynmanKacModel::G(std::size_t p) const {
  if (p < 1 || p > potentials.size()) throw RangeError("no potential for level " + std::to_string(p));
  return potentials[p - 1];
}

const MutationKernel& FeynmanKacModel::M(std::size_t p) const {
  if (p < 1 || p > mutations.size()) throw RangeError("no mutation kernel for level " + std::to_string(p));
  return mutations[p - 1];
}

void FeynmanKacModel::validate() const {
  if (potentials.size() != mutations.size()) throw InvalidInput("potentials and mutations differ in count");
  require_same_grid(grid, eta1.grid(), "Feynman-Kac initial distribution");
  for (std::size_t p = 0; p < potentials.size(); ++p) {
    require_same_grid(grid, potentials[p].grid, "Feynman-Kac potential");
    require_same_grid(grid, mutations[p].grid(), "Feynman-Kac mutation");
    for (double v : potentials[p].values)
      if (!(v > 0.0) || !std::isfinite(v))
        throw PreconditionError("potential G^(" + std::to_string(p + 1) + ") must be positive on the grid");
    if (!std::isfinite(mutations[p].max_density()))
      throw PreconditionError("mutation M^(" + std::to_string(p + 1) + ") has an unbounded density");
  }
}

double SsmBootstrapModel::phi(double x) const {
  if (phi_tag == "tanh") return phi_bar * std::tanh(x);
  if (phi_tag == "sin") return phi_bar * std::sin(x);
  if (phi_tag == "clip") return std::clamp(x, -phi_bar, phi_bar);
  throw InvalidInput("unknown phi tag '" + phi_tag + "'");
}

FeynmanKacModel SsmBootstrapModel::model() const {
  if (!(phi_bar > 0.0)) throw InvalidInput("phi_bar must be positive");
  if (observations.empty()) throw InvalidInput("state-space model needs at least one observation");
  validate_axis(axis);
  const Grid g(axis);
  const double sd = std::sqrt(0.5);
  FeynmanKacModel m{g, {}, {}, GridDensity::from_pdf(g, [&](const Point& p) { return normal_pdf(p[0], 0.0, sd); },
                                                        "N(0,1/2)")};
  const auto mut = MutationKernel::from_density(
      g, [this](double y, double x) { return std::exp(-(x - phi(y)) * (x - phi(y))) / std::sqrt(std::numbers::pi); },
      "N(phi(y),1/2)");
  for (double s : observations) {
    m.potentials.push_back(GridFunction::evaluate(g, [s](const Point& p) { return std::exp(-(s - p[0]) * (s - p[0])); }));
    m.mutations.push_back(mut);
  }
  m.validate();
  return m;
}

std::vector<double> ssm_generate_observations(const SsmBootstrapModel& m, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, 0x73736d);
  const double sd = std::sqrt(0.5);
  std::vector<double> s;
  double w = sd * rng.normal();
  for (std::size_t j = 0; j < count; ++j) {
    s.push_back(w + sd * rng.normal());
    w = m.phi(w) + sd * rng.normal();
  }
  return s;
}

void write_observations(const std::filesystem::path& csv, const std::vector<double>& s) {
  CsvWriter out(csv, {"index", "value"});
  for (std::size_t i = 0; i < s.size(); ++i) out.row_text({std::to_string(i + 1), format_double(s[i])});
  out.close();
}

std::vector<double> read_observations(const std::filesystem::path& csv) {
  const std::string text = read_text(csv);
  std::vector<double> s;
  std::size_t pos = text.find('\n');
  if (pos == std::string::npos) throw InvalidInput("observation file has no rows: " + csv.string());
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos + 1), text.size());
    const std::string line = text.substr(pos + 1, end - pos - 1);
    pos = end;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidInput("malformed observation row: " + line);
    s.push_back(parse_double(line.substr(comma + 1)));
  }
  return s;
}

EmpiricalMeasure::EmpiricalMeasure(Grid g, std::vector<double> counts, double total)
    : grid_(std::move(g)), counts_(std::move(counts)), total_(total) {}

EmpiricalMeasure::EmpiricalMeasure(Grid g, std::span<const std::size_t> states)
    : grid_(std::move(g)), counts_(grid_.size(), 0.0) {
  if (states.empty()) throw InvalidInput("empirical measure needs at least one sample");
  for (std::size_t s : states) {
    if (s >= counts_.size()) throw RangeError("sample outside the grid");
    counts_[s] += 1.0;
  }
  total_ = static_cast<double>(states.size());
}

EmpiricalMeasure EmpiricalMeasure::from_counts(Grid g, std::vector<double> counts) {
  if (counts.size() != g.size()) throw InvalidInput("count vector does not match the grid");
  double t = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw InvalidInput("counts must be nonnegative");
    t += c;
  }
  if (!(t > 0.0)) throw InvalidInput("empirical measure needs at least one sample");
  return EmpiricalMeasure(std::move(g), std::move(counts), t);
}

std::vector<double> EmpiricalMeasure::masses() const {
  std::vector<double> m(counts_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = counts_[i] / total_;
  return m;
}

double EmpiricalMeasure::expectation(std::span<const double> f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < counts_.size(); ++i)
    if (counts_[i] != 0.0) s += counts_[i] * f[i];
  return s / total_;
}

namespace {

GridDensity phi_from_node_weights(const std::vector<double>& weights, const MutationKernel& M) {
  const Grid& g = M.grid();
  const std::size_t n = g.size();
  double z = 0.0;
  for (double v : weights) z += v;
  if (!(z > 0.0)) throw PreconditionError("degenerate weights: eta(G) = 0");
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] == 0.0) continue;
    const double a = weights[i] / z;
    const double* r = M.row(i);
    for (std::size_t j = 0; j < n; ++j) out[j] += a * r[j];
  }
  return GridDensity::normalized(g, std::move(out), "Boltzmann-Gibbs");
}

}  // namespace

GridDensity boltzmann_gibbs(const GridDensity& eta, const GridFunction& G, const MutationKernel& M) {
  require_same_grid(eta.grid(), G.grid, "boltzmann_gibbs");
  require_same_grid(eta.grid(), M.grid(), "boltzmann_gibbs");
  const auto& w = eta.grid().weights();
  std::vector<double> a(eta.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = w[i] * eta[i] * G[i];
  return phi_from_node_weights(a, M);
}

std::vector<double> boltzmann_gibbs_weights(const EmpiricalMeasure& eta, const GridFunction& G) {
  require_same_grid(eta.grid(), G.grid, "boltzmann_gibbs");
  std::vector<double> a(eta.counts().size());
  double z = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = eta.counts()[i] * G[i];
    z += a[i];
  }
  if (!(z > 0.0)) throw PreconditionError("degenerate weights: eta(G) = 0");
  for (double& v : a) v /= z;
  return a;
}

GridDensity boltzmann_gibbs(const EmpiricalMeasure& eta, const GridFunction& G, const MutationKernel& M) {
  require_same_grid(eta.grid(), M.grid(), "boltzmann_gibbs");
  return phi_from_node_weights(boltzmann_gibbs_weights(eta, G), M);
}

std::vector<GridDensity> reference_flow(const FeynmanKacModel& model, std::size_t levels) {
  if (levels < 1 || levels > model.max_level())
    throw RangeError("model supports levels 1.." + std::to_string(model.max_level()));
  std::vector<GridDensity> flow{model.eta1};
  for (std::size_t p = 1; p < levels; ++p) flow.push_back(boltzmann_gibbs(flow.back(), model.G(p), model.M(p)));
  return flow;
}

GridFunction q_bar(const FeynmanKacModel& model, const std::vector<GridDensity>& flow, std::size_t p,
                   const GridFunction& f) {
  if (p < 1 || p > flow.size()) throw RangeError("reference flow does not reach level " + std::to_string(p));
  const GridFunction& G = model.G(p);
  const double etaG = integrate(G, flow[p - 1]);
  if (!(etaG > 0.0)) throw PreconditionError("eta^(p)(G^(p)) = 0 at level " + std::to_string(p));
  auto mf = model.M(p).apply(f.values);
  for (std::size_t i = 0; i < mf.size(); ++i) mf[i] *= G[i] / etaG;
  return GridFunction(f.grid, std::move(mf));
}

GridFunction q_bar_chain(const FeynmanKacModel& model, const std::vector<GridDensity>& flow, std::size_t j,
                         std::size_t p, const GridFunction& f) {
  if (j < 1 || j > p) throw RangeError("q_bar_chain needs 1 <= j <= p");
  GridFunction g = f;
  for (std::size_t l = p - 1; l >= j && l >= 1; --l) g = q_bar(model, flow, l, g);
  return g;
}

FkDecompositionReport fk_decomposition_check(const FeynmanKacModel& model, const EmpiricalMeasure& eta_n,
                                             const GridFunction& f) {
  const auto flow = reference_flow(model, 1);
  const auto phi_n = boltzmann_gibbs(eta_n, model.G(1), model.M(1));
  const auto phi = boltzmann_gibbs(model.eta1, model.G(1), model.M(1));
  FkDecompositionReport rep;
  const double c = integrate(f, phi_n);
  rep.lhs = c - integrate(f, phi);
  std::vector<double> centered(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) centered[i] = f[i] - c;
  const auto g = q_bar(model, flow, 1, GridFunction(f.grid, centered));
  rep.rhs = eta_n.expectation(g.values) - integrate(g, model.eta1);
  rep.residual = std::abs(rep.lhs - rep.rhs);
  return rep;
}

VarianceRecursion smcmc_variance_recursion(const FeynmanKacModel& model, const std::vector<GridDensity>& flow,
                                           std::size_t p, const GridFunction& f,
                                           const std::vector<VarianceFunctional>& sigma2, FkCentering centering) {
  if (p < 1 || p > flow.size()) throw RangeError("reference flow does not reach level " + std::to_string(p));
  if (sigma2.size() < p)
    throw InvalidInput("missing variance functional for level " + std::to_string(sigma2.size() + 1));
  VarianceRecursion out;
  for (std::size_t j = 1; j <= p; ++j) {
    const double c = integrate(f, flow[(centering == FkCentering::final_level ? p : j) - 1]);
    std::vector<double> centered(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) centered[i] = f[i] - c;
    const auto g = q_bar_chain(model, flow, j, p, GridFunction(f.grid, centered));
    if (!sigma2[j - 1]) throw InvalidInput("missing variance functional for level " + std::to_string(j));
    const double t = sigma2[j - 1](g);
    out.terms.push_back(t);
    out.total += t;
    if (j < p) out.fluctuation += t;
  }
  return out;
}

}  // namespace mcc
