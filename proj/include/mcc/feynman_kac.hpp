#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mcc/grid.hpp"
#include "mcc/measures.hpp"

namespace mcc {

// Mutation kernel with a density M(x_i, x_j) on a 1-D grid. Rows are scaled to
// unit trapezoid mass so that Phi maps grid densities to grid densities exactly.
class MutationKernel {
 public:
  static MutationKernel from_density(const Grid& g, const std::function<double(double, double)>& m,
                                     std::string tag);
  // M(x_i, .) is the unit spike at x_i.
  static MutationKernel identity(const Grid& g);

  const Grid& grid() const { return grid_; }
  double operator()(std::size_t i, std::size_t j) const { return m_[i * n_ + j]; }
  const double* row(std::size_t i) const { return m_.data() + i * n_; }
  // (M f)(x_i)
  std::vector<double> apply(std::span<const double> f) const;
  double max_density() const { return max_; }
  const std::string& tag() const { return tag_; }

 private:
  MutationKernel(Grid g, std::vector<double> m, std::string tag);
  Grid grid_;
  std::size_t n_ = 0;
  std::vector<double> m_;
  double max_ = 0.0;
  std::string tag_;
};

// Levels are numbered from 1. Level p + 1 targets Phi_p(eta^(p)) built with
// potentials[p-1] and mutations[p-1].
struct FeynmanKacModel {
  Grid grid;
  std::vector<GridFunction> potentials;
  std::vector<MutationKernel> mutations;
  GridDensity eta1;

  // Highest level index that can be formed.
  std::size_t max_level() const { return potentials.size() + 1; }
  const GridFunction& G(std::size_t p) const;
  const MutationKernel& M(std::size_t p) const;
  // Positivity of G and bounded mutation densities.
  void validate() const;
};

struct SsmBootstrapModel {
  std::string phi_tag = "tanh";  // tanh | sin | clip
  double phi_bar = 1.0;
  std::vector<double> observations;  // s_1, s_2, ...
  Axis axis{-7.0, 7.0, 281};

  double phi(double x) const;
  FeynmanKacModel model() const;
};

// Simulates s_1..s_count from the latent chain W_1 ~ N(0,1/2), W_{j+1} ~ N(phi(W_j),1/2),
// S_j ~ N(W_j, 1/2).
std::vector<double> ssm_generate_observations(const SsmBootstrapModel& m, std::size_t count, std::uint64_t seed);
void write_observations(const std::filesystem::path& csv, const std::vector<double>& s);
std::vector<double> read_observations(const std::filesystem::path& csv);

// Uniform weights over samples, stored as node counts.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure(Grid g, std::span<const std::size_t> states);
  static EmpiricalMeasure from_counts(Grid g, std::vector<double> counts);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& counts() const { return counts_; }
  double total() const { return total_; }
  // Node probabilities counts / total.
  std::vector<double> masses() const;
  double expectation(std::span<const double> f) const;

 private:
  EmpiricalMeasure(Grid g, std::vector<double> counts, double total);
  Grid grid_;
  std::vector<double> counts_;
  double total_ = 0.0;
};

// Phi(eta) = int eta(dy) G(y) M(y, .) / eta(G)
GridDensity boltzmann_gibbs(const GridDensity& eta, const GridFunction& G, const MutationKernel& M);
GridDensity boltzmann_gibbs(const EmpiricalMeasure& eta, const GridFunction& G, const MutationKernel& M);
// Normalized potential weights G(x_i) c_i / sum_k G(x_k) c_k of an empirical measure.
std::vector<double> boltzmann_gibbs_weights(const EmpiricalMeasure& eta, const GridFunction& G);

// eta^(1), ..., eta^(levels) by grid iteration of Phi.
std::vector<GridDensity> reference_flow(const FeynmanKacModel& model, std::size_t levels);

// Qbar^(p)(x, f) = G^(p)(x) M^(p)(x, f) / eta^(p)(G^(p))
GridFunction q_bar(const FeynmanKacModel& model, const std::vector<GridDensity>& flow, std::size_t p,
                   const GridFunction& f);
// Qbar^(j) o ... o Qbar^(p-1) applied to f; identity when j = p.
GridFunction q_bar_chain(const FeynmanKacModel& model, const std::vector<GridDensity>& flow, std::size_t j,
                         std::size_t p, const GridFunction& f);

struct FkDecompositionReport {
  double lhs = 0.0;  // [Phi(eta_n) - Phi(eta)](f)
  double rhs = 0.0;  // [eta_n - eta](Qbar(f - Phi(eta_n)(f)))
  double residual = 0.0;
};

// Level-1 decomposition; eta_n is an empirical measure on the level-1 grid.
FkDecompositionReport fk_decomposition_check(const FeynmanKacModel& model, const EmpiricalMeasure& eta_n,
                                             const GridFunction& f);

enum class FkCentering { final_level, per_level };

// sigma2[j-1] is the asymptotic variance functional of level j.
using VarianceFunctional = std::function<double(const GridFunction&)>;

struct VarianceRecursion {
  std::vector<double> terms;  // term j = sigma^2_{eta^(j)}(Qbar^(j:p)(f - c_j))
  double total = 0.0;
  double fluctuation = 0.0;   // sum of the terms j < p (v^2)
};

VarianceRecursion smcmc_variance_recursion(const FeynmanKacModel& model, const std::vector<GridDensity>& flow,
                                           std::size_t p, const GridFunction& f,
                                           const std::vector<VarianceFunctional>& sigma2,
                                           FkCentering centering = FkCentering::final_level);

}  // namespace mcc
