#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcc/calculus.hpp"
#include "mcc/feynman_kac.hpp"
#include "mcc/kernels.hpp"

namespace mcc {

struct ChainRun {
  Grid grid;
  std::vector<std::size_t> states;  // node indices
  std::vector<std::uint8_t> accepted;  // per state; the initial state counts as not accepted
  std::uint64_t seed = 0;
  std::string kernel_descriptor;
  double acceptance_rate = 0.0;
  std::size_t truncation_events = 0;

  std::size_t size() const { return states.size(); }
  double coordinate(std::size_t k) const { return grid.coordinate(states[k]); }
  // Sum of f over the states.
  double sum(std::span<const double> f) const;
};

// length states: x0 followed by length - 1 kernel moves. length = 0 gives an empty run.
ChainRun run_limiting_chain(const MarkovKernel& k, std::size_t x0, std::size_t length, std::uint64_t seed,
                            std::uint64_t stream = 0, std::uint64_t substream = 0);

enum class LevelStart { previous_final, fixed };

struct SamplerOptions {
  std::size_t x0 = 0;                        // initial node for level 1 (and every level when fixed)
  LevelStart level_start = LevelStart::previous_final;
  std::uint64_t replication = 0;             // selects the RNG stream
  bool track_adaptation = false;             // iMCMC: record D1/C1 statistics
  const WeightFunction* adaptation_weight = nullptr;
  // iMCMC with level 1 replaced by a fixed measure (degenerate adaptation).
  std::optional<EmpiricalMeasure> frozen_level1;
};

struct SmcmcLevel {
  ChainRun run;
  EmpiricalMeasure empirical;
  GridDensity target;  // eta^(1) at level 1, Phi(eta_n^(p-1)) above
};

// n + 1 states per level.
std::vector<SmcmcLevel> run_smcmc(const HastingsFamily& family, const FeynmanKacModel& model, std::size_t p_levels,
                                  std::size_t n, std::uint64_t seed, const SamplerOptions& opt = {});

struct AdaptationTrace {
  std::vector<std::size_t> checkpoints;
  std::vector<double> d1_sup;  // n^{-1/2} sum_{k<=n} sup_x |mu_k(x) - mu_{k-1}(x)|
  std::vector<double> d1_v;    // n^{-1/2} sum_{k<=n} ||mu_k - mu_{k-1}||_V
  std::vector<double> c1_gap;  // sup_x |mu_n(x) - reference(x)|
};

struct ImcmcLevel {
  ChainRun run;  // states Z_1..Z_n (Z_0 dropped)
  // Phi(eta_k^(p-1))(f) for the target that produced Z_k, for the random-centered statistic; filled for the top level
  std::vector<double> centering;
  std::optional<AdaptationTrace> trace;
};

// Level p moves by the Hastings kernel targeting Phi(eta_k^(p-1)), eta_k^(p-1) the running empirical
// measure of Z_1..Z_k at level p - 1. centering_f (top level only) is averaged against each step's target.
std::vector<ImcmcLevel> run_imcmc(const HastingsFamily& family, const FeynmanKacModel& model, std::size_t p_levels,
                                  std::size_t n, std::uint64_t seed, const SamplerOptions& opt = {},
                                  const GridFunction* centering_f = nullptr,
                                  const GridDensity* adaptation_reference = nullptr);

double batch_means_variance(const ChainRun& run, std::span<const double> f, std::size_t batch_count);

// Statistics of an explicit target sequence mu_0, mu_1, ... (checkpoints at log-spaced n).
AdaptationTrace adaptation_trace(const std::vector<GridDensity>& targets, const WeightFunction& V,
                                 const GridDensity& reference);

struct AdaptationReport {
  AdaptationTrace trace;
  double d1_sup_slope = 0.0;  // log-log slope of the D1 statistics against n
  double d1_v_slope = 0.0;
  double c1_slope = 0.0;
  bool d1_pass = false;
  bool c1_pass = false;
  std::optional<UniformBoundednessReport> d2;
  bool pass = false;
};

AdaptationReport check_adaptation_conditions(const AdaptationTrace& trace);
// Adds the uniform-boundedness scan (C2/D2) along the realized final target.
AdaptationReport check_adaptation_conditions(const AdaptationTrace& trace, const KernelFamily& family,
                                             const GridDensity& limit, const GridDensity& realized,
                                             const WeightFunction& V, const std::vector<std::size_t>& x_nodes);

enum class Scheme { smcmc, imcmc };

struct CltConfig {
  Scheme scheme = Scheme::smcmc;
  std::size_t p_levels = 2;
  std::size_t n = 100000;
  std::size_t replications = 200;
  std::size_t batch_count = 50;
  std::uint64_t seed = 1;
  std::size_t x0 = 0;
  LevelStart level_start = LevelStart::previous_final;
  FkCentering centering = FkCentering::final_level;
  // iMCMC, p >= 2: record the D1/C1 statistics on every replication.
  bool track_adaptation = false;
  const WeightFunction* adaptation_weight = nullptr;
};

struct NormalityStats {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_distance = 0.0;  // against the normal with the sample mean and variance
};

NormalityStats normality_stats(std::span<const double> x);

struct CltReport {
  Scheme scheme = Scheme::smcmc;
  std::size_t replications = 0;
  std::size_t n = 0;
  double estimate = 0.0;                        // mean over replications of the level-p ergodic average
  double target_value = 0.0;                    // eta^(p)(f)
  double asymptotic_variance_poisson = 0.0;     // sigma^2(f) of the limiting chain
  double asymptotic_variance_batchmeans = 0.0;  // mean over replications
  double fluctuation_variance = 0.0;            // v^2 (smcmc) or w^2 = 2 v^2 (imcmc)
  double replication_variance = 0.0;            // random-centered statistic
  double replication_variance_det = 0.0;        // deterministic centering
  NormalityStats normality;
  double mean_acceptance = 0.0;
  std::vector<double> random_centered;
  std::vector<double> deterministic_centered;
  NormalityStats normality_det;
  // Replication-averaged D1/C1 statistics when tracked.
  std::optional<AdaptationReport> adaptation;
};

CltReport clt_experiment(const HastingsFamily& family, const FeynmanKacModel& model, const GridFunction& f,
                         const CltConfig& cfg);

}  // namespace mcc
