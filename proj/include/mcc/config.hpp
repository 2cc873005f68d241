#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcc/analytic.hpp"
#include "mcc/error.hpp"
#include "mcc/feynman_kac.hpp"
#include "mcc/kernels.hpp"
#include "mcc/samplers.hpp"

namespace mcc {

enum class ExperimentKind { derivative_check, ftc_check, mvi_check, ergodicity_check, smcmc_run, imcmc_run, clt_report };

std::string experiment_name(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment(const std::string& name);

struct DensitySpec {
  std::optional<AnalyticDensity> analytic;
  std::filesystem::path csv;  // used when analytic is empty
};

struct GridSpec {
  Axis first{-8.0, 8.0, 401};
  std::optional<Axis> second;
  Grid grid() const { return second ? Grid(first, *second) : Grid(first); }
};

struct FamilySpec {
  std::string kind = "hastings";       // hastings | gibbs
  std::string balancing = "barker";    // barker | min-one | gj
  int gj = 2;
  std::string proposal = "random_walk";  // random_walk | independence
  double sigma = 1.0;
  std::optional<DensitySpec> proposal_base;
};

struct WeightSpec {
  std::string kind = "constant";  // constant | one_plus_square | exp_abs
  double gamma = 1.0;
  WeightFunction make() const;
};

struct StartSpec {
  std::vector<double> point;  // coordinates; empty for a density start
  std::optional<DensitySpec> density;
};

struct ModelSpec {
  std::string phi = "tanh";
  double phi_bar = 1.0;
  std::filesystem::path observations;
  Axis axis{-7.0, 7.0, 281};
};

struct Tolerances {
  double oracle_relative = 1e-3;
  double centering = 1e-6;
  double invariance = 1e-9;
  double ftc_density = 1e-6;
  double ftc_point = 1e-5;
  double refinement_factor = 2.0;
  double poisson = 1e-6;
  double resolvent_identity = 1e-5;
  double variance_relative = 0.2;
  double skewness = 0.25;
  double excess_kurtosis = 0.5;
  double ks = 0.08;
  double warm_start_ceiling = 1e6;
};

struct ErgodicitySpec {
  std::vector<double> d_levels{5.0, 10.0, 20.0, 50.0};
  int j = 1;
  double kappa_floor = 1e-12;
  std::size_t k_max = 60;
  std::size_t sample_sets = 0;      // > 0: targets Phi(eta_n) of the model from seeded eta^(1) samples
  std::size_t samples_per_set = 1000;
  std::optional<double> log_concave_gamma;  // defaults to 2 phi_bar
  std::optional<double> log_concave_z;
};

struct SamplerSpec {
  Scheme scheme = Scheme::smcmc;  // clt-report only; the run subcommands fix it
  std::size_t levels = 2;
  std::size_t n = 100000;
  std::size_t replications = 200;
  std::size_t batch_count = 50;
  double x0 = 0.0;
  LevelStart level_start = LevelStart::previous_final;
  FkCentering centering = FkCentering::final_level;
  double alpha = 0.25;  // iMCMC test functions are bounded in the V^alpha norm
  bool track_adaptation = true;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::derivative_check;
  std::filesystem::path source;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  GridSpec grid;
  FamilySpec family;
  std::optional<DensitySpec> target;
  std::optional<DensitySpec> perturbation;
  // Distribution the invariance check is run against; the target when absent.
  std::optional<DensitySpec> claimed_invariant;
  StartSpec start;
  std::string test_function = "tanh";
  WeightSpec weight;
  std::size_t t_nodes = 33;
  bool perp_at_t0 = false;
  std::size_t trials = 50;
  std::optional<ModelSpec> model;
  ErgodicitySpec ergodicity;
  SamplerSpec sampler;
  Tolerances tol;
};

class ConfigError : public InvalidInput {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Parses and validates; throws ConfigError listing every problem found.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source = {});

// Relative paths inside a config resolve against the config's directory.
std::filesystem::path resolve_input(const ExperimentConfig& c, const std::filesystem::path& p);
GridDensity make_density(const ExperimentConfig& c, const DensitySpec& s, const Grid& g);
KernelFamily make_family(const ExperimentConfig& c, const Grid& g);
HastingsFamily make_hastings_family(const ExperimentConfig& c, const Grid& g);
SsmBootstrapModel make_model(const ExperimentConfig& c);
// Input files named by the config (observations, CSV densities).
std::vector<std::filesystem::path> config_inputs(const ExperimentConfig& c);

}  // namespace mcc
