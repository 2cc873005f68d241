#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcc/kernels.hpp"
#include "mcc/measures.hpp"

namespace mcc {

// Drift P V <= drift_rate V + b 1_C on C = {V <= d}, plus a minorization constant.
struct DriftCertificate {
  std::string v_tag;
  double drift_rate = 0.0;
  double b = 0.0;
  double d = 0.0;
  int j = 1;
  double kappa = 0.0;
  bool pass = false;
  double worst_violation = 0.0;  // max over kernels and nodes of P V - drift_rate V - b 1_C
  std::size_t worst_kernel = 0;
  std::size_t worst_node = 0;
  std::string diagnostic;
};

// Smallest d allowed for given (drift_rate, b).
double drift_floor(double drift_rate, double b);

// Throws PreconditionError when d is below the floor.
DriftCertificate check_drift(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                             double drift_rate, double b, double d);

// Searches (drift_rate, b) for each candidate level d and returns the first
// certificate that passes, or the last failing one.
DriftCertificate scan_drift(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                            const std::vector<double>& d_levels);

std::vector<bool> level_set(const Grid& g, const WeightFunction& V, double d);

struct MinorizationReport {
  int j = 1;
  std::vector<double> kappa;        // per kernel, grid minimum of P^j(x,{y}) / upsilon({y}) over x, y in C
  std::vector<double> rw_analytic;  // g(1) eps mu(C) / b_n for random-walk Hastings kernels, else NaN
  double inf_kappa = 0.0;
  bool pass = false;
};

// upsilon_n is mu_n restricted to C and renormalized. j in {1, 2}.
MinorizationReport check_minorization(const std::vector<const MarkovKernel*>& kernels, const std::vector<bool>& in_C,
                                      int j, double kappa_floor);

struct LogConcaveReport {
  bool pass = false;
  double worst_slack = 0.0;  // min over pairs of log mu(x) - log mu(y) - gamma |y - x|
  std::size_t worst_density = 0;
  double worst_x = 0.0;
  double worst_y = 0.0;
};

// log mu(x) - log mu(y) >= gamma (y - x) for y >= x >= z, mirrored on y <= x <= -z.
LogConcaveReport check_log_concave_tails(const std::vector<GridDensity>& densities, double gamma, double z);

struct GeometricRateReport {
  std::vector<double> a;  // a_k, k = 1..k_max
  double beta = 0.0;
  double c_fit = 0.0;     // exp(intercept) of the fit
  double c_bound = 0.0;   // max_k a_k / beta^k
  double r_squared = 0.0;
  double L = 0.0;         // max(c_bound, 1 / (1 - beta))
  std::size_t k_burn = 3;
  bool pass = false;
  std::string diagnostic;
};

// a_k = max over x0 of ||P^k(x0,.) - mu||_V / V(x0); least squares on log a_k, k in [k_burn, k_max].
GeometricRateReport estimate_geometric_rate(const MarkovKernel& k, const std::vector<std::size_t>& x0,
                                            std::size_t k_max, const WeightFunction& V, std::size_t k_burn = 3);

struct MomentGrowthReport {
  std::vector<double> moments;  // mu_n(V^j)
  double sup_moment = 0.0;
  bool finite = false;
  // P V^{1/j} <= drift_rate^{1/j} V^{1/j} + b^{1/j} 1_C for every kernel
  bool jensen_drift_holds = false;
  double jensen_worst = 0.0;
};

MomentGrowthReport check_v_moment_growth(const std::vector<const MarkovKernel*>& kernels, const WeightFunction& V,
                                         int j_power, const DriftCertificate& cert);

struct DriftSimulationReport {
  std::vector<double> mean;    // E V(Z_n), n = 0..steps
  std::vector<double> std_error;
  std::vector<double> bound;   // drift_rate^n V(x0) + b sum_{i<n} drift_rate^i
  bool pass = false;
};

DriftSimulationReport simulate_drift_bound(const MarkovKernel& k, const WeightFunction& V,
                                           const DriftCertificate& cert, std::size_t x0, std::size_t steps,
                                           std::size_t reps, std::uint64_t seed);

// R f = sum_{k <= K} (P^k f - upsilon(f)), upsilon the kernel's invariant distribution.
struct ResolventTable {
  GridFunction values;
  std::size_t truncation_k = 0;
  double tail_bound = 0.0;
  double mean = 0.0;              // upsilon(f)
  double poisson_residual = 0.0;  // sup |(P - Id) R f - (upsilon(f) - f)|
  double centering = 0.0;         // |upsilon(R f)|
};

ResolventTable poisson_resolvent(const MarkovKernel& k, const GridFunction& f, double tol = 1e-12,
                                 std::size_t k_max = 1000000);

struct AsymptoticVariance {
  double sigma2 = 0.0;          // 2 upsilon(fbar R f) - upsilon(fbar^2)
  double sigma2_generator = 0.0;  // upsilon(P (R f)^2 - (P R f)^2)
};

AsymptoticVariance asymptotic_variance(const MarkovKernel& k, const GridFunction& f, double tol = 1e-12);

// sup |R_nu f - R_mu f - R_mu (P_nu - P_mu) R_nu f - mu(R_nu f)|
double check_resolvent_identity(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                const GridFunction& f, double tol = 1e-12);

// Invariant node masses w_i mu_i of the kernel's target.
std::vector<double> stationary_masses(const MarkovKernel& k);

}  // namespace mcc
