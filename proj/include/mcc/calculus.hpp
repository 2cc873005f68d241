#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcc/derivative.hpp"
#include "mcc/kernels.hpp"
#include "mcc/measures.hpp"

namespace mcc {

// Equally spaced nodes on [0, 1]; n odd and >= 3.
std::vector<double> simpson_nodes(std::size_t n);
double simpson(std::span<const double> values);

struct FtcReport {
  double lhs = 0.0;  // P_mu(start, f) - P_nu(start, f)
  double rhs = 0.0;  // Simpson integral over t of the derivative action on mu - nu
  double residual = 0.0;
  double tolerance = 0.0;
  std::vector<double> t_nodes;
  std::vector<double> actions;
  bool pass = false;
};

FtcReport verify_ftc(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu, const Start& start,
                     const GridFunction& f, std::size_t t_nodes = 33, double tol = 1e-6,
                     const DerivativeOptions& opt = {});

struct FtcRefinement {
  std::vector<std::size_t> t_nodes;
  std::vector<double> residuals;
  // Residual ratio between the coarsest two levels whose residuals sit above
  // the rounding floor; infinity when the coarsest level is already at it.
  double factor = 0.0;
  bool shrinks = false;
};

FtcRefinement ftc_refinement(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                             const Start& start, const GridFunction& f,
                             const std::vector<std::size_t>& t_nodes = {5, 9, 17, 33},
                             const DerivativeOptions& opt = {});

// Smooth increasing map of the real line.
using Pushforward = std::function<double(double)>;

// Density of T_* mu at every node: mu(T^{-1}(y)) / T'(T^{-1}(y)), unnormalized.
std::vector<double> pushforward_values(const Grid& g, const std::function<double(double)>& mu_pdf,
                                       const Pushforward& T);
GridDensity pushforward_density(const Grid& g, const std::function<double(double)>& mu_pdf, const Pushforward& T);

// lhs with nu = T_* mu; rhs as the double quadrature over t and s of the spatial
// derivative of the derivative density along the segments y -> T(y).
FtcReport verify_ftc_intrinsic(const KernelFamily& family, const Grid& g, const std::function<double(double)>& mu_pdf,
                               const Pushforward& T, const GridDensity& rho, const GridFunction& f,
                               std::size_t t_nodes = 33, std::size_t s_nodes = 17, double tol = 1e-4,
                               const DerivativeOptions& opt = {});

struct MviOptions {
  std::size_t t_nodes = 33;
  DerivativeOptions derivative;
  // Gibbs point starts: evaluate M_perp at t = 0 instead of integrating over t.
  bool perp_at_t0 = false;
};

struct MviConstants {
  double m_rho = 0.0;  // M_rho, or M_x for point starts
  double m_perp = 0.0;
  std::string v_tag;
  std::string formula;  // hastings | metropolis-hastings | gibbs
  std::size_t t_nodes = 0;
  bool point_start = false;
};

MviConstants hastings_mvi_constants(const HastingsFamily& family, const GridDensity& mu, const GridDensity& nu,
                                    const Start& start, const WeightFunction& V, const MviOptions& opt = {});
MviConstants mh_mvi_constants(const HastingsFamily& family, const GridDensity& mu, const GridDensity& nu,
                              const Start& start, const WeightFunction& V, const MviOptions& opt = {});
MviConstants gibbs_mvi_constants(const GridDensity& mu, const GridDensity& nu, const Start& start,
                                 const WeightFunction& V, const MviOptions& opt = {});
// Dispatch by family and balancing function.
MviConstants mvi_constants(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                           const Start& start, const WeightFunction& V, const MviOptions& opt = {});

// Quantity multiplying M_perp: rho(|mu - nu|) for densities, |mu(x) - nu(x)| for
// Hastings point starts, the slice integral of |mu - nu|(., x2) for Gibbs point starts.
double perp_distance(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu, const Start& start);

// V-scaled trigonometric mixture with sup |f|/V <= 1.
GridFunction random_bv_function(const Grid& g, const GridFunction& V, std::uint64_t seed, std::uint64_t index);

struct MviCheckReport {
  MviConstants constants;
  double v_distance = 0.0;
  double perp_distance = 0.0;
  double bound = 0.0;
  double exact_lhs = 0.0;      // || P_mu(start,.) - P_nu(start,.) ||_V
  double empirical_max = 0.0;  // max over random f of |P_mu(start,f) - P_nu(start,f)|
  double empirical_max_ratio = 0.0;
  double metric_bound = 0.0;   // max(M, M_perp) * d_rho(mu, nu)
  std::size_t trials = 0;
  std::size_t violations = 0;
  bool pass = false;
};

MviCheckReport check_mean_value_inequality(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                           const Start& start, const WeightFunction& V, std::size_t trials,
                                           std::uint64_t seed, const MviOptions& opt = {});

struct UniformBoundednessReport {
  std::vector<std::size_t> nodes;
  std::vector<double> m_x;
  std::vector<double> m_perp;
  double max_m_x = 0.0;
  double max_m_perp = 0.0;
  bool finite = false;
  // M_x increases monotonically from the mode outwards on both sides.
  bool grows_toward_boundary = false;
};

UniformBoundednessReport uniform_boundedness_scan(const KernelFamily& family, const GridDensity& mu,
                                                  const GridDensity& nu, const WeightFunction& V,
                                                  const std::vector<std::size_t>& x_nodes,
                                                  const MviOptions& opt = {});

}  // namespace mcc
