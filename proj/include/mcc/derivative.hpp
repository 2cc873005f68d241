#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mcc/kernels.hpp"
#include "mcc/measures.hpp"

namespace mcc {

struct DerivativeOptions {
  // Ceiling on rho/mu^2 (Hastings) resp. rho_2/mu_2 (Gibbs) for density starts.
  double warm_start_ceiling = 1e6;
};

// Derivative of P_mu(start, f) in the invariant distribution.
//  density_part  D(y): acts on chi through sum_y w_y chi(y) D(y).
//  singular_part Hastings point start x: S(y) on the full grid, acting as chi(x) S(x).
//                Gibbs point start x: s(y1) on the slice {y2 = x2} (first axis),
//                acting as sum_{y1} w_{y1} chi(y1, x2) s(y1).
struct KernelDerivative {
  enum class Singular { none, point, slice };

  GridFunction density_part;
  std::optional<GridFunction> singular_part;
  Singular singular = Singular::none;
  std::size_t point = 0;  // start node for point starts
  GridDensity at;
  Start start;
  GridFunction test_function;

  double action(const SignedGridFunction& chi) const;
  // Action on mu itself; zero for every derivative (centering).
  double centering_residual() const;
  // |sum_y w_y mu(y) D(y)|, the density-part centering.
  double density_centering() const;
};

KernelDerivative hastings_derivative(const HastingsKernel& k, const GridDensity& rho, const GridFunction& f,
                                     const DerivativeOptions& opt = {});
KernelDerivative hastings_derivative_at_point(const HastingsKernel& k, std::size_t x, const GridFunction& f);
KernelDerivative gibbs_derivative(const GibbsKernel& k, const GridDensity& rho, const GridFunction& f,
                                  const DerivativeOptions& opt = {});
KernelDerivative gibbs_derivative_at_point(const GibbsKernel& k, std::size_t x, const GridFunction& f);

KernelDerivative kernel_derivative(const MarkovKernel& k, const Start& start, const GridFunction& f,
                                   const DerivativeOptions& opt = {});
KernelDerivative kernel_derivative(const KernelFamily& family, const GridDensity& mu, const Start& start,
                                   const GridFunction& f, const DerivativeOptions& opt = {});

// Richardson-extrapolated one-sided difference quotient of t -> F(t) at 0.
struct FdOptions {
  std::array<double, 3> steps{1e-2, 5e-3, 2.5e-3};
  double tolerance = 1e-3;
};

struct FdResult {
  double value = 0.0;
  std::array<double, 3> quotients{};
  std::array<double, 2> first_order{};
  double scale = 0.0;
};

FdResult fd_extrapolate(const std::function<double(double)>& F, double scale, const FdOptions& opt = {});

// d/dt P^steps_{mu + t(nu - mu)}(start, f) at t = 0.
FdResult fd_directional_derivative(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                                   const Start& start, const GridFunction& f, const FdOptions& opt = {},
                                   std::size_t steps = 1);

// Width-refinement diagnostic: oracle values with triangle starts of the given
// half-widths (in nodes) around x, to compare with the exact point-start value.
std::vector<double> fd_triangle_refinement(const KernelFamily& family, const GridDensity& mu,
                                           const GridDensity& nu, std::size_t x, const GridFunction& f,
                                           const std::vector<std::size_t>& half_widths);
GridDensity triangle_density(const Grid& g, std::size_t x, std::size_t half_width);

struct IteratedDerivative {
  std::vector<KernelDerivative> terms;  // term j: start P^{k-j-1}, function P^j f
  double action(const SignedGridFunction& chi) const;
};

IteratedDerivative iterated_derivative(const KernelFamily& family, std::size_t k_steps, const GridDensity& mu,
                                       const Start& start, const GridFunction& f,
                                       const DerivativeOptions& opt = {});

struct LimitCheckReport {
  std::vector<double> actions;  // a_k, k = 1..k_max
  std::vector<double> gaps;     // |a_k - (nu - mu)(f)|
  double limit = 0.0;
  double rate = 0.0;            // fitted geometric decay of the gaps
  double tolerance = 0.0;
  bool geometric = false;
  bool pass = false;
  std::string diagnostic;
};

LimitCheckReport iterated_derivative_limit_check(const KernelFamily& family, const GridDensity& mu,
                                                 const GridDensity& nu, const Start& start, const GridFunction& f,
                                                 std::size_t k_max, double tol = 1e-3,
                                                 const DerivativeOptions& opt = {});

struct DriftDerivativeReport {
  bool holds = false;
  double worst_violation = 0.0;
  std::size_t worst_node = 0;
  bool via_generator_identity = false;
  double identity_gap = 0.0;  // sup |D - (f - Pf)| when the derivative was used
};

// Checks -D(x) <= -1 + b 1_C(x) with D the derivative density at rho = mu.
DriftDerivativeReport drift_via_derivative(const MarkovKernel& k, const GridFunction& f,
                                           const std::vector<bool>& in_C, double b);

// Max over t in {0, 1/2, 1} of the absolute integrand mass of the derivative's
// double integral against chi = nu - mu.
double interchange_margin(const KernelFamily& family, const GridDensity& mu, const GridDensity& nu,
                          const Start& start, const GridFunction& f);

}  // namespace mcc
