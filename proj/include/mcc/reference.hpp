#pragma once

#include <span>
#include <vector>

#include "mcc/balancing.hpp"
#include "mcc/measures.hpp"
#include "mcc/proposal.hpp"

// Serial transcriptions of the kernel formulas, evaluated entry by entry without
// precomputed transition matrices. Slow; used to cross-check the parallel code.
namespace mcc::reference {

// K(i, j) for the Hastings kernel with target mu.
double hastings_transition(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                           std::size_t i, std::size_t j);
std::vector<double> hastings_apply(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                                   std::span<const double> f);
std::vector<double> hastings_push(const GridDensity& mu, const ProposalKernel& q, const BalancingFunction& g,
                                  std::span<const double> masses);
std::vector<double> hastings_derivative_density(const GridDensity& mu, const ProposalKernel& q,
                                                const BalancingFunction& g, const GridDensity& rho,
                                                std::span<const double> f);
// Density part and singular part of the point-start derivative.
std::vector<double> hastings_derivative_point(const GridDensity& mu, const ProposalKernel& q,
                                              const BalancingFunction& g, std::size_t x, std::span<const double> f,
                                              std::vector<double>* singular);

std::vector<double> gibbs_apply(const GridDensity& joint, std::span<const double> f);
std::vector<double> gibbs_push(const GridDensity& joint, std::span<const double> masses);
std::vector<double> gibbs_derivative_density(const GridDensity& joint, const GridDensity& rho,
                                             std::span<const double> f);

}  // namespace mcc::reference
