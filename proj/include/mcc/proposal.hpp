#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mcc/grid.hpp"
#include "mcc/measures.hpp"

namespace mcc {

// Proposal density q(x_i, x_j) tabulated on a 1-D grid, with node-level
// sampling tables. Proposing node j from node i has probability w_j q_ij;
// any leftover row mass counts as proposing i itself.
class ProposalKernel {
 public:
  enum class Kind { random_walk, independence, custom };

  // Gaussian random walk reflected at both ends of the grid interval.
  static ProposalKernel random_walk(const Grid& g, double sigma);
  static ProposalKernel independence(const GridDensity& base);
  static ProposalKernel custom(const Grid& g, std::function<double(double, double)> q, std::string name);

  struct Draw {
    std::size_t index;
    bool truncated;  // drawn from a reflected image
  };

  const Grid& grid() const { return data_->grid; }
  std::size_t size() const { return data_->n; }
  double density(std::size_t i, std::size_t j) const { return data_->q[i * data_->n + j]; }
  const double* row(std::size_t i) const { return data_->q.data() + i * data_->n; }
  double row_mass(std::size_t i) const;
  Draw draw(std::size_t i, double u) const;
  Kind kind() const { return data_->kind; }
  bool symmetric() const { return data_->symmetric; }
  double sigma() const { return data_->sigma; }
  double lower_bound() const { return data_->q_min; }
  double upper_bound() const { return data_->q_max; }
  std::string tag() const;

 private:
  struct Data {
    Grid grid;
    std::size_t n = 0;
    Kind kind = Kind::custom;
    bool symmetric = false;
    double sigma = 0.0;
    std::string name;
    std::vector<double> q;       // n*n
    std::vector<double> direct;  // n*n, unreflected part (random walk only)
    std::vector<double> cdf;     // n*n cumulative of w_j q_ij
    double q_min = 0.0;
    double q_max = 0.0;
    explicit Data(Grid g) : grid(std::move(g)) {}
  };
  explicit ProposalKernel(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  static std::shared_ptr<const Data> finish(std::shared_ptr<Data> d);
  std::shared_ptr<const Data> data_;
};

}  // namespace mcc
