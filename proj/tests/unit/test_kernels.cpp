#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/error.hpp"
#include "mcc/reference.hpp"
#include "mcc/samplers.hpp"

using namespace mcc;

TEST_CASE("balancing functions satisfy g(x) = x g(1/x) and 0 <= g <= 1") {
  for (const auto& g : {BalancingFunction::barker(), BalancingFunction::min_one(), BalancingFunction::gj(2),
                        BalancingFunction::gj(8)}) {
    for (double x : {1e-6, 0.03, 0.5, 1.0, 1.7, 40.0, 1e5}) {
      CHECK(g(x) == doctest::Approx(x * g(1.0 / x)).epsilon(1e-12));
      CHECK(g(x) >= 0.0);
      CHECK(g(x) <= 1.0);
    }
  }
  CHECK(BalancingFunction::barker()(3.0) == doctest::Approx(0.75));
  CHECK(BalancingFunction::gj(2)(2.0) == doctest::Approx(6.0 / 7.0));
  CHECK(BalancingFunction::gj(1)(0.4) == doctest::Approx(BalancingFunction::barker()(0.4)));
}

TEST_CASE("balancing derivatives match central differences") {
  for (const auto& g : {BalancingFunction::barker(), BalancingFunction::gj(2), BalancingFunction::gj(8)}) {
    REQUIRE(g.differentiable());
    for (double x : {0.2, 0.9, 1.0, 2.5, 7.0}) {
      const double h = 1e-6 * x;
      CHECK(g.derivative(x) == doctest::Approx((g(x + h) - g(x - h)) / (2 * h)).epsilon(1e-6));
    }
  }
  const auto mh = BalancingFunction::min_one();
  CHECK_FALSE(mh.differentiable());
  CHECK_THROWS_AS(mh.derivative(0.5), PreconditionError);
  CHECK(mh.derivative_or_indicator(0.5) == 1.0);
  CHECK(mh.derivative_or_indicator(1.5) == 0.0);
}

TEST_CASE("Hastings kernel: rows are probabilities and detailed balance holds") {
  const Grid g = fx::line(151);
  const auto mu = fx::mu1(g);
  for (const auto& bal : {BalancingFunction::barker(), BalancingFunction::min_one(), BalancingFunction::gj(8)}) {
    const HastingsKernel k(mu, ProposalKernel::random_walk(g, 0.8), bal);
    const auto& w = g.weights();
    double worst = 0.0, row = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        s += k.transition(i, j);
        CHECK(k.transition(i, j) >= 0.0);
        worst = std::max(worst, std::abs(w[i] * mu[i] * k.transition(i, j) - w[j] * mu[j] * k.transition(j, i)));
      }
      row = std::max(row, std::abs(s - 1.0));
    }
    CHECK(worst < 1e-16);
    CHECK(row < 1e-13);
    CHECK(check_invariance(k, 1e-12).pass);
  }
}

TEST_CASE("parallel Hastings kernel matches the serial reference") {
  const Grid g = fx::line(121);
  const auto mu = fx::mu1(g);
  const auto q = ProposalKernel::random_walk(g, 1.3);
  const auto bal = BalancingFunction::gj(2);
  const HastingsKernel k(mu, q, bal);
  const auto f = fx::fn(g, "sin");
  CHECK(fx::sup_diff(k.apply(f.values), reference::hastings_apply(mu, q, bal, f.values)) < 1e-14);
  const auto m = fx::rho1(g).masses();
  CHECK(fx::sup_diff(k.push(m), reference::hastings_push(mu, q, bal, m)) < 1e-15);
}

TEST_CASE("independence sampler leaves its target invariant") {
  const Grid g = fx::line(101);
  const auto base = fx::density(g, AnalyticDensity::student_t(0.0, 2.0, 3.0));
  const HastingsKernel k(fx::mu1(g), ProposalKernel::independence(base), BalancingFunction::barker());
  CHECK(check_invariance(k, 1e-12).pass);
}

TEST_CASE("Gibbs kernel is invariant and matches the serial reference") {
  const Grid g = fx::plane(21);
  const auto mu = fx::mu2(g);
  const GibbsKernel k(mu);
  CHECK(check_invariance(k, 1e-12).pass);
  const auto f = fx::fn(g, "mixed");
  CHECK(fx::sup_diff(k.apply(f.values), reference::gibbs_apply(mu, f.values)) < 1e-13);
  const auto m = fx::rho2(g).masses();
  CHECK(fx::sup_diff(k.push(m), reference::gibbs_push(mu, m)) < 1e-15);
}

TEST_CASE("Hastings kernels need 1-D positive targets") {
  const Grid g2 = fx::plane(5);
  CHECK_THROWS_AS(HastingsKernel(fx::mu2(g2), ProposalKernel::random_walk(fx::line(25), 1.0),
                                 BalancingFunction::barker()),
                  InvalidInput);
  CHECK_THROWS_AS(GibbsKernel(fx::mu1(fx::line(11))), InvalidInput);
}

TEST_CASE("Barker acceptance rate matches the quadrature prediction") {
  const Grid g = fx::line(201);
  const auto mu = fx::mu1(g);
  const auto q = ProposalKernel::random_walk(g, 1.0);
  const auto bal = BalancingFunction::barker();
  const HastingsKernel k(mu, q, bal);
  // sum_i pi_i [ sum_j w_j q_ij g(r_ij) + (1 - row mass) g(1) ]
  const auto pi = mu.masses();
  const auto& w = g.weights();
  double predicted = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a = 0.0, mass = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double r = j == i ? 1.0 : mu[j] * q.density(j, i) / (mu[i] * q.density(i, j));
      a += w[j] * q.density(i, j) * r / (1.0 + r);
      mass += w[j] * q.density(i, j);
    }
    predicted += pi[i] * (a + (1.0 - mass) * 0.5);
  }
  const auto run = run_limiting_chain(k, g.axis().nearest(0.0), 100001, 42);
  std::vector<double> flag(run.accepted.begin() + 1, run.accepted.end());
  ChainRun flags = run;
  flags.states.erase(flags.states.begin());
  std::vector<double> ind(g.size(), 0.0);
  // batch means on the indicator sequence through a two-node encoding
  std::vector<std::size_t> enc(flag.size());
  for (std::size_t i = 0; i < flag.size(); ++i) enc[i] = flag[i] > 0 ? 1 : 0;
  flags.states = enc;
  const std::vector<double> id{0.0, 1.0};
  const double var = batch_means_variance(flags, id, 50);
  const double mean = flags.sum(id) / static_cast<double>(flag.size());
  const double se = std::sqrt(var / static_cast<double>(flag.size()));
  CHECK(std::abs(mean - run.acceptance_rate) < 1e-12);
  CHECK(std::abs(mean - predicted) <= 3.0 * se);
}

TEST_CASE("zero balancing function gives a constant chain") {
  const Grid g = fx::line(41);
  const auto zero = BalancingFunction::custom("zero", [](double) { return 0.0; });
  const HastingsKernel k(fx::mu1(g), ProposalKernel::random_walk(g, 1.0), zero);
  const auto run = run_limiting_chain(k, 17, 500, 3);
  for (auto s : run.states) CHECK(s == 17);
  CHECK(run.acceptance_rate == 0.0);
}

TEST_CASE("sample_step is a pure function of the stream state") {
  const Grid g = fx::line(81);
  const HastingsKernel k(fx::mu1(g), ProposalKernel::random_walk(g, 1.0), BalancingFunction::barker());
  RngStream a(9, 1, 2), b(9, 1, 2);
  std::size_t x = 40, y = 40;
  for (int i = 0; i < 1000; ++i) {
    x = sample_step(k, x, a);
    y = sample_step(k, y, b);
    REQUIRE(x == y);
  }
}

TEST_CASE("Gibbs sampler reproduces the target correlation") {
  const Grid g = fx::plane(41);
  const GibbsKernel k(fx::mu2(g));
  const auto run = run_limiting_chain(k, g.index(20, 20), 200000, 5);
  double sxy = 0, sxx = 0;
  for (auto s : run.states) {
    const auto p = g.point(s);
    sxy += p[0] * p[1];
    sxx += p[0] * p[0];
  }
  CHECK(sxy / sxx == doctest::Approx(0.5).epsilon(0.05));
}
