#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/error.hpp"
#include "mcc/samplers.hpp"

using namespace mcc;

namespace {

FeynmanKacModel model() {
  SsmBootstrapModel m;
  m.observations = {0.3, -0.5};
  m.axis = Axis{-6.0, 6.0, 97};
  return m.model();
}

HastingsFamily family(const Grid& g) { return fx::barker_rw(g, 1.0); }

}  // namespace

TEST_CASE("limiting chain is deterministic given the seed") {
  const Grid g = fx::line(81);
  const auto k = fx::barker_rw(g).at(fx::mu1(g));
  const auto a = run_limiting_chain(k, 40, 5000, 7);
  const auto b = run_limiting_chain(k, 40, 5000, 7);
  const auto c = run_limiting_chain(k, 40, 5000, 8);
  CHECK(a.states == b.states);
  CHECK(a.accepted == b.accepted);
  CHECK(a.states != c.states);
  CHECK(a.states.front() == 40);
  CHECK(a.accepted.front() == 0);
  CHECK(run_limiting_chain(k, 40, 0, 7).size() == 0);
  CHECK_THROWS(run_limiting_chain(k, 81, 10, 7));
}

TEST_CASE("ergodic average is within three standard errors of the target mean") {
  const Grid g = fx::line(161);
  const auto mu = fx::mu1(g);
  const auto k = fx::barker_rw(g, 1.5).at(mu);
  const auto f = fx::fn(g, "tanh");
  const auto run = run_limiting_chain(k, 80, 200000, 11);
  const auto pi = mu.masses();
  double exact = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) exact += pi[i] * f[i];
  const double avg = run.sum(f.values) / static_cast<double>(run.size());
  const double se = std::sqrt(batch_means_variance(run, f.values, 50) / static_cast<double>(run.size()));
  CHECK(std::abs(avg - exact) <= 3 * se);
}

TEST_CASE("batch means on constructed sequences") {
  const Grid g = fx::line(3, 0, 1);
  const std::vector<double> id{0.0, 1.0, 0.0};
  ChainRun alt{g, {}, {}, 0, {}, 0.0, 0};
  for (int i = 0; i < 40; ++i) alt.states.push_back(i % 2);
  CHECK(batch_means_variance(alt, id, 20) == doctest::Approx(0.0).scale(1.0));
  ChainRun blocks{g, {}, {}, 0, {}, 0.0, 0};
  for (int b = 0; b < 20; ++b)
    for (int i = 0; i < 3; ++i) blocks.states.push_back(b % 2);
  // B = 3, batch means alternate 0/1
  CHECK(batch_means_variance(blocks, id, 20) == doctest::Approx(3.0 * 0.25 * 20.0 / 19.0));
  CHECK_THROWS_AS(batch_means_variance(blocks, id, 10), InvalidInput);
}

TEST_CASE("normality statistics of known samples") {
  const std::vector<double> sym{-1, 1, -1, 1, -1, 1};
  const auto s = normality_stats(sym);
  CHECK(s.skewness == doctest::Approx(0.0).scale(1.0));
  CHECK(s.excess_kurtosis == doctest::Approx(-2.0));
  const std::vector<double> skew{0, 0, 0, 1};
  CHECK(normality_stats(skew).skewness == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(normality_stats(skew).ks_distance > 0.0);
  CHECK(normality_stats(skew).ks_distance < 1.0);
}

TEST_CASE("sMCMC levels chain targets through the Boltzmann-Gibbs map") {
  const auto m = model();
  const Grid& g = m.grid;
  SamplerOptions opt;
  opt.x0 = g.axis().nearest(0.0);
  const auto levels = run_smcmc(family(g), m, 3, 2000, 5, opt);
  REQUIRE(levels.size() == 3);
  for (const auto& l : levels) CHECK(l.run.size() == 2001);
  CHECK(fx::sup_diff(levels[0].target.values(), m.eta1.values()) == 0.0);
  for (std::size_t p = 1; p < 3; ++p) {
    const auto expect = boltzmann_gibbs(levels[p - 1].empirical, m.G(p), m.M(p));
    CHECK(fx::sup_diff(levels[p].target.values(), expect.values()) < 1e-14);
    CHECK(levels[p].run.states.front() == levels[p - 1].run.states.back());
  }
  const auto again = run_smcmc(family(g), m, 3, 2000, 5, opt);
  CHECK(again[2].run.states == levels[2].run.states);
  opt.level_start = LevelStart::fixed;
  const auto fixed = run_smcmc(family(g), m, 3, 2000, 5, opt);
  for (const auto& l : fixed) CHECK(l.run.states.front() == opt.x0);
}

TEST_CASE("iMCMC structure and centering") {
  const auto m = model();
  const Grid& g = m.grid;
  SamplerOptions opt;
  opt.x0 = g.axis().nearest(0.0);
  const auto f = fx::fn(g, "clip");
  const auto levels = run_imcmc(family(g), m, 2, 3000, 9, opt, &f);
  REQUIRE(levels.size() == 2);
  CHECK(levels[0].run.size() == 3000);
  CHECK(levels[1].run.size() == 3000);
  CHECK(levels[1].centering.size() == 3000);
  for (double c : levels[1].centering) CHECK(std::abs(c) <= 1.0);
  const auto again = run_imcmc(family(g), m, 2, 3000, 9, opt, &f);
  CHECK(again[1].run.states == levels[1].run.states);
}

TEST_CASE("frozen lower level gives a vanishing adaptation trace") {
  const auto m = model();
  const Grid& g = m.grid;
  SamplerOptions opt;
  opt.x0 = g.axis().nearest(0.0);
  opt.track_adaptation = true;
  const auto V = WeightFunction::constant();
  opt.adaptation_weight = &V;
  std::vector<std::size_t> states{40, 45, 48, 50, 52, 60};
  opt.frozen_level1 = EmpiricalMeasure(g, states);
  const auto levels = run_imcmc(family(g), m, 2, 2000, 3, opt);
  REQUIRE(levels[1].trace);
  for (double d : levels[1].trace->d1_sup) CHECK(d == 0.0);
  for (double d : levels[1].trace->d1_v) CHECK(d == 0.0);
}

TEST_CASE("CLT experiment input validation and shape") {
  const auto m = model();
  const Grid& g = m.grid;
  const auto f = fx::fn(g, "clip");
  CltConfig cfg;
  cfg.scheme = Scheme::imcmc;
  cfg.p_levels = 3;
  cfg.n = 1000;
  cfg.replications = 4;
  cfg.batch_count = 20;
  cfg.x0 = g.axis().nearest(0.0);
  CHECK_THROWS_AS(clt_experiment(family(g), m, f, cfg), InvalidInput);
  cfg.scheme = Scheme::smcmc;
  cfg.p_levels = 2;
  const auto r = clt_experiment(family(g), m, f, cfg);
  CHECK(r.random_centered.size() == 4);
  CHECK(r.deterministic_centered.size() == 4);
  CHECK(r.asymptotic_variance_poisson > 0.0);
  CHECK(r.fluctuation_variance > 0.0);
  const auto r2 = clt_experiment(family(g), m, f, cfg);
  CHECK(r2.random_centered == r.random_centered);
}
