#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/error.hpp"
#include "mcc/feynman_kac.hpp"

using namespace mcc;

namespace {

SsmBootstrapModel small_model() {
  SsmBootstrapModel m;
  m.observations = {0.3, -0.5, 1.1};
  m.axis = Axis{-6.0, 6.0, 97};
  return m;
}

double mean(const GridDensity& d, const GridFunction& f) {
  const auto m = d.masses();
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * f[i];
  return s;
}

}  // namespace

TEST_CASE("Boltzmann-Gibbs map of an empirical measure is the weighted mutation mixture") {
  const Grid g = fx::line(85, -7, 7);
  const auto mdens = [](double x, double y) { return std::exp(-2 * (y - 0.5 * x) * (y - 0.5 * x)) * std::sqrt(2 / M_PI); };
  const auto M = MutationKernel::from_density(g, mdens, "ar");
  const auto G = GridFunction::evaluate(g, [](const Point& p) { return std::exp(-0.5 * (p[0] - 1) * (p[0] - 1)); });
  const std::vector<std::size_t> states{10, 10, 25, 30, 44, 44, 44, 50};
  const EmpiricalMeasure eta(g, states);
  const auto phi = boltzmann_gibbs(eta, G, M);

  const auto& w = g.weights();
  std::vector<double> oracle(g.size(), 0.0);
  double z = 0.0;
  for (auto s : states) z += G[s];
  for (auto s : states) {
    double row = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) row += w[j] * mdens(g.coordinate(s), g.coordinate(j));
    for (std::size_t j = 0; j < g.size(); ++j) oracle[j] += G[s] * mdens(g.coordinate(s), g.coordinate(j)) / row / z;
  }
  CHECK(fx::sup_diff(phi.values(), oracle) < 1e-12);

  const auto one = GridFunction(g, std::vector<double>(g.size(), 1.0));
  const auto eta_m = boltzmann_gibbs(eta, one, M);
  std::vector<double> em(g.size(), 0.0);
  for (auto s : states)
    for (std::size_t j = 0; j < g.size(); ++j) em[j] += M(s, j) / static_cast<double>(states.size());
  CHECK(fx::sup_diff(eta_m.values(), em) < 1e-12);
}

TEST_CASE("two-point Bayes update") {
  const Grid g = fx::line(3, -1, 1);
  const GridFunction G(g, {1.0, 2.0, 3.0});
  const std::vector<std::size_t> states{0, 2};
  const auto wts = boltzmann_gibbs_weights(EmpiricalMeasure(g, states), G);
  CHECK(wts[0] == doctest::Approx(0.25));
  CHECK(wts[1] == doctest::Approx(0.0));
  CHECK(wts[2] == doctest::Approx(0.75));
}

TEST_CASE("first-order decomposition of the Boltzmann-Gibbs map") {
  const auto model = small_model().model();
  const Grid& g = model.grid;
  std::vector<std::size_t> states;
  for (std::size_t i = 0; i < 200; ++i) states.push_back(30 + (i * 37) % 40);
  const auto r = fk_decomposition_check(model, EmpiricalMeasure(g, states), fx::fn(g, "tanh"));
  CHECK(r.residual <= 1e-8);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-8));
}

TEST_CASE("normalized semigroup identities") {
  const auto model = small_model().model();
  const Grid& g = model.grid;
  const auto flow = reference_flow(model, 4);
  REQUIRE(flow.size() == 4);
  const auto f = fx::fn(g, "clip");
  for (std::size_t p = 1; p < 4; ++p) {
    CHECK(mean(flow[p - 1], q_bar(model, flow, p, f)) == doctest::Approx(mean(flow[p], f)).epsilon(1e-12));
    CHECK(mean(flow[0], q_bar_chain(model, flow, 1, p + 1, f)) ==
          doctest::Approx(mean(flow[p], f)).epsilon(1e-12));
  }
  CHECK(fx::sup_diff(q_bar_chain(model, flow, 3, 3, f).values, f.values) == 0.0);
  const auto one = GridFunction(g, std::vector<double>(g.size(), 1.0));
  const auto q1 = q_bar(model, flow, 1, one);
  CHECK(mean(flow[0], q1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("shipped observations match the generator") {
  const auto shipped = read_observations(std::filesystem::path(MCC_SOURCE_DIR) / "data/ssm_observations.csv");
  const auto regen = ssm_generate_observations(SsmBootstrapModel{}, 8, 20260101);
  REQUIRE(shipped.size() == 8);
  CHECK(fx::sup_diff(shipped, regen) < 1e-15);
  CHECK(fx::sup_diff(regen, ssm_generate_observations(SsmBootstrapModel{}, 8, 20260101)) == 0.0);
}

TEST_CASE("variance recursion") {
  const auto model = small_model().model();
  const Grid& g = model.grid;
  const auto flow = reference_flow(model, 3);
  const auto f = fx::fn(g, "tanh");
  std::vector<VarianceFunctional> s2;
  for (std::size_t j = 0; j < 3; ++j)
    s2.push_back([&flow, j](const GridFunction& h) {
      const auto m = flow[j].masses();
      double v = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) v += m[i] * h[i] * h[i];
      return v;
    });
  const auto r1 = smcmc_variance_recursion(model, flow, 1, f, s2);
  REQUIRE(r1.terms.size() == 1);
  auto centred = f.values;
  const double c = mean(flow[0], f);
  for (auto& v : centred) v -= c;
  CHECK(r1.total == doctest::Approx(s2[0](GridFunction(g, centred))).epsilon(1e-12));
  CHECK(r1.fluctuation == 0.0);

  const auto r3 = smcmc_variance_recursion(model, flow, 3, f, s2);
  CHECK(r3.terms.size() == 3);
  CHECK(r3.total == doctest::Approx(r3.terms[0] + r3.terms[1] + r3.terms[2]));
  CHECK(r3.fluctuation == doctest::Approx(r3.terms[0] + r3.terms[1]));

  const auto cst = smcmc_variance_recursion(model, flow, 3, GridFunction(g, std::vector<double>(g.size(), 2.5)), s2);
  CHECK(cst.total < 1e-20);
}

TEST_CASE("model validation") {
  auto m = small_model();
  m.phi_tag = "nope";
  CHECK_THROWS_AS(m.model(), InvalidInput);
  CHECK(small_model().model().max_level() == 4);
}
