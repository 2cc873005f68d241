#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/ergodicity.hpp"
#include "mcc/error.hpp"

using namespace mcc;

TEST_CASE("random-walk Barker satisfies a quadratic drift condition") {
  const Grid g = fx::line(161);
  const auto k1 = fx::barker_rw(g).at(fx::mu1(g));
  const auto k2 = fx::barker_rw(g).at(fx::nu1(g));
  const std::vector<const MarkovKernel*> ks{&k1, &k2};
  const auto V = WeightFunction::one_plus_square();
  const auto cert = scan_drift(ks, V, {5, 10, 20, 50});
  REQUIRE(cert.pass);
  CHECK(cert.drift_rate < 1.0);
  CHECK(cert.worst_violation <= 0.0);
  CHECK(cert.d >= drift_floor(cert.drift_rate, cert.b));
  // direct re-check of P V <= lambda V + b 1_C
  const auto Vg = GridFunction::evaluate(g, [&](const Point& p) { return V(p); });
  const auto C = level_set(g, V, cert.d);
  for (const auto* k : ks) {
    const auto pv = k->apply(Vg.values);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(pv[i] <= cert.drift_rate * Vg[i] + (C[i] ? cert.b : 0.0) + 1e-9);
  }
}

TEST_CASE("drift check rejects a level below the floor") {
  const Grid g = fx::line(81);
  const auto k = fx::barker_rw(g).at(fx::mu1(g));
  const double floor = drift_floor(0.9, 1.0);
  CHECK(floor > 1.0);
  CHECK_THROWS_AS(check_drift({&k}, WeightFunction::one_plus_square(), 0.9, 1.0, 0.5 * floor), PreconditionError);
}

TEST_CASE("minorization constant on a small set") {
  const Grid g = fx::line(121);
  const auto k = fx::barker_rw(g).at(fx::mu1(g));
  const auto C = level_set(g, WeightFunction::one_plus_square(), 5.0);
  for (int j : {1, 2}) {
    const auto r = check_minorization({&k}, C, j, 1e-12);
    CHECK(r.pass);
    CHECK(r.inf_kappa > 0.0);
    CHECK(r.inf_kappa <= 1.0);
  }
  CHECK(std::isfinite(check_minorization({&k}, C, 1, 1e-12).rw_analytic[0]));
}

TEST_CASE("log-concave tails: Laplace-type tails pass, Student tails fail") {
  const Grid g = fx::line(161);
  CHECK(check_log_concave_tails({fx::mu1(g)}, 1.0, 3.0).pass);
  const auto t = fx::density(g, AnalyticDensity::student_t(0, 1, 2));
  CHECK_FALSE(check_log_concave_tails({t}, 1.0, 3.0).pass);
}

TEST_CASE("geometric convergence rate is below one") {
  const Grid g = fx::line(101);
  const auto k = fx::barker_rw(g, 1.5).at(fx::mu1(g));
  const auto r = estimate_geometric_rate(k, {10, 50, 90}, 40, WeightFunction::one_plus_square());
  CHECK(r.pass);
  CHECK(r.beta > 0.0);
  CHECK(r.beta < 1.0);
  CHECK(r.r_squared > 0.9);
  CHECK(r.L >= 1.0 / (1.0 - r.beta) - 1e-12);
}

TEST_CASE("Poisson equation and resolvent centering") {
  const Grid g = fx::line(121);
  const auto k = fx::barker_rw(g).at(fx::mu1(g));
  const auto f = fx::fn(g, "tanh");
  const auto R = poisson_resolvent(k, f);
  CHECK(R.poisson_residual < 1e-9);
  CHECK(R.centering < 1e-9);
  const auto pi = stationary_masses(k);
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m += pi[i] * f[i];
  CHECK(R.mean == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("asymptotic variance: two formulas agree and iid case equals Var(f)") {
  const Grid g = fx::line(121);
  const auto mu = fx::mu1(g);
  const auto f = fx::fn(g, "clip");
  const auto av = asymptotic_variance(fx::barker_rw(g).at(mu), f);
  CHECK(av.sigma2 == doctest::Approx(av.sigma2_generator).epsilon(1e-8));
  CHECK(av.sigma2 > 0.0);

  // independence proposal from the target with min-one balancing always accepts
  const HastingsKernel iid(mu, ProposalKernel::independence(mu), BalancingFunction::min_one());
  const auto pi = stationary_masses(iid);
  double m = 0, m2 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m += pi[i] * f[i];
    m2 += pi[i] * f[i] * f[i];
  }
  const auto a = asymptotic_variance(iid, f);
  CHECK(a.sigma2 == doctest::Approx(m2 - m * m).epsilon(1e-10));
  CHECK(poisson_resolvent(iid, f).truncation_k == 0);
}

TEST_CASE("resolvent perturbation identity") {
  const Grid g = fx::line(101);
  CHECK(check_resolvent_identity(fx::barker_rw(g), fx::mu1(g), fx::nu1(g), fx::fn(g, "tanh")) < 1e-8);
  const Grid g2 = fx::plane(21);
  CHECK(check_resolvent_identity(GibbsFamily{}, fx::mu2(g2), fx::nu2(g2), fx::fn(g2, "mixed")) < 1e-8);
}

TEST_CASE("V moments stay bounded under the drift certificate") {
  const Grid g = fx::line(121);
  const auto k = fx::barker_rw(g).at(fx::mu1(g));
  const auto V = WeightFunction::one_plus_square();
  const auto cert = scan_drift({&k}, V, {5, 10, 20});
  REQUIRE(cert.pass);
  const auto m = check_v_moment_growth({&k}, V, 2, cert);
  CHECK(m.finite);
  CHECK(m.jensen_drift_holds);
  const auto sim = simulate_drift_bound(k, V, cert, 5, 20, 400, 13);
  CHECK(sim.pass);
  CHECK(sim.mean.size() == 21);
}
