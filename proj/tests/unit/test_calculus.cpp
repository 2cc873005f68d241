#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/calculus.hpp"
#include "mcc/error.hpp"

using namespace mcc;

TEST_CASE("Simpson rule is exact for cubics") {
  const auto t = simpson_nodes(9);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  std::vector<double> v;
  for (double x : t) v.push_back(4 * x * x * x - x + 2);
  CHECK(simpson(v) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK_THROWS(simpson_nodes(4));
}

TEST_CASE("fundamental theorem holds for Hastings density and point starts") {
  const Grid g = fx::line(161);
  const KernelFamily fam = fx::barker_rw(g);
  const auto mu = fx::mu1(g), nu = fx::nu1(g);
  const auto f = fx::fn(g, "tanh");
  const auto rd = verify_ftc(fam, mu, nu, Start::density(fx::rho1(g)), f);
  CHECK(rd.pass);
  CHECK(rd.residual < 1e-6);
  CHECK(rd.actions.size() == 33);
  const auto rp = verify_ftc(fam, mu, nu, Start::point(90), f, 33, 1e-5);
  CHECK(rp.pass);
}

TEST_CASE("fundamental theorem holds for the Gibbs sampler") {
  const Grid g = fx::plane(31);
  const auto r = verify_ftc(GibbsFamily{}, fx::mu2(g), fx::nu2(g), Start::density(fx::rho2(g)), fx::fn(g, "mixed"), 65);
  INFO("residual ", r.residual);
  CHECK(r.pass);
}

TEST_CASE("FTC residual shrinks under t refinement") {
  const Grid g = fx::line(121);
  const auto ref = ftc_refinement(fx::barker_rw(g), fx::mu1(g), fx::nu1(g), Start::density(fx::rho1(g)),
                                  fx::fn(g, "sin"));
  CHECK(ref.shrinks);
  CHECK(ref.factor >= 2.0);
  CHECK(ref.residuals.size() == 4);
}

TEST_CASE("intrinsic FTC along a transport map") {
  const Grid g = fx::line(401);
  const auto a = AnalyticDensity::normal(0.0, 1.0);
  const auto pdf = [a](double x) { return a(Point{x}); };
  const Pushforward T = [](double y) { return 0.3 + 0.8 * y; };
  const auto nu = pushforward_density(g, pdf, T);
  const auto direct = fx::density(g, AnalyticDensity::normal(0.3, 0.8));
  CHECK(fx::sup_diff(nu.values(), direct.values()) < 1e-10);
  const auto r = verify_ftc_intrinsic(fx::barker_rw(g), g, pdf, T, fx::density(g, AnalyticDensity::normal(0.2, 0.5)), fx::fn(g, "tanh"));
  INFO("lhs ", r.lhs, " rhs ", r.rhs, " residual ", r.residual);
  CHECK(r.pass);
}

TEST_CASE("mean value inequality: no violations over random test functions") {
  const Grid g = fx::line(121);
  const auto mu = fx::mu1(g), nu = fx::nu1(g);
  for (const auto& V : {WeightFunction::constant(), WeightFunction::one_plus_square()}) {
    for (const KernelFamily& fam : {KernelFamily(fx::barker_rw(g)),
                                    KernelFamily(HastingsFamily(ProposalKernel::random_walk(g, 1.0),
                                                                BalancingFunction::min_one()))}) {
      const auto r = check_mean_value_inequality(fam, mu, nu, Start::density(fx::rho1(g)), V, 40, 7);
      CHECK(r.pass);
      CHECK(r.violations == 0);
      CHECK(r.empirical_max <= r.bound);
      CHECK(r.exact_lhs <= r.bound * (1 + 1e-12));
    }
  }
  const auto rp = check_mean_value_inequality(fx::barker_rw(g), mu, nu, Start::point(60),
                                              WeightFunction::one_plus_square(), 40, 8);
  CHECK(rp.violations == 0);
}

TEST_CASE("mean value inequality for the Gibbs sampler at a point") {
  const Grid g = fx::plane(25);
  MviOptions opt;
  opt.perp_at_t0 = true;
  const auto r = check_mean_value_inequality(GibbsFamily{}, fx::mu2(g), fx::nu2(g), Start::point(g.index(12, 12)),
                                             WeightFunction::constant(), 30, 11, opt);
  CHECK(r.violations == 0);
  CHECK(r.constants.point_start);
  CHECK(r.constants.formula == "gibbs");
}

TEST_CASE("random test functions respect the V bound") {
  const Grid g = fx::line(81);
  const auto V = GridFunction::evaluate(g, [](const Point& p) { return 1 + p[0] * p[0]; });
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto f = random_bv_function(g, V, 3, i);
    for (std::size_t j = 0; j < g.size(); ++j) CHECK(std::abs(f[j]) <= V[j] * (1 + 1e-12));
  }
  CHECK(fx::sup_diff(random_bv_function(g, V, 3, 1).values, random_bv_function(g, V, 3, 1).values) == 0.0);
}

TEST_CASE("point-start constants stay finite across the grid") {
  const Grid g = fx::line(101);
  const auto r = uniform_boundedness_scan(fx::barker_rw(g), fx::mu1(g), fx::nu1(g), WeightFunction::constant(),
                                          {10, 30, 50, 70, 90});
  CHECK(r.finite);
  CHECK(r.m_x.size() == 5);
  CHECK(std::isfinite(r.max_m_x));
}
