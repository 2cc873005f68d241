#include <doctest.h>

#include "fixtures.hpp"
#include "mcc/error.hpp"
#include "mcc/reference.hpp"

using namespace mcc;

namespace {

double oracle_error(const KernelFamily& fam, const GridDensity& mu, const GridDensity& nu, const Start& s,
                    const GridFunction& f, const KernelDerivative& d) {
  const auto fd = fd_directional_derivative(fam, mu, nu, s, f);
  return std::abs(d.action(difference(nu, mu)) - fd.value) / fd.scale;
}

}  // namespace

TEST_CASE("derivative annihilates the target for every start") {
  const Grid g = fx::line(161);
  const auto mu = fx::mu1(g);
  const KernelFamily fam = fx::barker_rw(g);
  const auto f = fx::fn(g, "tanh");
  for (const Start& s : {Start::density(fx::rho1(g)), Start::point(40), Start::point(80)}) {
    const auto d = kernel_derivative(fam, mu, s, f);
    CHECK(d.centering_residual() < 1e-12);
  }
  const auto d = kernel_derivative(fam, mu, Start::density(fx::rho1(g)), f);
  CHECK(d.density_centering() < 1e-12);
}

TEST_CASE("at rho = mu the Hastings derivative density is f - Pf") {
  const Grid g = fx::line(121);
  const auto mu = fx::mu1(g);
  const auto k = fx::barker_rw(g).at(mu);
  const auto f = fx::fn(g, "sin");
  DerivativeOptions opt;
  opt.warm_start_ceiling = fx::kInf;
  const auto d = hastings_derivative(k, mu, f, opt);
  const auto pf = k.apply(f.values);
  double gap = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) gap = std::max(gap, std::abs(d.density_part[i] - (f[i] - pf[i])));
  CHECK(gap < 1e-12);
}

TEST_CASE("Hastings derivative agrees with the finite-difference oracle") {
  const Grid g = fx::line(161);
  const auto mu = fx::mu1(g), nu = fx::nu1(g);
  for (int m : {1, 2, 8}) {
    const KernelFamily fam = HastingsFamily(ProposalKernel::random_walk(g, 1.1), BalancingFunction::gj(m));
    for (const char* tag : {"tanh", "sin", "clip"}) {
      const auto f = fx::fn(g, tag);
      const Start sd = Start::density(fx::rho1(g));
      CHECK(oracle_error(fam, mu, nu, sd, f, kernel_derivative(fam, mu, sd, f)) < 1e-3);
      const Start sp = Start::point(70);
      CHECK(oracle_error(fam, mu, nu, sp, f, kernel_derivative(fam, mu, sp, f)) < 1e-3);
    }
  }
}

TEST_CASE("Gibbs derivative agrees with the finite-difference oracle") {
  const Grid g = fx::plane(41);
  const auto mu = fx::mu2(g), nu = fx::nu2(g);
  const KernelFamily fam = GibbsFamily{};
  const auto f = fx::fn(g, "product");
  const Start sd = Start::density(fx::rho2(g));
  CHECK(oracle_error(fam, mu, nu, sd, f, kernel_derivative(fam, mu, sd, f)) < 1e-3);
  const Start sp = Start::point(g.index(22, 18));
  CHECK(oracle_error(fam, mu, nu, sp, f, kernel_derivative(fam, mu, sp, f)) < 1e-3);
}

TEST_CASE("parallel derivatives match the serial reference") {
  const Grid g = fx::line(101);
  const auto mu = fx::mu1(g), rho = fx::rho1(g);
  const auto q = ProposalKernel::random_walk(g, 0.9);
  const auto bal = BalancingFunction::gj(2);
  const HastingsKernel k(mu, q, bal);
  const auto f = fx::fn(g, "tanh");
  CHECK(fx::sup_diff(hastings_derivative(k, rho, f).density_part.values,
                     reference::hastings_derivative_density(mu, q, bal, rho, f.values)) < 1e-13);
  std::vector<double> sing;
  const auto dens = reference::hastings_derivative_point(mu, q, bal, 33, f.values, &sing);
  const auto dp = hastings_derivative_at_point(k, 33, f);
  CHECK(fx::sup_diff(dp.density_part.values, dens) < 1e-13);
  REQUIRE(dp.singular_part);
  CHECK(fx::sup_diff(dp.singular_part->values, sing) < 1e-13);

  const Grid g2 = fx::plane(25);
  const auto mu2 = fx::mu2(g2), rho2 = fx::rho2(g2);
  const auto f2 = fx::fn(g2, "product");
  CHECK(fx::sup_diff(gibbs_derivative(GibbsKernel(mu2), rho2, f2).density_part.values,
                     reference::gibbs_derivative_density(mu2, rho2, f2.values)) < 1e-13);
}

TEST_CASE("iterated derivative agrees with the multi-step oracle") {
  const Grid g = fx::line(121);
  const auto mu = fx::mu1(g), nu = fx::nu1(g);
  const KernelFamily fam = fx::barker_rw(g);
  const auto f = fx::fn(g, "tanh");
  const Start s = Start::density(fx::rho1(g));
  DerivativeOptions opt;
  opt.warm_start_ceiling = fx::kInf;
  for (std::size_t k : {2u, 3u}) {
    const auto it = iterated_derivative(fam, k, mu, s, f, opt);
    CHECK(it.terms.size() == k);
    const auto fd = fd_directional_derivative(fam, mu, nu, s, f, {}, k);
    CHECK(std::abs(it.action(difference(nu, mu)) - fd.value) / fd.scale < 1e-3);
  }
}

TEST_CASE("iterated derivative of the independence sampler tends to (nu - mu)(f)") {
  const Grid g = fx::line(101);
  const auto base = fx::density(g, AnalyticDensity::normal(0.0, 2.5));
  const KernelFamily fam = HastingsFamily(ProposalKernel::independence(base), BalancingFunction::barker());
  const auto mu = fx::mu1(g), nu = fx::nu1(g);
  DerivativeOptions opt;
  opt.warm_start_ceiling = fx::kInf;
  const auto rep = iterated_derivative_limit_check(fam, mu, nu, Start::density(fx::rho1(g)), fx::fn(g, "tanh"), 30,
                                                   1e-3, opt);
  CHECK(rep.pass);
  CHECK(rep.geometric);
  CHECK(rep.gaps.back() < rep.gaps.front());
}

TEST_CASE("density starts far outside the target are rejected") {
  const Grid g = fx::line(161);
  const auto mu = fx::density(g, AnalyticDensity::normal(0.0, 0.5));
  const auto rho = fx::density(g, AnalyticDensity::normal(3.0, 2.0));
  const auto k = fx::barker_rw(g).at(mu);
  CHECK_THROWS_AS(hastings_derivative(k, rho, fx::fn(g, "tanh")), PreconditionError);
  DerivativeOptions opt;
  opt.warm_start_ceiling = fx::kInf;
  CHECK_NOTHROW(hastings_derivative(k, rho, fx::fn(g, "tanh"), opt));
}

TEST_CASE("derivative of a constant function vanishes") {
  const Grid g = fx::line(81);
  const auto mu = fx::mu1(g);
  const auto d = kernel_derivative(KernelFamily(fx::barker_rw(g)), mu, Start::density(fx::rho1(g)),
                                   GridFunction(g, std::vector<double>(g.size(), 2.0)));
  CHECK(d.action(difference(fx::nu1(g), mu)) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
}
