#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "mcc/error.hpp"
#include "mcc/io.hpp"

using namespace mcc;

TEST_CASE("trapezoid weights integrate polynomials of degree one exactly") {
  const Grid g = fx::line(11, -1.0, 3.0);
  double m0 = 0, m1 = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m0 += g.weight(i);
    m1 += g.weight(i) * g.coordinate(i);
  }
  CHECK(m0 == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(m1 == doctest::Approx(4.0).epsilon(1e-15));  // int_{-1}^{3} x dx = 4
}

TEST_CASE("2-D grids store the first coordinate slowest") {
  const Grid g(Axis{0, 1, 3}, Axis{0, 2, 5});
  CHECK(g.size() == 15);
  CHECK(g.index(2, 4) == 14);
  CHECK(g.first(13) == 2);
  CHECK(g.second(13) == 3);
  CHECK(g.point(13)[1] == doctest::Approx(1.5));
  CHECK(g.weight(0) == doctest::Approx(0.25 * 0.25));
}

TEST_CASE("axis validation rejects degenerate axes") {
  CHECK_THROWS_AS(validate_axis(Axis{1.0, 1.0, 5}), InvalidInput);
  CHECK_THROWS_AS(validate_axis(Axis{0.0, 1.0, 1}), InvalidInput);
}

TEST_CASE("densities are normalized to unit trapezoid mass") {
  const Grid g = fx::line(101, -3, 3);
  const auto d = GridDensity::normalized(g, std::vector<double>(101, 2.0));
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d[50] == doctest::Approx(1.0 / 6.0));
  const auto m = d.masses();
  double s = 0;
  for (double v : m) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("negative or empty densities are rejected") {
  const Grid g = fx::line(11);
  std::vector<double> v(11, 1.0);
  v[3] = -0.1;
  CHECK_THROWS(GridDensity::normalized(g, v));
  CHECK_THROWS(GridDensity::normalized(g, std::vector<double>(11, 0.0)));
}

TEST_CASE("from_masses inverts masses") {
  const Grid g = fx::line(51);
  const auto d = fx::mu1(g);
  const auto back = GridDensity::from_masses(g, d.masses());
  CHECK(fx::sup_diff(back.values(), d.values()) < 1e-15);
}

TEST_CASE("spike carries unit mass at one node") {
  const Grid g = fx::line(21);
  const auto s = GridDensity::spike(g, 4);
  const auto m = s.masses();
  CHECK(m[4] == doctest::Approx(1.0));
  CHECK(s.mass() == doctest::Approx(1.0));
}

TEST_CASE("total variation of mutually singular measures is 2") {
  const Grid g = fx::line(41, 0, 4);
  const auto a = GridDensity::spike(g, 5);
  const auto b = GridDensity::spike(g, 30);
  CHECK(v_norm_measure(difference(a, b), WeightFunction::constant()) == doctest::Approx(2.0));
}

TEST_CASE("V-norm of a function is the weighted supremum") {
  const Grid g = fx::line(81, -4, 4);
  const auto f = fx::fn(g, "identity");
  const double n = v_norm_function(f, WeightFunction::one_plus_square());
  CHECK(n == doctest::Approx(0.5).epsilon(1e-12));  // sup |x| / (1 + x^2) at x = 1
}

TEST_CASE("contamination curve is linear in t") {
  const Grid g = fx::line(61);
  ContaminationCurve c(fx::mu1(g), fx::nu1(g));
  const auto m = c.at(0.25);
  for (std::size_t i = 0; i < g.size(); i += 7)
    CHECK(m[i] == doctest::Approx(0.75 * fx::mu1(g)[i] + 0.25 * fx::nu1(g)[i]).epsilon(1e-14));
  CHECK(m.mass() == doctest::Approx(1.0));
}

TEST_CASE("density CSV round trip is bit exact") {
  const Grid g = fx::plane(9);
  const auto d = fx::mu2(g);
  const auto p = std::filesystem::temp_directory_path() / "mcc_density_rt.csv";
  write_density(p, d);
  const auto back = read_density(p);
  CHECK(back.grid() == g);
  CHECK(back.values() == d.values());
  CHECK(back.description() == d.description());
}

TEST_CASE("format_double round trips awkward values") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23, 5e-324})
    CHECK(parse_double(format_double(v)) == v);
}

TEST_CASE("weight function power") {
  const auto V = WeightFunction::exp_abs(2.0).power(0.25);
  CHECK(V(Point{1.0, 0.0}) == doctest::Approx(std::exp(0.5)));
}
