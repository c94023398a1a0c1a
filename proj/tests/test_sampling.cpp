#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <set>

#include "sampling/quadrature.hpp"
#include "sampling/samplers.hpp"
#include "util/rng.hpp"

using namespace bspinn;
using sample::BoxDomain;

namespace {
double oracles_rel(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::abs(b));
}
}  // namespace

TEST_CASE("uniform_sample") {
  const BoxDomain dom = BoxDomain::cube(1, 0.0, 1.0);
  const auto set = sample::uniform_sample(dom, 1000, 7);
  REQUIRE(set.size() == 1000);
  double mean = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double x = set.point(i)[0];
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    mean += x;
  }
  mean /= 1000.0;
  // Empirical mean within 3 sigma of the midpoint, sigma = range/sqrt(12n).
  const double sigma = 1.0 / std::sqrt(12.0 * 1000.0);
  CHECK(std::abs(mean - 0.5) < 3.0 * sigma);

  const auto again = sample::uniform_sample(dom, 1000, 7);
  CHECK(set.data == again.data);
  const auto other = sample::uniform_sample(dom, 1000, 8);
  CHECK(set.data != other.data);
}

TEST_CASE("uniform_sample respects the half-open time interval") {
  const BoxDomain dom = BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
  const auto set = sample::uniform_sample(dom, 5000, 3);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const double t = set.point(i)[1];
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
  }
}

TEST_CASE("lhs_sample stratification") {
  SUBCASE("n=4 on the unit square: one point per quartile bin per axis") {
    const BoxDomain dom = BoxDomain::cube(2, 0.0, 1.0);
    const auto set = sample::lhs_sample(dom, 4, 11);
    for (int d = 0; d < 2; ++d) {
      std::set<int> bins;
      for (std::size_t i = 0; i < 4; ++i) {
        bins.insert(static_cast<int>(set.point(i)[d] * 4.0));
      }
      CHECK(bins == std::set<int>{0, 1, 2, 3});
    }
  }
  SUBCASE("n=1000 on [-1,1]x(0,1]") {
    const BoxDomain dom = BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
    const std::size_t n = 1000;
    const auto set = sample::lhs_sample(dom, n, 13);
    for (int d = 0; d < 2; ++d) {
      std::vector<int> counts(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double rel = (set.point(i)[d] - dom.lo[d]) / (dom.hi[d] - dom.lo[d]);
        // The time axis uses (k/n, (k+1)/n] strata; nudge into the bin.
        int bin = static_cast<int>(d == 1 ? std::ceil(rel * n) - 1
                                          : std::floor(rel * n));
        REQUIRE(bin >= 0);
        REQUIRE(bin < static_cast<int>(n));
        counts[bin] += 1;
      }
      for (int c : counts) CHECK(c == 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(set.point(i)[1] > 0.0);
      CHECK(set.point(i)[1] <= 1.0);
    }
  }
  SUBCASE("determinism") {
    const BoxDomain dom = BoxDomain::cube(3, -2.0, 2.0);
    CHECK(sample::lhs_sample(dom, 64, 5).data ==
          sample::lhs_sample(dom, 64, 5).data);
  }
}

TEST_CASE("boundary_sample") {
  SUBCASE("1-D space faces pin x to -1 or 1") {
    const BoxDomain dom = BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
    const auto set = sample::boundary_sample(dom, 100, 17);
    REQUIRE(set.size() == 200);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double x = set.point(i)[0];
      CHECK((x == -1.0 || x == 1.0));
      CHECK(set.point(i)[1] > 0.0);
      CHECK(set.point(i)[1] <= 1.0);
    }
  }
  SUBCASE("10-D cube with 200 per face gives 20 faces x 200 = 4000 points") {
    const BoxDomain dom = BoxDomain::cube(10, -1.0, 1.0);
    const auto set = sample::boundary_sample(dom, 200, 23);
    CHECK(set.size() == 4000);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto p = set.point(i);
      int pinned = 0;
      for (int d = 0; d < 10; ++d) {
        if (p[d] == -1.0 || p[d] == 1.0) ++pinned;
      }
      CHECK(pinned == 1);
      CHECK(set.faces[i] == static_cast<int>(i / 200));
    }
  }
}

TEST_CASE("initial_sample pins t = 0") {
  const BoxDomain dom = BoxDomain::space_time({0.0, 0.0}, {1.0, 1.0}, 0.0, 2.0);
  const auto set = sample::initial_sample(dom, 400, 29);
  REQUIRE(set.size() == 400);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set.point(i)[2] == 0.0);
  }
  CHECK_THROWS_AS(sample::initial_sample(BoxDomain::cube(2, 0, 1), 10, 1),
                  InvalidArgument);
}

TEST_CASE("grid_nodes") {
  SUBCASE("256 x 100 grid has 25600 nodes") {
    const BoxDomain dom = BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
    const int counts[2] = {256, 100};
    const auto grid = sample::grid_nodes(dom, counts);
    CHECK(grid.size() == 25600);
    CHECK(grid.point(0)[0] == -1.0);
    CHECK(grid.point(0)[1] == 0.0);
    CHECK(grid.point(grid.size() - 1)[0] == 1.0);
    CHECK(grid.point(grid.size() - 1)[1] == 1.0);
  }
  SUBCASE("(2,2) grid on the unit square is the 4 corners") {
    const int counts[2] = {2, 2};
    const auto grid = sample::grid_nodes(BoxDomain::cube(2, 0.0, 1.0), counts);
    REQUIRE(grid.size() == 4);
    std::set<std::pair<double, double>> corners;
    for (std::size_t i = 0; i < 4; ++i) {
      corners.insert({grid.point(i)[0], grid.point(i)[1]});
    }
    CHECK(corners == std::set<std::pair<double, double>>{
                         {0, 0}, {0, 1}, {1, 0}, {1, 1}});
  }
  SUBCASE("100^3 grid has 1e6 nodes") {
    const int counts[3] = {100, 100, 100};
    const auto grid = sample::grid_nodes(BoxDomain::cube(3, 0.0, 1.0), counts);
    CHECK(grid.size() == 1000000);
  }
}

TEST_CASE("gauss_legendre") {
  SUBCASE("degree-7 exactness in one dimension") {
    const auto rule = sample::gauss_legendre(BoxDomain::cube(1, -1.0, 1.0), 4);
    REQUIRE(rule.size() == 4);
    double integral = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      integral += rule.weights[i] * std::pow(rule.node(i)[0], 6);
    }
    CHECK(std::abs(integral - 2.0 / 7.0) < 1e-12);
  }
  SUBCASE("unit integrand over [-1,1]^2 integrates to 4") {
    const auto rule = sample::gauss_legendre(BoxDomain::cube(2, -1.0, 1.0), 4);
    double integral = 0.0;
    for (double w : rule.weights) integral += w;
    CHECK(std::abs(integral - 4.0) < 1e-12);
  }
  SUBCASE("d=10 tensor rule has 4^10 nodes") {
    const auto rule = sample::gauss_legendre(BoxDomain::cube(10, -1.0, 1.0), 4);
    CHECK(rule.size() == 1048576);
    for (double w : rule.weights) {
      CHECK(w > 0.0);
    }
  }
  SUBCASE("monomials of per-dimension degree <= 7 over random boxes") {
    util::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      const int d = 1 + static_cast<int>(rng.index(3));
      BoxDomain dom;
      for (int k = 0; k < d; ++k) {
        const double lo = rng.uniform(-2.0, 0.0);
        dom.lo.push_back(lo);
        dom.hi.push_back(lo + rng.uniform(0.5, 2.0));
      }
      std::vector<int> degree(d);
      for (int k = 0; k < d; ++k) degree[k] = static_cast<int>(rng.index(8));
      const auto rule = sample::gauss_legendre(dom, 4);
      double got = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        double term = rule.weights[i];
        for (int k = 0; k < d; ++k) {
          term *= std::pow(rule.node(i)[k], degree[k]);
        }
        got += term;
      }
      double want = 1.0;
      for (int k = 0; k < d; ++k) {
        const int n = degree[k] + 1;
        want *= (std::pow(dom.hi[k], n) - std::pow(dom.lo[k], n)) / n;
      }
      CHECK(oracles_rel(got, want) < 1e-10);
    }
  }
}

TEST_CASE("pointset CSV export") {
  const BoxDomain dom = BoxDomain::cube(2, 0.0, 1.0);
  const auto set = sample::uniform_sample(dom, 3, 1);
  const std::string names[2] = {"x", "y"};
  const std::string csv = set.to_csv(names);
  CHECK(csv.substr(0, 4) == "x,y\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
