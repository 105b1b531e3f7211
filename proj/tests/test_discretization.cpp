#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "prvacc/discretization.hpp"
#include "prvacc/mechanisms.hpp"

using namespace prvacc;

namespace {

std::function<double(double)> PointMassCdf(double at) {
  return [at](double x) { return x >= at ? 1.0 : 0.0; };
}

double StdNormalCdf(double y) {
  return 0.5 * std::erfc(-y * std::numbers::sqrt2 / 2);
}

// Mixture of atoms and uniform segments with a closed-form cdf and mean.
struct Mixture {
  std::vector<std::pair<double, double>> atoms;              // (location, weight)
  std::vector<std::tuple<double, double, double>> segments;  // (a, b, weight)

  double Cdf(double x) const {
    double total = 0;
    for (const auto& [y, w] : atoms) {
      if (y <= x) total += w;
    }
    for (const auto& [a, b, w] : segments) {
      total += w * std::clamp((x - a) / (b - a), 0.0, 1.0);
    }
    return total;
  }

  double Mean() const {
    double total = 0;
    for (const auto& [y, w] : atoms) total += w * y;
    for (const auto& [a, b, w] : segments) total += w * 0.5 * (a + b);
    return total;
  }
};

Mixture RandomMixture(std::mt19937& rng, double truncation) {
  std::uniform_int_distribution<int> natoms(0, 4), nsegs(0, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // keep everything strictly inside the window
  std::uniform_real_distribution<double> pos(-0.95 * truncation, 0.95 * truncation);
  Mixture mix;
  int a = natoms(rng), s = nsegs(rng);
  if (a + s == 0) a = 1;
  std::vector<double> weights;
  for (int i = 0; i < a + s; ++i) weights.push_back(unit(rng) + 0.05);
  double norm = 0;
  for (double w : weights) norm += w;
  for (int i = 0; i < a; ++i) mix.atoms.emplace_back(pos(rng), weights[i] / norm);
  for (int i = 0; i < s; ++i) {
    double lo = pos(rng), hi = pos(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-6) hi = lo + 1e-6;
    mix.segments.emplace_back(lo, hi, weights[a + i] / norm);
  }
  return mix;
}

}  // namespace

TEST_SUITE_BEGIN("discretization");

TEST_CASE("point mass recovers exactly") {
  const DiscretePrv out = Discretize(PointMassCdf(0.3), 0.3, 0.5, 1.75);
  CHECK(out.half_count() == 3);
  CHECK(out.MassAt(1) == 1.0);
  for (std::int64_t i : {-3, -2, -1, 0, 2, 3}) CHECK(out.MassAt(i) == 0.0);
  CHECK(out.shift() == doctest::Approx(-0.2).epsilon(1e-15));
  // mean preservation forces exact recovery of the atom
  CHECK(out.SupportPoint(1) == 0.3);
  CHECK(out.Mean() == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("symmetric input gets a zero shift") {
  const DiscretePrv out = Discretize(StdNormalCdf, 0.0, 0.25, 10.125);
  CHECK(std::abs(out.shift()) <= 1e-12);
  CHECK(std::abs(out.Mean()) <= 1e-12);
}

TEST_CASE("gaussian loss grid preserves the truncated mean") {
  const auto prv = BuildPrv(GaussianSpec{1.0});
  const double truncated = prv->TruncatedMean(10.25);
  const DiscretePrv out = Discretize([&](double x) { return prv->Cdf(x); },
                                     truncated, 0.5, 10.25);
  CHECK(std::abs(out.Mean() - truncated) <= 1e-12);
  CHECK(std::abs(out.TotalMass() - 1.0) <= 1e-12);
  CHECK(out.Cdf(out.truncation()) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("idempotent on grid-aligned input") {
  std::vector<double> pmf{0.1, 0.0, 0.25, 0.3, 0.15, 0.05, 0.15};
  const DiscretePrv p(0.5, 0.0, pmf);
  const DiscretePrv again =
      Discretize([&](double x) { return p.Cdf(x); }, p.Mean(), 0.5, p.truncation());
  REQUIRE(again.size() == p.size());
  CHECK(std::abs(again.shift() - p.shift()) <= 1e-12);
  for (std::int64_t i = -3; i <= 3; ++i) {
    CHECK(again.MassAt(i) == doctest::Approx(p.MassAt(i)).epsilon(1e-12));
  }
}

TEST_CASE("atom on a bucket boundary goes to the lower bucket") {
  // support points i + 1/2 land exactly on the boundaries of the same mesh
  std::vector<double> pmf{0.5, 0.25, 0.25};
  const DiscretePrv p(1.0, 0.5, pmf);  // atoms at -0.5, 0.5, 1.5
  CHECK(p.Cdf(0.5) == doctest::Approx(0.75));  // boundary atom counted below
  const DiscretePrv again =
      Discretize([&](double x) { return p.Cdf(x); }, p.Mean(), 1.0, 2.5);
  // bucket i covers (i - 1/2, i + 1/2], so the atom at i + 1/2 lands in
  // bucket i and the mean-preserving shift recovers the points exactly
  CHECK(again.MassAt(-1) == doctest::Approx(0.5));
  CHECK(again.MassAt(0) == doctest::Approx(0.25));
  CHECK(again.MassAt(1) == doctest::Approx(0.25));
  CHECK(again.shift() == doctest::Approx(0.5));
  CHECK(again.SupportPoint(-1) == doctest::Approx(-0.5));
}

TEST_CASE("discrete cdf step semantics") {
  const DiscretePrv point = Discretize(PointMassCdf(0.0), 0.0, 1.0, 1.5);
  CHECK(point.Cdf(-1e-9) == 0.0);
  CHECK(point.Cdf(0.0) == 1.0);

  const DiscretePrv pair(1.0, 0.0, std::vector<double>{0.5, 0.0, 0.5});
  CHECK(pair.Cdf(0.0) == 0.5);
  CHECK(pair.Cdf(-1.0) == 0.5);
  CHECK(pair.Cdf(std::nextafter(-1.0, -2.0)) == 0.0);
  CHECK(pair.Cdf(1.0) == doctest::Approx(1.0));
  CHECK(pair.CdfFunction()(0.5) == 0.5);
}

TEST_CASE("error paths") {
  // truncation off the half-integer grid
  CHECK_THROWS_AS((void)Discretize(PointMassCdf(0.0), 0.0, 0.5, 1.6),
                  std::invalid_argument);
  // no mass in the window
  CHECK_THROWS_AS((void)Discretize([](double) { return 0.25; }, 0.0, 0.5, 1.75),
                  NumericalError);
  // mean inconsistent with the cdf
  CHECK_THROWS_AS((void)Discretize(PointMassCdf(0.0), 3.0, 0.5, 1.75),
                  NumericalError);
  // decreasing cdf
  CHECK_THROWS_AS((void)Discretize([](double x) { return -x; }, 0.0, 0.5, 1.75),
                  NumericalError);
  // pmf constructor contracts
  CHECK_THROWS_AS(DiscretePrv(1.0, 0.0, std::vector<double>{1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscretePrv(1.0, 0.7, std::vector<double>{0.0, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DiscretePrv(1.0, 0.0, std::vector<double>{0.3, 0.3, 0.3}),
                  std::invalid_argument);
}

TEST_CASE("randomized mixtures: mass, mean and range") {
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> mesh_dist(-4.0, -0.3);
  std::uniform_int_distribution<std::int64_t> count_dist(1, 60);
  for (int trial = 0; trial < 200; ++trial) {
    const double mesh = std::pow(10.0, mesh_dist(rng));
    const std::int64_t n = count_dist(rng);
    const double truncation = (static_cast<double>(n) + 0.5) * mesh;
    const Mixture mix = RandomMixture(rng, truncation);
    const DiscretePrv out = Discretize(
        [&](double x) { return mix.Cdf(x); }, mix.Mean(), mesh, truncation);
    CHECK(std::abs(out.TotalMass() - 1.0) <= 1e-12);
    CHECK(std::abs(out.Mean() - mix.Mean()) <=
          1e-12 * std::max(1.0, std::abs(mix.Mean())));
    CHECK(out.shift() > -mesh / 2);
    CHECK(out.shift() <= mesh / 2);
    for (std::int64_t i = -n; i <= n; ++i) CHECK(out.MassAt(i) >= 0.0);
  }
}

TEST_CASE("random point masses recover exactly") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double mesh = 0.01 + unit(rng);
    const std::int64_t n = 1 + static_cast<std::int64_t>(unit(rng) * 40);
    const double truncation = (static_cast<double>(n) + 0.5) * mesh;
    const double at = (2 * unit(rng) - 1) * 0.95 * truncation;
    const DiscretePrv out = Discretize(PointMassCdf(at), at, mesh, truncation);
    CHECK(out.Mean() == doctest::Approx(at).epsilon(1e-13));
    // exactly one occupied bucket, at the original location
    int occupied = 0;
    for (std::int64_t i = -n; i <= n; ++i) {
      if (out.MassAt(i) > 0) {
        ++occupied;
        CHECK(out.SupportPoint(i) == doctest::Approx(at).epsilon(1e-14));
      }
    }
    CHECK(occupied == 1);
  }
}

TEST_SUITE_END();
