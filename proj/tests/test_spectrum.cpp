#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spinbath/errors.hpp"
#include "spinbath/spectrum.hpp"
#include "test_support.hpp"

using namespace spinbath;

namespace {

EnvironmentAmplitudes weights(std::vector<double> w) { return EnvironmentAmplitudes::from_weights(w); }

}  // namespace

TEST_CASE("enumerate_walks: single spin") {
  const auto s = enumerate_walks(CouplingSet({1.0}), weights({0.25}));
  REQUIRE(s.size() == 2);
  CHECK(s.entries()[0].energy == 1.0);
  CHECK(s.entries()[0].weight == 0.25);
  CHECK(s.entries()[1].energy == -1.0);
  CHECK(s.entries()[1].weight == 0.75);
  CHECK_FALSE(s.merged());
  CHECK(s.source_size() == 1);
}

TEST_CASE("enumerate_walks: entries come out in mask order") {
  const auto s = enumerate_walks(CouplingSet({1.0, 2.0}), weights({0.5, 0.5}));
  REQUIRE(s.size() == 4);
  const std::vector<double> expected = {3.0, 1.0, -1.0, -3.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(s.entries()[i].energy == expected[i]);
    CHECK(s.entries()[i].weight == 0.25);
  }
}

TEST_CASE("equal couplings merge to the binomial distribution") {
  const double g = 0.7;
  const CouplingSet c(std::vector<double>(6, g));
  const auto raw = enumerate_walks(c, weights(std::vector<double>(6, 0.5)));
  CHECK(raw.size() == 64);
  const auto merged = merge_degenerate(raw, default_merge_epsilon(c));
  REQUIRE(merged.size() == 7);
  CHECK(merged.merged());
  for (unsigned l = 0; l <= 6; ++l) {
    const auto& line = merged.entries()[l];
    // Ascending energy: l spins up out of 6 gives g(2l - 6).
    CHECK(line.energy == doctest::Approx(g * (2.0 * l - 6.0)).epsilon(1e-14));
    CHECK(line.weight == doctest::Approx(testing::choose(6, l) / 64.0).epsilon(1e-14));
  }
}

TEST_CASE("merge_degenerate: worked examples") {
  const EnergySpectrum pairs({{1.0, 0.25}, {1.0, 0.25}, {-1.0, 0.5}}, 2, false);
  const auto m = merge_degenerate(pairs, 1e-9);
  REQUIRE(m.size() == 2);
  CHECK(m.entries()[0].energy == -1.0);
  CHECK(m.entries()[0].weight == 0.5);
  CHECK(m.entries()[1].energy == 1.0);
  CHECK(m.entries()[1].weight == 0.5);

  const EnergySpectrum close({{0.0, 0.5}, {1e-12, 0.5}}, 1, false);
  const auto c = merge_degenerate(close, 1e-9);
  REQUIRE(c.size() == 1);
  CHECK(c.entries()[0].weight == 1.0);
  CHECK(c.entries()[0].energy == doctest::Approx(5e-13).epsilon(1e-9));

  const EnergySpectrum apart({{0.0, 0.5}, {1.0, 0.5}}, 1, false);
  CHECK(merge_degenerate(apart, 1e-9).size() == 2);
  CHECK_THROWS_AS(merge_degenerate(apart, -1.0), ValidationError);
}

TEST_CASE("EnergySpectrum validation") {
  CHECK_THROWS_AS(EnergySpectrum({{0.0, 0.5}}, 1, false), ValidationError);
  CHECK_THROWS_AS(EnergySpectrum({{0.0, 1.5}, {1.0, -0.5}}, 1, false), ValidationError);
  CHECK_THROWS_AS(EnergySpectrum({{NAN, 1.0}}, 1, false), ValidationError);
  CHECK_THROWS_AS(EnergySpectrum({{1.0, 0.5}, {0.0, 0.5}}, 1, true), ValidationError);
}

TEST_CASE("property: spectrum against the walk-sum oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> time(-10.0, 10.0);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = testing::random_instance(rng, 1 + trial % 12);
    const auto s = enumerate_walks(inst.couplings, inst.amps);
    CHECK(s.size() == std::size_t{1} << inst.couplings.size());
    CHECK(s.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    const double t = time(rng);
    const Complex oracle = testing::walk_sum_oracle(inst.couplings, inst.amps, t);
    CHECK(std::abs(characteristic_function(s, t) - oracle) < 1e-12);
    CHECK(std::abs(decoherence_factor(inst.couplings, inst.amps, t) - oracle) < 1e-12);

    const auto m = merge_degenerate(s, default_merge_epsilon(inst.couplings));
    CHECK(m.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(characteristic_function(m, t) - oracle) < 1e-10);
  }
}

TEST_CASE("property: merging conserves weight and mean, and is idempotent") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> level(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    // Integer couplings give many exact degeneracies.
    const std::size_t n = 1 + trial % 10;
    std::vector<double> g(n);
    for (auto& x : g) x = level(rng) + 0.0;
    if (std::all_of(g.begin(), g.end(), [](double x) { return x == 0.0; })) g[0] = 1.0;
    const CouplingSet c(g);
    const auto amps = testing::random_amplitudes(rng, n);
    const auto raw = enumerate_walks(c, amps);
    const auto m = merge_degenerate(raw, default_merge_epsilon(c));
    CHECK(m.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.mean() == doctest::Approx(raw.mean()).epsilon(1e-12).scale(1.0));
    for (std::size_t i = 1; i < m.size(); ++i) {
      CHECK(m.entries()[i].energy - m.entries()[i - 1].energy > default_merge_epsilon(c));
    }
    const auto again = merge_degenerate(m, default_merge_epsilon(c));
    CHECK(again.size() == m.size());
  }
}

TEST_CASE("property: spectral moments match the per-spin statistics") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = testing::random_instance(rng, 1 + trial % 12);
    const auto s = enumerate_walks(inst.couplings, inst.amps);
    double mean = 0.0;
    double var = 0.0;
    for (std::size_t k = 0; k < inst.couplings.size(); ++k) {
      const double p = inst.amps.up_weight(k);
      const double q = inst.amps.down_weight(k);
      const double g = inst.couplings[k];
      mean += (p - q) * g;
      var += 4.0 * p * q * g * g;
    }
    CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-11).scale(1.0));
    CHECK(s.variance() == doctest::Approx(var).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("enumeration cap raises a capacity error") {
  const CouplingSet c(std::vector<double>(25, 1.0));
  const auto amps = weights(std::vector<double>(25, 0.5));
  CHECK_THROWS_AS(enumerate_walks(c, amps), CapacityError);
  CHECK_THROWS_AS(enumerate_walks(CouplingSet({1.0, 1.0, 1.0}), weights({0.5, 0.5, 0.5}), 2),
                  CapacityError);
  try {
    enumerate_walks(c, amps);
  } catch (const CapacityError& e) {
    CHECK(e.exit_code() == 3);
    CHECK(std::string(e.what()).find("2^25") != std::string::npos);
  }
  CHECK_THROWS_AS(enumerate_walks(CouplingSet({1.0, 2.0}), weights({0.5})), DimensionError);
}

TEST_CASE("ldos histogram") {
  const EnergySpectrum single({{2.0, 1.0}}, 1, true);
  const auto h1 = ldos(single, 1);
  REQUIRE(h1.bins() == 1);
  CHECK(h1.masses[0] == 1.0);
  CHECK(h1.edges[0] < 2.0);
  CHECK(h1.edges[1] > 2.0);

  const CouplingSet c(std::vector<double>(6, 1.0));
  const auto s = enumerate_walks(c, weights(std::vector<double>(6, 0.5)));
  CHECK(default_bin_count(s) == 8);
  const auto h = ldos(s, default_bin_count(s));
  CHECK(h.bins() == 8);
  CHECK(h.source_entries == 64);
  CHECK(h.source_size == 6);
  CHECK(std::accumulate(h.masses.begin(), h.masses.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h.edges.front() == -6.0);
  CHECK(h.edges.back() == 6.0);
  CHECK(std::abs(h.mean() - s.mean()) <= h.edges[1] - h.edges[0]);

  // Explicit edges centred on the lattice reproduce the binomial weights.
  std::vector<double> edges;
  for (int j = -7; j <= 7; j += 2) edges.push_back(j);
  const auto lattice = ldos(s, edges);
  REQUIRE(lattice.bins() == 7);
  for (unsigned l = 0; l <= 6; ++l) {
    CHECK(lattice.masses[l] == doctest::Approx(testing::choose(6, l) / 64.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(ldos(s, std::vector<double>{-1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(ldos(s, 0), ValidationError);
}
