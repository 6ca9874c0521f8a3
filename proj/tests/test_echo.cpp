#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spinbath/echo.hpp"
#include "spinbath/errors.hpp"
#include "test_support.hpp"

using namespace spinbath;

namespace {

DiagonalBranchHamiltonian random_hamiltonian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<LevelPair> levels(n);
  for (auto& l : levels) l = {normal(rng), normal(rng)};
  return DiagonalBranchHamiltonian(levels);
}

}  // namespace

TEST_CASE("identical branches never decohere") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const auto h = random_hamiltonian(rng, n);
    const auto amps = testing::random_amplitudes(rng, n);
    CHECK(std::abs(echo_amplitude(h, h, amps, 3.7) - Complex(1.0, 0.0)) < 1e-14);
  }
}

TEST_CASE("opposite coupling branches reproduce r(t)") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> time(-8.0, 8.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testing::random_instance(rng, 1 + trial % 20);
    const auto h1 = DiagonalBranchHamiltonian::from_couplings(inst.couplings);
    const auto h0 = h1.negated();
    const double t = time(rng);
    CHECK(std::abs(echo_amplitude(h0, h1, inst.amps, t) -
                   decoherence_factor(inst.couplings, inst.amps, t)) < 1e-13);
  }
}

TEST_CASE("zero reference gives the survival amplitude") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const auto h = random_hamiltonian(rng, n);
    const auto amps = testing::random_amplitudes(rng, n);
    const double t = 0.37 * trial;
    // Each branch runs for t/2, so H0 = 0 leaves <psi|exp(-i H1 t/2)|psi>.
    const Complex echo = echo_amplitude(DiagonalBranchHamiltonian::zero(n), h, amps, t);
    CHECK(std::abs(echo - survival_amplitude(h, amps, t / 2.0)) < 1e-13);
  }
}

TEST_CASE("survival probability") {
  std::mt19937_64 rng(4);
  const auto h = random_hamiltonian(rng, 5);
  const auto amps = testing::random_amplitudes(rng, 5);
  CHECK(survival_probability(h, amps, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

  const DiagonalBranchHamiltonian spin({{0.8, -0.8}});
  const auto eq = EnvironmentAmplitudes::from_weights(std::vector{0.5});
  for (double t : {0.2, 1.0, 2.9}) {
    const double c = std::cos(0.8 * t);
    CHECK(survival_probability(spin, eq, t) == doctest::Approx(c * c).epsilon(1e-13));
  }
}

TEST_CASE("survival probability is |characteristic function|^2 of the strength function") {
  std::mt19937_64 rng(5);
  const auto h = random_hamiltonian(rng, 10);
  const auto amps = testing::random_amplitudes(rng, 10);
  const auto strength = strength_function(h, amps);
  CHECK(strength.size() == 1024);
  CHECK(strength.total_weight() == doctest::Approx(1.0).epsilon(1e-12));
  for (double t : {0.0, 0.5, 1.5, 4.0}) {
    const double via_spectrum = std::norm(characteristic_function(strength, t));
    CHECK(survival_probability(h, amps, t) == doctest::Approx(via_spectrum).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("property: swapping the branches conjugates the echo") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> time(-5.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 12;
    const auto h0 = random_hamiltonian(rng, n);
    const auto h1 = random_hamiltonian(rng, n);
    const auto amps = testing::random_amplitudes(rng, n);
    const double t = time(rng);
    const Complex fwd = echo_amplitude(h0, h1, amps, t);
    CHECK(std::abs(echo_amplitude(h1, h0, amps, t) - std::conj(fwd)) < 1e-13);
    CHECK(std::abs(echo_amplitude(h0, h1, amps, -t) - std::conj(fwd)) < 1e-13);
    CHECK(std::abs(fwd) <= 1.0 + 1e-12);
  }
}

TEST_CASE("echo errors") {
  const auto amps = EnvironmentAmplitudes::from_weights(std::vector{0.5, 0.5});
  CHECK_THROWS_AS(echo_amplitude(DiagonalBranchHamiltonian::zero(2),
                                 DiagonalBranchHamiltonian::zero(3), amps, 1.0),
                  DimensionError);
  CHECK_THROWS_AS(echo_amplitude(DiagonalBranchHamiltonian::zero(3),
                                 DiagonalBranchHamiltonian::zero(3), amps, 1.0),
                  DimensionError);
  CHECK_THROWS_AS(DiagonalBranchHamiltonian({}), ValidationError);
  CHECK_THROWS_AS(DiagonalBranchHamiltonian({{NAN, 0.0}}), ValidationError);
}

TEST_CASE("property: echo over disjoint environments factorizes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t na = 1 + trial % 5;
    const std::size_t nb = 1 + trial % 7;
    const auto a0 = random_hamiltonian(rng, na);
    const auto a1 = random_hamiltonian(rng, na);
    const auto b0 = random_hamiltonian(rng, nb);
    const auto b1 = random_hamiltonian(rng, nb);
    const auto amps_a = testing::random_amplitudes(rng, na);
    const auto amps_b = testing::random_amplitudes(rng, nb);
    auto join = [](const DiagonalBranchHamiltonian& x, const DiagonalBranchHamiltonian& y) {
      std::vector<LevelPair> levels(x.levels().begin(), x.levels().end());
      levels.insert(levels.end(), y.levels().begin(), y.levels().end());
      return DiagonalBranchHamiltonian(levels);
    };
    const double t = 0.41 * trial;
    const Complex joint = echo_amplitude(join(a0, b0), join(a1, b1),
                                         EnvironmentAmplitudes::concat(amps_a, amps_b), t);
    const Complex split = echo_amplitude(a0, a1, amps_a, t) * echo_amplitude(b0, b1, amps_b, t);
    CHECK(std::abs(joint - split) < 1e-13);
  }
}
