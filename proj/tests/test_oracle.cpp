#include <doctest.h>

#include <cmath>

#include "mmd/estimators.hpp"
#include "mmd/oracle.hpp"
#include "mmd/rng.hpp"

using namespace mmd;

namespace {

FiniteDistribution point_mass(std::initializer_list<double> coords) {
  FiniteDistribution dist;
  dist.atoms.resize(1, static_cast<Index>(coords.size()));
  Index j = 0;
  for (const double c : coords) dist.atoms(0, j++) = c;
  dist.probs = Vector::Ones(1);
  return dist;
}

FiniteDistribution uniform_binary() {
  FiniteDistribution dist;
  dist.atoms.resize(2, 1);
  dist.atoms << 0, 1;
  dist.probs = Vector::Constant(2, 0.5);
  return dist;
}

FiniteDistribution random_support(Index count, Index dim, RngStream& rng) {
  FiniteDistribution dist;
  dist.atoms.resize(count, dim);
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < dim; ++j) {
      dist.atoms(i, j) = 2.0 * rng.next_double() - 1.0;
    }
  }
  Vector weights(count);
  for (Index i = 0; i < count; ++i) weights(i) = rng.next_double() + 0.1;
  dist.probs = weights / weights.sum();
  // Renormalize exactly so validate() accepts the rounding.
  dist.probs(count - 1) = 1.0 - dist.probs.head(count - 1).sum();
  return dist;
}

const ResolvedKernel kL2{KernelFamily::L2, 0.0};

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("population mmd on identical and separated supports") {
  const FiniteDistribution p = uniform_binary();
  CHECK(population_mmd_sq(kL2, p, p) == doctest::Approx(0.0));
  CHECK(population_mmd_sq(kL2, point_mass({0}), point_mass({1})) == doctest::Approx(2.0));

  RngStream rng(31, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteDistribution a = random_support(3, 2, rng);
    const FiniteDistribution b = random_support(2, 2, rng);
    for (const auto family :
         {KernelFamily::L2, KernelFamily::Gaussian, KernelFamily::Laplacian}) {
      const ResolvedKernel kernel{family, 1.0};
      CHECK(population_mmd_sq(kernel, a, b) > 0.0);
      CHECK(population_mmd_sq(kernel, a, a) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("population mmd rejects mismatched dimensions") {
  CHECK_THROWS_AS(population_mmd_sq(kL2, point_mass({0}), point_mass({0, 1})),
                  std::invalid_argument);
}

TEST_CASE("mixture construction and bounds") {
  const FiniteDistribution z = mixture(point_mass({0}), point_mass({1}), 0.5);
  REQUIRE(z.size() == 2);
  CHECK(z.probs(0) == 0.5);
  CHECK(z.probs(1) == 0.5);
  CHECK(z.atoms(0, 0) == 0.0);
  CHECK(z.atoms(1, 0) == 1.0);

  CHECK_THROWS_AS(mixture(point_mass({0}), point_mass({1}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mixture(point_mass({0}), point_mass({1}), 1.0), std::invalid_argument);
}

TEST_CASE("mixing a distribution with itself changes no summary") {
  RngStream rng(47, 0);
  const FiniteDistribution p = random_support(3, 2, rng);
  for (const double rho : {0.2, 0.5, 0.9}) {
    const FiniteDistribution z = mixture(p, p, rho);
    for (const auto family : {KernelFamily::L2, KernelFamily::Gaussian}) {
      const ResolvedKernel kernel{family, 1.0};
      CHECK(population_hsic_self(kernel, z) ==
            doctest::Approx(population_hsic_self(kernel, p)).epsilon(1e-12));
      const FourthMomentPair g_mix = population_g4(kernel, z);
      const FourthMomentPair g_base = population_g4(kernel, p);
      CHECK(g_mix.direct == doctest::Approx(g_base.direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("variance functional on hand-computed supports") {
  for (const auto family : {KernelFamily::L2, KernelFamily::Gaussian}) {
    CHECK(population_hsic_self({family, 1.0}, point_mass({2, 2})) == doctest::Approx(0.0));
  }
  // Uniform on {0,1}: E k = 1/2, E k^2 = 1/2, E[k k] = 1/4.
  CHECK(population_hsic_self(kL2, uniform_binary()) == doctest::Approx(0.25));

  RngStream rng(52, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteDistribution z = random_support(4, 2, rng);
    for (const auto family :
         {KernelFamily::L2, KernelFamily::L1, KernelFamily::Gaussian, KernelFamily::Laplacian}) {
      CHECK(population_hsic_self({family, 0.8}, z) >= -1e-14);
    }
  }
}

TEST_CASE("fourth-order functional routes agree") {
  for (const auto family : {KernelFamily::L2, KernelFamily::Gaussian}) {
    const FourthMomentPair degenerate = population_g4({family, 1.0}, point_mass({1, 2}));
    CHECK(degenerate.direct == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(degenerate.moment_formula == doctest::Approx(0.0).epsilon(1e-12));
  }

  const FourthMomentPair binary = population_g4(kL2, uniform_binary());
  CHECK(binary.direct == doctest::Approx(binary.moment_formula).epsilon(1e-12));
  CHECK(binary.direct >= 0.0);

  RngStream rng(53, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteDistribution z = random_support(3, 1, rng);
    for (const auto family : {KernelFamily::L2, KernelFamily::Laplacian}) {
      const FourthMomentPair pair = population_g4({family, 1.3}, z);
      CHECK(std::abs(pair.direct - pair.moment_formula) < 1e-12);
      CHECK(pair.direct >= -1e-13);
    }
  }
}

TEST_CASE("fourth-order functional guards the enumeration size") {
  RngStream rng(54, 0);
  const FiniteDistribution big = random_support(17, 1, rng);
  CHECK_THROWS_AS(population_g4(kL2, big), std::invalid_argument);
}

TEST_CASE("exhaustive moments reproduce the null identities") {
  const FiniteDistribution z = uniform_binary();
  const ExactMoments moments = exhaustive_moments(kL2, z, z, 2, 2);
  CHECK(std::abs(moments.mean_mmd) < 1e-14);
  CHECK(moments.var_mmd ==
        doctest::Approx(variance_coefficient(2, 2) * population_hsic_self(kL2, z))
            .epsilon(1e-12));
  CHECK(moments.var_mmd == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(moments.mean_variance_estimate == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("exhaustive moments stay unbiased under the alternative") {
  RngStream rng(61, 0);
  const FiniteDistribution p = random_support(2, 1, rng);
  const FiniteDistribution q = random_support(3, 1, rng);
  for (const auto family : {KernelFamily::L2, KernelFamily::Gaussian}) {
    const ResolvedKernel kernel{family, 1.0};
    const ExactMoments moments = exhaustive_moments(kernel, p, q, 2, 2);
    CHECK(moments.mean_mmd ==
          doctest::Approx(population_mmd_sq(kernel, p, q)).epsilon(1e-12));
  }
}

TEST_CASE("exhaustive moments guard the outcome count") {
  RngStream rng(62, 0);
  const FiniteDistribution p = random_support(10, 1, rng);
  CHECK_THROWS_AS(exhaustive_moments(kL2, p, p, 4, 4), std::invalid_argument);
}

TEST_CASE("oracle values ignore atom relabeling") {
  RngStream rng(63, 0);
  const FiniteDistribution z = random_support(4, 2, rng);
  FiniteDistribution shuffled;
  shuffled.atoms = z.atoms.colwise().reverse();
  shuffled.probs = z.probs.reverse();
  for (const auto family : {KernelFamily::L2, KernelFamily::Gaussian}) {
    const ResolvedKernel kernel{family, 1.0};
    CHECK(population_hsic_self(kernel, shuffled) ==
          doctest::Approx(population_hsic_self(kernel, z)).epsilon(1e-12));
    CHECK(population_g4(kernel, shuffled).direct ==
          doctest::Approx(population_g4(kernel, z).direct).epsilon(1e-12));
  }
}

TEST_CASE("population summary bundles the mixture quantities") {
  const FiniteDistribution p = point_mass({0});
  const FiniteDistribution q = point_mass({1});
  const PopulationSummary summary = population_summary(kL2, p, q, 0.5);
  CHECK(summary.mmd_sq == doctest::Approx(2.0));
  CHECK(summary.hsic_self == doctest::Approx(0.25));
  CHECK(summary.g4 >= 0.0);
}

TEST_SUITE_END();
