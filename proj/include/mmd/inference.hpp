#ifndef MMD_INFERENCE_HPP
#define MMD_INFERENCE_HPP

#include <cstdint>

#include "mmd/estimators.hpp"
#include "mmd/kernels.hpp"
#include "mmd/normal.hpp"

namespace mmd {

enum class TestMethod { Asymptotic, Permutation };

struct TestResult {
  TestMethod method = TestMethod::Asymptotic;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  Index n = 0;
  Index m = 0;
  Index p = 0;
  KernelSpec kernel;
  double bandwidth = 0.0;  // resolved value; 0 for the bandwidth-free norms
  long permutations = 0;   // Permutation only
  std::uint64_t seed = 0;  // Permutation only
};

/// One-sided test of the studentized statistic against the standard normal
/// upper tail: p = 1 - Phi(t), reject when t exceeds the (1-alpha) quantile.
TestResult asymptotic_test(const GramBundle& gram, double alpha);

/// Convenience overload that resolves the kernel, builds the Gram matrix and
/// fills the sample metadata.
TestResult asymptotic_test(const KernelSpec& spec, const MatrixRef& x, const MatrixRef& y,
                           double alpha);

/// Monte Carlo permutation test on the plain MMD estimate. The Gram matrix
/// and any data-driven bandwidth are fixed once on the observed split; each
/// of the B permutations redraws a uniformly random n/m partition of the
/// pooled rows and re-reads the statistic from the fixed matrix. p-value uses
/// add-one smoothing, rejection at p <= alpha; byte-reproducible from the
/// seed.
TestResult permutation_test(const ResolvedKernel& kernel, const MatrixRef& x,
                            const MatrixRef& y, long permutations, double alpha,
                            std::uint64_t seed);

/// Permutation test on an already-built Gram bundle (statistic recomputation
/// only; used by the simulation driver).
TestResult permutation_test(const GramBundle& gram, long permutations, double alpha,
                            std::uint64_t seed);

}  // namespace mmd

#endif
