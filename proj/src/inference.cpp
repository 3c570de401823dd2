#include "mmd/inference.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

#include "mmd/rng.hpp"

namespace mmd {
namespace {

constexpr std::uint64_t kPermutationSalt = 0x7065726d75746174ULL;

/// MMD estimate for the split given by an index arrangement of the pooled
/// rows: the first n entries form the X group.
double mmd_of_split(const GramBundle& gram, const std::vector<Index>& order) {
  const Index n = gram.n;
  const Index m = gram.m;
  double within_x = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      within_x += gram.K(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  double within_y = 0.0;
  for (Index i = n; i < n + m; ++i) {
    for (Index j = i + 1; j < n + m; ++j) {
      within_y += gram.K(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  double cross = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = n; j < n + m; ++j) {
      cross += gram.K(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
  }
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return 2.0 / (nd * md) * cross - within_x / (nd * (nd - 1.0) / 2.0) -
         within_y / (md * (md - 1.0) / 2.0);
}

}  // namespace

TestResult asymptotic_test(const GramBundle& gram, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("asymptotic_test: alpha must lie strictly in (0,1)");
  }
  const StudentizedStatistic stat = studentized_statistic(gram);
  TestResult result;
  result.method = TestMethod::Asymptotic;
  result.statistic = stat.value;
  result.p_value = 1.0 - normal_cdf(stat.value);
  result.alpha = alpha;
  result.reject = stat.value > normal_quantile(1.0 - alpha);
  result.n = gram.n;
  result.m = gram.m;
  return result;
}

TestResult asymptotic_test(const KernelSpec& spec, const MatrixRef& x, const MatrixRef& y,
                           double alpha) {
  const ResolvedKernel kernel = resolve_kernel(spec, x, y);
  TestResult result = asymptotic_test(gram_pooled(kernel, x, y), alpha);
  result.p = x.cols();
  result.kernel = spec;
  result.bandwidth = kernel.bandwidth;
  return result;
}

TestResult permutation_test(const GramBundle& gram, long permutations, double alpha,
                            std::uint64_t seed) {
  if (permutations < 1) {
    throw std::invalid_argument("permutation_test: needs at least one permutation");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("permutation_test: alpha must lie strictly in (0,1)");
  }
  if (gram.n < 2 || gram.m < 2) {
    throw std::invalid_argument("permutation_test: needs at least two observations per sample");
  }
  const Index total = gram.size();
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Index{0});
  const double observed = mmd_of_split(gram, order);

  long at_least_as_large = 0;
  for (long b = 0; b < permutations; ++b) {
    RngStream rng(seed, derive_stream({kPermutationSalt, static_cast<std::uint64_t>(b)}));
    // Fisher-Yates arrangement; the first n slots form the permuted X group.
    std::iota(order.begin(), order.end(), Index{0});
    for (Index i = total - 1; i > 0; --i) {
      const Index j = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    if (mmd_of_split(gram, order) >= observed) {
      ++at_least_as_large;
    }
  }

  TestResult result;
  result.method = TestMethod::Permutation;
  result.statistic = observed;
  result.p_value = static_cast<double>(1 + at_least_as_large) /
                   static_cast<double>(permutations + 1);
  result.alpha = alpha;
  result.reject = result.p_value <= alpha;
  result.n = gram.n;
  result.m = gram.m;
  result.permutations = permutations;
  result.seed = seed;
  return result;
}

TestResult permutation_test(const ResolvedKernel& kernel, const MatrixRef& x,
                            const MatrixRef& y, long permutations, double alpha,
                            std::uint64_t seed) {
  TestResult result = permutation_test(gram_pooled(kernel, x, y), permutations, alpha, seed);
  result.p = x.cols();
  result.kernel.family = kernel.family;
  if (kernel_has_bandwidth(kernel.family)) {
    result.kernel.bandwidth = BandwidthPolicy::Fixed;
    result.kernel.bandwidth_value = kernel.bandwidth;
  }
  result.bandwidth = kernel.bandwidth;
  return result;
}

}  // namespace mmd
