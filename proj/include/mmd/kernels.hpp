#ifndef MMD_KERNELS_HPP
#define MMD_KERNELS_HPP

#include <Eigen/Dense>
#include <string>

namespace mmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

/// Kernel families of the studentized MMD test. The Gaussian and Laplacian
/// kernels are stored negated so that all downstream statistics are
/// family-agnostic; their self-value k(x,x) is -1, while the two norms have
/// self-value 0.
enum class KernelFamily { L2, L1, Gaussian, Laplacian };

enum class BandwidthPolicy { Fixed, MedianHeuristic };

bool kernel_has_bandwidth(KernelFamily family);
std::string kernel_family_name(KernelFamily family);

/// Declarative kernel choice; bandwidth fields are meaningful only for the
/// Gaussian and Laplacian families.
struct KernelSpec {
  KernelFamily family = KernelFamily::L2;
  BandwidthPolicy bandwidth = BandwidthPolicy::MedianHeuristic;
  double bandwidth_value = 0.0;  // Fixed policy only; must be > 0

  static KernelSpec l2() { return {KernelFamily::L2}; }
  static KernelSpec l1() { return {KernelFamily::L1}; }
  static KernelSpec gaussian_median() {
    return {KernelFamily::Gaussian, BandwidthPolicy::MedianHeuristic};
  }
  static KernelSpec laplacian_median() {
    return {KernelFamily::Laplacian, BandwidthPolicy::MedianHeuristic};
  }
  static KernelSpec gaussian(double gamma) {
    return {KernelFamily::Gaussian, BandwidthPolicy::Fixed, gamma};
  }
  static KernelSpec laplacian(double gamma) {
    return {KernelFamily::Laplacian, BandwidthPolicy::Fixed, gamma};
  }

  void validate() const;
};

/// Kernel with its bandwidth pinned to a number; the evaluable object every
/// statistic is defined against.
struct ResolvedKernel {
  KernelFamily family = KernelFamily::L2;
  double bandwidth = 0.0;  // ignored by L2/L1

  /// Self-value k(x,x).
  double self_value() const {
    return kernel_has_bandwidth(family) ? -1.0 : 0.0;
  }

  double operator()(const VectorRef& x, const VectorRef& y) const;

  /// Kernel value from a precomputed squared Euclidean distance (valid for
  /// every family except L1, which is not a function of it).
  double from_sqdist(double d2) const;
};

/// Pooled (n+m) x (n+m) kernel matrix over the stacked samples; rows 0..n-1
/// are X, rows n..N-1 are Y. The one expensive artifact everything else
/// reads from.
struct GramBundle {
  Index n = 0;
  Index m = 0;
  Matrix K;
  double a0 = 0.0;

  Index size() const { return n + m; }
};

double eval_kernel(const ResolvedKernel& kernel, const VectorRef& x, const VectorRef& y);

/// Median of the pooled pairwise distances (squared for Gaussian, plain for
/// Laplacian), over within-X, cross, and within-Y pairs without self-pairs.
/// Even counts take the mean of the two central order statistics.
double median_heuristic_bandwidth(KernelFamily family, const MatrixRef& x, const MatrixRef& y);

/// Pins the bandwidth: pass-through for L2/L1 and fixed policies, median
/// heuristic on the pooled sample otherwise.
ResolvedKernel resolve_kernel(const KernelSpec& spec, const MatrixRef& x, const MatrixRef& y);

/// Squared Euclidean distances between all pooled rows, evaluated pairwise
/// by coordinate differences.
Matrix pooled_sqdist(const MatrixRef& x, const MatrixRef& y);

GramBundle gram_pooled(const ResolvedKernel& kernel, const MatrixRef& x, const MatrixRef& y);

/// Gram matrix derived from a precomputed squared-distance matrix; rejects
/// the L1 family. Matches gram_pooled exactly when the distances come from
/// pooled_sqdist.
GramBundle gram_from_sqdist(const ResolvedKernel& kernel, const MatrixRef& sqdist,
                            Index n, Index m);

namespace detail {
/// Median heuristic over precomputed squared distances; shared with the
/// simulation driver so replications reuse one distance matrix.
double median_bandwidth_from_sqdist(KernelFamily family, const MatrixRef& sqdist);
}  // namespace detail

}  // namespace mmd

#endif
