#ifndef MMD_ORACLE_HPP
#define MMD_ORACLE_HPP

#include "mmd/kernels.hpp"

namespace mmd {

/// Finite-support probability distribution over points in R^p; the ground
/// truth generator for every exact unbiasedness and identity check.
struct FiniteDistribution {
  Matrix atoms;  // one atom per row
  Vector probs;

  Index size() const { return atoms.rows(); }
  Index dim() const { return atoms.cols(); }
  void validate() const;
};

struct PopulationSummary {
  double mmd_sq = 0.0;    // squared population MMD between the two inputs
  double hsic_self = 0.0; // variance functional of the pooled mixture
  double g4 = 0.0;        // fourth-order product functional of the mixture
};

/// Two independent enumeration routes to the same fourth-order functional;
/// disagreement flags a transcription error in either one.
struct FourthMomentPair {
  double direct = 0.0;          // quadruple sum over the doubly centered kernel
  double moment_formula = 0.0;  // combination of raw kernel moments
};

/// Exact finite-sample moments of the estimators under iid sampling from the
/// two supports, by enumerating every joint realization.
struct ExactMoments {
  double mean_mmd = 0.0;
  double var_mmd = 0.0;
  double mean_variance_estimate = 0.0;
};

/// 2 E k(X,Y) - E k(X,X') - E k(Y,Y') as exact sums over atom pairs.
double population_mmd_sq(const ResolvedKernel& kernel, const FiniteDistribution& p,
                         const FiniteDistribution& q);

/// Mixture that draws from p with probability rho, else from q. Duplicate
/// atoms are kept as-is.
FiniteDistribution mixture(const FiniteDistribution& p, const FiniteDistribution& q,
                           double rho);

/// E k^2 - 2 E[k(Z1,Z2) k(Z1,Z3)] + (E k)^2 over independent copies of z.
double population_hsic_self(const ResolvedKernel& kernel, const FiniteDistribution& z);

/// Expected fourth-order product of the doubly centered kernel over four
/// independent copies, by both routes. Guarded at |support|^5 <= 1e6
/// enumeration steps.
FourthMomentPair population_g4(const ResolvedKernel& kernel, const FiniteDistribution& z);

/// Enumerates all |support_p|^n * |support_q|^m sample realizations
/// (guarded at 1e6) and returns the exact estimator moments.
ExactMoments exhaustive_moments(const ResolvedKernel& kernel, const FiniteDistribution& p,
                                const FiniteDistribution& q, Index n, Index m);

PopulationSummary population_summary(const ResolvedKernel& kernel,
                                     const FiniteDistribution& p,
                                     const FiniteDistribution& q, double rho);

}  // namespace mmd

#endif
