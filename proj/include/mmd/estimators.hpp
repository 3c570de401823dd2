#ifndef MMD_ESTIMATORS_HPP
#define MMD_ESTIMATORS_HPP

#include <stdexcept>

#include "mmd/kernels.hpp"

namespace mmd {

/// Pooled variance estimate is non-positive, so the studentized statistic is
/// undefined. Surfaced rather than clamped; callers decide the fallback.
class DegenerateVarianceError : public std::runtime_error {
 public:
  explicit DegenerateVarianceError(double value)
      : std::runtime_error("studentization undefined: pooled variance estimate is not positive"),
        value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

struct MmdEstimate {
  double value = 0.0;
  Index n = 0;
  Index m = 0;
};

struct VarianceEstimate {
  double value = 0.0;
  Index n = 0;
  Index m = 0;
  double a0 = 0.0;
};

struct StudentizedStatistic {
  double value = 0.0;
  MmdEstimate mmd;
  VarianceEstimate variance;
  double coefficient = 0.0;  // null-variance factor c for the given (n, m)
};

/// Unbiased squared-MMD U-statistic of order (2,2), read from the pooled Gram
/// matrix: 2/(nm) cross sum minus the two within-sample pair averages.
MmdEstimate mmd_u_statistic(const GramBundle& gram);

/// Core kernel of the U-statistic on one (i1,i2,j1,j2) tuple: half the
/// 2x2 cross block minus the within-pair entries. Indices are 0-based into
/// the X and Y samples respectively.
double mmd_tuple_term(const GramBundle& gram, Index i1, Index i2, Index j1, Index j2);

/// O(n^2 m^2) enumeration of mmd_tuple_term over all pairs of pairs; agrees
/// with mmd_u_statistic identically. Test-grade oracle.
double mmd_by_enumeration(const GramBundle& gram);

/// Exact null variance factor: Var of the statistic under the null equals
/// this times the pooled-population variance functional.
double variance_coefficient(Index n, Index m);

/// Double centering with the small-sample divisors N-2 and (N-1)(N-2); the
/// row/column/grand means run over all indices including the diagonal.
Matrix u_centered_matrix(const GramBundle& gram);

/// Unbiased pooled variance estimator: normalized off-diagonal energy of the
/// U-centered matrix, bias-corrected by a0^2/((N-1)(N-3)).
VarianceEstimate pooled_variance(const GramBundle& gram);

/// Four-point kernel of the variance estimator, evaluated directly on data
/// vectors. Symmetric in its arguments and nonnegative.
double variance_tuple_term(const ResolvedKernel& kernel, const VectorRef& a,
                           const VectorRef& b, const VectorRef& c, const VectorRef& d);

/// O(N^4) average of variance_tuple_term over all 4-subsets of the pooled
/// sample; agrees with pooled_variance identically. Test-grade oracle.
double variance_by_enumeration(const ResolvedKernel& kernel, const MatrixRef& x,
                               const MatrixRef& y);

/// Studentized statistic: the MMD estimate over the estimated null standard
/// deviation. Throws DegenerateVarianceError when the variance estimate is
/// not positive.
StudentizedStatistic studentized_statistic(const GramBundle& gram);

}  // namespace mmd

#endif
