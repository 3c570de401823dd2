#include "mmd/estimators.hpp"

#include <cmath>

namespace mmd {
namespace {

void require_pairs(Index n, Index m) {
  if (n < 2 || m < 2) {
    throw std::invalid_argument("estimator requires at least two observations per sample");
  }
}

}  // namespace

MmdEstimate mmd_u_statistic(const GramBundle& gram) {
  const Index n = gram.n;
  const Index m = gram.m;
  require_pairs(n, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);

  const double cross = gram.K.block(0, n, n, m).sum();
  // Off-diagonal halves of the within blocks; the diagonal holds n*a0 (m*a0).
  const double within_x = 0.5 * (gram.K.topLeftCorner(n, n).sum() - nd * gram.a0);
  const double within_y = 0.5 * (gram.K.bottomRightCorner(m, m).sum() - md * gram.a0);

  const double value = 2.0 / (nd * md) * cross -
                       within_x / (nd * (nd - 1.0) / 2.0) -
                       within_y / (md * (md - 1.0) / 2.0);
  return {value, n, m};
}

double mmd_tuple_term(const GramBundle& gram, Index i1, Index i2, Index j1, Index j2) {
  if (i1 == i2 || j1 == j2) {
    throw std::invalid_argument("mmd_tuple_term: repeated index");
  }
  if (i1 < 0 || i2 < 0 || i1 >= gram.n || i2 >= gram.n || j1 < 0 || j2 < 0 ||
      j1 >= gram.m || j2 >= gram.m) {
    throw std::invalid_argument("mmd_tuple_term: index out of range");
  }
  const Index n = gram.n;
  const double cross = gram.K(i1, n + j1) + gram.K(i1, n + j2) + gram.K(i2, n + j1) +
                       gram.K(i2, n + j2);
  return 0.5 * cross - gram.K(i1, i2) - gram.K(n + j1, n + j2);
}

double mmd_by_enumeration(const GramBundle& gram) {
  const Index n = gram.n;
  const Index m = gram.m;
  require_pairs(n, m);
  double total = 0.0;
  for (Index i1 = 0; i1 < n; ++i1) {
    for (Index i2 = i1 + 1; i2 < n; ++i2) {
      for (Index j1 = 0; j1 < m; ++j1) {
        for (Index j2 = j1 + 1; j2 < m; ++j2) {
          total += mmd_tuple_term(gram, i1, i2, j1, j2);
        }
      }
    }
  }
  const double pairs_x = static_cast<double>(n) * (n - 1) / 2.0;
  const double pairs_y = static_cast<double>(m) * (m - 1) / 2.0;
  return total / (pairs_x * pairs_y);
}

double variance_coefficient(Index n, Index m) {
  require_pairs(n, m);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  return 2.0 / (nd * (nd - 1.0)) + 4.0 / (nd * md) + 2.0 / (md * (md - 1.0));
}

Matrix u_centered_matrix(const GramBundle& gram) {
  const Index total = gram.size();
  if (total < 3) {
    throw std::invalid_argument("u_centered_matrix: needs at least three pooled rows");
  }
  const double denom = static_cast<double>(total) - 2.0;
  const Vector row_means = gram.K.rowwise().sum() / denom;
  const double grand_mean =
      gram.K.sum() / ((static_cast<double>(total) - 1.0) * denom);

  Matrix centered = gram.K;
  centered.colwise() -= row_means;              // subtract the s-indexed mean
  centered.rowwise() -= row_means.transpose();  // K is symmetric, so also the t-indexed mean
  centered.array() += grand_mean;
  return centered;
}

VarianceEstimate pooled_variance(const GramBundle& gram) {
  const Index total = gram.size();
  if (total < 4) {
    throw std::invalid_argument("pooled_variance: needs at least four pooled rows");
  }
  const Matrix centered = u_centered_matrix(gram);
  const double off_diag_energy =
      centered.squaredNorm() - centered.diagonal().squaredNorm();
  const double td = static_cast<double>(total);
  const double value = off_diag_energy / (td * (td - 3.0)) -
                       gram.a0 * gram.a0 / ((td - 1.0) * (td - 3.0));
  return {value, gram.n, gram.m, gram.a0};
}

double variance_tuple_term(const ResolvedKernel& kernel, const VectorRef& a,
                           const VectorRef& b, const VectorRef& c, const VectorRef& d) {
  const double kab = kernel(a, b);
  const double kac = kernel(a, c);
  const double kad = kernel(a, d);
  const double kbc = kernel(b, c);
  const double kbd = kernel(b, d);
  const double kcd = kernel(c, d);

  const double square_sum = kab * kab + kac * kac + kad * kad + kbc * kbc +
                            kbd * kbd + kcd * kcd;
  const double row_a = kab + kac + kad;
  const double row_b = kab + kbc + kbd;
  const double row_c = kac + kbc + kcd;
  const double row_d = kad + kbd + kcd;
  const double pair_sum = kab + kac + kad + kbc + kbd + kcd;

  return 0.5 * square_sum -
         0.25 * (row_a * row_a + row_b * row_b + row_c * row_c + row_d * row_d) +
         pair_sum * pair_sum / 6.0;
}

double variance_by_enumeration(const ResolvedKernel& kernel, const MatrixRef& x,
                               const MatrixRef& y) {
  if (x.cols() != y.cols()) {
    throw std::invalid_argument("variance_by_enumeration: column counts differ");
  }
  const Index total = x.rows() + y.rows();
  if (total < 4) {
    throw std::invalid_argument("variance_by_enumeration: needs at least four pooled rows");
  }
  // Pooled observations as columns, so each point binds as a plain vector.
  Matrix pooled(x.cols(), total);
  pooled.leftCols(x.rows()) = x.transpose();
  pooled.rightCols(y.rows()) = y.transpose();

  double sum = 0.0;
  for (Index a = 0; a < total; ++a) {
    for (Index b = a + 1; b < total; ++b) {
      for (Index c = b + 1; c < total; ++c) {
        for (Index d = c + 1; d < total; ++d) {
          sum += variance_tuple_term(kernel, pooled.col(a), pooled.col(b),
                                     pooled.col(c), pooled.col(d));
        }
      }
    }
  }
  const double td = static_cast<double>(total);
  const double subsets = td * (td - 1.0) * (td - 2.0) * (td - 3.0) / 24.0;
  return sum / subsets;
}

StudentizedStatistic studentized_statistic(const GramBundle& gram) {
  const MmdEstimate mmd = mmd_u_statistic(gram);
  const VarianceEstimate variance = pooled_variance(gram);
  const double coefficient = variance_coefficient(gram.n, gram.m);
  if (!(variance.value > 0.0)) {
    throw DegenerateVarianceError(variance.value);
  }
  const double value = mmd.value / std::sqrt(coefficient * variance.value);
  return {value, mmd, variance, coefficient};
}

}  // namespace mmd
